#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace lassobounds {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Sorted, duplicate-free set of 0-based coordinate indices.
/// External interfaces (JSON, CLI) use 1-based indices; conversion happens
/// at the serialization boundary.
class ActiveSet {
public:
    ActiveSet() = default;

    explicit ActiveSet(std::vector<int> indices) : idx_(std::move(indices)) {
        std::sort(idx_.begin(), idx_.end());
        idx_.erase(std::unique(idx_.begin(), idx_.end()), idx_.end());
        if (!idx_.empty() && idx_.front() < 0)
            throw std::invalid_argument("ActiveSet: negative index");
    }

    static ActiveSet from_one_based(const std::vector<int>& one_based) {
        std::vector<int> z;
        z.reserve(one_based.size());
        for (int i : one_based) z.push_back(i - 1);
        return ActiveSet(std::move(z));
    }

    const std::vector<int>& indices() const { return idx_; }
    int size() const { return static_cast<int>(idx_.size()); }
    bool empty() const { return idx_.empty(); }

    bool contains(int j) const {
        return std::binary_search(idx_.begin(), idx_.end(), j);
    }

    /// All indices in {0,...,p-1} not in this set.
    std::vector<int> complement(int p) const {
        std::vector<int> out;
        out.reserve(static_cast<size_t>(p) - idx_.size());
        for (int j = 0; j < p; ++j)
            if (!contains(j)) out.push_back(j);
        return out;
    }

    bool disjoint(const ActiveSet& other) const {
        for (int j : idx_)
            if (other.contains(j)) return false;
        return true;
    }

    auto begin() const { return idx_.begin(); }
    auto end() const { return idx_.end(); }

private:
    std::vector<int> idx_;
};

// ---------------------------------------------------------------------------
// Error taxonomy. The CLI maps these onto its exit-code contract.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Factorization failed even at the largest jitter level.
struct NotPsd : Error {
    using Error::Error;
};

/// Iterative solver hit its iteration cap; carries the best iterate seen.
struct NoConvergence : Error {
    NoConvergence(std::string msg, int iters, double resid, Vector best_iterate)
        : Error(std::move(msg)), iterations(iters), residual(resid),
          best(std::move(best_iterate)) {}
    int iterations = 0;
    double residual = 0.0;
    Vector best;
};

/// Sign enumeration would exceed the hard cap on |S|.
struct CapExceeded : Error {
    using Error::Error;
};

struct InfeasibleSpec : Error {
    using Error::Error;
};

/// A compatibility constant needed by a formula is (numerically) zero.
struct DegenerateKappa : Error {
    using Error::Error;
};

struct RankDeficient : Error {
    using Error::Error;
};

struct BetaminReport;  // defined in bounds.hpp

/// The betamin hypothesis does not hold for the supplied coefficients.
struct BetaminViolated : Error {
    explicit BetaminViolated(std::string msg, int coord = -1,
                             std::shared_ptr<const BetaminReport> rep = nullptr)
        : Error(std::move(msg)), coordinate(coord), report(std::move(rep)) {}
    int coordinate;  // 0-based offending coordinate, -1 if not applicable
    std::shared_ptr<const BetaminReport> report;
};

/// An experiment's hypothesis check failed; names the violated inequality.
struct HypothesisFailed : Error {
    HypothesisFailed(std::string msg, std::string cond)
        : Error(std::move(msg)), condition(std::move(cond)) {}
    std::string condition;
};

/// Interior jump distance is odd; the closed forms require even spacing.
struct OddDistance : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace lassobounds
