#pragma once

#include "lassobounds/bounds.hpp"
#include "lassobounds/compat.hpp"
#include "lassobounds/lasso.hpp"
#include "lassobounds/projections.hpp"
#include "lassobounds/types.hpp"

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace lassobounds {

/// Order-preserving JSON value with %.17g doubles, so identical inputs always
/// produce byte-identical files.
class JsonValue {
public:
    enum class Type { null, boolean, number, string, array, object };

    JsonValue() : type_(Type::null) {}
    JsonValue(bool b) : type_(Type::boolean), bool_(b) {}
    JsonValue(double v) : type_(Type::number), num_(v) {}
    JsonValue(int v) : type_(Type::number), num_(v) {}
    JsonValue(long v) : type_(Type::number), num_(static_cast<double>(v)) {}
    JsonValue(const char* s) : type_(Type::string), str_(s) {}
    JsonValue(std::string s) : type_(Type::string), str_(std::move(s)) {}

    static JsonValue object() { JsonValue v; v.type_ = Type::object; return v; }
    static JsonValue array() { JsonValue v; v.type_ = Type::array; return v; }
    static JsonValue array_of(const Vector& values);
    static JsonValue array_of(const std::vector<int>& values);

    JsonValue& set(const std::string& key, JsonValue value);
    JsonValue& push(JsonValue value);
    std::string dump(int indent = 2) const;

private:
    void dump_impl(std::string& out, int indent, int depth) const;

    Type type_;
    bool bool_ = false;
    double num_ = 0.0;
    std::string str_;
    std::vector<JsonValue> arr_;
    std::vector<std::pair<std::string, JsonValue>> obj_;
};

JsonValue to_json(const LassoSolution& sol, int n, int p, double lambda);
JsonValue to_json(const CompatResult& res);
JsonValue to_json(const BetaminReport& rep);
JsonValue to_json(const ProjectionDiag& pd);
JsonValue to_json(const NoiselessIdentity& id, double lambda_star);
JsonValue to_json(const BoundReport& rep);

void write_text_atomic(const std::string& path, const std::string& content);
void write_trials_csv(const std::string& path,
                      const std::vector<TrialRecord>& trials);

// ---------------------------------------------------------------------------
// Config files: a flat TOML subset (sections, scalars, arrays) with JSON
// fallback. Nested keys flatten to dotted paths.
// ---------------------------------------------------------------------------

struct ConfigValue {
    std::variant<bool, double, std::string, std::vector<double>,
                 std::vector<std::string>>
        v;

    bool as_bool() const;
    double as_double() const;
    long as_long() const;
    std::string as_string() const;
    std::vector<double> as_doubles() const;
};

class FlatConfig {
public:
    void set(const std::string& key, ConfigValue value) { map_[key] = std::move(value); }
    bool has(const std::string& key) const { return map_.count(key) > 0; }
    const ConfigValue& at(const std::string& key) const;

    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key, long fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::vector<double> get_doubles(const std::string& key) const;

    const std::map<std::string, ConfigValue>& entries() const { return map_; }

private:
    std::map<std::string, ConfigValue> map_;
};

FlatConfig parse_toml_string(const std::string& text, const std::string& origin);
FlatConfig parse_config_file(const std::string& path);

}  // namespace lassobounds
