#include "lassobounds/serialize.hpp"

#include "lassobounds/core.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lassobounds {

JsonValue JsonValue::array_of(const Vector& values) {
    JsonValue v = array();
    for (int i = 0; i < values.size(); ++i) v.push(values(i));
    return v;
}

JsonValue JsonValue::array_of(const std::vector<int>& values) {
    JsonValue v = array();
    for (int x : values) v.push(x);
    return v;
}

JsonValue& JsonValue::set(const std::string& key, JsonValue value) {
    if (type_ != Type::object) throw Error("JsonValue::set on non-object");
    for (auto& [k, v] : obj_)
        if (k == key) {
            v = std::move(value);
            return *this;
        }
    obj_.emplace_back(key, std::move(value));
    return *this;
}

JsonValue& JsonValue::push(JsonValue value) {
    if (type_ != Type::array) throw Error("JsonValue::push on non-array");
    arr_.push_back(std::move(value));
    return *this;
}

namespace {

void append_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    out += '"';
}

}  // namespace

void JsonValue::dump_impl(std::string& out, int indent, int depth) const {
    const std::string pad(static_cast<size_t>(indent) * (static_cast<size_t>(depth) + 1), ' ');
    const std::string close_pad(static_cast<size_t>(indent) * static_cast<size_t>(depth), ' ');
    switch (type_) {
        case Type::null: out += "null"; break;
        case Type::boolean: out += bool_ ? "true" : "false"; break;
        case Type::number: {
            if (std::isfinite(num_)) out += format_double(num_);
            else out += "null";
            break;
        }
        case Type::string: append_escaped(out, str_); break;
        case Type::array: {
            if (arr_.empty()) { out += "[]"; break; }
            out += "[";
            for (size_t i = 0; i < arr_.size(); ++i) {
                out += i ? "," : "";
                out += "\n" + pad;
                arr_[i].dump_impl(out, indent, depth + 1);
            }
            out += "\n" + close_pad + "]";
            break;
        }
        case Type::object: {
            if (obj_.empty()) { out += "{}"; break; }
            out += "{";
            for (size_t i = 0; i < obj_.size(); ++i) {
                out += i ? "," : "";
                out += "\n" + pad;
                append_escaped(out, obj_[i].first);
                out += ": ";
                obj_[i].second.dump_impl(out, indent, depth + 1);
            }
            out += "\n" + close_pad + "}";
            break;
        }
    }
}

std::string JsonValue::dump(int indent) const {
    std::string out;
    dump_impl(out, indent, 0);
    out += "\n";
    return out;
}

JsonValue to_json(const LassoSolution& sol, int n, int p, double lambda) {
    JsonValue v = JsonValue::object();
    v.set("n", n);
    v.set("p", p);
    v.set("lambda", lambda);
    v.set("beta", JsonValue::array_of(sol.beta));
    v.set("zeta", JsonValue::array_of(sol.zeta));
    v.set("kkt_residual", sol.kkt_residual);
    v.set("objective", sol.objective);
    JsonValue supp = JsonValue::array();
    for (int j : sol.support) supp.push(j + 1);
    v.set("support", std::move(supp));
    return v;
}

JsonValue to_json(const CompatResult& res) {
    JsonValue v = JsonValue::object();
    v.set("value", res.value);
    v.set("signs", JsonValue::array_of(res.signs));
    v.set("minimizer", JsonValue::array_of(res.minimizer));
    v.set("certificate_gap", res.certificate_gap);
    v.set("subproblem_count", res.subproblem_count);
    return v;
}

JsonValue to_json(const BetaminReport& rep) {
    JsonValue v = JsonValue::object();
    JsonValue s0 = JsonValue::array();
    for (int j : rep.S0) s0.push(j + 1);
    v.set("S0", std::move(s0));
    JsonValue thr = JsonValue::object();
    for (const auto& [j, t] : rep.thresholds) thr.set(std::to_string(j + 1), t);
    v.set("thresholds", std::move(thr));
    JsonValue sg = JsonValue::object();
    for (const auto& [j, s] : rep.signs) sg.set(std::to_string(j + 1), s);
    v.set("signs", std::move(sg));
    v.set("satisfied", rep.satisfied);
    v.set("signs_match", rep.signs_match);
    v.set("margin", rep.margin);
    v.set("kappa_sq", rep.kappa_sq);
    return v;
}

JsonValue to_json(const ProjectionDiag& pd) {
    JsonValue v = JsonValue::object();
    JsonValue s = JsonValue::array();
    for (int j : pd.S) s.push(j + 1);
    v.set("S", std::move(s));
    JsonValue vsq = JsonValue::object();
    for (const auto& [j, val] : pd.v_sq) vsq.set(std::to_string(j + 1), val);
    v.set("v_sq", std::move(vsq));
    JsonValue usq = JsonValue::object();
    for (const auto& [j, val] : pd.u_sq) usq.set(std::to_string(j + 1), val);
    v.set("u_sq", std::move(usq));
    v.set("rank_ok", pd.rank_ok);
    return v;
}

JsonValue to_json(const NoiselessIdentity& id, double lambda_star) {
    JsonValue v = JsonValue::object();
    v.set("lhs", id.lhs);
    v.set("rhs", id.rhs);
    v.set("rel_err", id.rel_err);
    v.set("s0", id.s0);
    v.set("kappa_sq", id.kappa_sq);
    v.set("lambda_star", lambda_star);
    return v;
}

JsonValue to_json(const BoundReport& rep) {
    JsonValue v = JsonValue::object();
    v.set("label", rep.label);
    v.set("formula", rep.formula);
    v.set("coverage", rep.coverage);
    v.set("nominal", rep.nominal);
    v.set("slack", rep.slack);
    if (rep.regime_ok) v.set("pass", rep.pass);
    else v.set("pass", JsonValue());  // outside the asymptotic regime
    v.set("regime_ok", rep.regime_ok);
    v.set("replicates", static_cast<long>(rep.trials.size()));
    JsonValue det = JsonValue::object();
    for (const auto& [k, val] : rep.details) det.set(k, val);
    v.set("details", std::move(det));
    return v;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + tmp);
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

void write_trials_csv(const std::string& path,
                      const std::vector<TrialRecord>& trials) {
    std::ostringstream out;
    out << "replicate,measured,bound,held,lambda,kappa,U\n";
    for (const TrialRecord& t : trials) {
        out << t.replicate << ',' << format_double(t.measured) << ','
            << format_double(t.bound) << ',' << (t.held ? 1 : 0) << ','
            << format_double(t.lambda) << ',' << format_double(t.kappa_sq)
            << ',' << format_double(t.U) << '\n';
    }
    write_text_atomic(path, out.str());
}

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

bool ConfigValue::as_bool() const {
    if (auto* b = std::get_if<bool>(&v)) return *b;
    throw ConfigError("config value is not a boolean");
}

double ConfigValue::as_double() const {
    if (auto* d = std::get_if<double>(&v)) return *d;
    throw ConfigError("config value is not a number");
}

long ConfigValue::as_long() const {
    const double d = as_double();
    return static_cast<long>(d);
}

std::string ConfigValue::as_string() const {
    if (auto* s = std::get_if<std::string>(&v)) return *s;
    throw ConfigError("config value is not a string");
}

std::vector<double> ConfigValue::as_doubles() const {
    if (auto* a = std::get_if<std::vector<double>>(&v)) return *a;
    if (auto* d = std::get_if<double>(&v)) return {*d};
    throw ConfigError("config value is not a numeric array");
}

const ConfigValue& FlatConfig::at(const std::string& key) const {
    auto it = map_.find(key);
    if (it == map_.end()) throw ConfigError("missing config key: " + key);
    return it->second;
}

double FlatConfig::get_double(const std::string& key, double fallback) const {
    return has(key) ? at(key).as_double() : fallback;
}

long FlatConfig::get_long(const std::string& key, long fallback) const {
    return has(key) ? at(key).as_long() : fallback;
}

std::string FlatConfig::get_string(const std::string& key,
                                   const std::string& fallback) const {
    return has(key) ? at(key).as_string() : fallback;
}

std::vector<double> FlatConfig::get_doubles(const std::string& key) const {
    return has(key) ? at(key).as_doubles() : std::vector<double>();
}

namespace {

std::string strip(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// removes a trailing comment that is not inside a string literal
std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

ConfigValue parse_scalar(const std::string& tok, const std::string& where) {
    if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"')
        return ConfigValue{tok.substr(1, tok.size() - 2)};
    if (tok == "true") return ConfigValue{true};
    if (tok == "false") return ConfigValue{false};
    try {
        size_t pos = 0;
        const double d = std::stod(tok, &pos);
        if (pos == tok.size()) return ConfigValue{d};
    } catch (const std::exception&) {
    }
    throw ConfigError(where + ": cannot parse value '" + tok + "'");
}

}  // namespace

FlatConfig parse_toml_string(const std::string& text, const std::string& origin) {
    FlatConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno);
        line = strip(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": unterminated section");
            section = strip(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(where + ": empty section name");
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected key = value");
        std::string key = strip(line.substr(0, eq));
        std::string val = strip(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        if (!section.empty()) key = section + "." + key;

        if (!val.empty() && val.front() == '[') {
            if (val.back() != ']') throw ConfigError(where + ": unterminated array");
            std::string body = val.substr(1, val.size() - 2);
            std::vector<double> nums;
            std::vector<std::string> strs;
            bool is_string = false;
            std::string tok;
            std::istringstream bs(body);
            while (std::getline(bs, tok, ',')) {
                tok = strip(tok);
                if (tok.empty()) continue;
                ConfigValue cv = parse_scalar(tok, where);
                if (auto* s = std::get_if<std::string>(&cv.v)) {
                    is_string = true;
                    strs.push_back(*s);
                } else {
                    nums.push_back(cv.as_double());
                }
            }
            if (is_string) cfg.set(key, ConfigValue{strs});
            else cfg.set(key, ConfigValue{nums});
        } else {
            cfg.set(key, parse_scalar(val, where));
        }
    }
    return cfg;
}

namespace {

void flatten_json(const nlohmann::json& j, const std::string& prefix,
                  FlatConfig& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
            flatten_json(it.value(), key, out);
        }
    } else if (j.is_array()) {
        std::vector<double> nums;
        std::vector<std::string> strs;
        bool is_string = false;
        for (const auto& el : j) {
            if (el.is_string()) {
                is_string = true;
                strs.push_back(el.get<std::string>());
            } else if (el.is_number()) {
                nums.push_back(el.get<double>());
            } else {
                throw ConfigError("config array elements must be numbers or strings");
            }
        }
        if (is_string) out.set(prefix, ConfigValue{strs});
        else out.set(prefix, ConfigValue{nums});
    } else if (j.is_boolean()) {
        out.set(prefix, ConfigValue{j.get<bool>()});
    } else if (j.is_number()) {
        out.set(prefix, ConfigValue{j.get<double>()});
    } else if (j.is_string()) {
        out.set(prefix, ConfigValue{j.get<std::string>()});
    } else {
        throw ConfigError("unsupported config value at " + prefix);
    }
}

}  // namespace

FlatConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    const bool looks_json = path.size() > 5 && path.substr(path.size() - 5) == ".json";
    if (!looks_json) {
        try {
            return parse_toml_string(text, path);
        } catch (const ConfigError&) {
            // fall through to JSON
        }
    }
    try {
        nlohmann::json j = nlohmann::json::parse(text);
        FlatConfig cfg;
        flatten_json(j, "", cfg);
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": not valid TOML or JSON: " + e.what());
    }
}

}  // namespace lassobounds
