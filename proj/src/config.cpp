#include "beamsim/config.hpp"

#include <fstream>
#include <set>

#include "beamsim/errors.hpp"

namespace beamsim {

using nlohmann::json;

void PolicyConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("policy config: " + msg); };
    if (!(lambda >= 0.0 && lambda <= 1.0)) fail("lambda must lie in [0,1]");
    if (!(beta >= 0.0)) fail("beta must be >= 0");
    if (d_theta < 0) fail("d_theta must be >= 0");
    if (!(H_low < H_high)) fail("H_low must be < H_high");
    if (!(K_min >= 1 && K_min < K_mid && K_mid < K_max)) fail("need 1 <= K_min < K_mid < K_max");
    if (!(tau_gap >= 0.0 && tau_gap <= 1.0)) fail("tau_gap must lie in [0,1]");
    if (!(delta >= 0.0)) fail("delta must be >= 0");
    if (w < 0) fail("w must be >= 0");
    if (!(epsilon > 0.0)) fail("epsilon must be positive");
    if (!(alpha_hybrid >= 0.0 && alpha_hybrid <= 1.0)) fail("alpha_hybrid must lie in [0,1]");
    if (!(c_K >= 0.0) || !(c_out >= 0.0)) fail("penalty weights must be >= 0");
}

void TemperatureConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("temperature config: " + msg); };
    if (!(T_min > 0.0 && T_min <= T0 && T0 <= T_max)) fail("need 0 < T_min <= T0 <= T_max");
    if (!(alpha_temp >= 0.0)) fail("alpha_temp must be >= 0");
    if (!(gamma >= 0.0)) fail("gamma must be >= 0");
    if (!(s_min > 0.0 && s_min <= 1.0)) fail("s_min must lie in (0,1]");
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& section) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!ok.count(key))
            throw ConfigError("unknown key '" + key + "' in section '" + section + "'");
    }
}

namespace {

template <class T>
void read_field(const json& j, const char* key, T& out) {
    if (j.contains(key)) {
        try {
            out = j.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
        }
    }
}

}  // namespace

PolicyConfig policy_config_from_json(const json& j) {
    reject_unknown_keys(j,
                        {"lambda", "beta", "d_theta", "H_low", "H_high", "K_min", "K_mid", "K_max",
                         "tau_gap", "theta", "delta", "w", "epsilon", "alpha_hybrid", "c_K", "c_out"},
                        "policy");
    PolicyConfig c;
    read_field(j, "lambda", c.lambda);
    read_field(j, "beta", c.beta);
    read_field(j, "d_theta", c.d_theta);
    read_field(j, "H_low", c.H_low);
    read_field(j, "H_high", c.H_high);
    read_field(j, "K_min", c.K_min);
    read_field(j, "K_mid", c.K_mid);
    read_field(j, "K_max", c.K_max);
    read_field(j, "tau_gap", c.tau_gap);
    read_field(j, "theta", c.theta);
    read_field(j, "delta", c.delta);
    read_field(j, "w", c.w);
    read_field(j, "epsilon", c.epsilon);
    read_field(j, "alpha_hybrid", c.alpha_hybrid);
    read_field(j, "c_K", c.c_K);
    read_field(j, "c_out", c.c_out);
    c.validate();
    return c;
}

TemperatureConfig temperature_config_from_json(const json& j) {
    reject_unknown_keys(j, {"T0", "T_min", "T_max", "alpha_temp", "gamma", "s_min"}, "temperature");
    TemperatureConfig c;
    read_field(j, "T0", c.T0);
    read_field(j, "T_min", c.T_min);
    read_field(j, "T_max", c.T_max);
    read_field(j, "alpha_temp", c.alpha_temp);
    read_field(j, "gamma", c.gamma);
    read_field(j, "s_min", c.s_min);
    c.validate();
    return c;
}

json to_json(const PolicyConfig& c) {
    return json{{"lambda", c.lambda},   {"beta", c.beta},       {"d_theta", c.d_theta},
                {"H_low", c.H_low},     {"H_high", c.H_high},   {"K_min", c.K_min},
                {"K_mid", c.K_mid},     {"K_max", c.K_max},     {"tau_gap", c.tau_gap},
                {"theta", c.theta},     {"delta", c.delta},     {"w", c.w},
                {"epsilon", c.epsilon}, {"alpha_hybrid", c.alpha_hybrid},
                {"c_K", c.c_K},         {"c_out", c.c_out}};
}

json to_json(const TemperatureConfig& c) {
    return json{{"T0", c.T0},   {"T_min", c.T_min},           {"T_max", c.T_max},
                {"alpha_temp", c.alpha_temp}, {"gamma", c.gamma}, {"s_min", c.s_min}};
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be an object: " + path);
    reject_unknown_keys(j, {"policy", "temperature", "scene", "import", "training", "run"},
                        "(top level)");
    return j;
}

}  // namespace beamsim
