#pragma once

#include <string>

#include <json.hpp>

namespace beamsim {

// Scheduler and lock-rule parameters. Field names match the config file keys
// one for one ("policy" section).
struct PolicyConfig {
    double lambda = 0.5;       // prior weight in the probe score, [0,1]
    double beta = 0.3;         // uncertainty bonus weight, >= 0
    int d_theta = 1;           // min circular separation inside a probe set
    double H_low = 0.8;        // nats; at or below -> K_min
    double H_high = 2.0;       // nats; at or above -> K_max
    int K_min = 1;
    int K_mid = 2;
    int K_max = 4;
    double tau_gap = 0.15;     // near-tie mass gap; 0 disables the bump
    double theta = 0.0;        // outage threshold, dB
    double delta = 3.0;        // safety margin, dB
    int w = 2;                 // shield neighborhood half-width
    double epsilon = 1e-12;
    double alpha_hybrid = 0.7; // IQ weight in the hybrid training target
    double c_K = 0.1;          // per-probe penalty in the offline objective
    double c_out = 5.0;        // outage penalty in the offline objective

    void validate() const;
};

// Effective-temperature rule for prior calibration ("temperature" section).
struct TemperatureConfig {
    double T0 = 1.0;
    double T_min = 0.5;
    double T_max = 3.0;
    double alpha_temp = 0.5;  // sharpness exponent
    double gamma = 0.5;       // uncertainty gain
    double s_min = 0.1;       // sharpness reference, (0,1]

    void validate() const;
};

PolicyConfig policy_config_from_json(const nlohmann::json& j);
TemperatureConfig temperature_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PolicyConfig& c);
nlohmann::json to_json(const TemperatureConfig& c);

// Throws ConfigError when `j` contains a key outside `allowed`.
void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const std::string& section);

// Reads a config file and returns the parsed document. Top-level sections are
// checked against the known set; each section checks its own keys.
nlohmann::json load_config_file(const std::string& path);

}  // namespace beamsim
