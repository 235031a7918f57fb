#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "csdnls/hardy.hpp"
#include "csdnls/lax.hpp"
#include "csdnls/propagator.hpp"

namespace csdnls::app {

using Json = nlohmann::ordered_json;

/// Invalid or incomplete configuration. field() is the dotted path of the culprit.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

enum class InitialKind { rational, coeffs, single_mode };

struct InitialSpec {
    InitialKind kind = InitialKind::rational;
    std::complex<double> q{0.0};
    std::complex<double> c{1.0};
    std::vector<std::complex<double>> coeffs;
    Index mode = 0;
    std::complex<double> amplitude{0.0};
};

struct TimeSpec {
    double t_final = 1.0;
    double dt = 1e-4;
    int samples = 11;  // equally spaced, both ends included
};

struct DiagnosticsSpec {
    std::vector<double> H_s{0.5, 1.0, 2.0};
    Index n_track = 0;  // 0: N/8
    bool birkhoff = true;
    bool identity_checks = true;
};

struct VerifySpec {
    int random_states = 100;
    int sharp_pairs = 1000;
    int lipschitz_directions = 3;
    double lax_time = 0.1;
    double lax_dt = 1e-4;
};

struct ExperimentConfig {
    EquationSign sign = EquationSign::focusing;
    Index N = 32;
    InitialSpec initial;
    TimeSpec time;
    Method method = Method::both;
    DiagnosticsSpec diagnostics;
    VerifySpec verify;
    std::optional<double> lambda_shift;  // empty: auto
    std::uint64_t seed = 0;
    bool dealias = true;
    bool spectrum_eigenvectors = false;
    bool corrupt_b_sign = false;  // negative-control hook

    HardyStated initial_state() const;
    std::vector<double> sample_times() const;
    double resolved_lambda_shift() const;
    FlowConfig flow_config() const;
};

ExperimentConfig parse_config(const Json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully resolved configuration (defaults filled in, "auto" replaced).
Json to_json(const ExperimentConfig& cfg);

}  // namespace csdnls::app
