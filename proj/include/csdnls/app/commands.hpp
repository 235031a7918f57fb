#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "csdnls/app/config.hpp"

namespace csdnls::app {

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_numerical = 2, exit_verify_failed = 3 };

enum class Command { evolve, spectrum, verify };

const char* to_string(Command c);

// Each command writes its files into out_dir (created if needed) and returns
// an exit code. Progress and errors go to log.
int run_evolve(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int run_spectrum(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int run_verify(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

/// The document run_verify writes; a pure function of the configuration.
Json verify_report(const ExperimentConfig& cfg);

/// Spectrum document for u0.
Json spectrum_report(const ExperimentConfig& cfg);

struct BatchOptions {
    Command command = Command::evolve;
    std::vector<std::filesystem::path> configs;
    std::filesystem::path out_dir = "out";
    unsigned jobs = 1;
    std::optional<std::uint64_t> seed;
};

/// Load every config, then run them on up to `jobs` threads. One config
/// writes into out_dir; several write into out_dir/<file stem>. Returns the
/// largest exit code seen.
int run_batch(const BatchOptions& opts, std::ostream& log);

}  // namespace csdnls::app
