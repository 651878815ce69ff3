#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kpp {

enum class Command { roots, tw, scan_max, sweep, evolve, fit_shift, verify };

const char* to_string(Command c);
std::optional<Command> parse_command(const std::string& s);

/// Parsed experiment description. Every key lives in exactly one section; `values` keeps the
/// canonical text of each key that was set, in section.key form, for the manifest echo.
struct RunConfig {
    Command command = Command::verify;

    // [run]
    std::optional<std::string> out;
    unsigned jobs = 1;
    std::uint64_t seed = 0;
    std::string plot = "none";  // none | f0 | f2 | front | kscan

    // [model]
    std::optional<int> m;
    std::optional<double> lambda;
    std::vector<double> lambdas;
    bool lambdas_set = false;

    // [grid]
    std::optional<double> left;
    std::optional<double> right;
    std::optional<double> h;

    // [solver]
    std::optional<double> newton_tol;
    std::optional<int> max_iter;
    double perturbation = 0.0;
    std::optional<double> continue_from;  // tw: reach lambda by continuation from here
    double continue_step = 0.05;
    bool continuation = false;            // sweep: one sequential branch instead of independent solves
    double oscillation_threshold = 1e-6;

    // [scan]
    double lo = 0.5;
    double hi = 4.0;
    double width_tol = 1e-3;

    // [evolve]
    std::optional<double> t_final;
    double dx = 0.05;
    double dt_max = 0.05;
    double dt_min = 1e-10;
    double error_tol = 1e-4;
    double behind = 150.0;
    double ahead = 450.0;
    std::string initial = "heaviside";  // heaviside | smoothed
    double width = 1.0;
    double output_interval = 1.0;
    std::vector<double> snapshots;
    bool lyapunov = false;

    // [fit]
    std::optional<std::string> history;
    std::optional<double> t0;
    std::optional<double> t1;

    // [linearized]
    bool center = false;
    std::vector<double> ks;

    // [verify]
    std::optional<std::string> manifest;

    std::map<std::string, std::string> values;
    std::vector<std::string> warnings;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, std::size_t line, std::size_t column, std::string key = {});
    std::size_t line;    // 1-based; 0 when the error is not tied to a position
    std::size_t column;  // 1-based
    std::string key;
};

/// `a:step:b` (inclusive of b up to rounding) or a comma list. A range whose step points
/// away from b is empty.
std::vector<double> parse_list(const std::string& text);

/// Applies one key=value assignment. `key` may be bare or section-qualified.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value, std::size_t line = 0,
                   std::size_t value_column = 0);

/// Flat key=value text with optional [section] headers; '#' starts a comment. Keys before the
/// first header may come from any section. Does not validate; see validate_config.
RunConfig parse_config(const std::string& text);

/// Per-command checks. Missing or out-of-range keys throw ConfigError naming the key;
/// questionable but runnable values append to cfg.warnings.
void validate_config(RunConfig& cfg);

/// Canonical key=value text of the settings in `cfg.values`, grouped by section.
std::string echo_config(const RunConfig& cfg);

}  // namespace kpp
