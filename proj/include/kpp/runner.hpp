#pragma once

#include "kpp/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace kpp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNonexistent = 2;  // the solver reports no solution: a result, not a failure

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double bound = 0.0;
    std::string detail;
};

/// Fast invariant checks: momentum identity (m = 2, 3), blow-up solution residuals,
/// blow-up correction magnitude, double-root loci and the erfc profile for m = 1.
std::vector<CheckResult> invariant_suite();

/// Executes a validated config, writing CSVs and manifest.json into out_dir. Module errors are
/// caught, recorded in the manifest and mapped to kExitError. Progress goes to `log`.
int run(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace kpp
