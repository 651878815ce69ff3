#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kpp {

class PlotDataError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProfileInput {
    std::filesystem::path csv;  // y,f
    std::string label;
};

/// Each emitter reads result CSVs written by the other commands, writes its bundle into `dir`
/// (created if needed) together with plot.gp, and returns the written files. Missing inputs
/// throw PlotDataError; an empty input list writes nothing and returns an empty list.

/// Profiles overlaid on one y column over [y_lo, y_hi]: profiles.csv with y,<label>...
std::vector<std::filesystem::path> emit_profile_overlay(const std::filesystem::path& dir,
                                                        const std::vector<ProfileInput>& inputs,
                                                        double y_lo = -20.0, double y_hi = 40.0);

/// f - 0 on each window: tail_<a>_<b>.csv with y,f.
std::vector<std::filesystem::path> emit_tail(const std::filesystem::path& dir, const std::filesystem::path& profile_csv,
                                             const std::vector<std::pair<double, double>>& windows);

/// Front history t,xf plus the lag lambda0 t - xf: front.csv with t,xf,lag.
std::vector<std::filesystem::path> emit_front_history(const std::filesystem::path& dir,
                                                      const std::filesystem::path& history_csv, double lambda0);

/// Second-order residual against k: kscan.csv with k,residual.
std::vector<std::filesystem::path> emit_kscan(const std::filesystem::path& dir, const std::filesystem::path& kscan_csv);

}  // namespace kpp
