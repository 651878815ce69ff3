#include "kpp/plotdata.hpp"

#include "kpp/csv.hpp"
#include "kpp/model.hpp"

#include <fstream>
#include <sstream>

namespace kpp {

namespace fs = std::filesystem;

namespace {

CsvTable load(const fs::path& p, const std::vector<std::string>& header) {
    if (!fs::exists(p)) throw PlotDataError("missing input " + p.string());
    CsvTable t = read_csv(p.string());
    if (t.header != header) {
        std::string want;
        for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
        throw PlotDataError(p.string() + ": expected columns " + want);
    }
    return t;
}

fs::path write_script(const fs::path& dir, const std::string& body) {
    const fs::path p = dir / "plot.gp";
    std::ofstream out(p);
    if (!out) throw PlotDataError("cannot write " + p.string());
    out << "# gnuplot -p plot.gp\nset datafile separator ','\nset key autotitle columnhead\n" << body;
    return p;
}

std::string tag(double x) {
    std::string s = format_double(x);
    for (char& c : s)
        if (c == '-') c = 'm';
    return s;
}

}  // namespace

std::vector<fs::path> emit_profile_overlay(const fs::path& dir, const std::vector<ProfileInput>& inputs, double y_lo,
                                           double y_hi) {
    if (inputs.empty()) return {};
    if (!(y_lo < y_hi)) throw PlotDataError("overlay window is empty");
    std::vector<CsvTable> tables;
    for (const auto& in : inputs) tables.push_back(load(in.csv, {"y", "f"}));

    // common y column: the first profile's nodes inside the window
    const auto& y0 = tables.front().columns[0];
    std::vector<double> y;
    for (double v : y0)
        if (v >= y_lo && v <= y_hi) y.push_back(v);
    if (y.size() < 2) throw PlotDataError("first profile has no nodes in the overlay window");

    std::vector<std::vector<double>> cols;
    for (const auto& t : tables) {
        const auto& ty = t.columns[0];
        const Grid g{ty.front(), ty.back(), ty.size()};
        std::vector<double> c;
        c.reserve(y.size());
        for (double v : y) c.push_back(interpolate(g, t.columns[1], v));
        cols.push_back(std::move(c));
    }
    fs::create_directories(dir);
    std::vector<std::string> header{"y"};
    std::vector<const std::vector<double>*> ptrs{&y};
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        header.push_back(inputs[i].label);
        ptrs.push_back(&cols[i]);
    }
    const fs::path csv = dir / "profiles.csv";
    write_csv(csv.string(), header, ptrs);

    std::ostringstream gp;
    gp << "set xlabel 'y'\nset ylabel 'f'\nplot for [i=2:" << inputs.size() + 1
       << "] 'profiles.csv' using 1:i with lines\n";
    return {csv, write_script(dir, gp.str())};
}

std::vector<fs::path> emit_tail(const fs::path& dir, const fs::path& profile_csv,
                                const std::vector<std::pair<double, double>>& windows) {
    if (windows.empty()) return {};
    const CsvTable t = load(profile_csv, {"y", "f"});
    const auto& y = t.columns[0];
    const auto& f = t.columns[1];
    fs::create_directories(dir);
    std::vector<fs::path> out;
    std::ostringstream gp;
    gp << "set xlabel 'y'\nset ylabel 'f'\nset multiplot layout " << windows.size() << ",1\n";
    for (const auto& [a, b] : windows) {
        if (!(a < b)) throw PlotDataError("tail window is empty");
        if (y.empty() || y.back() < b) throw PlotDataError(profile_csv.string() + " does not reach y = " + format_double(b));
        std::vector<double> wy, wf;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] > a && y[i] < b) {
                wy.push_back(y[i]);
                wf.push_back(f[i]);
            }
        const std::string name = "tail_" + tag(a) + "_" + tag(b) + ".csv";
        write_csv((dir / name).string(), {"y", "f"}, {&wy, &wf});
        out.push_back(dir / name);
        gp << "plot '" << name << "' using 1:2 with lines\n";
    }
    gp << "unset multiplot\n";
    out.push_back(write_script(dir, gp.str()));
    return out;
}

std::vector<fs::path> emit_front_history(const fs::path& dir, const fs::path& history_csv, double lambda0) {
    const CsvTable t = load(history_csv, {"t", "xf"});
    const auto& tt = t.columns[0];
    const auto& xf = t.columns[1];
    if (tt.empty()) return {};
    std::vector<double> lag(tt.size());
    for (std::size_t i = 0; i < tt.size(); ++i) lag[i] = lambda0 * tt[i] - xf[i];
    fs::create_directories(dir);
    const fs::path csv = dir / "front.csv";
    write_csv(csv.string(), {"t", "xf", "lag"}, {&tt, &xf, &lag},
              {"lag = " + format_double(lambda0) + " t - xf"});
    const std::string gp =
        "set multiplot layout 2,1\nset xlabel 't'\nplot 'front.csv' using 1:2 with lines\n"
        "set logscale x\nplot 'front.csv' using 1:3 with lines\nunset multiplot\n";
    return {csv, write_script(dir, gp)};
}

std::vector<fs::path> emit_kscan(const fs::path& dir, const fs::path& kscan_csv) {
    const CsvTable t = load(kscan_csv, {"k", "residual"});
    if (t.columns[0].empty()) return {};
    fs::create_directories(dir);
    const fs::path csv = dir / "kscan.csv";
    write_csv(csv.string(), t.header, {&t.columns[0], &t.columns[1]});
    return {csv, write_script(dir, "set xlabel 'k'\nset logscale y\nplot 'kscan.csv' using 1:2 with linespoints\n")};
}

}  // namespace kpp
