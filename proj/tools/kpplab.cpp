#include "kpp/config.hpp"
#include "kpp/runner.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

const char* kUsage = R"(kpplab: travelling waves and fronts of u_t = (-1)^{m+1} D^{2m} u + u(1-u)

commands
  roots      characteristic roots and bundle dimensions      m, lambda
  tw         one travelling-wave profile                     m, lambda [continue_from, center, ks]
  scan-max   bracket the largest lambda with a valid profile  m [lo=0.5, hi=4.0, width_tol]
  sweep      profiles over a lambda list or a:step:b range    m, lambdas [continuation]
  evolve     Cauchy problem from step data                    m, t_final [dx, dt_max, snapshots, lyapunov]
  fit-shift  fit xf = lambda0 t - k log t - c                 history [t0, t1]
  verify     invariant suite, optionally re-digest a manifest [manifest]

Settings come from --config, then key=value arguments (bare or section.key).
Exit codes: 0 success, 2 no solution reported (nonexistence, blow-up, scan bracket), 1 error.
The output directory is --out, else $KPPLAB_OUT, else the config's out key, else ./kpplab_out.)";

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{kUsage, "kpplab"};
    std::string command, config_path, out;
    std::vector<std::string> settings;
    unsigned jobs = 0;
    std::uint64_t seed = 0;
    app.add_option("command", command, "roots | tw | scan-max | sweep | evolve | fit-shift | verify")->required();
    app.add_option("settings", settings, "key=value overrides");
    app.add_option("--config", config_path, "key=value configuration file");
    app.add_option("--out", out, "output directory");
    auto* jobs_opt = app.add_option("--jobs", jobs, "worker threads for sweep")->check(CLI::Range(1u, 1024u));
    auto* seed_opt = app.add_option("--seed", seed, "seed for perturbed restarts");
    CLI11_PARSE(app, argc, argv);

    kpp::RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = kpp::parse_config(slurp(config_path));
        const auto cmd = kpp::parse_command(command);
        if (!cmd) throw kpp::ConfigError("unknown command '" + command + "'", 0, 0, "command");
        kpp::apply_setting(cfg, "command", command);
        for (std::size_t i = 0; i < settings.size(); ++i) {
            const auto eq = settings[i].find('=');
            if (eq == std::string::npos)
                throw kpp::ConfigError("argument " + std::to_string(i + 1) + " '" + settings[i] + "' is not key=value", 0, 0);
            kpp::apply_setting(cfg, settings[i].substr(0, eq), settings[i].substr(eq + 1));
        }
        if (*jobs_opt) kpp::apply_setting(cfg, "jobs", std::to_string(jobs));
        if (*seed_opt) kpp::apply_setting(cfg, "seed", std::to_string(seed));
        kpp::validate_config(cfg);
    } catch (const std::exception& e) {
        std::cerr << "kpplab: " << e.what() << "\n";
        return kpp::kExitError;
    }

    std::string dir = "kpplab_out";
    if (!out.empty())
        dir = out;
    else if (const char* env = std::getenv("KPPLAB_OUT"); env && *env)
        dir = env;
    else if (cfg.out)
        dir = *cfg.out;

    const int code = kpp::run(cfg, dir, std::cout);
    std::cout << "manifest: " << dir << "/manifest.json (exit " << code << ")\n";
    return code;
}
