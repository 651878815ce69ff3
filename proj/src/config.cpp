#include "kpp/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

namespace kpp {

namespace {

struct ValueError {
    std::string what;
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& s) {
    double v = 0;
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end || s.empty()) throw ValueError{"malformed number '" + s + "'"};
    if (!std::isfinite(v)) throw ValueError{"non-finite number '" + s + "'"};
    return v;
}

long long to_integer(const std::string& s) {
    long long v = 0;
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end || s.empty()) throw ValueError{"malformed integer '" + s + "'"};
    return v;
}

bool to_bool(const std::string& s) {
    if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
    if (s == "false" || s == "no" || s == "0" || s == "off") return false;
    throw ValueError{"malformed boolean '" + s + "'"};
}

std::string one_of(const std::string& s, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
        if (s == a) return s;
    std::string msg = "expected one of";
    for (const char* a : allowed) msg += std::string(" ") + a;
    throw ValueError{msg + ", got '" + s + "'"};
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

struct KeyInfo {
    const char* section;
    Setter set;
};

const std::map<std::string, KeyInfo>& key_table() {
    static const std::map<std::string, KeyInfo> t = {
        {"command", {"run", [](RunConfig& c, const std::string& v) {
             const auto cmd = parse_command(v);
             if (!cmd) throw ValueError{"unknown command '" + v + "'"};
             c.command = *cmd;
         }}},
        {"out", {"run", [](RunConfig& c, const std::string& v) { c.out = v; }}},
        {"jobs", {"run", [](RunConfig& c, const std::string& v) {
             const auto j = to_integer(v);
             if (j < 1 || j > 1024) throw ValueError{"jobs must be in [1, 1024]"};
             c.jobs = static_cast<unsigned>(j);
         }}},
        {"seed", {"run", [](RunConfig& c, const std::string& v) {
             std::uint64_t s = 0;
             const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
             if (ec != std::errc() || p != v.data() + v.size() || v.empty())
                 throw ValueError{"malformed unsigned integer '" + v + "'"};
             c.seed = s;
         }}},
        {"plot", {"run", [](RunConfig& c, const std::string& v) { c.plot = one_of(v, {"none", "f0", "f2", "front", "kscan"}); }}},

        {"m", {"model", [](RunConfig& c, const std::string& v) { c.m = static_cast<int>(to_integer(v)); }}},
        {"lambda", {"model", [](RunConfig& c, const std::string& v) { c.lambda = to_double(v); }}},
        {"lambdas", {"model", [](RunConfig& c, const std::string& v) {
             c.lambdas = parse_list(v);
             c.lambdas_set = true;
         }}},

        {"left", {"grid", [](RunConfig& c, const std::string& v) { c.left = to_double(v); }}},
        {"right", {"grid", [](RunConfig& c, const std::string& v) { c.right = to_double(v); }}},
        {"h", {"grid", [](RunConfig& c, const std::string& v) { c.h = to_double(v); }}},

        {"newton_tol", {"solver", [](RunConfig& c, const std::string& v) { c.newton_tol = to_double(v); }}},
        {"max_iter", {"solver", [](RunConfig& c, const std::string& v) { c.max_iter = static_cast<int>(to_integer(v)); }}},
        {"perturbation", {"solver", [](RunConfig& c, const std::string& v) { c.perturbation = to_double(v); }}},
        {"continue_from", {"solver", [](RunConfig& c, const std::string& v) { c.continue_from = to_double(v); }}},
        {"continue_step", {"solver", [](RunConfig& c, const std::string& v) { c.continue_step = to_double(v); }}},
        {"continuation", {"solver", [](RunConfig& c, const std::string& v) { c.continuation = to_bool(v); }}},
        {"oscillation_threshold", {"solver", [](RunConfig& c, const std::string& v) { c.oscillation_threshold = to_double(v); }}},

        {"lo", {"scan", [](RunConfig& c, const std::string& v) { c.lo = to_double(v); }}},
        {"hi", {"scan", [](RunConfig& c, const std::string& v) { c.hi = to_double(v); }}},
        {"width_tol", {"scan", [](RunConfig& c, const std::string& v) { c.width_tol = to_double(v); }}},

        {"t_final", {"evolve", [](RunConfig& c, const std::string& v) { c.t_final = to_double(v); }}},
        {"dx", {"evolve", [](RunConfig& c, const std::string& v) { c.dx = to_double(v); }}},
        {"dt_max", {"evolve", [](RunConfig& c, const std::string& v) { c.dt_max = to_double(v); }}},
        {"dt_min", {"evolve", [](RunConfig& c, const std::string& v) { c.dt_min = to_double(v); }}},
        {"error_tol", {"evolve", [](RunConfig& c, const std::string& v) { c.error_tol = to_double(v); }}},
        {"behind", {"evolve", [](RunConfig& c, const std::string& v) { c.behind = to_double(v); }}},
        {"ahead", {"evolve", [](RunConfig& c, const std::string& v) { c.ahead = to_double(v); }}},
        {"initial", {"evolve", [](RunConfig& c, const std::string& v) { c.initial = one_of(v, {"heaviside", "smoothed"}); }}},
        {"width", {"evolve", [](RunConfig& c, const std::string& v) { c.width = to_double(v); }}},
        {"output_interval", {"evolve", [](RunConfig& c, const std::string& v) { c.output_interval = to_double(v); }}},
        {"snapshots", {"evolve", [](RunConfig& c, const std::string& v) { c.snapshots = parse_list(v); }}},
        {"lyapunov", {"evolve", [](RunConfig& c, const std::string& v) { c.lyapunov = to_bool(v); }}},

        {"history", {"fit", [](RunConfig& c, const std::string& v) { c.history = v; }}},
        {"t0", {"fit", [](RunConfig& c, const std::string& v) { c.t0 = to_double(v); }}},
        {"t1", {"fit", [](RunConfig& c, const std::string& v) { c.t1 = to_double(v); }}},

        {"center", {"linearized", [](RunConfig& c, const std::string& v) { c.center = to_bool(v); }}},
        {"ks", {"linearized", [](RunConfig& c, const std::string& v) { c.ks = parse_list(v); }}},

        {"manifest", {"verify", [](RunConfig& c, const std::string& v) { c.manifest = v; }}},
    };
    return t;
}

const char* section_order[] = {"run", "model", "grid", "solver", "scan", "evolve", "fit", "linearized", "verify"};

bool known_section(const std::string& s) {
    return std::find_if(std::begin(section_order), std::end(section_order),
                        [&](const char* x) { return s == x; }) != std::end(section_order);
}

// 0.1 + 2 * 0.1 prints as 0.30000000000000004; keep 12 significant digits
double tidy(double x) {
    if (x == 0) return 0;
    const double mag = std::pow(10.0, 11 - static_cast<int>(std::floor(std::log10(std::abs(x)))));
    return std::round(x * mag) / mag;
}

}  // namespace

const char* to_string(Command c) {
    switch (c) {
        case Command::roots: return "roots";
        case Command::tw: return "tw";
        case Command::scan_max: return "scan-max";
        case Command::sweep: return "sweep";
        case Command::evolve: return "evolve";
        case Command::fit_shift: return "fit-shift";
        case Command::verify: return "verify";
    }
    return "?";
}

std::optional<Command> parse_command(const std::string& s) {
    for (auto c : {Command::roots, Command::tw, Command::scan_max, Command::sweep, Command::evolve, Command::fit_shift,
                   Command::verify})
        if (s == to_string(c)) return c;
    return std::nullopt;
}

ConfigError::ConfigError(const std::string& what, std::size_t l, std::size_t c, std::string k)
    : std::runtime_error(l > 0 ? "line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + what : what),
      line(l), column(c), key(std::move(k)) {}

std::vector<double> parse_list(const std::string& text) {
    const std::string s = trim(text);
    std::vector<double> out;
    if (s.empty()) return out;
    if (s.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(trim(p));
        if (parts.size() != 3) throw ValueError{"range must be a:step:b, got '" + s + "'"};
        const double a = to_double(parts[0]), step = to_double(parts[1]), b = to_double(parts[2]);
        if (step == 0) throw ValueError{"range step must be nonzero"};
        const double span = (b - a) / step;
        if (span < -1e-9) return out;
        const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
        if (count > 100000) throw ValueError{"range has more than 100000 entries"};
        for (std::size_t i = 0; i < count; ++i) out.push_back(tidy(a + static_cast<double>(i) * step));
        return out;
    }
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(to_double(trim(p)));
    return out;
}

void apply_setting(RunConfig& cfg, const std::string& raw_key, const std::string& raw_value, std::size_t line,
                   std::size_t value_column) {
    std::string key = trim(raw_key);
    std::string section;
    if (const auto dot = key.find('.'); dot != std::string::npos) {
        section = key.substr(0, dot);
        key = key.substr(dot + 1);
    }
    const auto& table = key_table();
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown key '" + trim(raw_key) + "'", line, 1, trim(raw_key));
    if (!section.empty() && section != it->second.section)
        throw ConfigError("key '" + key + "' belongs to section [" + it->second.section + "], not [" + section + "]",
                          line, 1, key);
    const std::string value = trim(raw_value);
    try {
        it->second.set(cfg, value);
    } catch (const ValueError& e) {
        throw ConfigError(key + ": " + e.what, line, value_column, key);
    }
    cfg.values[std::string(it->second.section) + "." + key] = value;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string section;
    std::size_t lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const std::size_t indent = line.find_first_not_of(" \t") + 1;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError("unterminated section header", lineno, indent + t.size());
            section = trim(t.substr(1, t.size() - 2));
            if (!known_section(section)) throw ConfigError("unknown section [" + section + "]", lineno, indent + 1, section);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value", lineno, indent);
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("missing key before '='", lineno, eq + 1);
        if (key.find('.') != std::string::npos) throw ConfigError("qualified keys are not allowed in files", lineno, indent, key);
        const auto vpos = line.find_first_not_of(" \t", eq + 1);
        const std::size_t vcol = (vpos == std::string::npos ? eq + 1 : vpos) + 1;
        const std::string qualified = section.empty() ? key : section + "." + key;
        const auto it = key_table().find(key);
        if (it != key_table().end() && (section.empty() || section == it->second.section) &&
            cfg.values.count(std::string(it->second.section) + "." + key))
            throw ConfigError("duplicate key '" + key + "'", lineno, indent, key);
        apply_setting(cfg, qualified, line.substr(eq + 1), lineno, vcol);
    }
    return cfg;
}

void validate_config(RunConfig& cfg) {
    auto need = [](bool ok, const char* key, const std::string& what) {
        if (!ok) throw ConfigError(std::string(key) + ": " + what, 0, 0, key);
    };
    const Command c = cfg.command;
    const bool needs_m = c != Command::fit_shift && c != Command::verify;
    if (needs_m) need(cfg.m.has_value(), "m", "required for " + std::string(to_string(c)));
    if (cfg.m) need(*cfg.m >= 1 && *cfg.m <= 10, "m", "must be in [1, 10]");
    if (c == Command::roots || c == Command::tw) need(cfg.lambda.has_value(), "lambda", "required");
    if (c == Command::tw && *cfg.lambda <= 0)
        cfg.warnings.push_back("lambda <= 0: travelling waves need lambda > 0, expect no valid profile");
    if (c == Command::sweep) {
        need(cfg.lambdas_set, "lambdas", "required for sweep");
        if (std::any_of(cfg.lambdas.begin(), cfg.lambdas.end(), [](double l) { return l <= 0; }))
            cfg.warnings.push_back("lambdas contain values <= 0: expect no valid profile there");
    }
    if (c == Command::scan_max) {
        need(cfg.lo < cfg.hi, "hi", "must exceed lo");
        need(cfg.width_tol > 0, "width_tol", "must be > 0");
    }
    if (c == Command::evolve) {
        need(cfg.t_final.has_value(), "t_final", "required for evolve");
        need(*cfg.t_final > 0, "t_final", "must be > 0");
        need(cfg.dx > 0, "dx", "must be > 0");
        need(cfg.dt_max > 0, "dt_max", "must be > 0");
        need(cfg.dt_min > 0 && cfg.dt_min < cfg.dt_max, "dt_min", "must be in (0, dt_max)");
        need(cfg.error_tol > 0, "error_tol", "must be > 0");
        need(cfg.behind > 0 && cfg.ahead > 0, "behind", "window extents must be > 0");
        need(cfg.output_interval > 0, "output_interval", "must be > 0");
        need(cfg.width > 0, "width", "must be > 0");
        if (cfg.lyapunov && cfg.m && *cfg.m != 2) need(false, "lyapunov", "monitor is defined for m = 2 only");
    }
    if (c == Command::fit_shift) {
        need(cfg.history.has_value(), "history", "required for fit-shift");
        if (cfg.t0 && cfg.t1) need(*cfg.t0 < *cfg.t1, "t1", "must exceed t0");
    }
    if (cfg.h) need(*cfg.h > 0, "h", "must be > 0");
    if (cfg.left && cfg.right) need(*cfg.left < *cfg.right, "right", "must exceed left");
    if (cfg.newton_tol) need(*cfg.newton_tol > 0, "newton_tol", "must be > 0");
    if (cfg.max_iter) need(*cfg.max_iter > 0, "max_iter", "must be > 0");
    need(cfg.perturbation >= 0, "perturbation", "must be >= 0");
    need(cfg.continue_step > 0, "continue_step", "must be > 0");
    need(cfg.oscillation_threshold >= 0, "oscillation_threshold", "must be >= 0");
    if (cfg.plot == "f0") need(c == Command::sweep, "plot", "f0 bundles come from sweep");
    if (cfg.plot == "f2") need(c == Command::tw, "plot", "f2 bundles come from tw");
    if (cfg.plot == "front") need(c == Command::evolve, "plot", "front bundles come from evolve");
    if (cfg.plot == "kscan") need(c == Command::tw && cfg.center, "plot", "kscan bundles need tw with center = true");
}

std::string echo_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "command = " << to_string(cfg.command) << "\n";
    for (const char* sec : section_order) {
        bool header = false;
        const std::string prefix = std::string(sec) + ".";
        for (const auto& [k, v] : cfg.values) {
            if (k.rfind(prefix, 0) != 0 || k == "run.command") continue;
            if (!header) {
                os << "\n[" << sec << "]\n";
                header = true;
            }
            os << k.substr(prefix.size()) << " = " << v << "\n";
        }
    }
    return os.str();
}

}  // namespace kpp
