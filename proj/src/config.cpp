#include "dimertrap/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "dimertrap/error.hpp"

namespace dimertrap {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string at_line(int line) { return " (line " + std::to_string(line) + ")"; }

template <class T>
T parse_number(std::string_view key, std::string_view text, int line) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("cannot parse value '" + std::string(text) + "' for key " +
                          std::string(key) + at_line(line));
    return value;
}

std::string render_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

void RunConfig::validate() const {
    dimer.validate();
    bath.validate();
    if (n_points < 2) throw ConfigError("n_points must be >= 2");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("t_max must be > 0");
    integrator.validate();
    mc().validate();
}

McConfig RunConfig::mc() const {
    McConfig m;
    m.sweeps = sweeps;
    m.burn_in = burn_in;
    m.seeds = McConfig::derive_seeds(seed, chains);
    return m;
}

std::vector<double> RunConfig::grid() const { return uniform_grid(t_max, n_points); }

RunConfig parse_config(std::string_view text) {
    RunConfig c;
    std::map<std::string, int, std::less<>> lines;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("expected key=value" + at_line(line_no));
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (lines.contains(key))
            throw ConfigError("duplicate key " + std::string(key) + at_line(line_no));

        auto dbl = [&] { return parse_number<double>(key, value, line_no); };
        auto i64 = [&] { return parse_number<std::int64_t>(key, value, line_no); };
        if (key == "E") c.dimer.E = dbl();
        else if (key == "V") c.dimer.V = dbl();
        else if (key == "Gamma") c.dimer.Gamma = dbl();
        else if (key == "alpha") c.bath.alpha = dbl();
        else if (key == "omega_c") c.bath.omega_c = dbl();
        else if (key == "T") c.bath.T = dbl();
        else if (key == "t_max") c.t_max = dbl();
        else if (key == "dt") c.integrator.dt = dbl();
        else if (key == "n_points") {
            const auto n = i64();
            if (n < 2) throw ConfigError("n_points must be ≥ 2" + at_line(line_no));
            c.n_points = static_cast<std::size_t>(n);
        } else if (key == "sweeps") c.sweeps = i64();
        else if (key == "burn_in") c.burn_in = i64();
        else if (key == "chains") {
            const auto n = i64();
            if (n < 1) throw ConfigError("chains must be ≥ 1" + at_line(line_no));
            c.chains = static_cast<std::size_t>(n);
        } else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value, line_no);
        else if (key == "out") {
            if (value.empty()) throw ConfigError("out must not be empty" + at_line(line_no));
            c.out = std::string(value);
        } else {
            throw ConfigError("unknown key '" + std::string(key) + "'" + at_line(line_no));
        }
        lines.emplace(std::string(key), line_no);
    }
    c.integrator.t_max = c.t_max;

    auto where = [&](const char* key) {
        const auto it = lines.find(key);
        return it == lines.end() ? std::string(" (default)") : at_line(it->second);
    };
    auto require = [&](bool ok, const char* key, const char* rule) {
        if (!ok) throw ConfigError(std::string(key) + " must be " + rule + where(key));
    };
    require(std::isfinite(c.dimer.E), "E", "finite");
    require(c.dimer.V > 0.0 && std::isfinite(c.dimer.V), "V", "> 0");
    require(c.dimer.Gamma >= 0.0 && std::isfinite(c.dimer.Gamma), "Gamma", "≥ 0");
    require(c.bath.alpha >= 0.0 && std::isfinite(c.bath.alpha), "alpha", "≥ 0");
    require(c.bath.omega_c > 0.0 && std::isfinite(c.bath.omega_c), "omega_c", "> 0");
    require(c.bath.T > 0.0 && std::isfinite(c.bath.T), "T", "> 0");
    require(c.t_max > 0.0 && std::isfinite(c.t_max), "t_max", "> 0");
    require(c.integrator.dt > 0.0 && std::isfinite(c.integrator.dt), "dt", "> 0");
    require(c.burn_in >= 0, "burn_in", "≥ 0");
    require(c.sweeps > c.burn_in, "sweeps", "> burn_in");
    c.validate();
    return c;
}

std::string render_config(const RunConfig& c) {
    std::ostringstream os;
    os << "E=" << render_double(c.dimer.E) << '\n'
       << "V=" << render_double(c.dimer.V) << '\n'
       << "Gamma=" << render_double(c.dimer.Gamma) << '\n'
       << "alpha=" << render_double(c.bath.alpha) << '\n'
       << "omega_c=" << render_double(c.bath.omega_c) << '\n'
       << "T=" << render_double(c.bath.T) << '\n'
       << "t_max=" << render_double(c.t_max) << '\n'
       << "n_points=" << c.n_points << '\n'
       << "dt=" << render_double(c.integrator.dt) << '\n'
       << "sweeps=" << c.sweeps << '\n'
       << "burn_in=" << c.burn_in << '\n'
       << "chains=" << c.chains << '\n'
       << "seed=" << c.seed << '\n'
       << "out=" << c.out << '\n';
    return os.str();
}

std::string config_help() {
    return "Config file: key=value per line, '#' starts a comment. Keys and defaults:\n"
           "  E=1          onsite energy\n"
           "  V=1          inter-node coupling (> 0)\n"
           "  Gamma=0      trapping strength on node 2 (>= 0)\n"
           "  alpha=0      Kondo parameter of the ohmic bath (>= 0)\n"
           "  omega_c=5    bath cutoff frequency\n"
           "  T=1          temperature (k_B = 1)\n"
           "  t_max=10     end of the output grid\n"
           "  n_points=101 grid points on [0, t_max]\n"
           "  dt=0.001     RK4 step for the LvNE\n"
           "  sweeps=100000 Monte Carlo sweeps per chain and time point\n"
           "  burn_in=5000 discarded sweeps\n"
           "  chains=4     independent Markov chains\n"
           "  seed=42      master seed; chain seeds derive from it\n"
           "  out=out      output path prefix\n";
}

}  // namespace dimertrap
