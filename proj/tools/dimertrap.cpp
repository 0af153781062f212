#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dimertrap/classical.hpp"
#include "dimertrap/config.hpp"
#include "dimertrap/csv.hpp"
#include "dimertrap/error.hpp"
#include "dimertrap/lindblad.hpp"
#include "dimertrap/match.hpp"
#include "dimertrap/monte_carlo.hpp"
#include "dimertrap/path_integral.hpp"
#include "dimertrap/spectrum.hpp"

using namespace dimertrap;

namespace {

struct Options {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> chains;
    std::optional<double> t_max;
    bool quiet{false};

    int slices{0};
    std::string input;
    std::string pimc_input;
    std::string lvne_input;
    std::vector<double> rates;
    double window_start{-1.0};
    double window_end{-1.0};
};

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

RunConfig load(const Options& o) {
    RunConfig cfg = o.config_path.empty() ? RunConfig{} : parse_config(read_file(o.config_path));
    if (!o.out.empty()) cfg.out = o.out;
    if (o.seed) cfg.seed = *o.seed;
    if (o.chains) cfg.chains = *o.chains;
    if (o.t_max) {
        cfg.t_max = *o.t_max;
        cfg.integrator.t_max = *o.t_max;
    }
    cfg.validate();
    return cfg;
}

std::string output(const RunConfig& cfg, const std::string& suffix) {
    return cfg.out + "_" + suffix;
}

void note(const Options& o, const std::string& msg) {
    if (!o.quiet) std::cerr << msg << '\n';
}

IntegratorConfig integrator_for(const RunConfig& cfg) {
    IntegratorConfig ic = cfg.integrator;
    ic.t_max = cfg.t_max;
    return ic;
}

int run_spectrum(const Options& o) {
    const RunConfig cfg = load(o);
    const Spectrum2 s = eigensystem(cfg.dimer);
    const std::string path = output(cfg, "spectrum.csv");
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    os << "index,re_E,im_E,re_R1,im_R1,re_R2,im_R2,re_L1,im_L1,re_L2,im_L2\n";
    for (int a = 0; a < 2; ++a) {
        os << a << ',' << format_number(s.eigenvalues[a].real()) << ','
           << format_number(s.eigenvalues[a].imag());
        for (const Vec2c* v : {&s.right[a], &s.left[a]})
            for (int i = 0; i < 2; ++i)
                os << ',' << format_number((*v)(i).real()) << ',' << format_number((*v)(i).imag());
        os << '\n';
    }
    note(o, "wrote " + path);
    return 0;
}

int run_lvne(const Options& o) {
    const RunConfig cfg = load(o);
    const auto grid = cfg.grid();
    const TimeSeries s = propagate_lvne(DensityMatrix2::localized(Node::initial), cfg.dimer,
                                        cfg.bath.lambda(), grid, integrator_for(cfg));
    const std::string path = output(cfg, "lvne.csv");
    write_csv(path, s, "survival");
    note(o, "wrote " + path);
    return 0;
}

int run_approx(const Options& o) {
    const RunConfig cfg = load(o);
    TimeSeries s;
    s.times = cfg.grid();
    for (double t : s.times) s.values.push_back(survival_approx(cfg.dimer, cfg.bath.lambda(), t));
    const std::string path = output(cfg, "approx.csv");
    write_csv(path, s, "survival");
    note(o, "wrote " + path);
    return 0;
}

int run_pimc_cmd(const Options& o) {
    const RunConfig cfg = load(o);
    const auto grid = cfg.grid();
    const double V = cfg.dimer.V;
    SliceRule rule = o.slices > 0 ? SliceRule([n = o.slices](double) { return n; })
                                  : SliceRule([V](double t) { return default_slices(t, V); });
    const PimcResult r = run_pimc(cfg.dimer, cfg.bath, grid, rule, cfg.mc());
    const std::string path = output(cfg, "pimc.csv");
    write_csv(path, r.survival, "survival");
    write_csv(output(cfg, "pimc_trap.csv"), r.trap, "trap");
    if (!o.quiet) {
        for (const PimcPoint& p : r.points)
            std::fprintf(stderr, "t=%-8.4g P=%-3d pi11=%.6f +- %.6f  <sign>=%.4f  acc=%.3f\n", p.t,
                         p.slices, p.survival, p.survival_error, p.average_sign, p.acceptance);
    }
    note(o, "wrote " + path);
    return 0;
}

int run_exact(const Options& o) {
    const RunConfig cfg = load(o);
    TimeSeries s, trap;
    for (double t : cfg.grid()) {
        int P = o.slices > 0 ? o.slices : std::min(max_enumeration_slices, default_slices(t, cfg.dimer.V));
        SitePopulations pop{1.0, 0.0};
        if (t > 0.0) pop = exact_path_sum(cfg.dimer, cfg.bath, t, P);
        s.times.push_back(t);
        s.values.push_back(pop.initial);
        trap.times.push_back(t);
        trap.values.push_back(pop.trap);
    }
    const std::string path = output(cfg, "exact.csv");
    write_csv(path, s, "survival");
    write_csv(output(cfg, "exact_trap.csv"), trap, "trap");
    note(o, "wrote " + path);
    return 0;
}

ClassicalRates rates_from(const Options& o) {
    if (o.rates.size() != 3) throw ConfigError("--rates expects E,V,Gamma");
    ClassicalRates r{o.rates[0], o.rates[1], o.rates[2]};
    r.validate();
    return r;
}

int run_classical(const Options& o) {
    const RunConfig cfg = load(o);
    const ClassicalRates rates = rates_from(o);
    TimeSeries s;
    s.times = cfg.grid();
    for (double t : s.times) s.values.push_back(classical_survival(rates, t));
    const std::string path = output(cfg, "classical.csv");
    write_csv(path, s, "survival");
    note(o, "wrote " + path);
    return 0;
}

int run_fit_rates(const Options& o) {
    const RunConfig cfg = load(o);
    if (o.input.empty()) throw ConfigError("fit-rates needs --input CSV");
    const TimeSeries data = read_csv(o.input);
    const ClassicalFit fit = fit_classical_rates(data);

    TimeSeries curve;
    curve.times = data.times;
    for (double t : curve.times) curve.values.push_back(classical_survival(fit.rates, t));
    write_csv(output(cfg, "fit.csv"), curve, "survival");

    const std::string path = output(cfg, "rates.txt");
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    os << "E=" << format_number(fit.rates.E) << '\n'
       << "V=" << format_number(fit.rates.V) << '\n'
       << "Gamma=" << format_number(fit.rates.Gamma) << '\n'
       << "residual_norm=" << format_number(fit.residual_norm) << '\n'
       << "iterations=" << fit.iterations << '\n';
    if (cfg.dimer.Gamma > 0.0)
        os << "Gamma_ratio=" << format_number(fit.rates.Gamma / cfg.dimer.Gamma) << '\n';
    note(o, "wrote " + path);
    return 0;
}

int run_match(const Options& o) {
    const RunConfig cfg = load(o);
    if (o.pimc_input.empty()) throw ConfigError("match needs --pimc CSV");
    const TimeSeries pimc = read_csv(o.pimc_input);
    if (!pimc.has_errors()) throw ConfigError("match: PIMC CSV needs a stderr column");
    auto window = default_match_window(pimc);
    if (o.window_start >= 0.0) window.first = o.window_start;
    if (o.window_end >= 0.0) window.second = o.window_end;

    const IntegratorConfig ic = integrator_for(cfg);
    MatchResult m = match_and_extrapolate(pimc, cfg.dimer, cfg.bath.T, window, cfg.bath.alpha,
                                          cfg.t_max, cfg.n_points, ic);
    if (!o.lvne_input.empty())
        m.stitched = stitch(pimc, read_csv(o.lvne_input), m.stitched.t_cross);

    write_csv(output(cfg, "stitched.csv"), m.stitched.series, "survival");
    const std::string path = output(cfg, "match.txt");
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    os << "alpha=" << format_number(m.fit.alpha) << '\n'
       << "goodness=" << format_number(m.fit.goodness) << '\n'
       << "window_start=" << format_number(m.fit.window.first) << '\n'
       << "window_end=" << format_number(m.fit.window.second) << '\n'
       << "lindblad_valid=" << (m.fit.lindblad_valid ? "true" : "false") << '\n'
       << "t_cross=" << format_number(m.stitched.t_cross) << '\n'
       << "factor=" << format_number(m.stitched.factor) << '\n';
    if (!m.fit.lindblad_valid)
        std::cerr << "warning: goodness " << m.fit.goodness << " exceeds "
                  << lindblad_goodness_threshold << "; Lindblad description questionable\n";
    note(o, "wrote " + path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Excitation trapping in a dissipative dimer"};
    app.require_subcommand(1);
    app.footer(config_help());

    Options o;
    app.add_option("--config", o.config_path, "Config file")->check(CLI::ExistingFile);
    app.add_option("--out", o.out, "Output prefix (overrides config)");
    app.add_option("--seed", o.seed, "Master seed (overrides config)");
    app.add_option("--chains", o.chains, "Markov chains (overrides config)");
    app.add_option("--t-max", o.t_max, "Final time (overrides config)");
    app.add_flag("--quiet", o.quiet, "Suppress progress output");

    auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues and bi-orthonormal eigenvectors");
    auto* lvne = app.add_subcommand("lvne", "Numeric master-equation survival");
    auto* approx = app.add_subcommand("approx", "Approximate closed-form survival");
    auto* pimc = app.add_subcommand("pimc", "Path-integral Monte Carlo survival");
    pimc->add_option("--slices", o.slices, "Fixed slice count (default: ceil(tV/0.1), max 64)");
    auto* exact = app.add_subcommand("exact-sum", "Exact enumeration of all Keldysh paths");
    exact->add_option("--slices", o.slices, "Fixed slice count (default: ceil(tV/0.1), max 12)");
    auto* classical = app.add_subcommand("classical", "Incoherent survival for given rates");
    classical->add_option("--rates", o.rates, "E,V,Gamma")->delimiter(',')->required();
    auto* fit = app.add_subcommand("fit-rates", "Fit incoherent rates to a survival CSV");
    fit->add_option("--input", o.input, "Survival CSV")->required();
    auto* match = app.add_subcommand("match", "Fit alpha to PIMC and extrapolate with the master equation");
    match->add_option("--pimc", o.pimc_input, "PIMC CSV with stderr column")->required();
    match->add_option("--lvne", o.lvne_input, "Master-equation CSV to stitch (default: refit run)");
    match->add_option("--window-start", o.window_start, "Match window start");
    match->add_option("--window-end", o.window_end, "Match window end");

    // Flags are accepted both before and after the subcommand.
    for (auto* sub : {spectrum, lvne, approx, pimc, exact, classical, fit, match}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*spectrum) return run_spectrum(o);
        if (*lvne) return run_lvne(o);
        if (*approx) return run_approx(o);
        if (*pimc) return run_pimc_cmd(o);
        if (*exact) return run_exact(o);
        if (*classical) return run_classical(o);
        if (*fit) return run_fit_rates(o);
        if (*match) return run_match(o);
    } catch (const SignCollapseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
