#include "dimertrap/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "dimertrap/bath.hpp"
#include "dimertrap/error.hpp"
#include "dimertrap/path_integral.hpp"
#include "influence.hpp"

namespace dimertrap {

namespace {

constexpr cplx I{0.0, 1.0};

// Per-bin means of the estimator components.
struct ChainOutput {
    std::vector<double> survival;
    std::vector<double> trap;
    std::vector<double> reference;
    std::vector<cplx> sign;
    std::int64_t accepted{0};
    std::int64_t proposed{0};
};

class Sampler {
public:
    Sampler(const DimerParams& params, const BathCorrelationTable& table, std::uint64_t seed)
        : table_(table), P_(table.slices()), rng_(seed) {
        const auto u = detail::forward_table(params, table.dt());
        DimerParams trap_free = params;
        trap_free.Gamma = 0.0;
        const auto u0 = detail::forward_table(trap_free, table.dt());
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                const double mag = std::abs(u[a][b]);
                log_abs_[a][b] = mag > 0.0 ? std::log(mag) : -INFINITY;
                phase_[a][b] = mag > 0.0 ? u[a][b] / mag : cplx(0.0);
                reference_[a][b] = mag > 0.0 ? u0[a][b] / mag : cplx(0.0);
            }
        }
        for (int k = 0; k <= P_ && !has_bath_; ++k)
            for (int kp = 0; kp <= k; ++kp)
                if (table.eta(k, kp) != cplx(0.0)) has_bath_ = true;

        s_.assign(P_ + 1, 0.5 * spin_of(Node::initial));
        sp_ = s_;
        initialize();
    }

    ChainOutput run(const McConfig& mc) {
        ChainOutput out;
        std::int64_t burn_accepted = 0;
        for (std::int64_t i = 0; i < mc.burn_in; ++i) burn_accepted += sweep();
        if (mc.burn_in > 0 && burn_accepted == 0)
            throw NumericalError("ergodicity: no move accepted during burn-in");

        const std::int64_t per_bin = (mc.sweeps - mc.burn_in) / mc.bins;
        out.survival.reserve(mc.bins);
        for (int b = 0; b < mc.bins; ++b) {
            double sum1 = 0.0;
            double sum2 = 0.0;
            double ref = 0.0;
            cplx sgn = 0.0;
            for (std::int64_t i = 0; i < per_bin; ++i) {
                out.accepted += sweep();
                out.proposed += moves_per_sweep();
                const auto [phase, reference] = measure();
                (s_[P_] < 0.0 ? sum1 : sum2) += phase.real();
                ref += reference.real();
                sgn += phase;
            }
            const auto n = static_cast<double>(per_bin);
            out.survival.push_back(sum1 / n);
            out.trap.push_back(sum2 / n);
            out.reference.push_back(ref / n);
            out.sign.push_back(sgn / n);
        }
        return out;
    }

private:
    double log_abs_weight() const {
        double l = -phi_.real();
        for (int k = 0; k < P_; ++k) {
            l += log_abs_[detail::slot(s_[k + 1])][detail::slot(s_[k])];
            l += log_abs_[detail::slot(sp_[k + 1])][detail::slot(sp_[k])];
        }
        return l;
    }

    void refresh_phase() {
        phi_ = has_bath_ ? detail::full_phase(table_, s_, sp_) : cplx(0.0);
    }

    void initialize() {
        refresh_phase();
        std::uniform_int_distribution<int> coin(0, 1);
        for (int attempt = 0; !std::isfinite(log_abs_weight()); ++attempt) {
            if (attempt > 1000)
                throw NumericalError("Monte Carlo: no path with nonzero weight found");
            for (int k = 1; k < P_; ++k) {
                s_[k] = coin(rng_) ? 0.5 : -0.5;
                sp_[k] = coin(rng_) ? 0.5 : -0.5;
            }
            s_[P_] = sp_[P_] = coin(rng_) ? 0.5 : -0.5;
            refresh_phase();
        }
    }

    std::int64_t moves_per_sweep() const { return 3 * (P_ - 1) + 1; }

    double link(const std::vector<double>& v, int k) const {
        return log_abs_[detail::slot(v[k + 1])][detail::slot(v[k])];
    }

    bool accept(double delta) {
        if (delta >= 0.0) return true;
        return uniform_(rng_) < std::exp(delta);
    }

    // Flip spin j of one string (j = 1..P-1).
    bool flip_interior(std::vector<double>& v, int j) {
        const double before_links = link(v, j - 1) + link(v, j);
        const cplx before = has_bath_ ? detail::phase_terms_at(table_, s_, sp_, j) : cplx(0.0);
        v[j] = -v[j];
        const cplx dphi =
            has_bath_ ? detail::phase_terms_at(table_, s_, sp_, j) - before : cplx(0.0);
        const double delta = link(v, j - 1) + link(v, j) - before_links - dphi.real();
        if (accept(delta)) {
            phi_ += dphi;
            return true;
        }
        v[j] = -v[j];
        return false;
    }

    // Flip slice j of both strings together; keeps sigma = sigma' paths
    // diagonal, which single flips cannot do at strong coupling.
    bool flip_pair(int j) {
        const double before_links = link(s_, j - 1) + link(s_, j) + link(sp_, j - 1) + link(sp_, j);
        const cplx before = has_bath_ ? detail::phase_terms_at(table_, s_, sp_, j) : cplx(0.0);
        s_[j] = -s_[j];
        sp_[j] = -sp_[j];
        const cplx dphi =
            has_bath_ ? detail::phase_terms_at(table_, s_, sp_, j) - before : cplx(0.0);
        const double delta = link(s_, j - 1) + link(s_, j) + link(sp_, j - 1) + link(sp_, j) -
                             before_links - dphi.real();
        if (accept(delta)) {
            phi_ += dphi;
            return true;
        }
        s_[j] = -s_[j];
        sp_[j] = -sp_[j];
        return false;
    }

    // Flip the shared endpoint of both strings.
    bool flip_endpoint() {
        const int k = P_ - 1;
        const double before_links = link(s_, k) + link(sp_, k);
        const cplx before = has_bath_ ? detail::phase_terms_at(table_, s_, sp_, P_) : cplx(0.0);
        s_[P_] = -s_[P_];
        sp_[P_] = -sp_[P_];
        const cplx dphi =
            has_bath_ ? detail::phase_terms_at(table_, s_, sp_, P_) - before : cplx(0.0);
        const double delta = link(s_, k) + link(sp_, k) - before_links - dphi.real();
        if (accept(delta)) {
            phi_ += dphi;
            return true;
        }
        s_[P_] = -s_[P_];
        sp_[P_] = -sp_[P_];
        return false;
    }

    std::int64_t sweep() {
        std::int64_t accepted = 0;
        for (int j = 1; j < P_; ++j) accepted += flip_interior(s_, j);
        for (int j = 1; j < P_; ++j) accepted += flip_interior(sp_, j);
        for (int j = 1; j < P_; ++j) accepted += flip_pair(j);
        accepted += flip_endpoint();
        if (++sweeps_since_refresh_ == 128) {
            refresh_phase();
            sweeps_since_refresh_ = 0;
        }
        return accepted;
    }

    // W/|W| and W0/|W| of the current path.
    std::pair<cplx, cplx> measure() const {
        cplx phase = std::exp(-I * phi_.imag());
        cplx reference = phase;
        for (int k = 0; k < P_; ++k) {
            const int f1 = detail::slot(s_[k + 1]);
            const int f0 = detail::slot(s_[k]);
            const int b1 = detail::slot(sp_[k + 1]);
            const int b0 = detail::slot(sp_[k]);
            phase *= phase_[f1][f0] * std::conj(phase_[b1][b0]);
            reference *= reference_[f1][f0] * std::conj(reference_[b1][b0]);
        }
        return {phase, reference};
    }

    const BathCorrelationTable& table_;
    int P_;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    double log_abs_[2][2]{};
    cplx phase_[2][2]{};
    cplx reference_[2][2]{};
    bool has_bath_{false};
    std::vector<double> s_;
    std::vector<double> sp_;
    cplx phi_{0.0};
    int sweeps_since_refresh_{0};
};

struct Estimate {
    double value{0.0};
    double error{0.0};
};

// Ratio sum(num)/sum(den) with a leave-one-bin-out jackknife error.
Estimate jackknife_ratio(const std::vector<double>& num, const std::vector<double>& den) {
    const auto n = num.size();
    double sn = 0.0;
    double sd = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sn += num[i];
        sd += den[i];
    }
    std::vector<double> r(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = (sn - num[i]) / (sd - den[i]);
        mean += r[i];
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const double x : r) var += (x - mean) * (x - mean);
    var *= static_cast<double>(n - 1) / static_cast<double>(n);
    return {sn / sd, std::sqrt(var)};
}

Estimate inverse_variance_merge(const std::vector<Estimate>& chains) {
    double wsum = 0.0;
    double acc = 0.0;
    for (const auto& c : chains) {
        const double w = 1.0 / std::max(c.error * c.error, 1e-300);
        wsum += w;
        acc += w * c.value;
    }
    return {acc / wsum, std::sqrt(1.0 / wsum)};
}

PimcPoint merge_chains(double t, int slices, const std::vector<ChainOutput>& chains) {
    PimcPoint point;
    point.t = t;
    point.slices = slices;

    std::vector<Estimate> survival;
    std::vector<Estimate> trap;
    std::vector<double> pooled_reference;
    cplx sign = 0.0;
    std::int64_t accepted = 0;
    std::int64_t proposed = 0;
    for (const auto& c : chains) {
        survival.push_back(jackknife_ratio(c.survival, c.reference));
        trap.push_back(jackknife_ratio(c.trap, c.reference));
        pooled_reference.insert(pooled_reference.end(), c.reference.begin(), c.reference.end());
        for (const cplx s : c.sign) sign += s;
        accepted += c.accepted;
        proposed += c.proposed;
    }
    const auto nbins = static_cast<double>(pooled_reference.size());
    point.average_sign = std::abs(sign / nbins);
    point.acceptance = proposed > 0 ? static_cast<double>(accepted) / proposed : 0.0;

    double mean = 0.0;
    for (const double d : pooled_reference) mean += d;
    mean /= nbins;
    double var = 0.0;
    for (const double d : pooled_reference) var += (d - mean) * (d - mean);
    const double stderr_ref = std::sqrt(var / (nbins - 1.0) / nbins);
    if (std::abs(mean) <= 3.0 * stderr_ref) {
        std::ostringstream msg;
        msg << "sign collapse at t = " << t << " (P = " << slices
            << "): average sign " << point.average_sign;
        throw SignCollapseError(msg.str(), t, point.average_sign);
    }

    const Estimate s = inverse_variance_merge(survival);
    const Estimate tr = inverse_variance_merge(trap);
    point.survival = s.value;
    point.survival_error = s.error;
    point.trap = tr.value;
    point.trap_error = tr.error;
    return point;
}

template <class F>
void parallel_for(std::size_t n, unsigned workers, F&& body) {
    std::vector<std::exception_ptr> failures(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                body(i);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1 || n <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < std::min<std::size_t>(workers, n); ++w) pool.emplace_back(work);
    }
    for (auto& f : failures)
        if (f) std::rethrow_exception(f);
}

}  // namespace

void McConfig::validate() const {
    if (seeds.empty()) throw ConfigError("chains must be >= 1");
    if (burn_in < 0) throw ConfigError("burn_in must be >= 0");
    if (!(sweeps > burn_in)) throw ConfigError("sweeps must exceed burn_in");
    if (bins < 2) throw ConfigError("bins must be >= 2");
    if (sweeps - burn_in < bins) throw ConfigError("sweeps - burn_in must be >= bins");
}

std::vector<std::uint64_t> McConfig::derive_seeds(std::uint64_t seed, std::size_t chains) {
    std::vector<std::uint64_t> out;
    std::uint64_t state = seed;
    for (std::size_t i = 0; i < chains; ++i) {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        out.push_back(z ^ (z >> 31));
    }
    return out;
}

unsigned worker_count(unsigned requested) {
    unsigned n = requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("DIMERTRAP_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

int default_slices(double t, double V) {
    static std::atomic<bool> warned{false};
    const int wanted = std::max(1, static_cast<int>(std::ceil(t * V / 0.1 - 1e-9)));
    if (wanted > 64) {
        if (!warned.exchange(true))
            std::cerr << "warning: slice count capped at 64 (t = " << t << " wants " << wanted
                      << ")\n";
        return 64;
    }
    return wanted;
}

PimcPoint simulate_time_point(const DimerParams& params, const BathParams& bath, double t,
                              int slices, const McConfig& mc) {
    const std::vector<double> grid{t};
    const PimcResult r = run_pimc(params, bath, grid, [slices](double) { return slices; }, mc);
    return r.points.front();
}

PimcResult run_pimc(const DimerParams& params, const BathParams& bath,
                    std::span<const double> grid, const SliceRule& slices_of_t,
                    const McConfig& mc) {
    params.validate();
    bath.validate();
    mc.validate();

    struct Job {
        double t;
        int slices;
        std::optional<BathCorrelationTable> table;
    };
    std::vector<Job> jobs;
    for (const double t : grid) {
        if (t < 0.0) throw ConfigError("PIMC grid times must be >= 0");
        Job job{t, 0, std::nullopt};
        if (t > 0.0) {
            job.slices = slices_of_t(t);
            if (job.slices < 1) throw ConfigError("slice rule returned P < 1");
            job.table = influence_coefficients(bath, t, job.slices);
        }
        jobs.push_back(std::move(job));
    }

    const std::size_t chains = mc.chains();
    std::vector<ChainOutput> outputs(jobs.size() * chains);
    std::vector<std::size_t> tasks;
    for (std::size_t j = 0; j < jobs.size(); ++j)
        if (jobs[j].table)
            for (std::size_t c = 0; c < chains; ++c) tasks.push_back(j * chains + c);

    parallel_for(tasks.size(), worker_count(mc.threads), [&](std::size_t i) {
        const std::size_t slot = tasks[i];
        const Job& job = jobs[slot / chains];
        Sampler sampler(params, *job.table, mc.seeds[slot % chains]);
        outputs[slot] = sampler.run(mc);
    });

    PimcResult result;
    result.survival.errors.emplace();
    result.trap.errors.emplace();
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        PimcPoint point;
        point.t = jobs[j].t;
        if (jobs[j].table) {
            const auto first = outputs.begin() + static_cast<std::ptrdiff_t>(j * chains);
            const std::vector<ChainOutput> mine(first, first + static_cast<std::ptrdiff_t>(chains));
            point = merge_chains(jobs[j].t, jobs[j].slices, mine);
        }
        result.points.push_back(point);
        result.survival.times.push_back(point.t);
        result.survival.values.push_back(point.survival);
        result.survival.errors->push_back(point.survival_error);
        result.trap.times.push_back(point.t);
        result.trap.values.push_back(point.trap);
        result.trap.errors->push_back(point.trap_error);
    }
    return result;
}

}  // namespace dimertrap
