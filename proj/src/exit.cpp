#include "snse/exit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace snse {

double Domain::threshold() const {
    if (kind == DomainKind::htilde_sublevel) return radius;
    return radius * radius;
}

double Domain::boundary_functional(const Spectral& sp, const Field& u) const {
    switch (kind) {
        case DomainKind::l2_ball:
            return mass(u);
        case DomainKind::h1_ball: {
            const double h = h1_norm(sp, u);
            return h * h;
        }
        case DomainKind::htilde_sublevel:
            return modified_hamiltonian(sp, u, consts, lambda);
    }
    return 0.0;
}

bool Domain::contains(const Spectral& sp, const Field& u) const {
    return boundary_functional(sp, u) < threshold();
}

double Domain::gap(const Spectral& sp, const Field& u) const {
    return threshold() - boundary_functional(sp, u);
}

namespace {

int default_threads() {
    if (const char* env = std::getenv("SNSE_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

void sector_of(const Spectral& sp, const Field& u, int& sector,
               std::vector<double>& coords) {
    std::vector<cplx> v = u.values;
    sp.forward(v);
    const double scale = 1.0 / static_cast<double>(v.size());
    std::size_t best = 0, second = 0;
    double amax = -1.0, asecond = -1.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > amax) {
            second = best;
            asecond = amax;
            best = i;
            amax = a;
        } else if (a > asecond) {
            second = i;
            asecond = a;
        }
    }
    sector = u.grid->mode_index(best, 0);
    coords = {amax * scale, asecond * scale,
              static_cast<double>(u.grid->mode_index(second, 0))};
}

}  // namespace

ExitRecord first_exit(const Field& u0, const SdeParams& params,
                      const NoiseOperator& op, const Domain& domain,
                      double t_max, std::uint64_t master_seed,
                      std::uint64_t trajectory_id) {
    Integrator integ(u0.grid, params);
    const Spectral& sp = integ.spectral();
    ExitRecord rec;
    rec.seed = trajectory_id;

    Field u = u0;
    double f_pre = domain.boundary_functional(sp, u);
    const double thr = domain.threshold();
    if (f_pre >= thr) {
        rec.exited = true;
        rec.tau = 0.0;
        rec.mass_at_exit = mass(u);
        rec.htilde_at_exit =
            modified_hamiltonian(sp, u, domain.consts, params.lambda);
        sector_of(sp, u, rec.sector, rec.boundary_coordinates);
        return rec;
    }

    GaussianStream rng(master_seed, trajectory_id);
    const long long nsteps = std::llround(t_max / params.dt);
    for (long long s = 0; s < nsteps; ++s) {
        switch (params.noise_kind) {
            case NoiseKind::none:
                integ.det_step(u);
                break;
            case NoiseKind::additive:
                integ.additive_step(u, op, rng, static_cast<std::uint64_t>(s));
                break;
            case NoiseKind::multiplicative:
                integ.multiplicative_step(u, op, rng,
                                          static_cast<std::uint64_t>(s));
                break;
        }
        if (!u.all_finite())
            throw std::runtime_error("first_exit: NaN at step " +
                                     std::to_string(s));
        const double f_post = domain.boundary_functional(sp, u);
        if (f_post >= thr) {
            const double t_pre = static_cast<double>(s) * params.dt;
            const double frac =
                (f_post > f_pre) ? (thr - f_pre) / (f_post - f_pre) : 1.0;
            rec.tau = t_pre + frac * params.dt;
            rec.exited = true;
            rec.mass_at_exit = mass(u);
            rec.htilde_at_exit =
                modified_hamiltonian(sp, u, domain.consts, params.lambda);
            sector_of(sp, u, rec.sector, rec.boundary_coordinates);
            return rec;
        }
        f_pre = f_post;
    }
    rec.exited = false;
    rec.tau = t_max;
    rec.mass_at_exit = mass(u);
    rec.htilde_at_exit =
        modified_hamiltonian(sp, u, domain.consts, params.lambda);
    sector_of(sp, u, rec.sector, rec.boundary_coordinates);
    return rec;
}

ExitStats aggregate_stats(const std::vector<ExitRecord>& records, double alpha) {
    ExitStats st;
    st.n_paths = records.size();
    double sum = 0.0, sum2 = 0.0, lsum = 0.0, lsum2 = 0.0;
    std::size_t n = 0;
    for (const auto& r : records) {
        if (!r.exited) {
            ++st.censored_count;
            continue;
        }
        ++n;
        sum += r.tau;
        sum2 += r.tau * r.tau;
        const double e = std::exp(-2.0 * alpha * r.tau);
        lsum += e;
        lsum2 += e * e;
        ++st.sector_histogram[r.sector];
    }
    if (n > 0) {
        st.mean_tau = sum / n;
        st.laplace_estimate = lsum / n;
        if (n > 1) {
            const double var = (sum2 - sum * sum / n) / (n - 1);
            st.tau_ci95 = 1.96 * std::sqrt(std::max(var, 0.0) / n);
            const double lvar = (lsum2 - lsum * lsum / n) / (n - 1);
            st.laplace_se = std::sqrt(std::max(lvar, 0.0) / n);
        }
    }
    return st;
}

EnsembleResult mc_exit_ensemble(const Field& u0, const SdeParams& params,
                                const NoiseOperator& op, const Domain& domain,
                                std::size_t n_paths, double t_max,
                                std::uint64_t master_seed, int n_threads) {
    if (n_paths < 1)
        throw std::invalid_argument("mc_exit_ensemble: n_paths must be >= 1");
    EnsembleResult out;
    out.records.resize(n_paths);
    const int nt = std::min<int>(n_threads > 0 ? n_threads : default_threads(),
                                 static_cast<int>(n_paths));
    auto worker = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t id = lo; id < hi; ++id)
            out.records[id] =
                first_exit(u0, params, op, domain, t_max, master_seed, id);
    };
    if (nt <= 1) {
        worker(0, n_paths);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n_paths + nt - 1) / nt;
        for (int t = 0; t < nt; ++t) {
            const std::size_t lo = t * chunk;
            const std::size_t hi = std::min(n_paths, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    out.stats = aggregate_stats(out.records, params.alpha);
    return out;
}

LaplaceReport laplace_identity_check(const ExitStats& stats, double alpha,
                                     double r_squared, double epsilon,
                                     double hs0) {
    LaplaceReport rep;
    const double denom = epsilon * hs0 * hs0;
    rep.predicted = 1.0 - 2.0 * alpha * r_squared / denom;
    if (!(denom > 2.0 * alpha * r_squared)) {
        rep.valid = false;  // right side outside (0,1)
        return rep;
    }
    rep.valid = true;
    rep.estimate = stats.laplace_estimate;
    rep.se = stats.laplace_se;
    rep.z = (rep.se > 0.0) ? (rep.estimate - rep.predicted) / rep.se : 0.0;
    return rep;
}

TailBoundReport mass_tail_bound_check(const Field& u0, const SdeParams& params,
                                      const NoiseOperator& op, double rho,
                                      double T, std::size_t n_paths,
                                      std::uint64_t master_seed) {
    TailBoundReport rep;
    rep.n_paths = n_paths;
    const double hs2 = op.hs_norm_l2() * op.hs_norm_l2();
    rep.bound =
        3.0 * std::exp(-rho * rho / (48.0 * params.epsilon * hs2 * T));
    rep.vacuous = rep.bound >= 1.0;

    Integrator integ(u0.grid, params);
    const double n0 = mass(u0);
    const long long nsteps = std::llround(T / params.dt);
    std::size_t hits = 0;
    for (std::size_t id = 0; id < n_paths; ++id) {
        GaussianStream rng(master_seed, id);
        Field u = u0;
        double sup_fluct = 0.0;
        for (long long s = 0; s < nsteps; ++s) {
            integ.additive_step(u, op, rng, static_cast<std::uint64_t>(s));
            sup_fluct = std::max(sup_fluct, mass(u) - n0);
        }
        if (sup_fluct >= 3.0 * rho * rho) ++hits;
    }
    rep.empirical = static_cast<double>(hits) / static_cast<double>(n_paths);
    rep.se = std::sqrt(rep.empirical * (1.0 - rep.empirical) /
                       static_cast<double>(n_paths));
    return rep;
}

ScalingFit scaling_fit(const Field& u0, const SdeParams& params_base,
                       const NoiseOperator& op, const Domain& domain,
                       const std::vector<double>& epsilons, std::size_t n_paths,
                       double t_max, std::uint64_t master_seed, int n_threads) {
    if (epsilons.size() < 2)
        throw std::invalid_argument("scaling_fit: need at least two epsilons");
    ScalingFit fit;
    double prev_mean = -1.0;
    std::uint64_t seed = master_seed;
    for (double eps : epsilons) {
        SdeParams p = params_base;
        p.epsilon = eps;
        auto res = mc_exit_ensemble(u0, p, op, domain, n_paths, t_max, seed,
                                    n_threads);
        seed += 0x9E3779B97F4A7C15ULL;  // decorrelate cells
        fit.table.push_back({eps, res.stats});
        if (prev_mean >= 0.0 && res.stats.mean_tau + res.stats.tau_ci95 <
                                    prev_mean)
            fit.monotone = false;  // decreasing eps should raise mean tau
        prev_mean = res.stats.mean_tau;
    }
    // OLS of log mean tau on 1/eps
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(fit.table.size());
    for (const auto& c : fit.table) {
        const double x = 1.0 / c.epsilon;
        const double y = std::log(c.stats.mean_tau);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

std::map<int, std::size_t> exit_point_histogram(
    const std::vector<ExitRecord>& records) {
    std::map<int, std::size_t> hist;
    for (const auto& r : records)
        if (r.exited) ++hist[r.sector];
    return hist;
}

}  // namespace snse
