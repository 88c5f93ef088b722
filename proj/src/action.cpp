#include "snse/action.hpp"

#include "snse/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace snse {

double action(const ControlPath& h) {
    double s = 0.0;
    for (const auto& f : h.controls) {
        const double n = l2_norm(f);
        s += 0.5 * n * n;
    }
    return s * h.dt;
}

namespace {

/// Terminal boundary functional for the penalty: the plain domain functional
/// or, with sector_mode set, the mass carried by that signed Fourier mode
/// (restriction used as the e_N proxy; it can only raise the infimum).
struct TerminalFunctional {
    const Domain& domain;
    const Spectral& sp;
    int sector;

    double threshold() const { return domain.threshold(); }

    double value(const Field& u) const {
        if (sector == INT_MIN) return domain.boundary_functional(sp, u);
        std::vector<cplx> v = u.values;
        sp.forward(v);
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (u.grid->mode_index(i, 0) == sector) s += std::norm(v[i]);
        return s * u.grid->cell_volume() / static_cast<double>(u.size());
    }

    Field gradient(const Field& u) const {
        if (sector != INT_MIN) {
            Field g = u;
            sp.forward(g.values);
            for (std::size_t i = 0; i < g.values.size(); ++i)
                if (u.grid->mode_index(i, 0) != sector) g.values[i] = 0.0;
            sp.inverse(g.values);
            for (auto& z : g.values) z *= 2.0;
            return g;
        }
        switch (domain.kind) {
            case DomainKind::l2_ball: {
                Field g = u;
                for (auto& z : g.values) z *= 2.0;
                return g;
            }
            case DomainKind::h1_ball: {
                Field lap = u;
                sp.apply_minus_laplacian(lap);
                Field g = u;
                for (std::size_t i = 0; i < g.values.size(); ++i)
                    g.values[i] = 2.0 * (u.values[i] + lap.values[i]);
                return g;
            }
            case DomainKind::htilde_sublevel: {
                const auto& c = domain.consts;
                Field lap = u;
                sp.apply_minus_laplacian(lap);
                const double n2 = l2_norm(u);
                const double massterm =
                    c.beta * c.gn_constant_C * c.mass_exponent *
                    std::pow(n2, c.mass_exponent - 2.0);
                const double lam = static_cast<double>(domain.lambda);
                Field g = u;
                for (std::size_t i = 0; i < g.values.size(); ++i) {
                    const cplx ui = u.values[i];
                    g.values[i] = lap.values[i] -
                                  lam * std::pow(std::norm(ui), c.sigma) * ui +
                                  massterm * ui;
                }
                return g;
            }
        }
        return Field(u.grid);
    }
};

struct ForwardStore {
    std::vector<Field> a;  // state after the first half free step, per step
    std::vector<Field> f;  // real control forcing (multiplicative only)
    Field u_final;
};

void forward_sweep(const Field& u0, const ControlPath& h,
                   const SdeParams& params, const NoiseOperator& op,
                   const Spectral& sp, ForwardStore* store, Field& u_out) {
    const double dt = params.dt;
    const double hdt = 0.5 * dt;
    const double damp = std::exp(-params.alpha * dt);
    const double kappa = -static_cast<double>(params.lambda) * dt;
    const bool mult = params.noise_kind == NoiseKind::multiplicative;
    Field u = u0;
    for (std::size_t n = 0; n < h.controls.size(); ++n) {
        sp.apply_free_group(u, hdt);
        if (store) store->a.push_back(u);
        const Field force = op.apply(h.controls[n]);
        if (mult) {
            Field fre(u.grid);
            for (std::size_t i = 0; i < u.values.size(); ++i) {
                const double theta =
                    kappa * std::pow(std::norm(u.values[i]), params.sigma);
                u.values[i] *= damp * cplx{std::cos(theta), std::sin(theta)};
                const double phi = -dt * force.values[i].real();
                fre.values[i] = cplx{force.values[i].real(), 0.0};
                u.values[i] *= cplx{std::cos(phi), std::sin(phi)};
            }
            if (store) store->f.push_back(std::move(fre));
        } else {
            for (std::size_t i = 0; i < u.values.size(); ++i) {
                const double theta =
                    kappa * std::pow(std::norm(u.values[i]), params.sigma);
                u.values[i] *= damp * cplx{std::cos(theta), std::sin(theta)};
                u.values[i] += cplx{0.0, -dt} * force.values[i];
            }
        }
        sp.apply_free_group(u, hdt);
    }
    u_out = u;
    if (store) store->u_final = u;
}

}  // namespace

double terminal_gap(const Field& u0, const ControlPath& h,
                    const SdeParams& params, const NoiseOperator& op,
                    const Domain& domain) {
    Integrator integ(u0.grid, params);
    const Spectral& sp = integ.spectral();
    Field u = u0;
    double best = std::max(domain.gap(sp, u), 0.0);
    for (const auto& hn : h.controls) {
        integ.skeleton_step(u, op, hn, params.noise_kind);
        const double g = domain.gap(sp, u);
        if (g <= 0.0) return 0.0;
        best = std::min(best, g);
    }
    return best;
}

ObjectiveEval objective_with_gradient(const Field& u0, const ControlPath& h,
                                      const SdeParams& params,
                                      const NoiseOperator& op,
                                      const Domain& domain, double mu,
                                      int sector_mode, bool want_gradient) {
    Spectral sp(u0.grid);
    TerminalFunctional tf{domain, sp, sector_mode};
    const double dt = params.dt;
    const double hdt = 0.5 * dt;
    const double damp = std::exp(-params.alpha * dt);
    const double kappa = -static_cast<double>(params.lambda) * dt;
    const double sig = params.sigma;
    const bool mult = params.noise_kind == NoiseKind::multiplicative;

    ForwardStore store;
    Field u_final;
    forward_sweep(u0, h, params, op, sp, want_gradient ? &store : nullptr,
                  u_final);

    ObjectiveEval ev;
    const double gap = std::max(tf.threshold() - tf.value(u_final), 0.0);
    ev.penalty_gap = gap;
    ev.value = action(h) + 0.5 * mu * gap * gap;
    if (!want_gradient) return ev;

    // adjoint sweep; pairing is Re<g, du> with the grid quadrature weight
    Field lam = tf.gradient(u_final);
    for (auto& z : lam.values) z *= -mu * gap;

    const std::size_t nsteps = h.controls.size();
    ev.gradient.resize(nsteps);
    for (std::size_t n = nsteps; n-- > 0;) {
        sp.apply_free_group(lam, -hdt);  // adjoint of the trailing half step
        const Field& a = store.a[n];
        Field grad_n = h.controls[n];
        for (auto& z : grad_n.values) z *= dt;  // action term

        if (mult) {
            const Field& fre = store.f[n];
            // recompute b and c from the stored a
            Field s(u0.grid);
            for (std::size_t i = 0; i < lam.values.size(); ++i) {
                const cplx ai = a.values[i];
                const double theta = kappa * std::pow(std::norm(ai), sig);
                const cplx b = damp * cplx{std::cos(theta), std::sin(theta)} * ai;
                const double phi = -dt * fre.values[i].real();
                const cplx c = b * cplx{std::cos(phi), std::sin(phi)};
                const cplx lc = lam.values[i];
                s.values[i] = cplx{dt * std::imag(c * std::conj(lc)), 0.0};
                lam.values[i] = lc * cplx{std::cos(phi), -std::sin(phi)};
            }
            Field gf = op.apply(s);
            for (std::size_t i = 0; i < grad_n.values.size(); ++i)
                grad_n.values[i] += cplx{gf.values[i].real(), 0.0};
            // controls stay real in the multiplicative case
            for (auto& z : grad_n.values) z = cplx{z.real(), 0.0};
        } else {
            Field il(u0.grid);
            for (std::size_t i = 0; i < lam.values.size(); ++i)
                il.values[i] = cplx{0.0, dt} * lam.values[i];
            Field gf = op.apply(il);
            for (std::size_t i = 0; i < grad_n.values.size(); ++i)
                grad_n.values[i] += gf.values[i];
        }

        // adjoint of the phase + damping substep
        for (std::size_t i = 0; i < lam.values.size(); ++i) {
            const cplx ai = a.values[i];
            const double r2 = std::norm(ai);
            const double theta = kappa * std::pow(r2, sig);
            const cplx e{std::cos(theta), std::sin(theta)};
            const cplx lb = lam.values[i];
            cplx la = damp * std::conj(e) * lb;
            if (params.lambda != 0 && r2 > 1e-300) {
                const double s =
                    std::real(cplx{0.0, 1.0} * damp * e * ai * std::conj(lb));
                la += s * kappa * 2.0 * sig * std::pow(r2, sig - 1.0) * ai;
            }
            lam.values[i] = la;
        }
        sp.apply_free_group(lam, -hdt);  // adjoint of the leading half step
        ev.gradient[n] = std::move(grad_n);
    }
    return ev;
}

GradientCheckReport gradient_check(const Field& u0, const ControlPath& h,
                                   const SdeParams& params,
                                   const NoiseOperator& op,
                                   const Domain& domain, double mu,
                                   int n_directions, std::uint64_t seed,
                                   double fd_step) {
    GradientCheckReport rep;
    const auto ev = objective_with_gradient(u0, h, params, op, domain, mu);
    GaussianStream rng(seed, 0xFDC0FFEEULL);
    const bool mult = params.noise_kind == NoiseKind::multiplicative;
    std::uint64_t draw = 0;
    for (int d = 0; d < n_directions; ++d) {
        ControlPath v = h;
        double dir_norm2 = 0.0;
        double pairing = 0.0;
        for (std::size_t n = 0; n < v.controls.size(); ++n) {
            for (auto& z : v.controls[n].values) {
                const double re = rng.normal(0, draw++);
                const double im = mult ? 0.0 : rng.normal(0, draw++);
                z = cplx{re, im};
            }
            dir_norm2 += std::pow(l2_norm(v.controls[n]), 2);
            pairing += inner_l2(ev.gradient[n], v.controls[n]);
        }
        const double scale = 1.0 / std::sqrt(dir_norm2);
        pairing *= scale;
        ControlPath hp = h, hm = h;
        for (std::size_t n = 0; n < v.controls.size(); ++n)
            for (std::size_t i = 0; i < v.controls[n].values.size(); ++i) {
                const cplx dz = fd_step * scale * v.controls[n].values[i];
                hp.controls[n].values[i] += dz;
                hm.controls[n].values[i] -= dz;
            }
        const double jp = objective_with_gradient(u0, hp, params, op, domain,
                                                  mu, INT_MIN, false)
                              .value;
        const double jm = objective_with_gradient(u0, hm, params, op, domain,
                                                  mu, INT_MIN, false)
                              .value;
        const double fd = (jp - jm) / (2.0 * fd_step);
        const double denom = std::max(std::abs(fd), std::abs(pairing));
        const double rel =
            denom > 0.0 ? std::abs(fd - pairing) / denom : 0.0;
        rep.per_direction.push_back(rel);
        rep.max_rel_error = std::max(rep.max_rel_error, rel);
    }
    return rep;
}

namespace {

ControlPath make_initial_control(const Field& u0, const SdeParams& params,
                                 const NoiseOperator& op, const Domain& domain,
                                 const MinimizeOptions& opts,
                                 std::size_t nsteps) {
    ControlPath h;
    h.dt = params.dt;
    h.controls.assign(nsteps, Field(u0.grid));
    if (opts.init == InitKind::zero) return h;
    if (opts.init == InitKind::warm_start) {
        if (opts.warm.controls.size() != nsteps)
            throw std::invalid_argument("warm start length mismatch");
        return opts.warm;
    }
    // linear ansatz h(t) = (t/T) g with g a boundary-directed plane wave on
    // the strongest (or requested) noise mode, amplitude sized so the linear
    // response overshoots the boundary
    const auto& grid = u0.grid;
    int kstar = 0;
    if (opts.sector_mode != INT_MIN) {
        kstar = opts.sector_mode;
    } else {
        double best = -1.0;
        for (std::size_t i = 0; i < grid->size(); ++i)
            if (op.multiplier()[i] > best) {
                best = op.multiplier()[i];
                kstar = grid->mode_index(i, 0);
            }
    }
    double phi = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i)
        if (grid->mode_index(i, 0) == kstar)
            phi = std::max(phi, op.multiplier()[i]);
    if (phi <= 0.0) phi = 1.0;
    const double T = opts.T;
    const double al = params.alpha;
    const double gain =
        al > 0.0 ? (1.0 - (1.0 - std::exp(-al * T)) / (al * T)) / al : 0.5 * T;
    const double V = grid->box_volume();
    const double target = std::sqrt(1.5 * domain.threshold() / V);
    const double A = target / (phi * std::max(gain, 1e-12));
    const double k = 2.0 * std::numbers::pi * kstar / grid->box_length();
    const bool mult = params.noise_kind == NoiseKind::multiplicative;
    for (std::size_t n = 0; n < nsteps; ++n) {
        const double ramp = (static_cast<double>(n) + 1.0) /
                            static_cast<double>(nsteps);
        Field& f = h.controls[n];
        for (std::size_t i = 0; i < grid->size(); ++i) {
            const double x = grid->coordinate(
                static_cast<int>(grid->dim() == 1 ? i
                                                  : i % grid->points_per_axis()));
            f.values[i] = mult ? cplx{ramp * A * std::cos(k * x), 0.0}
                               : ramp * A *
                                     cplx{std::cos(k * x), std::sin(k * x)};
        }
    }
    return h;
}

}  // namespace

ActionResult minimize_action(const Field& u0, const SdeParams& params,
                             const NoiseOperator& op, const Domain& domain,
                             const MinimizeOptions& opts) {
    const std::size_t nsteps =
        static_cast<std::size_t>(std::llround(opts.T / params.dt));
    if (nsteps < 1) throw std::invalid_argument("minimize_action: T too short");

    ActionResult result;
    ControlPath h = make_initial_control(u0, params, op, domain, opts, nsteps);

    // degenerate guard: start already outside the closure
    {
        Spectral sp(u0.grid);
        if (domain.gap(sp, u0) <= 0.0) {
            result.control.dt = params.dt;
            result.control.controls.assign(nsteps, Field(u0.grid));
            result.action_value = 0.0;
            result.terminal_gap = 0.0;
            result.converged = true;
            result.trajectory =
                solve_skeleton(u0, result.control, params, op);
            return result;
        }
    }

    // h = 0 with u_T inside the domain is a critical point of the penalized
    // objective (the terminal functional has zero gradient at the origin), so
    // the first stage must weigh the penalty strongly enough that descent does
    // not collapse the control. Size mu0 against the initial action scale.
    const double thr = domain.threshold();
    const double init_action = action(h);
    double mu = std::max(opts.mu0,
                         8.0 * std::max(init_action, 1e-3) / (thr * thr));
    const ControlPath h_init = h;
    int total_iters = 0;
    ObjectiveEval ev =
        objective_with_gradient(u0, h, params, op, domain, mu, opts.sector_mode);

    for (int outer = 0; outer < opts.max_outer; ++outer) {
        double step = 1.0;
        std::vector<Field> prev_grad;
        ControlPath prev_h;
        for (int inner = 0; inner < opts.max_inner; ++inner) {
            ++total_iters;
            // Barzilai-Borwein step length when history is available
            if (!prev_grad.empty()) {
                double num = 0.0, den = 0.0;
                for (std::size_t n = 0; n < h.controls.size(); ++n) {
                    Field dh = h.controls[n];
                    for (std::size_t i = 0; i < dh.values.size(); ++i)
                        dh.values[i] -= prev_h.controls[n].values[i];
                    Field dg = ev.gradient[n];
                    for (std::size_t i = 0; i < dg.values.size(); ++i)
                        dg.values[i] -= prev_grad[n].values[i];
                    num += inner_l2(dh, dh);
                    den += inner_l2(dh, dg);
                }
                if (den > 0.0) step = num / den;
                step = std::clamp(step, 1e-12, 1e6);
            }
            double gnorm2 = 0.0;
            for (const auto& g : ev.gradient) gnorm2 += inner_l2(g, g);
            if (gnorm2 <= 0.0) break;

            bool accepted = false;
            for (int bt = 0; bt < 40; ++bt) {
                ControlPath trial = h;
                for (std::size_t n = 0; n < trial.controls.size(); ++n)
                    for (std::size_t i = 0; i < trial.controls[n].values.size();
                         ++i)
                        trial.controls[n].values[i] -=
                            step * ev.gradient[n].values[i];
                ObjectiveEval evt = objective_with_gradient(
                    u0, trial, params, op, domain, mu, opts.sector_mode);
                if (evt.value < ev.value - 1e-4 * step * gnorm2) {
                    prev_h = h;
                    prev_grad = ev.gradient;
                    const double rel =
                        (ev.value - evt.value) / std::max(std::abs(ev.value), 1e-300);
                    h = std::move(trial);
                    ev = std::move(evt);
                    accepted = true;
                    if (rel < opts.rel_tol) inner = opts.max_inner;  // converged
                    break;
                }
                step *= 0.25;
            }
            if (!accepted) break;
        }
        if (ev.penalty_gap <= opts.gap_tol) break;
        mu *= opts.mu_growth;
        // recover from a collapse to the degenerate zero-control point
        if (action(h) < 1e-10 && ev.penalty_gap > 0.9 * thr &&
            init_action > 0.0)
            h = h_init;
        ev = objective_with_gradient(u0, h, params, op, domain, mu,
                                     opts.sector_mode);
    }

    result.control = h;
    result.action_value = action(h);
    result.iterations = total_iters;
    result.trajectory = solve_skeleton(u0, h, params, op);
    if (opts.sector_mode == INT_MIN) {
        result.terminal_gap = terminal_gap(u0, h, params, op, domain);
    } else {
        result.terminal_gap = ev.penalty_gap;
    }
    result.converged = result.terminal_gap <= std::max(opts.gap_tol, 1e-6);
    return result;
}

double action_lower_bound(double alpha, double dist, double R,
                          double phi_op_norm) {
    return alpha * dist * dist / (8.0 * R * R * phi_op_norm * phi_op_norm);
}

QuasipotentialReport quasipotential_report(
    const Field& u0, const SdeParams& params, const NoiseOperator& op,
    const Domain& domain, const std::vector<double>& T_list,
    const std::vector<int>& sectors, const std::vector<double>& rho_list) {
    QuasipotentialReport rep;
    rep.e_bar = 0.0;
    bool have = false;
    for (double T : T_list) {
        MinimizeOptions o;
        o.T = T;
        ActionResult r = minimize_action(u0, params, op, domain, o);
        rep.cells.push_back({T, INT_MIN, 0.0, r.action_value, r.converged});
        if (r.converged && (!have || r.action_value < rep.e_bar)) {
            rep.e_bar = r.action_value;
            have = true;
        }
    }
    const double T_mid = T_list.empty() ? 1.0 : T_list[T_list.size() / 2];
    for (int s : sectors) {
        MinimizeOptions o;
        o.T = T_mid;
        o.sector_mode = s;
        ActionResult r = minimize_action(u0, params, op, domain, o);
        rep.cells.push_back({T_mid, s, 0.0, r.action_value, r.converged});
    }
    for (double rho : rho_list) {
        // start on the strongest noise mode at mass rho^2
        Field start(u0.grid);
        int kstar = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < u0.grid->size(); ++i)
            if (op.multiplier()[i] > best) {
                best = op.multiplier()[i];
                kstar = u0.grid->mode_index(i, 0);
            }
        const double k = 2.0 * std::numbers::pi * kstar / u0.grid->box_length();
        const double A = rho / std::sqrt(u0.grid->box_volume());
        for (std::size_t i = 0; i < start.values.size(); ++i) {
            const double x = u0.grid->coordinate(static_cast<int>(
                u0.grid->dim() == 1 ? i : i % u0.grid->points_per_axis()));
            start.values[i] = A * cplx{std::cos(k * x), std::sin(k * x)};
        }
        MinimizeOptions o;
        o.T = T_mid;
        ActionResult r = minimize_action(start, params, op, domain, o);
        rep.cells.push_back({T_mid, INT_MIN, rho, r.action_value, r.converged});
    }
    const double r = domain.radius;
    rep.lower_bound =
        action_lower_bound(params.alpha, r, r, op.operator_norm_l2());
    return rep;
}

}  // namespace snse
