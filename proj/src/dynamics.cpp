#include "snse/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace snse {

void SdeParams::validate(int dim) const {
    if (lambda != 1 && lambda != -1 && lambda != 0)
        throw std::invalid_argument(
            "params: lambda must be +1, -1, or 0 (nonlinearity off)");
    if (!(sigma > 0.0)) throw std::invalid_argument("params: sigma must be > 0");
    if (sigma * dim >= 2.0)
        throw std::invalid_argument("params: sigma*dim must be < 2");
    if (!(dt > 0.0)) throw std::invalid_argument("params: dt must be > 0");
    if (alpha < 0.0) throw std::invalid_argument("params: alpha must be >= 0");
    if (epsilon < 0.0) throw std::invalid_argument("params: epsilon must be >= 0");
}

Integrator::Integrator(std::shared_ptr<const GridSpec> grid, SdeParams params)
    : grid_(grid), params_(params), spectral_(std::move(grid)) {
    params_.validate(grid_->dim());
}

void Integrator::half_free(Field& u) const {
    spectral_.apply_free_group(u, 0.5 * params_.dt);
}

void Integrator::phase_and_damp(Field& u) const {
    const double dt = params_.dt;
    const double damp = std::exp(-params_.alpha * dt);
    const double lam = static_cast<double>(params_.lambda);
    const double sig = params_.sigma;
    for (auto& z : u.values) {
        const double theta = -lam * std::pow(std::norm(z), sig) * dt;
        z *= damp * cplx{std::cos(theta), std::sin(theta)};
    }
}

void Integrator::det_step(Field& u) const {
    half_free(u);
    phase_and_damp(u);
    half_free(u);
}

void Integrator::additive_step(Field& u, const NoiseOperator& op,
                               const GaussianStream& rng,
                               std::uint64_t step_index,
                               Field* record_increment) const {
    half_free(u);
    phase_and_damp(u);
    const Field inc = op.sample_increment(params_.dt, rng, step_index);
    const double se = std::sqrt(params_.epsilon);
    for (std::size_t i = 0; i < u.values.size(); ++i)
        u.values[i] += cplx{0.0, -se} * inc.values[i];
    if (record_increment) *record_increment = inc;
    half_free(u);
}

void Integrator::additive_step_with_increment(Field& u,
                                              const Field& increment) const {
    half_free(u);
    phase_and_damp(u);
    const double se = std::sqrt(params_.epsilon);
    for (std::size_t i = 0; i < u.values.size(); ++i)
        u.values[i] += cplx{0.0, -se} * increment.values[i];
    half_free(u);
}

void Integrator::multiplicative_step(Field& u, const NoiseOperator& op,
                                     const GaussianStream& rng,
                                     std::uint64_t step_index) const {
    if (!op.real_valued_output())
        throw std::invalid_argument(
            "multiplicative_step: noise operator must produce real fields");
    half_free(u);
    phase_and_damp(u);
    const Field inc = op.sample_increment(params_.dt, rng, step_index);
    const double se = std::sqrt(params_.epsilon);
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const double theta = -se * inc.values[i].real();
        u.values[i] *= cplx{std::cos(theta), std::sin(theta)};
    }
    half_free(u);
}

void Integrator::skeleton_step(Field& u, const NoiseOperator& op,
                               const Field& h, NoiseKind kind) const {
    half_free(u);
    phase_and_damp(u);
    const Field f = op.apply(h);
    const double dt = params_.dt;
    if (kind == NoiseKind::additive) {
        for (std::size_t i = 0; i < u.values.size(); ++i)
            u.values[i] += cplx{0.0, -dt} * f.values[i];
    } else if (kind == NoiseKind::multiplicative) {
        for (std::size_t i = 0; i < u.values.size(); ++i) {
            const double theta = -dt * f.values[i].real();
            u.values[i] *= cplx{std::cos(theta), std::sin(theta)};
        }
    }
    half_free(u);
}

namespace {

long long step_count(double T, double dt) {
    const long long n = std::llround(T / dt);
    if (n < 1) throw std::invalid_argument("horizon shorter than one step");
    return n;
}

struct Recorder {
    Trajectory traj;
    const Spectral& sp;
    const RunOptions& opts;
    const SdeParams& params;
    long long nsteps;

    void record(const Field& u, double t, long long step) {
        ScalarRecord r;
        r.t = t;
        r.mass = mass(u);
        r.hamiltonian = hamiltonian(sp, u, params.lambda, params.sigma);
        if (opts.consts)
            r.modified_hamiltonian =
                modified_hamiltonian(sp, u, *opts.consts, params.lambda);
        traj.scalars.push_back(r);
        const bool snap = (step == 0) || (step == nsteps) ||
                          (opts.snapshot_stride > 0 &&
                           step % opts.snapshot_stride == 0);
        if (snap) {
            traj.times.push_back(t);
            traj.snapshots.push_back(u);
        }
        if (!u.all_finite())
            throw std::runtime_error("integration produced NaN/Inf at step " +
                                     std::to_string(step));
    }
};

}  // namespace

Trajectory det_flow(const Field& u0, const SdeParams& params, double T,
                    const RunOptions& opts) {
    Integrator integ(u0.grid, params);
    const long long n = step_count(T, params.dt);
    Recorder rec{{}, integ.spectral(), opts, params, n};
    Field u = u0;
    rec.record(u, 0.0, 0);
    for (long long s = 0; s < n; ++s) {
        integ.det_step(u);
        rec.record(u, (s + 1) * params.dt, s + 1);
    }
    return std::move(rec.traj);
}

Trajectory solve_sde(const Field& u0, const SdeParams& params,
                     const NoiseOperator& op, double T,
                     std::uint64_t master_seed, std::uint64_t trajectory_id,
                     const RunOptions& opts,
                     std::vector<Field>* recorded_increments) {
    Integrator integ(u0.grid, params);
    const long long n = step_count(T, params.dt);
    Recorder rec{{}, integ.spectral(), opts, params, n};
    GaussianStream rng(master_seed, trajectory_id);
    Field u = u0;
    rec.record(u, 0.0, 0);
    Field inc;
    for (long long s = 0; s < n; ++s) {
        switch (params.noise_kind) {
            case NoiseKind::none:
                integ.det_step(u);
                break;
            case NoiseKind::additive:
                integ.additive_step(u, op, rng, static_cast<std::uint64_t>(s),
                                    recorded_increments ? &inc : nullptr);
                if (recorded_increments) recorded_increments->push_back(inc);
                break;
            case NoiseKind::multiplicative:
                integ.multiplicative_step(u, op, rng,
                                          static_cast<std::uint64_t>(s));
                break;
        }
        rec.record(u, (s + 1) * params.dt, s + 1);
    }
    return std::move(rec.traj);
}

Trajectory solve_skeleton(const Field& u0, const ControlPath& h,
                          const SdeParams& params, const NoiseOperator& op,
                          const RunOptions& opts) {
    if (h.controls.empty())
        throw std::invalid_argument("solve_skeleton: empty control path");
    if (std::abs(h.dt - params.dt) > 1e-14 * params.dt)
        throw std::invalid_argument("solve_skeleton: control dt mismatch");
    Integrator integ(u0.grid, params);
    const long long n = static_cast<long long>(h.controls.size());
    Recorder rec{{}, integ.spectral(), opts, params, n};
    Field u = u0;
    rec.record(u, 0.0, 0);
    for (long long s = 0; s < n; ++s) {
        integ.skeleton_step(u, op, h.controls[s], params.noise_kind);
        rec.record(u, (s + 1) * params.dt, s + 1);
    }
    return std::move(rec.traj);
}

Trajectory solve_additive_replay(const Field& u0,
                                 const std::vector<Field>& increments,
                                 const SdeParams& params,
                                 const RunOptions& opts) {
    Integrator integ(u0.grid, params);
    const long long n = static_cast<long long>(increments.size());
    if (n < 1) throw std::invalid_argument("solve_additive_replay: empty path");
    Recorder rec{{}, integ.spectral(), opts, params, n};
    Field u = u0;
    rec.record(u, 0.0, 0);
    for (long long s = 0; s < n; ++s) {
        integ.additive_step_with_increment(u, increments[s]);
        rec.record(u, (s + 1) * params.dt, s + 1);
    }
    return std::move(rec.traj);
}

Trajectory solve_via_convolution(const Field& u0,
                                 const std::vector<Field>& increments,
                                 const SdeParams& params,
                                 const RunOptions& opts) {
    if (params.noise_kind != NoiseKind::additive)
        throw std::invalid_argument("solve_via_convolution: additive only");
    for (const auto& w : increments)
        if (!(*w.grid == *u0.grid))
            throw std::invalid_argument(
                "solve_via_convolution: increment grid mismatch");
    Integrator integ(u0.grid, params);
    const long long n = static_cast<long long>(increments.size());
    if (n < 1) throw std::invalid_argument("solve_via_convolution: empty path");
    Recorder rec{{}, integ.spectral(), opts, params, n};
    const Spectral& sp = integ.spectral();
    const double dt = params.dt;
    const double damp = std::exp(-params.alpha * dt);
    const double se = std::sqrt(params.epsilon);
    const double lam = static_cast<double>(params.lambda);

    Field v = u0;
    Field Z(u0.grid);  // discrete stochastic convolution, starts at zero
    rec.record(v, 0.0, 0);  // u(0) = v(0) since Z(0)=0
    for (long long s = 0; s < n; ++s) {
        Field va = v;
        sp.apply_free_group(va, 0.5 * dt);
        Field Za = Z;
        sp.apply_free_group(Za, 0.5 * dt);
        // random-PDE step for v with the nonlinearity evaluated at u = v - iZ
        for (std::size_t i = 0; i < v.values.size(); ++i) {
            const cplx um = va.values[i] - cplx{0.0, 1.0} * Za.values[i];
            const cplx src =
                cplx{0.0, -lam * dt} * std::pow(std::norm(um), params.sigma) * um;
            v.values[i] = damp * (va.values[i] + src);
        }
        sp.apply_free_group(v, 0.5 * dt);
        // convolution update mirrors the noise chain's linear part
        for (std::size_t i = 0; i < Z.values.size(); ++i)
            Z.values[i] = damp * Za.values[i] + se * increments[s].values[i];
        sp.apply_free_group(Z, 0.5 * dt);

        Field u = v;
        for (std::size_t i = 0; i < u.values.size(); ++i)
            u.values[i] -= cplx{0.0, 1.0} * Z.values[i];
        rec.record(u, (s + 1) * dt, s + 1);
    }
    return std::move(rec.traj);
}

}  // namespace snse
