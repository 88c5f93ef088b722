#pragma once

#include "snse/functionals.hpp"
#include "snse/grid.hpp"
#include "snse/noise.hpp"
#include "snse/rng.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace snse {

enum class NoiseKind { none, additive, multiplicative };

struct SdeParams {
    int lambda = 1;        // +1 focusing, -1 defocusing, 0 nonlinearity off
    double sigma = 1.0;    // nonlinearity power
    double alpha = 0.0;    // damping
    double epsilon = 0.0;  // noise intensity
    double dt = 1e-3;
    NoiseKind noise_kind = NoiseKind::none;

    void validate(int dim) const;
};

struct ScalarRecord {
    double t = 0.0;
    double mass = 0.0;
    double hamiltonian = 0.0;
    double modified_hamiltonian = 0.0;
};

struct Trajectory {
    std::vector<double> times;      // snapshot times
    std::vector<Field> snapshots;   // strided states
    std::vector<ScalarRecord> scalars;  // every step

    const Field& final_state() const { return snapshots.back(); }
};

/// One-step integrator: Strang splitting with exact substeps.
/// Step layout: U(dt/2), nonlinear phase, exact damping, noise, U(dt/2).
class Integrator {
public:
    Integrator(std::shared_ptr<const GridSpec> grid, SdeParams params);

    const SdeParams& params() const { return params_; }
    const Spectral& spectral() const { return spectral_; }
    const std::shared_ptr<const GridSpec>& grid() const { return grid_; }

    void det_step(Field& u) const;

    /// One step of the additive equation. When record_increment is non-null
    /// the sampled Phi dW field is stored there (for replay cross-checks).
    void additive_step(Field& u, const NoiseOperator& op,
                       const GaussianStream& rng, std::uint64_t step_index,
                       Field* record_increment = nullptr) const;

    /// Additive step driven by a previously recorded Phi dW increment.
    void additive_step_with_increment(Field& u, const Field& increment) const;

    /// One step of the Stratonovich multiplicative equation (real noise,
    /// exact unitary phase substep).
    void multiplicative_step(Field& u, const NoiseOperator& op,
                             const GaussianStream& rng,
                             std::uint64_t step_index) const;

    /// One step of the controlled skeleton; h is the control on this
    /// interval (piecewise constant), forced through Phi.
    void skeleton_step(Field& u, const NoiseOperator& op, const Field& h,
                       NoiseKind kind) const;

private:
    void half_free(Field& u) const;
    void phase_and_damp(Field& u) const;

    std::shared_ptr<const GridSpec> grid_;
    SdeParams params_;
    Spectral spectral_;
};

struct ControlPath {
    double dt = 0.0;
    std::vector<Field> controls;  // one per interval, piecewise constant

    double horizon() const { return dt * static_cast<double>(controls.size()); }
};

/// Driver options shared by the trajectory solvers.
struct RunOptions {
    int snapshot_stride = 0;          // 0: first/last only
    const PaperConstants* consts = nullptr;  // enables H-tilde in scalars
};

Trajectory det_flow(const Field& u0, const SdeParams& params, double T,
                    const RunOptions& opts = {});

Trajectory solve_sde(const Field& u0, const SdeParams& params,
                     const NoiseOperator& op, double T,
                     std::uint64_t master_seed, std::uint64_t trajectory_id,
                     const RunOptions& opts = {},
                     std::vector<Field>* recorded_increments = nullptr);

Trajectory solve_skeleton(const Field& u0, const ControlPath& h,
                          const SdeParams& params, const NoiseOperator& op,
                          const RunOptions& opts = {});

/// Replays the additive noise chain over a recorded increment sequence.
Trajectory solve_additive_replay(const Field& u0,
                                 const std::vector<Field>& increments,
                                 const SdeParams& params,
                                 const RunOptions& opts = {});

/// Duhamel-faithful cross-check solver for the additive equation: builds the
/// discrete stochastic convolution Z from a recorded increment sequence and
/// integrates the random PDE for v = u + iZ, returning u = v - iZ.
Trajectory solve_via_convolution(const Field& u0,
                                 const std::vector<Field>& increments,
                                 const SdeParams& params,
                                 const RunOptions& opts = {});

}  // namespace snse
