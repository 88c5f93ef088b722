#pragma once

#include "snse/dynamics.hpp"
#include "snse/exit.hpp"

#include <climits>
#include <vector>

namespace snse {

// Action of a piecewise-constant control: dt * sum 1/2 ||h_n||_{L2}^2.
double action(const ControlPath& h);

/// Smallest boundary deficit of the controlled trajectory over [0,T];
/// zero when the skeleton leaves the domain.
double terminal_gap(const Field& u0, const ControlPath& h,
                    const SdeParams& params, const NoiseOperator& op,
                    const Domain& domain);

enum class InitKind { zero, linear_ansatz, warm_start };

struct MinimizeOptions {
    double T = 1.0;
    InitKind init = InitKind::linear_ansatz;
    ControlPath warm;         // used when init == warm_start
    int max_outer = 10;       // penalty stages
    int max_inner = 400;      // descent iterations per stage
    double mu0 = 1.0;         // initial penalty weight
    double mu_growth = 10.0;
    double gap_tol = 1e-8;
    double rel_tol = 1e-12;   // inner stopping on relative J change
    int sector_mode = INT_MIN;  // restrict the terminal functional to one
                                // signed Fourier mode (e_N proxy); INT_MIN off
};

struct ActionResult {
    ControlPath control;
    double action_value = 0.0;
    Trajectory trajectory;
    double terminal_gap = 0.0;
    bool converged = false;
    int iterations = 0;
};

ActionResult minimize_action(const Field& u0, const SdeParams& params,
                             const NoiseOperator& op, const Domain& domain,
                             const MinimizeOptions& opts);

/// Objective value and adjoint gradient of
///   J(h) = action(h) + mu/2 * max(0, thr - F(u_T))^2
/// for the current penalty configuration (exposed for validation).
struct ObjectiveEval {
    double value = 0.0;
    double penalty_gap = 0.0;  // the terminal deficit inside the penalty
    std::vector<Field> gradient;  // one field per control interval
};

ObjectiveEval objective_with_gradient(const Field& u0, const ControlPath& h,
                                      const SdeParams& params,
                                      const NoiseOperator& op,
                                      const Domain& domain, double mu,
                                      int sector_mode = INT_MIN,
                                      bool want_gradient = true);

struct GradientCheckReport {
    double max_rel_error = 0.0;
    std::vector<double> per_direction;
};

GradientCheckReport gradient_check(const Field& u0, const ControlPath& h,
                                   const SdeParams& params,
                                   const NoiseOperator& op,
                                   const Domain& domain, double mu,
                                   int n_directions, std::uint64_t seed,
                                   double fd_step = 1e-5);

/// Analytic action lower bound for an l2 ball: alpha d^2/(8 R^2 ||Phi||_c^2)
/// with d the distance from 0 to the boundary and D inside the R-ball.
double action_lower_bound(double alpha, double dist, double R,
                          double phi_op_norm);

struct QuasipotentialCell {
    double T = 0.0;
    int sector = INT_MIN;
    double rho = 0.0;  // start-ball radius (0: start at the origin)
    double action_value = 0.0;
    bool converged = false;
};

struct QuasipotentialReport {
    std::vector<QuasipotentialCell> cells;
    double e_bar = 0.0;        // min over T from the origin
    double lower_bound = 0.0;  // Lemma-style analytic bound
};

QuasipotentialReport quasipotential_report(
    const Field& u0, const SdeParams& params, const NoiseOperator& op,
    const Domain& domain, const std::vector<double>& T_list,
    const std::vector<int>& sectors, const std::vector<double>& rho_list = {});

}  // namespace snse
