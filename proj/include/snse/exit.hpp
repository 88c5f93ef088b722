#pragma once

#include "snse/dynamics.hpp"
#include "snse/functionals.hpp"
#include "snse/noise.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace snse {

enum class DomainKind { l2_ball, h1_ball, htilde_sublevel };

/// Flow-invariant region around 0. Membership is "boundary functional below
/// threshold": mass < r^2, ||u||_{H1}^2 < r^2, or H_tilde < level.
struct Domain {
    DomainKind kind = DomainKind::l2_ball;
    double radius = 1.0;  // ball radius r, or sublevel value for htilde
    PaperConstants consts;  // used by the htilde kind
    int lambda = 1;         // sign of the nonlinearity for htilde

    double threshold() const;
    double boundary_functional(const Spectral& sp, const Field& u) const;
    bool contains(const Spectral& sp, const Field& u) const;
    double gap(const Spectral& sp, const Field& u) const;  // threshold - value
};

struct ExitRecord {
    double tau = 0.0;
    bool exited = false;
    double mass_at_exit = 0.0;
    double htilde_at_exit = 0.0;
    int sector = 0;  // signed leading-Fourier-mode index at exit
    std::vector<double> boundary_coordinates;  // |u_hat| of leading modes
    std::uint64_t seed = 0;
};

struct ExitStats {
    std::size_t n_paths = 0;
    std::size_t censored_count = 0;
    double mean_tau = 0.0;
    double tau_ci95 = 0.0;  // half-width
    double laplace_estimate = 0.0;  // mean of exp(-2 alpha tau), uncensored
    double laplace_se = 0.0;
    std::map<int, std::size_t> sector_histogram;
};

ExitRecord first_exit(const Field& u0, const SdeParams& params,
                      const NoiseOperator& op, const Domain& domain,
                      double t_max, std::uint64_t master_seed,
                      std::uint64_t trajectory_id);

struct EnsembleResult {
    std::vector<ExitRecord> records;
    ExitStats stats;
};

EnsembleResult mc_exit_ensemble(const Field& u0, const SdeParams& params,
                                const NoiseOperator& op, const Domain& domain,
                                std::size_t n_paths, double t_max,
                                std::uint64_t master_seed, int n_threads = 0);

ExitStats aggregate_stats(const std::vector<ExitRecord>& records, double alpha);

struct LaplaceReport {
    bool valid = false;
    double predicted = 0.0;
    double estimate = 0.0;
    double se = 0.0;
    double z = 0.0;
};

/// Compares mean exp(-2 alpha tau) against 1 - 2 alpha r^2 / (eps hs0^2).
LaplaceReport laplace_identity_check(const ExitStats& stats, double alpha,
                                     double r_squared, double epsilon,
                                     double hs0);

struct TailBoundReport {
    double bound = 0.0;      // 3 exp(-rho^2/(48 eps ||Phi||^2 T))
    bool vacuous = false;    // bound >= 1
    double empirical = 0.0;  // MC estimate of the sup-fluctuation probability
    double se = 0.0;
    std::size_t n_paths = 0;
};

TailBoundReport mass_tail_bound_check(const Field& u0, const SdeParams& params,
                                      const NoiseOperator& op, double rho,
                                      double T, std::size_t n_paths,
                                      std::uint64_t master_seed);

struct ScalingCell {
    double epsilon = 0.0;
    ExitStats stats;
};

struct ScalingFit {
    double slope = 0.0;      // of log mean tau against 1/eps
    double intercept = 0.0;
    bool monotone = true;    // mean tau increasing as eps decreases
    std::vector<ScalingCell> table;
};

ScalingFit scaling_fit(const Field& u0, const SdeParams& params_base,
                       const NoiseOperator& op, const Domain& domain,
                       const std::vector<double>& epsilons, std::size_t n_paths,
                       double t_max, std::uint64_t master_seed,
                       int n_threads = 0);

std::map<int, std::size_t> exit_point_histogram(
    const std::vector<ExitRecord>& records);

}  // namespace snse
