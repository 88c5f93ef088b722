#pragma once

#include "snse/grid.hpp"
#include "snse/rng.hpp"

#include <string>
#include <variant>
#include <vector>

namespace snse {

/// Multiplier profiles for the covariance square root Phi.
struct GaussianCutoff {
    double k0;  // phi(k) = exp(-|k|^2 / (2 k0^2))
};
struct SharpCutoff {
    double k_max;  // phi(k) = 1 for |k| <= k_max, else 0
};
struct CustomProfile {
    std::vector<double> table;  // one value per flat mode index
};
struct SingleMode {
    int mode;  // phi = 1 on modes +-mode only (real-symmetric pair)
};
using NoiseProfile =
    std::variant<GaussianCutoff, SharpCutoff, CustomProfile, SingleMode>;

/// Phi as a Fourier multiplier phi(k) >= 0. Samples increments of the
/// colored Wiener process Phi W_c and exposes the norms and the Ito
/// correction profile F_Phi the equations need.
class NoiseOperator {
public:
    NoiseOperator(std::shared_ptr<const GridSpec> grid, NoiseProfile profile,
                  bool real_valued_output,
                  double smoothness_check_s = 0.0,
                  double smoothness_check_bound = 0.0);

    const std::shared_ptr<const GridSpec>& grid() const { return grid_; }
    const std::vector<double>& multiplier() const { return multiplier_; }
    bool real_valued_output() const { return real_; }

    double hs_norm_l2() const { return hs_l2_; }   // s = 0
    double hs_norm_h1() const { return hs_h1_; }   // s = 1
    double hs_norm(double s) const;                // general smoothness index
    double operator_norm_l2() const;               // max_k phi(k)

    /// F_Phi(x) = sum_j (Phi e_j)(x)^2; constant for a multiplier.
    Field f_phi() const;
    double f_phi_value() const;  // the constant, (1/V) sum_k phi(k)^2

    /// Sample Phi dW over an interval dt. Gaussian in every mode, scaled so
    /// E||increment||_{L2}^2 = dt * hs_norm_l2^2. With real_valued_output the
    /// returned field has identically zero imaginary part.
    Field sample_increment(double dt, const GaussianStream& rng,
                           std::uint64_t step_index) const;

    /// Apply the multiplier to an arbitrary field (used by skeleton forcing).
    Field apply(const Field& u) const;

    const std::string& profile_name() const { return profile_name_; }

private:
    std::shared_ptr<const GridSpec> grid_;
    std::vector<double> multiplier_;
    bool real_;
    double hs_l2_ = 0.0;
    double hs_h1_ = 0.0;
    std::string profile_name_;
    std::shared_ptr<Spectral> spectral_;
};

NoiseOperator make_noise_operator(std::shared_ptr<const GridSpec> grid,
                                  NoiseProfile profile,
                                  bool real_valued_output);

}  // namespace snse
