#include "snse/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace snse {

NoiseOperator::NoiseOperator(std::shared_ptr<const GridSpec> grid,
                             NoiseProfile profile, bool real_valued_output,
                             double smoothness_check_s,
                             double smoothness_check_bound)
    : grid_(std::move(grid)), real_(real_valued_output) {
    const std::size_t n = grid_->size();
    multiplier_.assign(n, 0.0);

    if (auto* g = std::get_if<GaussianCutoff>(&profile)) {
        if (!(g->k0 > 0.0))
            throw std::invalid_argument("gaussian_cutoff: k0 must be > 0");
        for (std::size_t i = 0; i < n; ++i)
            multiplier_[i] = std::exp(-grid_->k_squared(i) / (2.0 * g->k0 * g->k0));
        profile_name_ = "gaussian_cutoff";
    } else if (auto* s = std::get_if<SharpCutoff>(&profile)) {
        if (!(s->k_max >= 0.0))
            throw std::invalid_argument("sharp_cutoff: k_max must be >= 0");
        const double k2max = s->k_max * s->k_max;
        for (std::size_t i = 0; i < n; ++i)
            multiplier_[i] = (grid_->k_squared(i) <= k2max * (1.0 + 1e-12)) ? 1.0 : 0.0;
        profile_name_ = "sharp_cutoff";
    } else if (auto* c = std::get_if<CustomProfile>(&profile)) {
        if (c->table.size() != n)
            throw std::invalid_argument("custom profile: table size mismatch");
        for (double v : c->table)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("custom profile: entries must be finite and >= 0");
        multiplier_ = c->table;
        profile_name_ = "custom";
    } else if (auto* m = std::get_if<SingleMode>(&profile)) {
        bool hit = false;
        for (std::size_t i = 0; i < n; ++i) {
            bool match = std::abs(grid_->mode_index(i, 0)) == std::abs(m->mode);
            for (int a = 1; a < grid_->dim(); ++a)
                match = match && grid_->mode_index(i, a) == 0;
            if (match) {
                multiplier_[i] = 1.0;
                hit = true;
            }
        }
        if (!hit) throw std::invalid_argument("single_mode: mode not on grid");
        profile_name_ = "single_mode";
    }

    if (real_) {
        // real-valued increments need phi(k) = phi(-k)
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t j = i;
            if (grid_->dim() == 1) {
                const int nn = grid_->points_per_axis();
                j = (i == 0) ? 0 : static_cast<std::size_t>(nn) - i;
            } else {
                const int nn = grid_->points_per_axis();
                const std::size_t ix = i % nn, iy = i / nn;
                const std::size_t jx = (ix == 0) ? 0 : nn - ix;
                const std::size_t jy = (iy == 0) ? 0 : nn - iy;
                j = jy * nn + jx;
            }
            const double avg = 0.5 * (multiplier_[i] + multiplier_[j]);
            multiplier_[i] = avg;
            multiplier_[j] = avg;
        }
    }

    double s0 = 0.0, s1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p2 = multiplier_[i] * multiplier_[i];
        s0 += p2;
        s1 += (1.0 + grid_->k_squared(i)) * p2;
    }
    hs_l2_ = std::sqrt(s0);
    hs_h1_ = std::sqrt(s1);

    if (smoothness_check_bound > 0.0) {
        const double hs_s = hs_norm(smoothness_check_s);
        if (hs_s > smoothness_check_bound)
            throw std::invalid_argument(
                "noise profile fails the H^s Hilbert-Schmidt bound");
    }

    spectral_ = std::make_shared<Spectral>(grid_);
}

double NoiseOperator::hs_norm(double s) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < multiplier_.size(); ++i)
        acc += std::pow(1.0 + grid_->k_squared(i), s) * multiplier_[i] * multiplier_[i];
    return std::sqrt(acc);
}

double NoiseOperator::operator_norm_l2() const {
    return *std::max_element(multiplier_.begin(), multiplier_.end());
}

double NoiseOperator::f_phi_value() const {
    return hs_l2_ * hs_l2_ / grid_->box_volume();
}

Field NoiseOperator::f_phi() const {
    Field out(grid_);
    const double v = f_phi_value();
    for (auto& z : out.values) z = cplx{v, 0.0};
    return out;
}

Field NoiseOperator::apply(const Field& u) const {
    if (!(*u.grid == *grid_))
        throw std::invalid_argument("NoiseOperator::apply: grid mismatch");
    Field out = u;
    spectral_->forward(out.values);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] *= multiplier_[i];
    spectral_->inverse(out.values);
    return out;
}

Field NoiseOperator::sample_increment(double dt, const GaussianStream& rng,
                                      std::uint64_t step_index) const {
    Field out(grid_);
    if (dt == 0.0) return out;
    if (dt < 0.0) throw std::invalid_argument("sample_increment: dt must be >= 0");
    const std::size_t n = grid_->size();
    // White noise on the lattice: site variance 1/dx^d so the increment of
    // the cylindrical process over dt has the right covariance after Phi.
    const double site_sd = std::sqrt(dt / grid_->cell_volume());
    if (real_) {
        for (std::size_t i = 0; i < n; ++i)
            out.values[i] = cplx{site_sd * rng.normal(step_index, i), 0.0};
    } else {
        const double c = site_sd / std::sqrt(2.0);
        for (std::size_t i = 0; i < n; ++i)
            out.values[i] = cplx{c * rng.normal(step_index, 2 * i),
                                 c * rng.normal(step_index, 2 * i + 1)};
    }
    spectral_->forward(out.values);
    for (std::size_t i = 0; i < n; ++i) out.values[i] *= multiplier_[i];
    spectral_->inverse(out.values);
    if (real_)
        for (auto& z : out.values) z = cplx{z.real(), 0.0};
    return out;
}

NoiseOperator make_noise_operator(std::shared_ptr<const GridSpec> grid,
                                  NoiseProfile profile,
                                  bool real_valued_output) {
    return NoiseOperator(std::move(grid), std::move(profile), real_valued_output);
}

}  // namespace snse
