#include "snse/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace snse {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

GridSpec::GridSpec(int dim, int points_per_axis, double box_length)
    : dim_(dim), n_(points_per_axis), length_(box_length) {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("GridSpec: dim must be 1 or 2");
    if (n_ < 8 || !is_pow2(n_))
        throw std::invalid_argument(
            "GridSpec: points_per_axis must be a power of two >= 8");
    if (!(box_length > 0.0))
        throw std::invalid_argument("GridSpec: box_length must be positive");
    size_ = 1;
    for (int a = 0; a < dim_; ++a) size_ *= static_cast<std::size_t>(n_);
    wavenumbers_.resize(n_);
    const double dk = 2.0 * std::numbers::pi / length_;
    for (int j = 0; j < n_; ++j) {
        const int m = (j < n_ / 2) ? j : j - n_;
        wavenumbers_[j] = dk * m;
    }
}

double GridSpec::cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= spacing();
    return v;
}

double GridSpec::box_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= length_;
    return v;
}

double GridSpec::k_squared(std::size_t flat) const {
    if (dim_ == 1) {
        const double k = wavenumbers_[flat];
        return k * k;
    }
    const double kx = wavenumbers_[flat % n_];
    const double ky = wavenumbers_[flat / n_];
    return kx * kx + ky * ky;
}

int GridSpec::mode_index(std::size_t flat, int axis) const {
    const int j = (axis == 0) ? static_cast<int>(flat % n_)
                              : static_cast<int>(flat / n_);
    return (j < n_ / 2) ? j : j - n_;
}

GridSpec make_grid(int dim, int points_per_axis, double box_length) {
    return GridSpec(dim, points_per_axis, box_length);
}

std::shared_ptr<const GridSpec> make_grid_ptr(int dim, int points_per_axis,
                                              double box_length) {
    return std::make_shared<const GridSpec>(dim, points_per_axis, box_length);
}

bool Field::all_finite() const {
    for (const auto& z : values)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

Spectral::Spectral(std::shared_ptr<const GridSpec> grid)
    : grid_(std::move(grid)), scratch_(grid_->size()) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    const int n = grid_->points_per_axis();
    auto* buf = reinterpret_cast<fftw_complex*>(scratch_.data());
    if (grid_->dim() == 1) {
        plan_fwd_ = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
        plan_bwd_ = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    } else {
        plan_fwd_ = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
        plan_bwd_ = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    if (!plan_fwd_ || !plan_bwd_)
        throw std::runtime_error("Spectral: FFTW planning failed");
}

Spectral::~Spectral() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void Spectral::forward(std::vector<cplx>& v) const {
    auto* buf = reinterpret_cast<fftw_complex*>(v.data());
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), buf, buf);
}

void Spectral::inverse(std::vector<cplx>& v) const {
    auto* buf = reinterpret_cast<fftw_complex*>(v.data());
    fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), buf, buf);
    const double scale = 1.0 / static_cast<double>(grid_->size());
    for (auto& z : v) z *= scale;
}

void Spectral::apply_free_group(Field& u, double t) const {
    if (!(*u.grid == *grid_))
        throw std::invalid_argument("apply_free_group: grid mismatch");
    if (t == 0.0) return;
    forward(u.values);
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const double phase = t * grid_->k_squared(i);
        u.values[i] *= cplx{std::cos(phase), std::sin(phase)};
    }
    inverse(u.values);
}

void Spectral::apply_minus_laplacian(Field& u) const {
    forward(u.values);
    for (std::size_t i = 0; i < u.values.size(); ++i)
        u.values[i] *= grid_->k_squared(i);
    inverse(u.values);
}

Field apply_free_group(const Spectral& sp, const Field& u, double t) {
    Field out = u;
    sp.apply_free_group(out, t);
    return out;
}

double l2_norm(const Field& u) {
    double s = 0.0;
    for (const auto& z : u.values) s += std::norm(z);
    return std::sqrt(s * u.grid->cell_volume());
}

double lp_norm(const Field& u, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    double s = 0.0;
    for (const auto& z : u.values) s += std::pow(std::abs(z), p);
    return std::pow(s * u.grid->cell_volume(), 1.0 / p);
}

double gradient_l2(const Spectral& sp, const Field& u) {
    // Parseval on the spectral side: sum |k|^2 |u_hat|^2 * dx^d / N
    std::vector<cplx> v = u.values;
    sp.forward(v);
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += u.grid->k_squared(i) * std::norm(v[i]);
    const double w = u.grid->cell_volume() / static_cast<double>(u.size());
    return std::sqrt(s * w);
}

double h1_norm(const Spectral& sp, const Field& u) {
    const double a = l2_norm(u);
    const double b = gradient_l2(sp, u);
    return std::sqrt(a * a + b * b);
}

double inner_l2(const Field& u, const Field& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i)
        s += u.values[i].real() * v.values[i].real() +
             u.values[i].imag() * v.values[i].imag();
    return s * u.grid->cell_volume();
}

}  // namespace snse
