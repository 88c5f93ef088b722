#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

namespace snse {

using cplx = std::complex<double>;

/// Periodic grid on [0, L)^d with a power-of-two number of points per axis.
/// Wavenumbers follow the standard FFT ordering, k_j = 2*pi*j/L with j
/// wrapped to [-n/2, n/2).
class GridSpec {
public:
    GridSpec(int dim, int points_per_axis, double box_length);

    int dim() const { return dim_; }
    int points_per_axis() const { return n_; }
    double box_length() const { return length_; }
    double spacing() const { return length_ / n_; }
    std::size_t size() const { return size_; }          // total mode count
    double cell_volume() const;                          // spacing^dim
    double box_volume() const;                           // length^dim

    // wavenumber of axis-index j (0 <= j < n), FFT ordering
    double wavenumber(int j) const { return wavenumbers_[j]; }
    // |k|^2 of flat site index
    double k_squared(std::size_t flat) const;
    // signed integer mode index per axis of a flat index
    int mode_index(std::size_t flat, int axis) const;
    // physical coordinate of axis-index j
    double coordinate(int j) const { return spacing() * j; }

    bool operator==(const GridSpec& o) const {
        return dim_ == o.dim_ && n_ == o.n_ && length_ == o.length_;
    }

private:
    int dim_;
    int n_;
    double length_;
    std::size_t size_;
    std::vector<double> wavenumbers_;
};

GridSpec make_grid(int dim, int points_per_axis, double box_length);

/// Complex lattice function; value semantics, shares the grid by pointer.
struct Field {
    std::shared_ptr<const GridSpec> grid;
    std::vector<cplx> values;

    Field() = default;
    explicit Field(std::shared_ptr<const GridSpec> g)
        : grid(std::move(g)), values(grid->size(), cplx{0.0, 0.0}) {}

    std::size_t size() const { return values.size(); }
    cplx& operator[](std::size_t i) { return values[i]; }
    const cplx& operator[](std::size_t i) const { return values[i]; }

    bool all_finite() const;
};

std::shared_ptr<const GridSpec> make_grid_ptr(int dim, int points_per_axis,
                                              double box_length);

/// FFT engine bound to one grid (FFTW plans are cached per instance).
/// transform_* work in place on a field's value array.
class Spectral {
public:
    explicit Spectral(std::shared_ptr<const GridSpec> grid);
    ~Spectral();
    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;

    const std::shared_ptr<const GridSpec>& grid() const { return grid_; }

    void forward(std::vector<cplx>& v) const;   // unnormalized DFT
    void inverse(std::vector<cplx>& v) const;   // normalized (divides by N)

    /// Free Schroedinger group U(t): multiplier exp(i t |k|^2).
    void apply_free_group(Field& u, double t) const;

    /// -Laplacian via the |k|^2 multiplier.
    void apply_minus_laplacian(Field& u) const;

private:
    std::shared_ptr<const GridSpec> grid_;
    void* plan_fwd_;
    void* plan_bwd_;
    mutable std::vector<cplx> scratch_;
};

Field apply_free_group(const Spectral& sp, const Field& u, double t);

double l2_norm(const Field& u);
double lp_norm(const Field& u, double p);
double gradient_l2(const Spectral& sp, const Field& u);
double h1_norm(const Spectral& sp, const Field& u);

/// L2 inner product Re integral(u conj(v)) with quadrature weight spacing^d.
double inner_l2(const Field& u, const Field& v);

}  // namespace snse
