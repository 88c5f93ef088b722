#include "snse/grid.hpp"
#include "snse/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace snse;

namespace {

Field random_field(const std::shared_ptr<const GridSpec>& g, std::uint64_t seed,
                   double amp = 1.0) {
    GaussianStream rng(seed, 0);
    Field u(g);
    for (std::size_t i = 0; i < u.size(); ++i)
        u.values[i] = amp * cplx{rng.normal(0, 2 * i), rng.normal(0, 2 * i + 1)};
    return u;
}

}  // namespace

TEST_CASE("grid construction and spacing") {
    auto g = make_grid(1, 256, 2.0 * std::numbers::pi * 10.0);
    CHECK(g.spacing() == doctest::Approx(0.2454).epsilon(1e-3));
    CHECK(g.size() == 256);
    CHECK_THROWS(make_grid(1, 7, 1.0));
    CHECK_THROWS(make_grid(3, 64, 1.0));
    CHECK_THROWS(make_grid(1, 64, -1.0));
    auto g2 = make_grid(2, 64, 20.0);
    CHECK(g2.size() == 4096);
    CHECK(g2.cell_volume() == doctest::Approx(std::pow(20.0 / 64, 2)));
}

TEST_CASE("wavenumber layout") {
    auto g = make_grid(1, 8, 2.0 * std::numbers::pi);
    CHECK(g.wavenumber(0) == doctest::Approx(0.0));
    CHECK(g.wavenumber(1) == doctest::Approx(1.0));
    CHECK(g.wavenumber(3) == doctest::Approx(3.0));
    CHECK(g.wavenumber(4) == doctest::Approx(-4.0));
    CHECK(g.wavenumber(7) == doctest::Approx(-1.0));
    CHECK(g.mode_index(7, 0) == -1);
}

TEST_CASE("free group on an eigenmode") {
    auto g = make_grid_ptr(1, 64, 2.0 * std::numbers::pi);
    Spectral sp(g);
    const double k = 3.0;
    Field u(g);
    for (int j = 0; j < 64; ++j) {
        const double x = g->coordinate(j);
        u.values[j] = cplx{std::cos(k * x), std::sin(k * x)};
    }
    const double t = 0.7;
    Field v = apply_free_group(sp, u, t);
    const cplx phase{std::cos(t * k * k), std::sin(t * k * k)};
    for (int j = 0; j < 64; ++j)
        CHECK(std::abs(v.values[j] - u.values[j] * phase) < 1e-12);

    Field w = apply_free_group(sp, u, 0.0);
    for (int j = 0; j < 64; ++j) CHECK(w.values[j] == u.values[j]);
}

TEST_CASE("group law and isometry") {
    auto g = make_grid_ptr(1, 128, 13.0);
    Spectral sp(g);
    Field u = random_field(g, 42);
    const double n0 = l2_norm(u);
    const double h0 = h1_norm(sp, u);

    Field a = apply_free_group(sp, apply_free_group(sp, u, 0.3), -0.9);
    Field b = apply_free_group(sp, u, -0.6);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        diff = std::max(diff, std::abs(a.values[i] - b.values[i]));
    CHECK(diff / n0 < 1e-10);

    Field c = apply_free_group(sp, u, 1.7);
    CHECK(std::abs(l2_norm(c) - n0) / n0 < 1e-12);
    CHECK(std::abs(h1_norm(sp, c) - h0) / h0 < 1e-12);
}

TEST_CASE("norm quadrature") {
    auto g = make_grid_ptr(1, 64, 4.0);
    Spectral sp(g);

    Field u(g);
    for (auto& z : u.values) z = cplx{1.5, -0.5};
    const double V = g->box_volume();
    CHECK(l2_norm(u) == doctest::Approx(std::abs(cplx{1.5, -0.5}) * std::sqrt(V))
                            .epsilon(1e-13));
    CHECK(lp_norm(u, 4.0) ==
          doctest::Approx(std::abs(cplx{1.5, -0.5}) * std::pow(V, 0.25))
              .epsilon(1e-13));
    CHECK_THROWS(lp_norm(u, 0.5));

    // eigenmode gradient norm
    const double k = 2.0 * std::numbers::pi * 5.0 / g->box_length();
    Field e(g);
    for (int j = 0; j < 64; ++j) {
        const double x = g->coordinate(j);
        e.values[j] = cplx{std::cos(k * x), std::sin(k * x)};
    }
    CHECK(gradient_l2(sp, e) == doctest::Approx(k * l2_norm(e)).epsilon(1e-12));

    // normalized Gaussian re-measures to 1
    Field ga(g);
    for (int j = 0; j < 64; ++j) {
        const double x = g->coordinate(j) - 2.0;
        ga.values[j] = cplx{std::exp(-4.0 * x * x), 0.0};
    }
    const double n = l2_norm(ga);
    for (auto& z : ga.values) z /= n;
    CHECK(l2_norm(ga) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Parseval agreement") {
    auto g = make_grid_ptr(2, 16, 7.0);
    Spectral sp(g);
    Field u = random_field(g, 9);
    std::vector<cplx> v = u.values;
    sp.forward(v);
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    const double spectral =
        std::sqrt(s * g->cell_volume() / static_cast<double>(g->size()));
    CHECK(spectral == doctest::Approx(l2_norm(u)).epsilon(1e-12));
}

TEST_CASE("h1 norm identity") {
    auto g = make_grid_ptr(1, 64, 9.0);
    Spectral sp(g);
    Field u = random_field(g, 5);
    const double l2 = l2_norm(u), gr = gradient_l2(sp, u);
    CHECK(h1_norm(sp, u) ==
          doctest::Approx(std::sqrt(l2 * l2 + gr * gr)).epsilon(1e-13));
}
