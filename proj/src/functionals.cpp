#include "snse/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace snse {

double mass(const Field& u) {
    const double n = l2_norm(u);
    return n * n;
}

namespace {

double potential_integral(const Field& u, double sigma) {
    // integral |u|^{2 sigma + 2}
    double s = 0.0;
    for (const auto& z : u.values) s += std::pow(std::norm(z), sigma + 1.0);
    return s * u.grid->cell_volume();
}

}  // namespace

double hamiltonian(const Spectral& sp, const Field& u, int lambda, double sigma) {
    const double g = gradient_l2(sp, u);
    const double pot = potential_integral(u, sigma);
    return 0.5 * g * g - lambda * pot / (2.0 * sigma + 2.0);
}

double psi(const Spectral& sp, const Field& u, int lambda, double sigma) {
    const double g = gradient_l2(sp, u);
    const double pot = potential_integral(u, sigma);
    return 0.5 * g * g - 0.5 * lambda * pot;
}

double gn_constant(double sigma, int dim, const Spectral& sp, int max_iters,
                   double tol) {
    if (sigma * dim >= 2.0)
        throw std::invalid_argument("gn_constant: need sigma*dim < 2");
    const auto& grid = sp.grid();
    const double p = 2.0 * sigma + 2.0;
    const double sd = sigma * dim;
    const std::size_t n = grid->size();
    const int na = grid->points_per_axis();
    const double L = grid->box_length();

    // localized Gaussian seed, centered in the box
    Field u(grid);
    for (std::size_t i = 0; i < n; ++i) {
        double r2 = 0.0;
        if (dim == 1) {
            const double x = grid->coordinate(static_cast<int>(i)) - 0.5 * L;
            r2 = x * x;
        } else {
            const double x = grid->coordinate(static_cast<int>(i % na)) - 0.5 * L;
            const double y = grid->coordinate(static_cast<int>(i / na)) - 0.5 * L;
            r2 = x * x + y * y;
        }
        u.values[i] = cplx{std::exp(-0.5 * r2), 0.0};
    }

    auto log_ratio = [&](const Field& v, double& l2, double& grad, double& lp) {
        l2 = l2_norm(v);
        grad = gradient_l2(sp, v);
        lp = 0.0;
        for (const auto& z : v.values) lp += std::pow(std::abs(z.real()), p);
        lp *= v.grid->cell_volume();
        return std::log(lp) - (p - sd) * std::log(l2) - sd * std::log(grad) -
               std::log(p);
    };

    double l2, grad, lp;
    double J = log_ratio(u, l2, grad, lp);
    double step = 0.1;
    for (int it = 0; it < max_iters; ++it) {
        // gradient of the log ratio with respect to the real field
        Field lap = u;
        sp.apply_minus_laplacian(lap);
        Field g(grid);
        for (std::size_t i = 0; i < n; ++i) {
            const double a = u.values[i].real();
            const double dlp = p * std::pow(std::abs(a), p - 2.0) * a / lp;
            const double dl2 = (p - sd) * a / (l2 * l2);
            const double dgr = sd * lap.values[i].real() / (grad * grad);
            g.values[i] = cplx{dlp - dl2 - dgr, 0.0};
        }
        bool improved = false;
        for (int bt = 0; bt < 30; ++bt) {
            Field trial = u;
            for (std::size_t i = 0; i < n; ++i)
                trial.values[i] += step * g.values[i];
            const double tn = l2_norm(trial);
            for (auto& z : trial.values) z /= tn;
            double tl2, tgrad, tlp;
            const double Jt = log_ratio(trial, tl2, tgrad, tlp);
            if (std::isfinite(Jt) && Jt > J) {
                const double dJ = Jt - J;
                u = trial;
                J = Jt;
                l2 = tl2;
                grad = tgrad;
                lp = tlp;
                improved = true;
                if (dJ < tol) return std::exp(J);
                step *= 1.5;
                break;
            }
            step *= 0.5;
        }
        if (!improved) return std::exp(J);
    }
    return std::exp(J);
}

PaperConstants paper_constants(double sigma, int dim, double C) {
    if (sigma * dim >= 2.0)
        throw std::invalid_argument("paper_constants: need sigma*dim < 2");
    PaperConstants c;
    c.sigma = sigma;
    c.dim = dim;
    c.gn_constant_C = C;
    const double gap = 2.0 - sigma * dim;
    const double raw =
        2.0 * sigma * gap / ((sigma + 2.0) * gap + 2.0 * sigma * (4.0 * sigma + 3.0));
    c.beta = std::max(raw, 2.0);
    c.c_sigma = 3.0 * (sigma + 1.0) / (4.0 * sigma + 3.0);
    c.m_sigma_d = 1.0 + 2.0 * sigma / gap;
    c.mass_exponent = 2.0 + 4.0 * sigma / gap;
    return c;
}

double modified_hamiltonian(const Spectral& sp, const Field& u,
                            const PaperConstants& consts, int lambda) {
    const double H = hamiltonian(sp, u, lambda, consts.sigma);
    const double n2 = l2_norm(u);
    return H + consts.beta * consts.gn_constant_C *
                   std::pow(n2, consts.mass_exponent);
}

double b_rho(double rho, const PaperConstants& consts) {
    if (!(rho > 0.0)) throw std::invalid_argument("b_rho: rho must be > 0");
    return 8.0 * rho + std::pow(2.0 * rho / (consts.gn_constant_C * consts.sigma),
                                1.0 / consts.m_sigma_d);
}

double t_l_rho_l2(double rho, double L, double hs0) {
    if (!(rho > 0.0 && L > 0.0 && hs0 > 0.0))
        throw std::invalid_argument("t_l_rho_l2: arguments must be positive");
    return rho * rho / (50.0 * hs0 * hs0 * L);
}

double t_l_rho_mult(double rho, double L, double alpha,
                    const PaperConstants& consts, double hs_s, double c_s_inf) {
    if (!(rho > 0.0 && L > 0.0 && alpha > 0.0 && hs_s > 0.0 && c_s_inf > 0.0))
        throw std::invalid_argument("t_l_rho_mult: arguments must be positive");
    const double b = b_rho(rho, consts);
    const double arg = alpha * consts.c_sigma * rho * rho /
                       (10.0 * b * b * c_s_inf * c_s_inf * hs_s * hs_s * L);
    if (arg <= 1.0)
        throw std::domain_error("t_l_rho_mult: empty time window (log arg <= 1)");
    return std::log(arg) / (4.0 * alpha * consts.c_sigma);
}

}  // namespace snse
