#pragma once

#include "snse/grid.hpp"

namespace snse {

/// Explicit constants from the Lyapunov analysis of the damped equation.
struct PaperConstants {
    double sigma = 1.0;
    int dim = 1;
    double gn_constant_C = 0.0;  // Gagliardo-Nirenberg constant on the grid
    double beta = 2.0;           // max(2*sigma*(2-sigma*d)/..., 2)
    double c_sigma = 0.0;        // 3(sigma+1)/(4 sigma+3)
    double m_sigma_d = 0.0;      // 1 + 2 sigma/(2 - sigma d)
    double mass_exponent = 0.0;  // 2 + 4 sigma/(2 - sigma d)
};

double mass(const Field& u);  // N(u) = ||u||_{L2}^2

// H = 1/2 ||grad u||^2 - lambda/(2 sigma + 2) * ||u||_{2s+2}^{2s+2}
double hamiltonian(const Spectral& sp, const Field& u, int lambda, double sigma);

// Psi = 1/2 ||grad u||^2 - lambda/2 * ||u||_{2s+2}^{2s+2}
double psi(const Spectral& sp, const Field& u, int lambda, double sigma);

/// Grid-sharp Gagliardo-Nirenberg constant: maximizes
///   ||u||_{2s+2}^{2s+2} / ((2s+2) ||u||_2^{2s+2-sd} ||grad u||_2^{sd})
/// by projected gradient ascent from a localized Gaussian seed.
double gn_constant(double sigma, int dim, const Spectral& sp,
                   int max_iters = 4000, double tol = 1e-10);

PaperConstants paper_constants(double sigma, int dim, double C);

// H_tilde = H + beta*C*||u||_2^{mass_exponent}
double modified_hamiltonian(const Spectral& sp, const Field& u,
                            const PaperConstants& consts, int lambda);

// H^1 bound for the H_tilde sublevel set: b(rho) = 8 rho + (2 rho/(C sigma))^{1/m}
double b_rho(double rho, const PaperConstants& consts);

// time horizons of the exit analysis
double t_l_rho_l2(double rho, double L, double hs0);
double t_l_rho_mult(double rho, double L, double alpha,
                    const PaperConstants& consts, double hs_s, double c_s_inf);

}  // namespace snse
