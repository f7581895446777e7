// models.hpp: three-level Lambda system, Rabi model with a lossy photon mode, analytic references

#pragma once

#include <limits>
#include <utility>

#include "tclae/liouvillian.hpp"

namespace tclae {

struct ThreeLevelParams {
    double omega1{0.5};
    double omegaE{1.0};
    double Gamma0{0.5};
    double Gamma1{0.5};
    double g0{0.1};
    double g1{0.1};
};

// Levels ordered {|0>, |1>, |e>}. eps = max(|g0|, |g1|), L1 the coupling commutator divided by eps.
SplitLiouvillian three_level(const ThreeLevelParams& p);

struct RabiParams {
    double omega_ph{1.0};
    double omega_eg{1.0};
    double kappa{1.0};
    double g{0.05};
    int n_tr{10};

    cd gamma_plus() const { return cd(kappa / 2.0, omega_ph + omega_eg); }
    cd gamma_minus() const { return cd(kappa / 2.0, omega_ph - omega_eg); }
    cd kappa_bar() const { return cd(kappa, 2.0 * omega_ph); }
};

// Qubit operators in the basis {|g>, |e>}.
CMatrix sigma_minus();
CMatrix sigma_plus();
CMatrix sigma_z();
CMatrix sigma_x();
CMatrix annihilation(int n_tr);

// Composite A (photon) (x) B (qubit); eps = g, L1 = -i[(a^dag + a) (x) sigma_x, .]
SplitLiouvillian rabi(const RabiParams& p);

// Columns vec(|0><0| (x) E_mn), column index n*2 + m, so reduced coordinates equal vec(rho_B).
CMatrix rabi_qubit_basis(const RabiParams& p);

constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

struct RabiAnalytic {
    RabiParams p;

    cd c_plus(double t) const;
    cd c_minus(double t) const;
    // K(j,k) = c_j + conj(c_k), index 0 = '+', 1 = '-'
    CMatrix kossakowski(double t) const;
};

// Second-order generator on vec(rho_B) (column stacking); t = kInfiniteTime for the asymptotic one.
CMatrix rabi_analytic_F(const RabiParams& p, double t);

// Second-order K map, d^2 x 4, acting on vec(rho_B).
CMatrix rabi_analytic_K(const RabiParams& p);

// Closed-form eigenvalues of K(infinity), larger first.
std::pair<double, double> k_matrix_eigenvalues(const RabiParams& p);

} // namespace tclae
