// perturb.hpp: eigenbasis perturbation series, geometric recursion, Laplace-method generator

#pragma once

#include <vector>

#include "tclae/spectral.hpp"

namespace tclae {

struct EigenbasisOp {
    CVector lambda;                 // eigenvalues of L0
    CMatrix B;                      // B(i,j) = <l_i|L1|r_j>
    CMatrix R;                      // right eigenvectors of L0
    CMatrix Ld;                     // R^{-1}
    std::vector<std::size_t> S, F;  // surviving / fast indices
    double gap{0.0};
    double tol_s{0.0};
};

struct PerturbSeries {
    std::vector<CMatrix> terms; // terms[n] multiplies eps^n; terms[0] = P_inv

    // sum_{n <= order} eps^n terms[n]
    CMatrix sum(double eps, std::size_t order) const;
};

struct GeometricSeries {
    std::vector<CMatrix> K; // d^2 x n_s
    std::vector<CMatrix> F; // n_s x n_s

    CMatrix K_sum(double eps, std::size_t order) const;
    CMatrix F_sum(double eps, std::size_t order) const;
};

EigenbasisOp to_eigenbasis(const SpectralData& spec0, const CMatrix& L1);

// R X Ld
CMatrix from_eigenbasis(const EigenbasisOp& eb, const CMatrix& X);

PerturbSeries p_orders_asymptotic(const EigenbasisOp& eb, int max_order);

PerturbSeries p_orders_timedep(const EigenbasisOp& eb, double t, int max_order);

// lambda_s = 0 branch; K_n, F_n expressed in `basis`
GeometricSeries geometric_recursion(const EigenbasisOp& eb, const ReducedBasis& basis, int max_order);

// [I - M1]^{-1} M0 (or M0 alone) for L = L0 + eps L1, in the coordinates of `basis`
CMatrix laplace_generator(const EigenbasisOp& eb, double eps, bool include_M1, const ReducedBasis& basis);

// Double integral int_0^t dt1 int_0^t1 dt2 exp(a t1 + b t2), with limits for vanishing b.
cd double_exp_integral(cd a, cd b, double t, double degenerate_tol);

} // namespace tclae
