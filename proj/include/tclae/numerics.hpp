// numerics.hpp: eigendecomposition, matrix exponentials, exponential fits

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "tclae/types.hpp"

namespace tclae {

struct EigenSystem {
    CVector values;   // sorted: descending Re, then ascending Im
    CMatrix right;    // columns |r_i>
    CMatrix left_dag; // rows <l_i|, left_dag * right = I
};

// Unnormalized output of the dense eigensolver, already sorted.
// Columns of `right` and `left` have unit 2-norm; `left` holds l_i with l_i^dag M = lambda_i l_i^dag.
struct RawEigen {
    CVector values;
    CMatrix right;
    CMatrix left; // empty unless requested
};

struct ExpFit {
    double a{0.0}; // amplitude
    double b{0.0}; // rate, y = a exp(-b t)
    double t_min{0.0};
    double t_max{0.0};
    double residual{0.0}; // rms of log residuals
    std::size_t n_used{0};
};

struct PowerFit {
    double exponent{0.0};
    double prefactor{0.0};
    double residual{0.0};
};

inline constexpr double kCondLimit = 1e12;

RawEigen eig_raw(const CMatrix& M, bool want_left);

EigenSystem eig_biorthonormal(const CMatrix& M);

// Biorthonormal pairs for a subset of modes of a RawEigen (requires left vectors).
// Modes whose eigenvalues agree within cluster_tol are re-spanned by orthonormal
// bases before the subset Gram matrix is inverted.
EigenSystem biorthonormal_subset(const RawEigen& raw, const std::vector<std::size_t>& idx,
                                 double cluster_tol);

// 1-norm condition number of a square matrix (exact, via the inverse).
double condition_1(const CMatrix& A);

// exp(M t) by Pade scaling and squaring.
CMatrix expm(const CMatrix& M, double t);

// exp(M t) from a spectral decomposition.
CMatrix expm(const EigenSystem& es, double t);

// Solve A X = B with partial pivoting.
CMatrix solve(const CMatrix& A, const CMatrix& B);

CMatrix kron(const CMatrix& A, const CMatrix& B);

ExpFit fit_exponential(const std::vector<std::pair<double, double>>& samples, double t_min,
                       double t_max, double floor = 1e-13);

// Least squares of ln y = ln c + p ln x.
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

} // namespace tclae
