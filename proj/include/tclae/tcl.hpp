// tcl.hpp: exact Sigma(t), P(t), J(t), asymptotic projector, reduction maps

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "tclae/liouvillian.hpp"
#include "tclae/spectral.hpp"

namespace tclae {

struct ContextOptions {
    double tol_s{-1.0};
    EigenDetail detail{EigenDetail::Full};
    std::optional<CMatrix> align; // target columns Y for the reduced basis (chi_R = P_inv Y)
};

struct TclContext {
    SplitLiouvillian sys;
    CMatrix L;                // L0 + eps L1
    SpectralData spec0;       // of L0
    ReducedBasis basis;       // parametrization used for K, F
    CVector lambda_eps;       // matched surviving eigenvalues of L, spec0 surviving order
    CMatrix r_eps;            // d^2 x n_s, scaled so that diag(N) = 1
    CMatrix l_eps_dag;        // n_s x d^2, l_eps_dag * r_eps = I
    SurvivingMatch matching;
    CMatrix N;                // N(s,s') = <l_s|r_s'^eps> in the L0 eigenbasis
    CMatrix M;                // M(s,s') = <l_s^eps|r_s'>
    std::optional<EigenSystem> specL; // full system of L, when well conditioned
    double gap{0.0};

    std::size_t n_s() const { return static_cast<std::size_t>(basis.chi_R.cols()); }
    std::size_t dim() const { return static_cast<std::size_t>(L.rows()); }
};

struct ReducedModel {
    CMatrix K; // d^2 x n_s
    CMatrix F; // n_s x n_s
};

// P(t) = X * Ainv * chi_L_dag with X = e^{Lt} chi_R
struct ProjectorFactors {
    CMatrix X;
    CMatrix Ainv;
    double cond_A{0.0};
};

TclContext make_context(const SplitLiouvillian& sys, const ContextOptions& opt = {});

CMatrix projector_Pinv(const TclContext& ctx);

CMatrix sigma_inv(const TclContext& ctx, double t);

ProjectorFactors projector_factors(const TclContext& ctx, const CMatrix& X);

CMatrix p_inv_t(const TclContext& ctx, double t);
CMatrix p_inv_t(const TclContext& ctx, const ProjectorFactors& pf);

CMatrix j_inv_t(const TclContext& ctx, double t);
CMatrix j_inv_t(const TclContext& ctx, const CMatrix& U, const ProjectorFactors& pf);

CMatrix p_inv_asymptotic(const TclContext& ctx);

ReducedModel reduce(const TclContext& ctx);

CMatrix f_tcl_t(const TclContext& ctx, double t);
CMatrix f_tcl_t(const TclContext& ctx, const ProjectorFactors& pf);

// ||P(t) - P_asym||_F from the factors without forming d^2 x d^2 matrices
double dP_norm(const TclContext& ctx, const ProjectorFactors& pf);

// ||J(t)||_F given U = e^{Lt}
double j_norm(const TclContext& ctx, const CMatrix& U, const ProjectorFactors& pf);

// ||(I - P_asym) L P_asym||_F
double prop2_residual(const TclContext& ctx);

// Exact propagators e^{L t_k} on a uniform grid t_k = t0 + k dt, by repeated multiplication.
class PropagatorGrid {
public:
    PropagatorGrid(const CMatrix& L, double t0, double dt);
    double t() const { return t_; }
    const CMatrix& U() const { return U_; }
    void advance();

private:
    CMatrix step_;
    CMatrix U_;
    double t0_;
    double dt_;
    double t_;
    long k_{0};
};

using Trajectory = std::vector<CVector>;

// RK4 on the reduced ODE, reporting states at the grid points; internal step <= dt_max.
Trajectory evolve_reduced(const CMatrix& F, const CVector& x0, const std::vector<double>& grid,
                          double dt_max = 1e-3);
Trajectory evolve_reduced(const std::function<CMatrix(double)>& F, const CVector& x0,
                          const std::vector<double>& grid, double dt_max = 1e-3);

} // namespace tclae
