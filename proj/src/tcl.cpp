#include "tclae/tcl.hpp"

#include <cmath>

namespace tclae {

namespace {

double cluster_tol(const CVector& values) {
    double m = 1.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) m = std::max(m, std::abs(values[i]));
    return 1e-7 * m;
}

CMatrix identity_minus(const CMatrix& P) {
    CMatrix Q = -P;
    Q.diagonal().array() += 1.0;
    return Q;
}

} // namespace

TclContext make_context(const SplitLiouvillian& sys, const ContextOptions& opt) {
    TclContext ctx;
    ctx.sys = sys;
    ctx.L = sys.full();
    ctx.spec0 = analyze(sys.L0, opt.tol_s, opt.detail);
    ctx.gap = ctx.spec0.gap;

    RawEigen raw = eig_raw(ctx.L, true);
    ctx.matching = match_surviving(ctx.spec0, raw);
    EigenSystem block = biorthonormal_subset(raw, ctx.matching.perturbed, cluster_tol(raw.values));

    // fix the free scale of each perturbed pair so that diag(N) = 1
    const CMatrix N0 = ctx.spec0.chi_L_dag * block.right;
    for (Eigen::Index s = 0; s < N0.rows(); ++s) {
        const cd alpha = N0(s, s);
        if (std::abs(alpha) < 1e-12) throw Error(ErrorKind::SingularN, "perturbed surviving mode orthogonal to its partner");
        block.right.col(s) /= alpha;
        block.left_dag.row(s) *= alpha;
    }
    ctx.lambda_eps = block.values;
    ctx.r_eps = std::move(block.right);
    ctx.l_eps_dag = std::move(block.left_dag);
    ctx.N = ctx.spec0.chi_L_dag * ctx.r_eps;
    ctx.M = ctx.l_eps_dag * ctx.spec0.chi_R;
    if (condition_1(ctx.N) > 1e8) throw Error(ErrorKind::SingularN, "N is ill conditioned");
    if (condition_1(ctx.M) > 1e8) throw Error(ErrorKind::SingularN, "M is ill conditioned");

    if (opt.detail == EigenDetail::Full) {
        Eigen::PartialPivLU<CMatrix> lu(raw.right);
        CMatrix inv = lu.inverse();
        auto norm1 = [](const CMatrix& X) { return X.cwiseAbs().colwise().sum().maxCoeff(); };
        const double cond = norm1(raw.right) * norm1(inv);
        if (std::isfinite(cond) && cond <= kCondLimit)
            ctx.specL = EigenSystem{raw.values, std::move(raw.right), std::move(inv)};
    }

    ctx.basis = reduced_basis(ctx.spec0);
    if (opt.align) ctx.basis = align_basis(ctx.basis, *opt.align);
    return ctx;
}

CMatrix projector_Pinv(const TclContext& ctx) { return ctx.basis.chi_R * ctx.basis.chi_L_dag; }

CMatrix sigma_inv(const TclContext& ctx, double t) {
    const CMatrix Q = identity_minus(projector_Pinv(ctx));
    if (t == 0.0) return CMatrix::Zero(Q.rows(), Q.cols());
    const CMatrix QLQ = Q * ctx.L * Q;
    return Q - expm(QLQ, t) * Q * expm(ctx.L, -t);
}

ProjectorFactors projector_factors(const TclContext& ctx, const CMatrix& X) {
    ProjectorFactors pf;
    const CMatrix A = ctx.basis.chi_L_dag * X;
    pf.cond_A = condition_1(A);
    if (!std::isfinite(pf.cond_A) || pf.cond_A > 1e10)
        throw Error(ErrorKind::SingularA, "A(t) condition number " + std::to_string(pf.cond_A));
    pf.Ainv = A.inverse();
    pf.X = X;
    return pf;
}

CMatrix p_inv_t(const TclContext& ctx, const ProjectorFactors& pf) {
    return pf.X * (pf.Ainv * ctx.basis.chi_L_dag);
}

CMatrix p_inv_t(const TclContext& ctx, double t) {
    return p_inv_t(ctx, projector_factors(ctx, expm(ctx.L, t) * ctx.basis.chi_R));
}

CMatrix j_inv_t(const TclContext& ctx, const CMatrix& U, const ProjectorFactors& pf) {
    // U Q = U - (U chi_R) chi_L_dag, and (I - P) U Q = UQ - X Ainv (chi_L_dag UQ)
    CMatrix W = U;
    W.noalias() -= pf.X * ctx.basis.chi_L_dag;
    const CMatrix Z = ctx.basis.chi_L_dag * W;
    W.noalias() -= pf.X * (pf.Ainv * Z);
    return W;
}

CMatrix j_inv_t(const TclContext& ctx, double t) {
    const CMatrix U = expm(ctx.L, t);
    return j_inv_t(ctx, U, projector_factors(ctx, U * ctx.basis.chi_R));
}

CMatrix p_inv_asymptotic(const TclContext& ctx) {
    const CMatrix Nb = ctx.basis.chi_L_dag * ctx.r_eps;
    return ctx.r_eps * solve(Nb, ctx.basis.chi_L_dag);
}

ReducedModel reduce(const TclContext& ctx) {
    ReducedModel rm;
    // K = P_asym chi_R = r_eps (chi_L_dag r_eps)^{-1}
    const CMatrix Nb = ctx.basis.chi_L_dag * ctx.r_eps;
    rm.K = ctx.r_eps * Nb.inverse();
    rm.F = ctx.basis.chi_L_dag * (ctx.L * rm.K);
    return rm;
}

CMatrix f_tcl_t(const TclContext& ctx, const ProjectorFactors& pf) {
    return ctx.basis.chi_L_dag * (ctx.L * (pf.X * pf.Ainv));
}

CMatrix f_tcl_t(const TclContext& ctx, double t) {
    return f_tcl_t(ctx, projector_factors(ctx, expm(ctx.L, t) * ctx.basis.chi_R));
}

double dP_norm(const TclContext& ctx, const ProjectorFactors& pf) {
    const CMatrix Nb = ctx.basis.chi_L_dag * ctx.r_eps;
    const CMatrix Y = pf.X * pf.Ainv - ctx.r_eps * Nb.inverse();
    const CMatrix C = ctx.basis.chi_L_dag * ctx.basis.chi_L_dag.adjoint();
    const double v = ((Y.adjoint() * Y) * C).trace().real();
    return std::sqrt(std::max(v, 0.0));
}

double j_norm(const TclContext& ctx, const CMatrix& U, const ProjectorFactors& pf) {
    return j_inv_t(ctx, U, pf).norm();
}

double prop2_residual(const TclContext& ctx) {
    const CMatrix K = reduce(ctx).K;
    // (I - P) L P with P = K chi_L_dag: ||(LK - K chi_L_dag L K) chi_L_dag||_F
    const CMatrix LK = ctx.L * K;
    const CMatrix Y = LK - K * (ctx.basis.chi_L_dag * LK);
    const CMatrix C = ctx.basis.chi_L_dag * ctx.basis.chi_L_dag.adjoint();
    const double v = ((Y.adjoint() * Y) * C).trace().real();
    return std::sqrt(std::max(v, 0.0));
}

PropagatorGrid::PropagatorGrid(const CMatrix& L, double t0, double dt)
    : step_(expm(L, dt)), U_(expm(L, t0)), t0_(t0), dt_(dt), t_(t0) {}

void PropagatorGrid::advance() {
    U_ = step_ * U_;
    ++k_;
    t_ = t0_ + static_cast<double>(k_) * dt_;
}

namespace {

template <class Deriv>
Trajectory rk4_on_grid(Deriv&& f, const CVector& x0, const std::vector<double>& grid, double dt_max) {
    Trajectory out;
    out.reserve(grid.size());
    if (grid.empty()) return out;
    CVector x = x0;
    double t = grid.front();
    out.push_back(x);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double span = grid[k] - t;
        if (span < 0.0) throw Error(ErrorKind::InvalidParams, "grid must be increasing");
        const long steps = std::max(1L, static_cast<long>(std::ceil(span / dt_max - 1e-9)));
        const double h = span / static_cast<double>(steps);
        for (long s = 0; s < steps; ++s) {
            const CVector k1 = f(t, x);
            const CVector k2 = f(t + 0.5 * h, x + (0.5 * h) * k1);
            const CVector k3 = f(t + 0.5 * h, x + (0.5 * h) * k2);
            const CVector k4 = f(t + h, x + h * k3);
            x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += h;
        }
        t = grid[k];
        out.push_back(x);
    }
    return out;
}

} // namespace

Trajectory evolve_reduced(const CMatrix& F, const CVector& x0, const std::vector<double>& grid,
                          double dt_max) {
    return rk4_on_grid([&](double, const CVector& x) -> CVector { return F * x; }, x0, grid, dt_max);
}

Trajectory evolve_reduced(const std::function<CMatrix(double)>& F, const CVector& x0,
                          const std::vector<double>& grid, double dt_max) {
    return rk4_on_grid([&](double t, const CVector& x) -> CVector { return F(t) * x; }, x0, grid, dt_max);
}

} // namespace tclae
