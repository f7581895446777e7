#include <doctest.h>

#include <cmath>
#include <random>

#include "tclae/models.hpp"
#include "tclae/tcl.hpp"

using namespace tclae;

namespace {

ThreeLevelParams reference_three_level() { return ThreeLevelParams{0.5, 1.0, 0.5, 0.5, 0.1, 0.1}; }

// Sigma(t) = int_0^t ds e^{QLQ s} Q L P e^{-L s}, composite Simpson
CMatrix sigma_quadrature(const TclContext& ctx, double t, int panels) {
    const CMatrix P = projector_Pinv(ctx);
    const CMatrix Q = CMatrix::Identity(P.rows(), P.cols()) - P;
    const CMatrix QLQ = Q * ctx.L * Q;
    const CMatrix QLP = Q * ctx.L * P;
    const double h = t / panels;
    const CMatrix eA = expm(QLQ, h), eB = expm(ctx.L, -h);
    CMatrix left = CMatrix::Identity(P.rows(), P.cols()), right = left;
    CMatrix sum = CMatrix::Zero(P.rows(), P.cols());
    for (int k = 0; k <= panels; ++k) {
        const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        sum += w * (left * QLP * right);
        left = left * eA;
        right = eB * right;
    }
    return sum * (h / 3.0);
}

} // namespace

TEST_CASE("sigma_inv basics") {
    const TclContext ctx = make_context(three_level(reference_three_level()));
    CHECK(sigma_inv(ctx, 0.0).norm() == 0.0);
    const CMatrix S = sigma_inv(ctx, 1.0);
    CHECK((projector_Pinv(ctx) * S).norm() < 1e-10);
    CHECK((S - sigma_quadrature(ctx, 1.0, 2000)).norm() < 1e-7);

    ThreeLevelParams z = reference_three_level();
    z.g0 = z.g1 = 0.0;
    const TclContext c0 = make_context(three_level(z));
    // roundoff is amplified by e^{-Lt}
    for (double t : {0.5, 2.0, 7.0}) CHECK(sigma_inv(c0, t).norm() < 1e-14 * expm(c0.L, -t).norm());
}

TEST_CASE("time-dependent projector") {
    const TclContext ctx = make_context(three_level(reference_three_level()));
    const CMatrix P = projector_Pinv(ctx);
    CHECK((p_inv_t(ctx, 0.0) - P).norm() < 1e-12);
    for (double t : {0.5, 3.0, 10.0}) {
        const CMatrix Pt = p_inv_t(ctx, t);
        CHECK((Pt * Pt - Pt).norm() < 1e-9);
        CHECK((Pt * P - Pt).norm() < 1e-10);
    }
    const CMatrix I = CMatrix::Identity(9, 9);
    const CMatrix alt = (I - sigma_inv(ctx, 3.0)).inverse() * P;
    CHECK((p_inv_t(ctx, 3.0) - alt).norm() < 1e-8);

    ThreeLevelParams z = reference_three_level();
    z.g0 = z.g1 = 0.0;
    const TclContext c0 = make_context(three_level(z));
    for (double t : {1.0, 5.0}) CHECK((p_inv_t(c0, t) - projector_Pinv(c0)).norm() < 1e-10);
}

TEST_CASE("inhomogeneity J(t)") {
    const TclContext ctx = make_context(three_level(reference_three_level()));
    const CMatrix I = CMatrix::Identity(9, 9);
    CHECK((j_inv_t(ctx, 0.0) - (I - projector_Pinv(ctx))).norm() < 1e-12);

    // eps = 0: J(t) = e^{L0 t} Q, compared with the spectral sum over fast modes
    ThreeLevelParams z = reference_three_level();
    z.g0 = z.g1 = 0.0;
    const TclContext c0 = make_context(three_level(z));
    const EigenSystem& es = *c0.spec0.eig;
    for (double t : {0.7, 2.5}) {
        CMatrix S = CMatrix::Zero(9, 9);
        for (auto f : c0.spec0.fast) {
            const auto i = static_cast<Eigen::Index>(f);
            S += std::exp(es.values[i] * t) * (es.right.col(i) * es.left_dag.row(i));
        }
        CHECK(std::abs(j_inv_t(c0, t).norm() - S.norm()) < 1e-10);
    }
}

TEST_CASE("asymptotic projector") {
    const TclContext ctx = make_context(three_level(reference_three_level()));
    const CMatrix Pa = p_inv_asymptotic(ctx);
    CHECK((Pa * Pa - Pa).norm() < 1e-10);
    CHECK(prop2_residual(ctx) < 1e-9 * ctx.L.norm());
    CHECK((Pa * ctx.r_eps - ctx.r_eps).norm() < 1e-9);
    for (auto f : ctx.spec0.fast) {
        const auto i = static_cast<Eigen::Index>(f);
        CHECK((Pa * ctx.spec0.eig->right.col(i)).norm() < 1e-9);
    }
    CHECK((p_inv_t(ctx, 40.0) - Pa).norm() < 1e-10);

    ThreeLevelParams z = reference_three_level();
    z.g0 = z.g1 = 0.0;
    const TclContext c0 = make_context(three_level(z));
    CHECK((p_inv_asymptotic(c0) - projector_Pinv(c0)).norm() < 1e-12);
    CHECK((c0.N - CMatrix::Identity(4, 4)).norm() < 1e-12);
    CHECK((c0.M - CMatrix::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("reduction maps") {
    const TclContext ctx = make_context(three_level(reference_three_level()));
    const ReducedModel rm = reduce(ctx);
    CHECK((ctx.L * rm.K - rm.K * rm.F).norm() / rm.K.norm() < 1e-9);
    CHECK((ctx.basis.chi_L_dag * rm.K - CMatrix::Identity(4, 4)).norm() < 1e-8);

    ThreeLevelParams z = reference_three_level();
    z.g0 = z.g1 = 0.0;
    const TclContext c0 = make_context(three_level(z));
    const ReducedModel r0 = reduce(c0);
    CHECK((r0.K - c0.basis.chi_R).norm() < 1e-12);
    CHECK((r0.F - CMatrix(c0.spec0.surviving_values().asDiagonal())).norm() < 1e-12);
}

TEST_CASE("Rabi reduction at vanishing coupling") {
    RabiParams p;
    p.n_tr = 5;
    p.g = 0.0;
    const TclContext ctx = make_context(rabi(p), ContextOptions{-1.0, EigenDetail::Full, rabi_qubit_basis(p)});
    const ReducedModel rm = reduce(ctx);
    CHECK((rm.F - build_gksl(0.5 * p.omega_eg * sigma_z(), {})).norm() < 1e-12);
}

TEST_CASE("time-dependent generator") {
    const TclContext ctx = make_context(three_level(reference_three_level()));
    const CMatrix F0 = ctx.basis.chi_L_dag * ctx.L * ctx.basis.chi_R;
    CHECK((f_tcl_t(ctx, 0.0) - F0).norm() < 1e-12);
    const CMatrix F = reduce(ctx).F;
    CHECK((f_tcl_t(ctx, 30.0) - F).norm() < 1e-8);
    CHECK((f_tcl_t(ctx, 50.0) - F).norm() < 1e-10);
}

TEST_CASE("factored forms agree with the dense ones") {
    const TclContext ctx = make_context(three_level(reference_three_level()));
    const double t = 2.3;
    const CMatrix U = expm(ctx.L, t);
    const ProjectorFactors pf = projector_factors(ctx, U * ctx.basis.chi_R);
    CHECK(std::abs(dP_norm(ctx, pf) - (p_inv_t(ctx, t) - p_inv_asymptotic(ctx)).norm()) < 1e-12);
    const CMatrix I = CMatrix::Identity(9, 9);
    const CMatrix J = (I - p_inv_t(ctx, t)) * U * (I - projector_Pinv(ctx));
    CHECK((j_inv_t(ctx, U, pf) - J).norm() < 1e-12);
    CHECK(std::abs(j_norm(ctx, U, pf) - J.norm()) < 1e-12);

    PropagatorGrid grid(ctx.L, 1.0, 0.5);
    for (int k = 0; k < 4; ++k) grid.advance();
    CHECK(grid.t() == doctest::Approx(3.0));
    CHECK((grid.U() - expm(ctx.L, 3.0)).norm() < 1e-12);
}

TEST_CASE("evolve_reduced") {
    const std::vector<double> grid{0.0, 0.25, 0.5, 1.0};
    CVector x0(2);
    x0 << 1.0, cd(0.0, 2.0);
    const Trajectory flat = evolve_reduced(CMatrix(CMatrix::Zero(2, 2)), x0, grid);
    for (const CVector& x : flat) CHECK((x - x0).norm() == 0.0);

    const Trajectory decay = evolve_reduced(CMatrix(-CMatrix::Identity(2, 2)), x0, grid);
    CHECK((decay.back() - std::exp(-1.0) * x0).norm() < 1e-12);

    std::mt19937_64 rng(13);
    std::normal_distribution<double> nd;
    CMatrix F(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) F(i, j) = cd(nd(rng), nd(rng));
    CVector y0 = CVector::Ones(4);
    std::vector<double> g;
    for (int k = 0; k <= 20; ++k) g.push_back(0.05 * k);
    const Trajectory tr = evolve_reduced(F, y0, g, 1e-3);
    double worst = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) worst = std::max(worst, (tr[k] - expm(F, g[k]) * y0).norm());
    CHECK(worst < 1e-9);

    const Trajectory td = evolve_reduced([&](double) { return F; }, y0, g, 1e-3);
    CHECK((td.back() - tr.back()).norm() < 1e-14);
}
