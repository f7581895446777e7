#include "tclae/perturb.hpp"

#include <cmath>

namespace tclae {

namespace {

using Index = Eigen::Index;

inline Index ix(std::size_t k) { return static_cast<Index>(k); }

// (e^{ct} - 1) / c
cd exp_integral(cd c, double t) {
    const cd z = c * t;
    if (std::abs(z) < 1e-5) return t * (1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0);
    return (std::exp(z) - 1.0) / c;
}

// int_0^t tau e^{a tau} dtau
cd tau_exp_integral(cd a, double t) {
    const cd z = a * t;
    if (std::abs(z) < 1e-4) return t * t * (0.5 + z / 3.0 + z * z / 8.0 + z * z * z / 30.0);
    return (t * std::exp(z) - exp_integral(a, t)) / a;
}

CMatrix embed_fs(const EigenbasisOp& eb, const CMatrix& X_fs) {
    // R_F X_fs Ld_S
    CMatrix RF(eb.R.rows(), ix(eb.F.size()));
    for (std::size_t k = 0; k < eb.F.size(); ++k) RF.col(ix(k)) = eb.R.col(ix(eb.F[k]));
    CMatrix LS(ix(eb.S.size()), eb.Ld.cols());
    for (std::size_t k = 0; k < eb.S.size(); ++k) LS.row(ix(k)) = eb.Ld.row(ix(eb.S[k]));
    return RF * (X_fs * LS);
}

CMatrix block(const CMatrix& A, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
    CMatrix out(ix(rows.size()), ix(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(ix(i), ix(j)) = A(ix(rows[i]), ix(cols[j]));
    return out;
}

void check_order(int max_order, int limit) {
    if (max_order < 0 || max_order > limit)
        throw Error(ErrorKind::InvalidParams, "perturbation order must be in [0, " + std::to_string(limit) + "]");
}

} // namespace

CMatrix PerturbSeries::sum(double eps, std::size_t order) const {
    CMatrix out = terms.at(0);
    double p = 1.0;
    for (std::size_t n = 1; n <= order && n < terms.size(); ++n) {
        p *= eps;
        out += p * terms[n];
    }
    return out;
}

CMatrix GeometricSeries::K_sum(double eps, std::size_t order) const {
    CMatrix out = K.at(0);
    double p = 1.0;
    for (std::size_t n = 1; n <= order && n < K.size(); ++n) {
        p *= eps;
        out += p * K[n];
    }
    return out;
}

CMatrix GeometricSeries::F_sum(double eps, std::size_t order) const {
    CMatrix out = F.at(0);
    double p = 1.0;
    for (std::size_t n = 1; n <= order && n < F.size(); ++n) {
        p *= eps;
        out += p * F[n];
    }
    return out;
}

EigenbasisOp to_eigenbasis(const SpectralData& spec0, const CMatrix& L1) {
    if (!spec0.eig) throw Error(ErrorKind::NonDiagonalizable, "eigenbasis transform needs the full eigensystem");
    const EigenSystem& es = *spec0.eig;
    if (L1.rows() != es.right.rows() || L1.cols() != es.right.rows())
        throw Error(ErrorKind::DimensionMismatch, "L1 does not match the spectral data");
    EigenbasisOp eb;
    eb.lambda = es.values;
    eb.R = es.right;
    eb.Ld = es.left_dag;
    eb.B = es.left_dag * (L1 * es.right);
    eb.S = spec0.surviving;
    eb.F = spec0.fast;
    eb.gap = spec0.gap;
    eb.tol_s = spec0.tol_s;
    return eb;
}

CMatrix from_eigenbasis(const EigenbasisOp& eb, const CMatrix& X) { return eb.R * X * eb.Ld; }

PerturbSeries p_orders_asymptotic(const EigenbasisOp& eb, int max_order) {
    check_order(max_order, 3);
    const std::size_t nf = eb.F.size(), ns = eb.S.size();
    const CMatrix BFF = block(eb.B, eb.F, eb.F);
    const CMatrix BFS = block(eb.B, eb.F, eb.S);
    const CMatrix BSF = block(eb.B, eb.S, eb.F);
    const CMatrix BSS = block(eb.B, eb.S, eb.S);
    CVector lf(ix(nf)), ls(ix(ns));
    for (std::size_t k = 0; k < nf; ++k) lf[ix(k)] = eb.lambda[ix(eb.F[k])];
    for (std::size_t k = 0; k < ns; ++k) ls[ix(k)] = eb.lambda[ix(eb.S[k])];

    for (std::size_t s = 0; s < ns; ++s)
        for (std::size_t f = 0; f < nf; ++f)
            if (std::abs(ls[ix(s)] - lf[ix(f)]) < 1e-12 * eb.gap)
                throw Error(ErrorKind::DegenerateDenominator, "lambda_s - lambda_f vanishes");

    // e[s'](f) = 1 / (lambda_s' - lambda_f)
    CMatrix e(ix(nf), ix(ns));
    for (std::size_t sp = 0; sp < ns; ++sp)
        for (std::size_t f = 0; f < nf; ++f) e(ix(f), ix(sp)) = 1.0 / (ls[ix(sp)] - lf[ix(f)]);

    CMatrix X1 = CMatrix::Zero(ix(nf), ix(ns)), X2 = X1, X3 = X1;
    for (std::size_t s = 0; s < ns; ++s) {
        const Index si = ix(s);
        const CVector ds = e.col(si);              // 1 / (lambda_s - lambda_f)
        const CVector us = BFS.col(si);
        X1.col(si) = us.cwiseProduct(ds);
        if (max_order < 2) continue;

        const CVector du = ds.cwiseProduct(us);
        const CVector t1 = BFF * du;
        CVector t2 = CVector::Zero(ix(nf));
        for (std::size_t sp = 0; sp < ns; ++sp)
            t2 += BFS.col(ix(sp)).cwiseProduct(e.col(ix(sp))) * BSS(ix(sp), si);
        X2.col(si) = (t1 - t2).cwiseProduct(ds);
        if (max_order < 3) continue;

        CVector acc = BFF * ds.cwiseProduct(t1);                       // Q/(ls-L0) twice
        for (std::size_t sp = 0; sp < ns; ++sp) {
            const Index spi = ix(sp);
            const CVector esp = e.col(spi);
            // P/(L0-lf) twice
            for (std::size_t spp = 0; spp < ns; ++spp)
                acc += BFS.col(spi).cwiseProduct(esp).cwiseProduct(e.col(ix(spp))) * (BSS(spi, ix(spp)) * BSS(ix(spp), si));
            // - L1 Q/(ls-L0) L1 P/(L0-lf) L1
            const CVector q = BFF * ds.cwiseProduct(BFS.col(spi));
            acc -= q.cwiseProduct(esp) * BSS(spi, si);
            // - L1 P/(L0-lf) L1 Q/(ls-L0) L1
            const cd scal = (BSF.row(spi) * du)(0, 0);
            acc -= BFS.col(spi).cwiseProduct(esp) * scal;
            // - sum_{s'f'} (D_sf / D_s'f') L1 Pi_f'/D_sf' L1 Pi_s'/D_s'f L1
            CVector h(ix(nf));
            for (std::size_t fp = 0; fp < nf; ++fp)
                h[ix(fp)] = BFS(ix(fp), spi) * ds[ix(fp)] / (ls[spi] - lf[ix(fp)]);
            const CVector m = BFF * h;
            for (std::size_t f = 0; f < nf; ++f)
                acc[ix(f)] -= BSS(spi, si) * esp[ix(f)] * (ls[si] - lf[ix(f)]) * m[ix(f)];
        }
        X3.col(si) = acc.cwiseProduct(ds);
    }

    PerturbSeries out;
    CMatrix RS(eb.R.rows(), ix(ns));
    for (std::size_t k = 0; k < ns; ++k) RS.col(ix(k)) = eb.R.col(ix(eb.S[k]));
    CMatrix LS(ix(ns), eb.Ld.cols());
    for (std::size_t k = 0; k < ns; ++k) LS.row(ix(k)) = eb.Ld.row(ix(eb.S[k]));
    out.terms.push_back(RS * LS);
    if (max_order >= 1) out.terms.push_back(embed_fs(eb, X1));
    if (max_order >= 2) out.terms.push_back(embed_fs(eb, X2));
    if (max_order >= 3) out.terms.push_back(embed_fs(eb, X3));
    return out;
}

cd double_exp_integral(cd a, cd b, double t, double degenerate_tol) {
    if (std::abs(b) < degenerate_tol) return tau_exp_integral(a, t);
    return (exp_integral(a + b, t) - exp_integral(a, t)) / b;
}

PerturbSeries p_orders_timedep(const EigenbasisOp& eb, double t, int max_order) {
    check_order(max_order, 2);
    if (t < 0.0) throw Error(ErrorKind::InvalidParams, "t must be non-negative");
    const std::size_t nf = eb.F.size(), ns = eb.S.size();
    const double dtol = 1e-10 * eb.gap;
    CVector lf(ix(nf)), ls(ix(ns));
    for (std::size_t k = 0; k < nf; ++k) lf[ix(k)] = eb.lambda[ix(eb.F[k])];
    for (std::size_t k = 0; k < ns; ++k) ls[ix(k)] = eb.lambda[ix(eb.S[k])];
    const CMatrix BFF = block(eb.B, eb.F, eb.F);
    const CMatrix BFS = block(eb.B, eb.F, eb.S);
    const CMatrix BSS = block(eb.B, eb.S, eb.S);

    CMatrix X1(ix(nf), ix(ns)), X2 = CMatrix::Zero(ix(nf), ix(ns));
    for (std::size_t s = 0; s < ns; ++s)
        for (std::size_t f = 0; f < nf; ++f)
            X1(ix(f), ix(s)) = BFS(ix(f), ix(s)) * exp_integral(lf[ix(f)] - ls[ix(s)], t);

    if (max_order >= 2) {
        for (std::size_t s = 0; s < ns; ++s)
            for (std::size_t f = 0; f < nf; ++f) {
                const cd a = lf[ix(f)] - ls[ix(s)];
                cd acc = 0.0;
                for (std::size_t fp = 0; fp < nf; ++fp) {
                    const cd w = BFF(ix(f), ix(fp)) * BFS(ix(fp), ix(s));
                    if (w == cd(0.0, 0.0)) continue;
                    acc += w * double_exp_integral(a, lf[ix(fp)] - lf[ix(f)], t, dtol);
                }
                for (std::size_t sp = 0; sp < ns; ++sp) {
                    const cd w = BFS(ix(f), ix(sp)) * BSS(ix(sp), ix(s));
                    if (w == cd(0.0, 0.0)) continue;
                    acc -= w * double_exp_integral(a, ls[ix(s)] - ls[ix(sp)], t, dtol);
                }
                X2(ix(f), ix(s)) = acc;
            }
    }

    PerturbSeries out;
    CMatrix RS(eb.R.rows(), ix(ns));
    for (std::size_t k = 0; k < ns; ++k) RS.col(ix(k)) = eb.R.col(ix(eb.S[k]));
    CMatrix LS(ix(ns), eb.Ld.cols());
    for (std::size_t k = 0; k < ns; ++k) LS.row(ix(k)) = eb.Ld.row(ix(eb.S[k]));
    out.terms.push_back(RS * LS);
    if (max_order >= 1) out.terms.push_back(embed_fs(eb, X1));
    if (max_order >= 2) out.terms.push_back(embed_fs(eb, X2));
    return out;
}

GeometricSeries geometric_recursion(const EigenbasisOp& eb, const ReducedBasis& basis, int max_order) {
    if (max_order < 0) throw Error(ErrorKind::InvalidParams, "negative order");
    for (auto s : eb.S)
        if (std::abs(eb.lambda[ix(s)]) > eb.tol_s)
            throw Error(ErrorKind::NonzeroSurvivingEigenvalue,
                        "surviving eigenvalue " + std::to_string(std::abs(eb.lambda[ix(s)])));
    const std::size_t nf = eb.F.size();
    CMatrix RF(eb.R.rows(), ix(nf));
    CMatrix LF(ix(nf), eb.Ld.cols());
    CVector inv_lf(ix(nf));
    for (std::size_t k = 0; k < nf; ++k) {
        RF.col(ix(k)) = eb.R.col(ix(eb.F[k]));
        LF.row(ix(k)) = eb.Ld.row(ix(eb.F[k]));
        inv_lf[ix(k)] = 1.0 / eb.lambda[ix(eb.F[k])];
    }
    const CMatrix L1 = from_eigenbasis(eb, eb.B);
    const Index ns = basis.chi_R.cols();

    GeometricSeries g;
    g.K.push_back(basis.chi_R);
    g.F.push_back(CMatrix::Zero(ns, ns));
    for (int n = 1; n <= max_order; ++n) {
        const CMatrix L1K = L1 * g.K[static_cast<std::size_t>(n - 1)];
        CMatrix mix = CMatrix::Zero(basis.chi_R.rows(), ns);
        for (int m = 1; m <= n - 1; ++m)
            mix += g.K[static_cast<std::size_t>(m)] * g.F[static_cast<std::size_t>(n - m)];
        const CMatrix Fn = basis.chi_L_dag * (L1K - mix);
        const CMatrix rhs = basis.chi_R * Fn + mix - L1K;
        // inverse of L0 restricted to the fast eigenspace; image has chi_L_dag K_n = 0
        const CMatrix Kn = RF * (inv_lf.asDiagonal() * (LF * rhs));
        g.F.push_back(Fn);
        g.K.push_back(Kn);
    }
    return g;
}

CMatrix laplace_generator(const EigenbasisOp& eb, double eps, bool include_M1, const ReducedBasis& basis) {
    const std::size_t ns = eb.S.size();
    CMatrix Lt = eps * eb.B;
    Lt.diagonal() += eb.lambda;
    const CMatrix LSS = block(Lt, eb.S, eb.S);
    const CMatrix LSF = block(Lt, eb.S, eb.F);
    const CMatrix LFS = block(Lt, eb.F, eb.S);
    const CMatrix LFF = block(Lt, eb.F, eb.F);
    if (condition_1(LFF) > 1e12) throw Error(ErrorKind::SingularFastBlock, "QLQ is singular on the fast subspace");
    Eigen::PartialPivLU<CMatrix> lu(LFF);
    const CMatrix Y1 = lu.solve(LFS);     // [QLQ]^{-1} QLP
    CMatrix gen = LSS - LSF * Y1;         // M0
    if (include_M1) {
        const CMatrix Y2 = lu.solve(Y1);  // [QLQ]^{-2} QLP
        CMatrix I_M1 = LSF * Y2;          // I - M1 = I + PLQ[QLQ]^{-2}QLP
        I_M1.diagonal().array() += 1.0;
        gen = solve(I_M1, gen);
    }
    // change from eigen-surviving coordinates to `basis`
    CMatrix RS(eb.R.rows(), ix(ns));
    for (std::size_t k = 0; k < ns; ++k) RS.col(ix(k)) = eb.R.col(ix(eb.S[k]));
    const CMatrix T = basis.chi_L_dag * RS;
    return T * solve(T.transpose(), gen.transpose()).transpose();
}

} // namespace tclae
