#include "tclae/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/MatrixFunctions>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace tclae {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NonDiagonalizable: return "NonDiagonalizable";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonHermitianH: return "NonHermitianH";
    case ErrorKind::NoGap: return "NoGap";
    case ErrorKind::AmbiguousMatching: return "AmbiguousMatching";
    case ErrorKind::SingularA: return "SingularA";
    case ErrorKind::SingularN: return "SingularN";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::NonzeroSurvivingEigenvalue: return "NonzeroSurvivingEigenvalue";
    case ErrorKind::SingularFastBlock: return "SingularFastBlock";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::Config: return "Config";
    }
    return "Unknown";
}

namespace {

void require_square(const CMatrix& M, const char* who) {
    if (M.rows() != M.cols() || M.rows() == 0)
        throw Error(ErrorKind::DimensionMismatch, std::string(who) + " needs a non-empty square matrix");
}

std::vector<std::size_t> sort_order(const CVector& w) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(w.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
        const double ri = w[i].real(), rj = w[j].real();
        if (ri != rj) return ri > rj;
        return w[i].imag() < w[j].imag();
    });
    return idx;
}

// Orthonormal basis of the column span of X (rank = X.cols() assumed).
CMatrix orthonormal_columns(const CMatrix& X) {
    Eigen::HouseholderQR<CMatrix> qr(X);
    return qr.householderQ() * CMatrix::Identity(X.rows(), X.cols());
}

} // namespace

RawEigen eig_raw(const CMatrix& M, bool want_left) {
    require_square(M, "eig_raw");
    const lapack_int n = static_cast<lapack_int>(M.rows());
    CMatrix A = M;
    CVector w(n);
    CMatrix vr(n, n);
    CMatrix vl;
    if (want_left) vl.resize(n, n);
    lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, want_left ? 'V' : 'N', 'V', n, A.data(), n,
                                    w.data(), want_left ? vl.data() : nullptr, n, vr.data(), n);
    if (info != 0)
        throw Error(ErrorKind::NonDiagonalizable, "zgeev failed with info " + std::to_string(info));
    A.resize(0, 0);

    const auto order = sort_order(w);
    RawEigen out;
    out.values.resize(n);
    out.right.resize(n, n);
    if (want_left) out.left.resize(n, n);
    for (lapack_int k = 0; k < n; ++k) {
        const auto j = static_cast<Eigen::Index>(order[static_cast<std::size_t>(k)]);
        out.values[k] = w[j];
        out.right.col(k) = vr.col(j);
        if (want_left) out.left.col(k) = vl.col(j);
    }
    return out;
}

double condition_1(const CMatrix& A) {
    Eigen::PartialPivLU<CMatrix> lu(A);
    const CMatrix inv = lu.inverse();
    auto norm1 = [](const CMatrix& X) { return X.cwiseAbs().colwise().sum().maxCoeff(); };
    const double c = norm1(A) * norm1(inv);
    return std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
}

EigenSystem eig_biorthonormal(const CMatrix& M) {
    RawEigen raw = eig_raw(M, false);
    Eigen::PartialPivLU<CMatrix> lu(raw.right);
    CMatrix inv = lu.inverse();
    auto norm1 = [](const CMatrix& X) { return X.cwiseAbs().colwise().sum().maxCoeff(); };
    const double cond = norm1(raw.right) * norm1(inv);
    if (!std::isfinite(cond) || cond > kCondLimit)
        throw Error(ErrorKind::NonDiagonalizable,
                    "eigenvector matrix condition number " + std::to_string(cond));
    return EigenSystem{std::move(raw.values), std::move(raw.right), std::move(inv)};
}

EigenSystem biorthonormal_subset(const RawEigen& raw, const std::vector<std::size_t>& idx,
                                 double cluster_tol) {
    if (raw.left.size() == 0)
        throw Error(ErrorKind::DimensionMismatch, "biorthonormal_subset needs left eigenvectors");
    const Eigen::Index n = raw.right.rows();
    const Eigen::Index m = static_cast<Eigen::Index>(idx.size());
    EigenSystem out;
    out.values.resize(m);
    CMatrix R(n, m), L(n, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const auto j = static_cast<Eigen::Index>(idx[static_cast<std::size_t>(k)]);
        out.values[k] = raw.values[j];
        R.col(k) = raw.right.col(j);
        L.col(k) = raw.left.col(j);
    }
    // group (numerically) equal eigenvalues and replace each group by orthonormal spans
    std::vector<bool> done(static_cast<std::size_t>(m), false);
    for (Eigen::Index k = 0; k < m; ++k) {
        if (done[static_cast<std::size_t>(k)]) continue;
        std::vector<Eigen::Index> group{k};
        for (Eigen::Index q = k + 1; q < m; ++q)
            if (!done[static_cast<std::size_t>(q)] && std::abs(out.values[q] - out.values[k]) <= cluster_tol)
                group.push_back(q);
        for (auto q : group) done[static_cast<std::size_t>(q)] = true;
        if (group.size() < 2) continue;
        CMatrix gr(n, static_cast<Eigen::Index>(group.size())), gl(n, gr.cols());
        for (std::size_t q = 0; q < group.size(); ++q) {
            gr.col(static_cast<Eigen::Index>(q)) = R.col(group[q]);
            gl.col(static_cast<Eigen::Index>(q)) = L.col(group[q]);
        }
        gr = orthonormal_columns(gr);
        gl = orthonormal_columns(gl);
        for (std::size_t q = 0; q < group.size(); ++q) {
            R.col(group[q]) = gr.col(static_cast<Eigen::Index>(q));
            L.col(group[q]) = gl.col(static_cast<Eigen::Index>(q));
        }
    }
    const CMatrix gram = L.adjoint() * R; // block diagonal over clusters
    if (condition_1(gram) > kCondLimit)
        throw Error(ErrorKind::NonDiagonalizable, "selected left/right eigenvectors are not biorthogonalizable");
    out.right = std::move(R);
    out.left_dag = solve(gram, L.adjoint());
    return out;
}

CMatrix expm(const CMatrix& M, double t) {
    require_square(M, "expm");
    if (t == 0.0) return CMatrix::Identity(M.rows(), M.cols());
    const CMatrix A = M * cd(t, 0.0);
    return A.exp();
}

CMatrix expm(const EigenSystem& es, double t) {
    CVector e(es.values.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = std::exp(es.values[i] * t);
    return es.right * e.asDiagonal() * es.left_dag;
}

CMatrix solve(const CMatrix& A, const CMatrix& B) {
    if (A.rows() != A.cols() || A.rows() != B.rows())
        throw Error(ErrorKind::DimensionMismatch, "solve");
    return Eigen::PartialPivLU<CMatrix>(A).solve(B);
}

CMatrix kron(const CMatrix& A, const CMatrix& B) {
    CMatrix out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

ExpFit fit_exponential(const std::vector<std::pair<double, double>>& samples, double t_min,
                       double t_max, double floor) {
    std::vector<double> ts, ys;
    for (const auto& [t, y] : samples) {
        if (t < t_min || t > t_max) continue;
        if (!(y > floor) || !std::isfinite(y)) continue;
        ts.push_back(t);
        ys.push_back(std::log(y));
    }
    if (ts.size() < 2)
        throw Error(ErrorKind::InsufficientSamples,
                    "need at least 2 samples above floor in [" + std::to_string(t_min) + ", " +
                        std::to_string(t_max) + "]");
    const double n = static_cast<double>(ts.size());
    const double tm = std::accumulate(ts.begin(), ts.end(), 0.0) / n;
    const double ym = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double stt = 0.0, sty = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        stt += (ts[k] - tm) * (ts[k] - tm);
        sty += (ts[k] - tm) * (ys[k] - ym);
    }
    if (stt <= 0.0) throw Error(ErrorKind::InsufficientSamples, "all samples at the same time");
    const double slope = sty / stt;
    const double icpt = ym - slope * tm;
    double ss = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double r = ys[k] - (icpt + slope * ts[k]);
        ss += r * r;
    }
    ExpFit fit;
    fit.a = std::exp(icpt);
    fit.b = -slope;
    fit.t_min = t_min;
    fit.t_max = t_max;
    fit.residual = std::sqrt(ss / n);
    fit.n_used = ts.size();
    return fit;
}

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw Error(ErrorKind::InsufficientSamples, "power-law fit needs at least 2 points");
    std::vector<std::pair<double, double>> s;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] > 0.0) || !(y[k] > 0.0))
            throw Error(ErrorKind::InsufficientSamples, "power-law fit needs positive data");
        s.emplace_back(std::log(x[k]), y[k]);
    }
    // ln y = ln c + p ln x is an exponential fit in the variable ln x with rate -p
    const auto fit = fit_exponential(s, -1e300, 1e300, 0.0);
    return PowerFit{-fit.b, fit.a, fit.residual};
}

} // namespace tclae
