#include "tclae/liouvillian.hpp"

#include "tclae/numerics.hpp"

namespace tclae {

int HilbertSpec::total_dim() const {
    int d = 1;
    for (int k : dims) d *= k;
    return d;
}

CVector vectorize(const CMatrix& A) {
    if (A.rows() != A.cols()) throw Error(ErrorKind::DimensionMismatch, "vectorize needs a square operator");
    return Eigen::Map<const CVector>(A.data(), A.size());
}

CMatrix devectorize(const CVector& v, int d) {
    if (v.size() != static_cast<Eigen::Index>(d) * d)
        throw Error(ErrorKind::DimensionMismatch, "devectorize: length is not d^2");
    return Eigen::Map<const CMatrix>(v.data(), d, d);
}

CMatrix sandwich_super(const CMatrix& A, const CMatrix& B) {
    if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
        throw Error(ErrorKind::DimensionMismatch, "sandwich_super");
    return kron(B.transpose(), A);
}

CMatrix commutator_super(const CMatrix& H) {
    const CMatrix I = CMatrix::Identity(H.rows(), H.cols());
    return cd(0.0, -1.0) * (sandwich_super(H, I) - sandwich_super(I, H));
}

CMatrix dissipator_super(const CMatrix& L, double rate) {
    const CMatrix I = CMatrix::Identity(L.rows(), L.cols());
    const CMatrix LdL = L.adjoint() * L;
    return rate * (sandwich_super(L, L.adjoint()) - 0.5 * sandwich_super(LdL, I) -
                   0.5 * sandwich_super(I, LdL));
}

CMatrix build_gksl(const CMatrix& H, const std::vector<Jump>& jumps) {
    if (H.rows() != H.cols()) throw Error(ErrorKind::DimensionMismatch, "H must be square");
    if ((H - H.adjoint()).norm() > 1e-10 * std::max(1.0, H.norm()))
        throw Error(ErrorKind::NonHermitianH, "H differs from its adjoint");
    CMatrix S = commutator_super(H);
    for (const auto& j : jumps) {
        if (j.op.rows() != H.rows() || j.op.cols() != H.cols())
            throw Error(ErrorKind::DimensionMismatch, "jump operator dimension");
        if (j.rate < 0.0) throw Error(ErrorKind::InvalidParams, "negative jump rate");
        if (j.rate > 0.0) S += dissipator_super(j.op, j.rate);
    }
    return S;
}

namespace {

// composite vec index of |(a,b)><(a2,b2)|
inline Eigen::Index cidx(int a, int b, int a2, int b2, int dA, int dB) {
    const Eigen::Index d = static_cast<Eigen::Index>(dA) * dB;
    return (static_cast<Eigen::Index>(a2) * dB + b2) * d + (static_cast<Eigen::Index>(a) * dB + b);
}

} // namespace

CMatrix lift_A(const CMatrix& S_A, int dA, int dB) {
    const Eigen::Index nA = static_cast<Eigen::Index>(dA) * dA;
    if (S_A.rows() != nA || S_A.cols() != nA) throw Error(ErrorKind::DimensionMismatch, "lift_A");
    const Eigen::Index n = nA * dB * dB;
    CMatrix out = CMatrix::Zero(n, n);
    for (int c2 = 0; c2 < dA; ++c2)
        for (int c = 0; c < dA; ++c) {
            const Eigen::Index col = static_cast<Eigen::Index>(c2) * dA + c;
            for (int r2 = 0; r2 < dA; ++r2)
                for (int r = 0; r < dA; ++r) {
                    const cd v = S_A(static_cast<Eigen::Index>(r2) * dA + r, col);
                    if (v == cd(0.0, 0.0)) continue;
                    for (int b = 0; b < dB; ++b)
                        for (int b2 = 0; b2 < dB; ++b2)
                            out(cidx(r, b, r2, b2, dA, dB), cidx(c, b, c2, b2, dA, dB)) += v;
                }
        }
    return out;
}

CMatrix lift_B(const CMatrix& S_B, int dA, int dB) {
    const Eigen::Index nB = static_cast<Eigen::Index>(dB) * dB;
    if (S_B.rows() != nB || S_B.cols() != nB) throw Error(ErrorKind::DimensionMismatch, "lift_B");
    const Eigen::Index n = nB * dA * dA;
    CMatrix out = CMatrix::Zero(n, n);
    for (int c2 = 0; c2 < dB; ++c2)
        for (int c = 0; c < dB; ++c) {
            const Eigen::Index col = static_cast<Eigen::Index>(c2) * dB + c;
            for (int r2 = 0; r2 < dB; ++r2)
                for (int r = 0; r < dB; ++r) {
                    const cd v = S_B(static_cast<Eigen::Index>(r2) * dB + r, col);
                    if (v == cd(0.0, 0.0)) continue;
                    for (int a = 0; a < dA; ++a)
                        for (int a2 = 0; a2 < dA; ++a2)
                            out(cidx(a, r, a2, r2, dA, dB), cidx(a, c, a2, c2, dA, dB)) += v;
                }
        }
    return out;
}

SplitLiouvillian compose_bipartite(const CMatrix& L_A, const CMatrix& L_B, const CMatrix& L1,
                                   double eps, int dA, int dB) {
    const Eigen::Index n = static_cast<Eigen::Index>(dA) * dA * dB * dB;
    if (L1.rows() != n || L1.cols() != n)
        throw Error(ErrorKind::DimensionMismatch, "interaction superoperator dimension");
    SplitLiouvillian sys;
    sys.L0 = lift_A(L_A, dA, dB);
    sys.L0 += lift_B(L_B, dA, dB);
    sys.L1 = L1;
    sys.eps = eps;
    sys.space.dims = {dA, dB};
    return sys;
}

CMatrix partial_trace_A(const CMatrix& rho, int dA, int dB) {
    if (rho.rows() != static_cast<Eigen::Index>(dA) * dB || rho.cols() != rho.rows())
        throw Error(ErrorKind::DimensionMismatch, "partial_trace_A");
    CMatrix out = CMatrix::Zero(dB, dB);
    for (int a = 0; a < dA; ++a) out += rho.block(static_cast<Eigen::Index>(a) * dB, static_cast<Eigen::Index>(a) * dB, dB, dB);
    return out;
}

double trace_preservation_defect(const CMatrix& S, int d) {
    const CVector vI = vectorize(CMatrix::Identity(d, d));
    return (vI.adjoint() * S).cwiseAbs().maxCoeff();
}

} // namespace tclae
