#include "tclae/models.hpp"

#include <cmath>

#include "tclae/numerics.hpp"

namespace tclae {

SplitLiouvillian three_level(const ThreeLevelParams& p) {
    if (!(p.Gamma0 >= 0.0 && p.Gamma1 >= 0.0 && p.Gamma0 + p.Gamma1 > 0.0))
        throw Error(ErrorKind::InvalidParams, "three-level decay rates must be >= 0 with positive sum");
    CMatrix H0 = CMatrix::Zero(3, 3);
    H0(1, 1) = p.omega1;
    H0(2, 2) = p.omegaE;
    CMatrix k0 = CMatrix::Zero(3, 3), k1 = CMatrix::Zero(3, 3);
    k0(0, 2) = 1.0; // |0><e|
    k1(1, 2) = 1.0; // |1><e|

    SplitLiouvillian sys;
    sys.space.dims = {3};
    sys.L0 = build_gksl(H0, {{2.0 * p.Gamma0, k0}, {2.0 * p.Gamma1, k1}});
    const double eps = std::max(std::abs(p.g0), std::abs(p.g1));
    sys.eps = eps;
    if (eps == 0.0) {
        sys.L1 = CMatrix::Zero(9, 9);
        return sys;
    }
    CMatrix V = (p.g0 / eps) * k0 + (p.g1 / eps) * k1;
    V += V.adjoint().eval();
    sys.L1 = commutator_super(V);
    return sys;
}

CMatrix sigma_minus() {
    CMatrix s = CMatrix::Zero(2, 2);
    s(0, 1) = 1.0; // |g><e|
    return s;
}

CMatrix sigma_plus() { return sigma_minus().adjoint(); }

CMatrix sigma_z() {
    CMatrix s = CMatrix::Zero(2, 2);
    s(0, 0) = -1.0;
    s(1, 1) = 1.0;
    return s;
}

CMatrix sigma_x() { return sigma_plus() + sigma_minus(); }

CMatrix annihilation(int n_tr) {
    CMatrix a = CMatrix::Zero(n_tr, n_tr);
    for (int n = 1; n < n_tr; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

SplitLiouvillian rabi(const RabiParams& p) {
    if (p.n_tr < 2) throw Error(ErrorKind::InvalidParams, "n_tr must be >= 2");
    if (!(p.kappa > 0.0)) throw Error(ErrorKind::InvalidParams, "kappa must be positive");
    if (p.g < 0.0) throw Error(ErrorKind::InvalidParams, "g must be non-negative");
    const CMatrix a = annihilation(p.n_tr);
    const CMatrix LA = build_gksl(p.omega_ph * (a.adjoint() * a), {{p.kappa, a}});
    const CMatrix LB = build_gksl(0.5 * p.omega_eg * sigma_z(), {});
    const CMatrix X = kron(a + a.adjoint(), sigma_x());
    return compose_bipartite(LA, LB, commutator_super(X), p.g, p.n_tr, 2);
}

CMatrix rabi_qubit_basis(const RabiParams& p) {
    const int d = 2 * p.n_tr;
    CMatrix Y = CMatrix::Zero(static_cast<Eigen::Index>(d) * d, 4);
    CMatrix P0 = CMatrix::Zero(p.n_tr, p.n_tr);
    P0(0, 0) = 1.0;
    for (int n = 0; n < 2; ++n)
        for (int m = 0; m < 2; ++m) {
            CMatrix E = CMatrix::Zero(2, 2);
            E(m, n) = 1.0;
            Y.col(n * 2 + m) = vectorize(kron(P0, E));
        }
    return Y;
}

namespace {

cd c_kernel(cd gamma, double t) {
    if (std::isinf(t)) return 1.0 / gamma;
    return (1.0 - std::exp(-gamma * t)) / gamma;
}

} // namespace

cd RabiAnalytic::c_plus(double t) const { return c_kernel(p.gamma_plus(), t); }
cd RabiAnalytic::c_minus(double t) const { return c_kernel(p.gamma_minus(), t); }

CMatrix RabiAnalytic::kossakowski(double t) const {
    const cd c[2] = {c_plus(t), c_minus(t)};
    CMatrix K(2, 2);
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) K(j, k) = c[j] + std::conj(c[k]);
    return K;
}

CMatrix rabi_analytic_F(const RabiParams& p, double t) {
    const RabiAnalytic an{p};
    const cd cp = an.c_plus(t), cm = an.c_minus(t);
    const CMatrix I2 = CMatrix::Identity(2, 2);
    const double g2 = p.g * p.g;
    // the frequency shift is g^2 Im(c_- - c_+); see README for the sign
    CMatrix F = commutator_super(0.5 * (p.omega_eg + g2 * (cm - cp).imag()) * sigma_z());
    const CMatrix K = an.kossakowski(t);
    const CMatrix s[2] = {sigma_plus(), sigma_minus()};
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            const CMatrix skd = s[k].adjoint();
            const CMatrix kj = skd * s[j];
            F += (g2 * K(j, k)) *
                 (sandwich_super(s[j], skd) - 0.5 * sandwich_super(kj, I2) - 0.5 * sandwich_super(I2, kj));
        }
    return F;
}

CMatrix rabi_analytic_K(const RabiParams& p) {
    const cd gp = p.gamma_plus(), gm = p.gamma_minus();
    const CMatrix sm = sigma_minus(), sp = sigma_plus();
    const CMatrix sg = sm / gm + sp / gp;
    const CMatrix a = annihilation(p.n_tr);
    const CMatrix ad = a.adjoint();
    const CMatrix IA = CMatrix::Identity(p.n_tr, p.n_tr);
    const int d = 2 * p.n_tr;
    const CMatrix W = cd(0.0, -p.g) * kron(ad, sg) -
                      (p.g * p.g / p.kappa_bar()) * kron(ad * ad, CMatrix((sm * sp) / gp + (sp * sm) / gm));
    const CMatrix IW = CMatrix::Identity(d, d) + W;
    const CMatrix G = kron(IA, sg);
    CMatrix P0 = CMatrix::Zero(p.n_tr, p.n_tr);
    P0(0, 0) = 1.0;
    CMatrix Kmap(static_cast<Eigen::Index>(d) * d, 4);
    for (int n = 0; n < 2; ++n)
        for (int m = 0; m < 2; ++m) {
            CMatrix E = CMatrix::Zero(2, 2);
            E(m, n) = 1.0;
            const CMatrix X = kron(P0, E);
            const CMatrix out = IW * X * IW.adjoint() - (p.g * p.g) * (G * X * G.adjoint());
            Kmap.col(n * 2 + m) = vectorize(out);
        }
    return Kmap;
}

std::pair<double, double> k_matrix_eigenvalues(const RabiParams& p) {
    const cd gp = p.gamma_plus(), gm = p.gamma_minus();
    const double trK = p.kappa / std::norm(gp) + p.kappa / std::norm(gm);
    const double x = 4.0 * p.omega_eg / (std::abs(gp * gm) * trK);
    const double root = std::sqrt(1.0 + x * x);
    return {0.5 * trK * (1.0 + root), 0.5 * trK * (1.0 - root)};
}

} // namespace tclae
