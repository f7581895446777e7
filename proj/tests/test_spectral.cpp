#include <doctest.h>

#include <random>
#include <set>

#include "tclae/models.hpp"
#include "tclae/spectral.hpp"

using namespace tclae;

namespace {

ThreeLevelParams reference_three_level() { return ThreeLevelParams{0.5, 1.0, 0.5, 0.5, 0.1, 0.1}; }

CMatrix random_state(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    CMatrix A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = cd(nd(rng), nd(rng));
    CMatrix rho = A * A.adjoint();
    return rho / rho.trace();
}

} // namespace

TEST_CASE("three-level spectrum: gap and surviving modes") {
    const SpectralData s = analyze(three_level(reference_three_level()).L0);
    CHECK(s.n_surviving() == 4);
    CHECK(s.gap == doctest::Approx(1.0).epsilon(1e-10));
    const CVector sv = s.surviving_values();
    std::vector<double> im;
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(sv[i].real()) < 1e-12);
        im.push_back(sv[i].imag());
    }
    std::sort(im.begin(), im.end());
    CHECK(im[0] == doctest::Approx(-0.5));
    CHECK(std::abs(im[1]) < 1e-12);
    CHECK(std::abs(im[2]) < 1e-12);
    CHECK(im[3] == doctest::Approx(0.5));
    CHECK(s.surviving.size() + s.fast.size() == 9);
    for (auto f : s.fast) CHECK(-s.values[static_cast<Eigen::Index>(f)].real() >= s.gap - 1e-12);
}

TEST_CASE("toy diagonal generator") {
    CMatrix L = CMatrix::Zero(3, 3);
    L(1, 1) = -1.0;
    L(2, 2) = -2.0;
    const SpectralData s = analyze(L);
    REQUIRE(s.surviving.size() == 1);
    CHECK(s.surviving[0] == 0);
    CHECK(s.gap == doctest::Approx(1.0));
}

TEST_CASE("analyze rejects missing or unclean gaps") {
    CMatrix L = CMatrix::Zero(2, 2);
    L(0, 0) = -1.0;
    L(1, 1) = -2.0;
    try {
        analyze(L);
        FAIL("expected NoGap");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoGap);
    }
    CMatrix M = CMatrix::Zero(3, 3);
    M(1, 1) = -1.0;
    M(2, 2) = -1.5e-9; // fast, but inside the 2 tol_s guard
    try {
        analyze(M);
        FAIL("expected NoGap");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoGap);
    }
}

TEST_CASE("projector laws") {
    const SplitLiouvillian sys = three_level(reference_three_level());
    const SpectralData s = analyze(sys.L0);
    const CMatrix P = projector_Pinv(s);
    const CMatrix I = CMatrix::Identity(9, 9);
    const CMatrix Q = I - P;
    CHECK((P * P - P).norm() < 1e-10);
    CHECK((Q * Q - Q).norm() < 1e-10);
    CHECK((P * Q).norm() < 1e-10);
    CHECK((Q * P).norm() < 1e-10);
    CHECK((sys.L0 * P - P * sys.L0).norm() < 1e-10);
    Eigen::FullPivLU<CMatrix> lu(P);
    lu.setThreshold(1e-8);
    CHECK(lu.rank() == 4);

    const ReducedBasis b = reduced_basis(s);
    CHECK((b.chi_L_dag * b.chi_R - CMatrix::Identity(4, 4)).norm() < 1e-10);
    CHECK((b.chi_R * b.chi_L_dag - P).norm() < 1e-12);
}

TEST_CASE("all modes surviving gives the identity projector") {
    const CMatrix L = commutator_super(sigma_z());
    SpectralData s = analyze(L, 1e-9);
    CHECK(s.n_surviving() == 4);
    CHECK((projector_Pinv(s) - CMatrix::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("bipartite projector is the partial-trace map") {
    RabiParams p;
    p.n_tr = 6;
    const SpectralData s = analyze(rabi(p).L0);
    CHECK(s.n_surviving() == 4);
    CHECK(s.gap == doctest::Approx(0.5).epsilon(1e-9));
    const CMatrix P = projector_Pinv(s);
    const ReducedBasis b = align_basis(reduced_basis(s), rabi_qubit_basis(p));
    std::mt19937_64 rng(21);
    CMatrix ground = CMatrix::Zero(p.n_tr, p.n_tr);
    ground(0, 0) = 1.0;
    for (int trial = 0; trial < 3; ++trial) {
        const CMatrix rho = random_state(2 * p.n_tr, rng);
        const CMatrix rB = partial_trace_A(rho, p.n_tr, 2);
        CHECK((P * vectorize(rho) - vectorize(kron(ground, rB))).norm() < 1e-10);
        CHECK((b.chi_L_dag * vectorize(rho) - vectorize(rB)).norm() < 1e-10);
    }
    CHECK((b.chi_R * b.chi_L_dag - P).norm() < 1e-10);
}

TEST_CASE("mode matching") {
    ThreeLevelParams tp = reference_three_level();
    const SplitLiouvillian sys = three_level(tp);
    const SpectralData s = analyze(sys.L0);

    const ModeMatching id = match_modes(s, eig_biorthonormal(sys.L0));
    for (std::size_t i = 0; i < id.perm.size(); ++i) {
        CHECK(id.overlaps[i] == doctest::Approx(1.0).epsilon(1e-8));
    }
    std::set<std::size_t> seen0(id.perm.begin(), id.perm.end());
    CHECK(seen0.size() == 9);

    const EigenSystem full = eig_biorthonormal(sys.full());
    const ModeMatching m = match_modes(s, full);
    std::set<std::size_t> seen(m.perm.begin(), m.perm.end());
    CHECK(seen.size() == 9);
    for (double o : m.overlaps) CHECK(o > 0.9);

    tp.g0 = tp.g1 = 0.05;
    const EigenSystem hs = eig_biorthonormal(three_level(tp).full());
    const ModeMatching half = match_modes(s, hs);
    // matched pairs move closer together when the coupling is halved
    auto worst = [&](const EigenSystem& es, const ModeMatching& mm) {
        double w = 0.0;
        for (std::size_t i = 0; i < mm.perm.size(); ++i)
            w = std::max(w, std::abs(es.values[static_cast<Eigen::Index>(i)] -
                                     s.values[static_cast<Eigen::Index>(mm.perm[i])]));
        return w;
    };
    CHECK(worst(hs, half) < 0.5 * worst(full, m));
    for (double o : half.overlaps) CHECK(o > 0.9);

    tp.g0 = tp.g1 = 10.0;
    const SplitLiouvillian strong = three_level(tp);
    try {
        match_modes(s, eig_biorthonormal(strong.full()));
        FAIL("expected AmbiguousMatching");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::AmbiguousMatching);
    }
}
