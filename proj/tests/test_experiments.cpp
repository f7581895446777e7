#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "tclae/experiments.hpp"

using namespace tclae;

TEST_CASE("integrate_master matches the exact propagator") {
    const SplitLiouvillian sys = three_level(ThreeLevelParams{});
    const CMatrix L = sys.full();
    CMatrix rho0 = CMatrix::Zero(3, 3);
    rho0(2, 2) = 1.0;
    const std::vector<CMatrix> traj = integrate_master(L, rho0, 1e-3, 2000, 500);
    REQUIRE(traj.size() == 5);
    CHECK((traj[0] - rho0).norm() == 0.0);
    for (std::size_t k = 1; k < traj.size(); ++k) {
        const CVector want = expm(L, 0.5 * double(k)) * vectorize(rho0);
        CHECK((vectorize(traj[k]) - want).norm() < 1e-11);
        CHECK(std::abs(traj[k].trace() - 1.0) < 1e-12);
    }
}

TEST_CASE("integrate_master rejects bad input") {
    const CMatrix L = three_level(ThreeLevelParams{}).full();
    CHECK_THROWS_AS(integrate_master(L, CMatrix::Identity(3, 3), 0.01, 10), Error);
    CMatrix nh = CMatrix::Zero(3, 3);
    nh(0, 0) = 1.0;
    nh(0, 1) = 0.5;
    CHECK_THROWS_AS(integrate_master(L, nh, 0.01, 10), Error);
    CMatrix ok = CMatrix::Zero(2, 2);
    ok(0, 0) = 1.0;
    CHECK_THROWS_AS(integrate_master(L, ok, 0.01, 10), Error);
}

TEST_CASE("sparse propagator agrees with expm") {
    RabiParams p;
    p.n_tr = 5;
    const CMatrix L = rabi(p).full();
    CMatrix V = CMatrix::Zero(L.rows(), 2);
    V(0, 0) = 1.0;
    V(L.rows() - 1, 1) = cd(0.0, 1.0);
    const CMatrix V0 = V;
    SparsePropagator prop(L);
    prop.apply(V, 3.0);
    CHECK((V - expm(L, 3.0) * V0).norm() < 1e-12);
    prop.apply(V, 0.0);
    CHECK((V - expm(L, 3.0) * V0).norm() < 1e-12);
}

TEST_CASE("Choi minimum eigenvalue") {
    CHECK(std::abs(choi_min_eigenvalue(CMatrix::Identity(4, 4))) < 1e-15);
    // full depolarization to the identity / 2 is completely positive
    CMatrix dep = CMatrix::Zero(4, 4);
    for (int c : {0, 3}) {
        dep(0, c) = 0.5;
        dep(3, c) = 0.5;
    }
    CHECK(choi_min_eigenvalue(dep) == doctest::Approx(0.5));
    // the transpose is positive but not completely positive
    CMatrix tr = CMatrix::Zero(4, 4);
    tr(0, 0) = tr(3, 3) = 1.0;
    tr(1, 2) = tr(2, 1) = 1.0;
    CHECK(choi_min_eigenvalue(tr) == doctest::Approx(-1.0));
}

TEST_CASE("truncation discrepancy shrinks with the photon cutoff") {
    RabiParams p;
    p.g = 0.05;
    const double d4 = truncation_discrepancy(p, 2, 7, 10.0, 0.5);
    const double d6 = truncation_discrepancy(p, 4, 9, 10.0, 0.5);
    CHECK(d6 < d4);
    CHECK(d6 < 0.1 * d4);
}

TEST_CASE("configuration parsing") {
    const ExperimentConfig d = default_config("prop-verify");
    CHECK(d.model == "three-level");
    CHECK(d.t_max == doctest::Approx(15.0));
    CHECK_THROWS_AS(default_config("unknown"), Error);

    const ExperimentConfig c = parse_config(R"({
        "experiment": "rabi-truncation",
        "model": {"name": "rabi", "params": {"g": 0.02, "n_tr": 6}},
        "grid": {"t_max": 20, "dt": 0.5},
        "n_tr": [4, 6],
        "tolerances": {"rate_abs": 0.01},
        "references": {"a_P": 1.5}
    })");
    CHECK(c.model == "rabi");
    CHECK(c.rabi.g == doctest::Approx(0.02));
    CHECK(c.t_max == doctest::Approx(20.0));
    CHECK(c.n_tr_list == std::vector<int>{4, 6});
    CHECK(c.tol("rate_abs", 1.0) == doctest::Approx(0.01));
    CHECK(c.tol("missing", 7.0) == doctest::Approx(7.0));
    CHECK(c.ref("a_P", 0.0) == doctest::Approx(1.5));

    CHECK_THROWS_AS(parse_config("{not json"), Error);
    CHECK_THROWS_AS(parse_config(R"({"experiment": "prop-verify", "grid": {"dt": -1}})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"experiment": "prop-verify", "model": {"name": "spin-chain"}})"), Error);
}

TEST_CASE("prop-verify report") {
    ExperimentConfig cfg = default_config("prop-verify");
    const ExperimentReport r = run_prop_verify(cfg);
    CHECK(r.all_pass());
    CHECK(r.scalar("b_P_over_delta") == doctest::Approx(1.0).epsilon(0.05));
    CHECK(r.find_check("amplitude_ratio") != nullptr);
    CHECK(r.find_check("nonexistent") == nullptr);

    const auto j = nlohmann::json::parse(report_json(r));
    CHECK(j["experiment"] == "prop-verify");
    CHECK(j["all_pass"] == true);
    CHECK(j["checks"].size() == r.checks.size());
    CHECK(j["checks"]["amplitude_ratio"]["pass"] == true);
    CHECK(j["series"].size() == r.series.size());

    // switching the coupling off leaves the projector fixed
    cfg.three_level.g0 = cfg.three_level.g1 = 0.0;
    const ExperimentReport z = run_prop_verify(cfg);
    CHECK(z.all_pass());
}

TEST_CASE("equivalence on a short grid") {
    ExperimentConfig cfg = default_config("equivalence");
    cfg.model = "three-level";
    cfg.t_max = 4.0;
    cfg.dt = 0.002;
    cfg.record_dt = 0.1;
    cfg.fit = FitWindow{1.0, 4.0, 1e-13};
    const ExperimentReport r = run_equivalence(cfg);
    for (const Check& c : r.checks) {
        INFO(c.name << " measured " << c.measured);
        CHECK(c.pass);
    }
    CHECK_THROWS_AS(run_experiment(default_config("unknown-experiment")), Error);
}
