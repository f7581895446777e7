// experiments.hpp: full-system oracle, reference experiments, reports

#pragma once

#include <deque>
#include <map>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "tclae/models.hpp"
#include "tclae/numerics.hpp"
#include "tclae/tcl.hpp"

namespace tclae {

struct FitWindow {
    double t_min{2.0};
    double t_max{12.0};
    double floor{1e-13};
};

struct ExperimentConfig {
    std::string experiment;
    std::string model{"three-level"}; // "three-level" or "rabi"
    ThreeLevelParams three_level;
    RabiParams rabi;
    double t_max{15.0};
    double dt{0.1};
    double record_dt{0.0}; // spacing of stored samples; 0 stores every step
    FitWindow fit;
    std::vector<double> sweep;
    std::vector<int> n_tr_list;
    std::map<std::string, double> tolerances;
    std::map<std::string, double> references;
    std::string out_dir;
    std::string stream_path; // optional per-t CSV rows written while running

    double tol(const std::string& key, double fallback) const;
    double ref(const std::string& key, double fallback) const;
    void validate() const;
};

struct Series {
    std::string name;
    std::vector<double> t;
    std::vector<double> value;
};

struct Check {
    std::string name;
    bool pass{false};
    double measured{0.0};
    std::string bound;
};

struct ExperimentReport {
    std::string experiment;
    std::deque<Series> series;
    std::map<std::string, ExpFit> fits;
    std::map<std::string, double> scalars;
    std::vector<Check> checks;
    std::map<std::string, std::string> notes;

    Series& add_series(const std::string& name);
    void check(const std::string& name, bool pass, double measured, const std::string& bound);
    bool all_pass() const;
    const Check* find_check(const std::string& name) const;
    double scalar(const std::string& name) const;
};

// default configuration of a named experiment
ExperimentConfig default_config(const std::string& experiment);
// defaults of cfg["experiment"] overridden by the JSON document at path
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

std::string report_json(const ExperimentReport& r);
// JSON report plus, for format "csv", one t,value file per series
void write_report(const ExperimentReport& r, const std::string& dir, const std::string& format);

using SparseOp = Eigen::SparseMatrix<cd>;

// exp(L h) applied to blocks of state vectors by Taylor series on a sparse generator
class SparsePropagator {
public:
    explicit SparsePropagator(const CMatrix& L);
    void apply(CMatrix& V, double h) const;

private:
    SparseOp L_;
    double norm1_{0.0};
};

// RK4 trajectory of rho' = L rho with step dt, sampled at t = k * record_every * dt
std::vector<CMatrix> integrate_master(const CMatrix& L, const CMatrix& rho0, double dt, long n_steps,
                                      long record_every = 1);

ExperimentReport run_prop_verify(const ExperimentConfig& cfg);
ExperimentReport run_rabi_truncation(const ExperimentConfig& cfg);
ExperimentReport run_choi(const ExperimentConfig& cfg);
ExperimentReport run_laplace_compare(const ExperimentConfig& cfg);
ExperimentReport run_equivalence(const ExperimentConfig& cfg);

ExperimentReport run_experiment(const ExperimentConfig& cfg);

// max_t ||rho_n(t) - rho_{n+5}(t)||_F with rho_n embedded in the larger Fock space
double truncation_discrepancy(const RabiParams& p, int n_small, int n_large, double t_max, double dt);

// minimum eigenvalue of the Choi matrix of a qubit propagator acting on vec(rho_B)
double choi_min_eigenvalue(const CMatrix& Phi);

} // namespace tclae
