#include "tclae/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tclae {

namespace {

double scale_of(const CVector& values) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) m = std::max(m, std::abs(values[i]));
    return m;
}

double cluster_tol_for(const CVector& values) { return 1e-7 * std::max(1.0, scale_of(values)); }

struct Candidate {
    double overlap;
    std::size_t i;
    std::size_t c;
};

// Greedy assignment of perturbed modes to clusters with capacities; returns cluster per mode
// (or npos) and the winning overlap.
void greedy_assign(std::vector<Candidate> cands, std::vector<std::size_t> capacity,
                   std::size_t n_modes, std::vector<std::size_t>& cluster_of,
                   std::vector<double>& overlap_of) {
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Candidate& a, const Candidate& b) { return a.overlap > b.overlap; });
    cluster_of.assign(n_modes, static_cast<std::size_t>(-1));
    overlap_of.assign(n_modes, 0.0);
    for (const auto& cand : cands) {
        if (cluster_of[cand.i] != static_cast<std::size_t>(-1)) continue;
        if (capacity[cand.c] == 0) continue;
        --capacity[cand.c];
        cluster_of[cand.i] = cand.c;
        overlap_of[cand.i] = cand.overlap;
    }
}

} // namespace

CVector SpectralData::surviving_values() const {
    CVector out(static_cast<Eigen::Index>(surviving.size()));
    for (std::size_t k = 0; k < surviving.size(); ++k)
        out[static_cast<Eigen::Index>(k)] = values[static_cast<Eigen::Index>(surviving[k])];
    return out;
}

std::vector<std::vector<std::size_t>> eigenvalue_clusters(const CVector& values,
                                                          const std::vector<std::size_t>& idx,
                                                          double tol) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<bool> used(idx.size(), false);
    for (std::size_t a = 0; a < idx.size(); ++a) {
        if (used[a]) continue;
        std::vector<std::size_t> group{idx[a]};
        used[a] = true;
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
            if (used[b]) continue;
            if (std::abs(values[static_cast<Eigen::Index>(idx[b])] - values[static_cast<Eigen::Index>(idx[a])]) <= tol) {
                group.push_back(idx[b]);
                used[b] = true;
            }
        }
        out.push_back(std::move(group));
    }
    return out;
}

SpectralData analyze(const CMatrix& L, double tol_s, EigenDetail detail) {
    RawEigen raw = eig_raw(L, true);
    SpectralData spec;
    spec.values = raw.values;
    const double scale = scale_of(raw.values);
    spec.tol_s = tol_s > 0.0 ? tol_s : 1e-9 * std::max(scale, 1e-300);

    const Eigen::Index n = raw.values.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(raw.values[i].real()) <= spec.tol_s)
            spec.surviving.push_back(static_cast<std::size_t>(i));
        else
            spec.fast.push_back(static_cast<std::size_t>(i));
    }
    if (spec.surviving.empty()) throw Error(ErrorKind::NoGap, "no mode with |Re lambda| <= tol_s");
    if (spec.fast.empty()) {
        spec.gap = std::numeric_limits<double>::infinity();
    } else {
        double gap = std::numeric_limits<double>::infinity();
        for (auto f : spec.fast) {
            const double re = -raw.values[static_cast<Eigen::Index>(f)].real();
            if (re < 2.0 * spec.tol_s)
                throw Error(ErrorKind::NoGap, "fast mode with Re(-lambda) = " + std::to_string(re) +
                                                  " inside the clean-gap guard");
            gap = std::min(gap, re);
        }
        spec.gap = gap;
    }

    EigenSystem block = biorthonormal_subset(raw, spec.surviving, cluster_tol_for(raw.values));
    spec.chi_R = std::move(block.right);
    spec.chi_L_dag = std::move(block.left_dag);

    if (detail == EigenDetail::Full) {
        raw.left.resize(0, 0);
        // surviving columns are replaced by the cluster-orthonormalized ones so that the
        // full system and the reduced basis share the same surviving vectors
        for (std::size_t k = 0; k < spec.surviving.size(); ++k)
            raw.right.col(static_cast<Eigen::Index>(spec.surviving[k])) = spec.chi_R.col(static_cast<Eigen::Index>(k));
        Eigen::PartialPivLU<CMatrix> lu(raw.right);
        CMatrix inv = lu.inverse();
        auto norm1 = [](const CMatrix& X) { return X.cwiseAbs().colwise().sum().maxCoeff(); };
        const double cond = norm1(raw.right) * norm1(inv);
        if (!std::isfinite(cond) || cond > kCondLimit)
            throw Error(ErrorKind::NonDiagonalizable,
                        "eigenvector matrix condition number " + std::to_string(cond));
        spec.eig = EigenSystem{raw.values, std::move(raw.right), std::move(inv)};
    }
    return spec;
}

CMatrix projector_Pinv(const SpectralData& spec) { return spec.chi_R * spec.chi_L_dag; }

ReducedBasis reduced_basis(const SpectralData& spec) { return ReducedBasis{spec.chi_R, spec.chi_L_dag}; }

ReducedBasis align_basis(const ReducedBasis& basis, const CMatrix& Y) {
    if (Y.rows() != basis.chi_R.rows() || Y.cols() != basis.chi_R.cols())
        throw Error(ErrorKind::DimensionMismatch, "align_basis target shape");
    const CMatrix T = basis.chi_L_dag * Y;
    if (condition_1(T) > 1e10)
        throw Error(ErrorKind::DimensionMismatch, "alignment target does not span the surviving space");
    ReducedBasis out;
    out.chi_R = basis.chi_R * T;
    out.chi_L_dag = solve(T, basis.chi_L_dag);
    return out;
}

ModeMatching match_modes(const SpectralData& spec0, const EigenSystem& eps_sys) {
    if (!spec0.eig) throw Error(ErrorKind::AmbiguousMatching, "match_modes needs the full unperturbed eigensystem");
    const EigenSystem& e0 = *spec0.eig;
    const std::size_t n = static_cast<std::size_t>(e0.values.size());
    if (static_cast<std::size_t>(eps_sys.values.size()) != n)
        throw Error(ErrorKind::DimensionMismatch, "match_modes: systems differ in size");

    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    const auto clusters = eigenvalue_clusters(e0.values, all, cluster_tol_for(e0.values));

    const CMatrix G = e0.left_dag * eps_sys.right;  // G(j,i) = <l_j|r_i^eps>
    const CMatrix H = eps_sys.left_dag * e0.right;  // H(i,j) = <l_i^eps|r_j>

    std::vector<Candidate> cands;
    std::vector<std::size_t> capacity;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        capacity.push_back(clusters[c].size());
        for (std::size_t i = 0; i < n; ++i) {
            cd s = 0.0;
            for (auto j : clusters[c]) s += H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * G(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
            const double o = std::abs(s);
            if (o > 1e-3) cands.push_back({o, i, c});
        }
    }
    std::vector<std::size_t> cluster_of;
    std::vector<double> overlap_of;
    greedy_assign(std::move(cands), capacity, n, cluster_of, overlap_of);

    ModeMatching out;
    out.perm.assign(n, 0);
    out.overlaps = overlap_of;
    for (std::size_t i = 0; i < n; ++i) {
        if (cluster_of[i] == static_cast<std::size_t>(-1) || overlap_of[i] <= 0.5)
            throw Error(ErrorKind::AmbiguousMatching,
                        "perturbed mode " + std::to_string(i) + " has winning overlap " +
                            std::to_string(overlap_of[i]));
    }
    // inside each cluster pair modes by the individual overlaps
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i)
            if (cluster_of[i] == c) members.push_back(i);
        std::vector<Candidate> inner;
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = 0; b < clusters[c].size(); ++b) {
                const auto i = static_cast<Eigen::Index>(members[a]);
                const auto j = static_cast<Eigen::Index>(clusters[c][b]);
                inner.push_back({std::abs(H(i, j) * G(j, i)), members[a], b});
            }
        std::vector<std::size_t> slot_of;
        std::vector<double> dummy;
        greedy_assign(std::move(inner), std::vector<std::size_t>(clusters[c].size(), 1), n, slot_of, dummy);
        for (auto i : members) out.perm[i] = clusters[c][slot_of[i]];
    }
    return out;
}

SurvivingMatch match_surviving(const SpectralData& spec0, const RawEigen& eps_raw) {
    if (eps_raw.left.size() == 0)
        throw Error(ErrorKind::AmbiguousMatching, "match_surviving needs perturbed left eigenvectors");
    const std::size_t n = static_cast<std::size_t>(eps_raw.values.size());
    const std::size_t ns = spec0.surviving.size();

    std::vector<std::size_t> local(ns);
    std::iota(local.begin(), local.end(), 0);
    const CVector sv = spec0.surviving_values();
    const auto clusters = eigenvalue_clusters(sv, local, cluster_tol_for(spec0.values));

    const CMatrix G = spec0.chi_L_dag * eps_raw.right;          // ns x n
    const CMatrix H = eps_raw.left.adjoint() * spec0.chi_R;     // n x ns
    std::vector<cd> norm(n);
    for (std::size_t i = 0; i < n; ++i)
        norm[i] = eps_raw.left.col(static_cast<Eigen::Index>(i)).dot(eps_raw.right.col(static_cast<Eigen::Index>(i)));

    std::vector<Candidate> cands;
    std::vector<std::size_t> capacity;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        capacity.push_back(clusters[c].size());
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(norm[i]) < 1e-300) continue;
            cd s = 0.0;
            for (auto k : clusters[c]) s += H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) * G(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
            const double o = std::abs(s / norm[i]);
            if (o > 1e-3) cands.push_back({o, i, c});
        }
    }
    std::vector<std::size_t> cluster_of;
    std::vector<double> overlap_of;
    greedy_assign(std::move(cands), capacity, n, cluster_of, overlap_of);

    SurvivingMatch out;
    out.perturbed.assign(ns, 0);
    out.overlaps.assign(ns, 0.0);
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i)
            if (cluster_of[i] == c) members.push_back(i);
        if (members.size() != clusters[c].size())
            throw Error(ErrorKind::AmbiguousMatching, "surviving cluster left unfilled");
        std::vector<Candidate> inner;
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = 0; b < clusters[c].size(); ++b) {
                const auto i = static_cast<Eigen::Index>(members[a]);
                const auto k = static_cast<Eigen::Index>(clusters[c][b]);
                inner.push_back({std::abs(H(i, k) * G(k, i) / norm[members[a]]), members[a], b});
            }
        std::vector<std::size_t> slot_of;
        std::vector<double> dummy;
        greedy_assign(std::move(inner), std::vector<std::size_t>(clusters[c].size(), 1), n, slot_of, dummy);
        for (auto i : members) {
            const std::size_t k = clusters[c][slot_of[i]];
            out.perturbed[k] = i;
            out.overlaps[k] = overlap_of[i];
            if (overlap_of[i] <= 0.5)
                throw Error(ErrorKind::AmbiguousMatching,
                            "surviving mode " + std::to_string(k) + " has winning overlap " +
                                std::to_string(overlap_of[i]));
        }
    }
    return out;
}

} // namespace tclae
