// spectral.hpp: surviving/fast classification, projectors, reduced bases, mode matching

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "tclae/numerics.hpp"

namespace tclae {

enum class EigenDetail {
    Full,      // full biorthonormal eigensystem required (NonDiagonalizable otherwise)
    Surviving, // only the surviving block needs to be well conditioned
};

struct SpectralData {
    CVector values;                      // all eigenvalues, sorted
    std::vector<std::size_t> surviving;  // indices into values
    std::vector<std::size_t> fast;
    double gap{0.0};
    double tol_s{0.0};
    CMatrix chi_R;                       // d^2 x n_s
    CMatrix chi_L_dag;                   // n_s x d^2
    std::optional<EigenSystem> eig;      // present for EigenDetail::Full

    std::size_t n_surviving() const { return surviving.size(); }
    CVector surviving_values() const;
};

struct ReducedBasis {
    CMatrix chi_R;
    CMatrix chi_L_dag;
};

struct ModeMatching {
    std::vector<std::size_t> perm;  // perturbed index -> unperturbed index
    std::vector<double> overlaps;   // winning overlap per perturbed index
};

// tol_s <= 0 selects the default 1e-9 * max|lambda|
SpectralData analyze(const CMatrix& L, double tol_s = -1.0, EigenDetail detail = EigenDetail::Full);

CMatrix projector_Pinv(const SpectralData& spec);

ReducedBasis reduced_basis(const SpectralData& spec);

// Same surviving subspace, re-expressed so that chi_R = P_inv Y.
ReducedBasis align_basis(const ReducedBasis& basis, const CMatrix& Y);

// Overlap of perturbed mode i with unperturbed cluster C (modes with equal eigenvalue):
// |sum_{j in C} <l_i^eps|r_j><l_j|r_i^eps>|, which is invariant under eigenvector rescaling.
ModeMatching match_modes(const SpectralData& spec0, const EigenSystem& eps_sys);

struct SurvivingMatch {
    std::vector<std::size_t> perturbed; // perturbed mode index for each surviving mode, in spec0 order
    std::vector<double> overlaps;
};

// Matching restricted to the surviving modes; only needs spec0.chi_R / chi_L_dag and the
// unnormalized perturbed eigenvectors (with left vectors).
SurvivingMatch match_surviving(const SpectralData& spec0, const RawEigen& eps_raw);

// Eigenvalue clusters: indices whose eigenvalues agree within tol.
std::vector<std::vector<std::size_t>> eigenvalue_clusters(const CVector& values,
                                                          const std::vector<std::size_t>& idx,
                                                          double tol);

} // namespace tclae
