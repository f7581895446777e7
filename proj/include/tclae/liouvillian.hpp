// liouvillian.hpp: column-stacked superoperators, GKSL generators, bipartite lifts

#pragma once

#include <vector>

#include "tclae/types.hpp"

namespace tclae {

struct HilbertSpec {
    std::vector<int> dims; // subsystem A first for bipartite spaces
    int total_dim() const;
};

struct SplitLiouvillian {
    CMatrix L0;
    CMatrix L1;
    double eps{0.0};
    HilbertSpec space;

    CMatrix full() const { return L0 + cd(eps, 0.0) * L1; }
    int dim() const { return space.total_dim(); }
};

struct Jump {
    double rate{0.0};
    CMatrix op;
};

// v[j*d + i] = A(i, j)
CVector vectorize(const CMatrix& A);
CMatrix devectorize(const CVector& v, int d);

// superoperator of rho -> A rho B, i.e. B^T (x) A
CMatrix sandwich_super(const CMatrix& A, const CMatrix& B);

// -i[H, .]
CMatrix commutator_super(const CMatrix& H);

// rate * D[L]
CMatrix dissipator_super(const CMatrix& L, double rate);

CMatrix build_gksl(const CMatrix& H, const std::vector<Jump>& jumps);

// S on A lifted to S (x) I_B on the composite space, and the mirror for B.
CMatrix lift_A(const CMatrix& S_A, int dA, int dB);
CMatrix lift_B(const CMatrix& S_B, int dA, int dB);

// L0 = lift_A(L_A) + lift_B(L_B); L1 as given, with the caller's eps
SplitLiouvillian compose_bipartite(const CMatrix& L_A, const CMatrix& L_B, const CMatrix& L1,
                                   double eps, int dA, int dB);

CMatrix partial_trace_A(const CMatrix& rho, int dA, int dB);

// max |<vec I| S|| over columns
double trace_preservation_defect(const CMatrix& S, int d);

} // namespace tclae
