// Desk-scale index computations: the simple index by rank counting, the
// L2-style index certified through the flatness checks, and the idempotent
// trace census.

#pragma once

#include "aschern/flat_bundle.hpp"

namespace aschern {

struct IndexReport {
  int ind_simple = 0;
  double ind_A = 0;
  double phi_q = 0;
  double integrality_residual = 0;  // distance of ind_A to phi(q) Z
  FlatnessReport flatness;          // certificates backing the identity
};

// Pointwise rank by eigenvalue counting; throws on a rank jump.
int field_rank(const ProjectionField& p);

// ind([P] - [Q]) = rank(P) - rank(Q) for constant-rank scalar fields.
int index_simple(const ProjectionField& P, const ProjectionField& Q);

struct IndexOptions {
  FlatnessOptions flatness;
  double certificate_tol = 1e-6;
  bool run_degree2 = true;  // degree-0 certificate always runs
};

// ind_A = phi(q) . ind with phi(q) measured from Ch^0_phi(p_A); the flatness
// residuals are the certificate that the identity applies, so this packages
// a verified identity rather than an independent analytic index.  Throws
// when the certificate fails.
IndexReport l2_index_via_chern(const FlatProjection& fp, const SampledSpace& space,
                               const ProjectionField& P, const ProjectionField& Q,
                               const IndexOptions& opts = {});

struct CensusEntry {
  double trace_re = 0;
  double trace_im = 0;
  double projection_trace_gap = 0;  // |phi(e) - phi(p)| for the associated p
  bool flagged_trivial = false;     // phi(e) at 0 or size() forces e in {0, 1}
  double triviality_residual = 0;   // |e| or |1 - e| when flagged
};

// Trace census over idempotents: phi real, within [0, m], preserved by
// idempotent_to_projection; near-extremal traces force the trivial
// idempotents.
std::vector<CensusEntry> idempotent_census(const std::vector<MatrixOverAlgebra>& es,
                                           double idempotency_tol = 1e-8);

}  // namespace aschern
