// Flat bundles from locally constant unitary cocycles: validation of the
// cocycle identities on sampled overlaps, the projections p_A and p built
// from a subordinate partition of unity, and the cochain-level flatness
// checks of the Chern character.

#pragma once

#include "aschern/chern.hpp"

#include <map>
#include <optional>
#include <unordered_map>

namespace aschern {

// Transition g_ij as a locally constant map on the sampled overlap: either a
// single constant or explicit per-point values drawn from a small value set.
struct Transition {
  std::vector<MatrixOverAlgebra> values;
  std::optional<int> constant;        // index into values, applies everywhere
  std::unordered_map<int, int> at;    // point -> value index (when not constant)

  const MatrixOverAlgebra* value_at(int point) const;
};

struct UnitaryCocycle {
  SiteAlgebraPtr algebra;
  MatrixOverAlgebra q;  // fiber projection in M_m(A)
  OpenCover cover;      // V_1..V_N on the base sample
  std::map<std::pair<int, int>, Transition> transitions;

  int fiber_size() const { return q.size(); }
  int num_sets() const { return cover.num_sets(); }

  void set_constant_transition(int i, int j, MatrixOverAlgebra value);
  void set_transition_at(int i, int j, const std::vector<int>& points,
                         MatrixOverAlgebra value);

  // Fills g_ji = g_ij* for every pair given one way only; g_ii stays
  // implicitly q.
  void complete_adjoints();

  // g_ij at a sampled point; nullptr when x is outside the stored domain.
  // g_ii is implicitly q.
  const MatrixOverAlgebra* transition_at(int i, int j, int x) const;
};

struct CocycleReport {
  double identity_residual = 0;   // |g_ii - q| when g_ii is stored explicitly
  double compression_residual = 0;  // |q g - g| and |g q - g|
  double unitarity_residual = 0;    // |g* g - q| and |g g* - q|
  double cocycle_residual = 0;      // |g_ij g_jk - g_ik| on support triples
  bool locally_constant = true;     // per working-cover set (when supplied)
  std::vector<std::string> violations;

  double worst() const {
    return std::max({identity_residual, compression_residual, unitarity_residual,
                     cocycle_residual});
  }
  bool ok(double tol) const { return worst() <= tol && locally_constant; }
};

// Checks every cocycle identity on the sampled support overlaps; throws
// InvalidCocycle when a required transition is undefined.  When
// working_cover is non-null also checks that each g_ij is constant on every
// working set.
CocycleReport validate_cocycle(const UnitaryCocycle& c, const PartitionOfUnity& chi,
                               const OpenCover* working_cover = nullptr);

struct FlatProjection {
  ProjectionField p_A;  // size N*m over A
  ProjectionField p;    // scalar, size N; p = v v*
  RMat sqrt_chi;        // v, the rank-one column sqrt(chi_i)(x); v* v = 1
  UnitaryCocycle cocycle;
  PartitionOfUnity partition;
};

// Assembles (p_A)_{ij} = sqrt(chi_i chi_j) g_ij and p_{ij} = sqrt(chi_i chi_j);
// requires validate_cocycle to pass at `tol` and checks both projections.
FlatProjection build_flat_projection(const UnitaryCocycle& c,
                                     const PartitionOfUnity& chi, double tol = 1e-10);

struct FlatnessOptions {
  int n = 1;                 // degree 2n checked (0 always reported)
  int tuple_budget = 0;      // extra degree-2n tuples; 0 = auto from dimension
  int high_tuple_budget = 0; // degree-(2n+1) tuples for the cocycle residual
  std::uint64_t seed = 7;
  ChernOptions chern;
  bool coboundary_certificate = true;
};

struct FlatnessReport {
  double phi_q = 0;
  double ch0_residual = 0;        // sup |Ch^0_phi(p_A) - phi(q)|
  double pointwise_residual = 0;  // sup |Ch^{2n}_phi(p_A) - Ch^{2n}(p) phi(q)|
  double cocycle_residual = 0;    // sup |d Ch^{2n}_phi(p_A)|
  double coboundary_residual = 0; // least-squares certificate for exactness
  double coboundary_rhs = 0;      // sup |Ch^{2n}_phi(p_A)|
  int working_sets = 0;
  int tuples_evaluated = 0;
  int active_tuples = 0;  // tuples on which p_A actually varies
};

// Refines a working cover (cover lemma on the support overlaps K_ij, then
// transition constancy, then 1/4-oscillation for p and p_A), evaluates the
// Chern cochains of p_A and p on shared tuples, and reports the flatness
// residuals.  Throws when a precondition cannot be met, naming it.
FlatnessReport flatness_check(const FlatProjection& fp, const SampledSpace& space,
                              const FlatnessOptions& opts = {});

// The working cover used by flatness_check, exposed for reporting.
OpenCover flatness_working_cover(const FlatProjection& fp, const SampledSpace& space,
                                 double oscillation_bound = 0.25);

}  // namespace aschern
