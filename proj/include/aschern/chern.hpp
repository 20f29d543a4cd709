// Alexander-Spanier cochains over a sampled cover and the tracial Chern
// character of projection fields.  Degree-2n values are obtained from the
// spectral projection of the affine interpolation along a tuple, via contour
// functional calculus, with the simplex integral evaluated by a tensor
// Gauss-Legendre rule under the Duffy transform.

#pragma once

#include "aschern/algebra.hpp"
#include "aschern/space.hpp"

#include <memory>

namespace aschern {

using CoverTupleSetPtr = std::shared_ptr<const CoverTupleSet>;

struct Cochain {
  int degree = 0;
  CoverTupleSetPtr tuple_set;
  RVec values;

  double value_at(const std::vector<int>& tuple) const;
  double sup_norm() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
};

// Quadrature on the standard simplex Delta^degree; weights sum to its
// volume 1/degree!.
struct SimplexRule {
  int degree = 0;
  std::vector<RVec> nodes;
  std::vector<double> weights;

  static SimplexRule build(int degree, int points_per_axis);
};

// Gauss-Legendre nodes/weights on [0,1] (Golub-Welsch).
void gauss_legendre_01(int m, std::vector<double>& nodes, std::vector<double>& weights);

// A projection in M_size(A) attached to every sample point.
struct ProjectionField {
  SiteAlgebraPtr algebra;
  int size = 0;
  std::vector<MatrixOverAlgebra> value;

  int num_points() const { return static_cast<int>(value.size()); }
  const MatrixOverAlgebra& at(int x) const { return value[static_cast<std::size_t>(x)]; }

  // max over points of |p^2 - p| and |p* - p|.
  double projection_residual() const;
  void validate(double tol = 1e-8) const;
};

ProjectionField constant_field(int num_points, const MatrixOverAlgebra& value);

// Bott projection (1 + x.sigma)/2 in M_2(C) on a sphere sample.
ProjectionField bott_field(const SampledSpace& sphere);

ProjectionField direct_sum_field(const ProjectionField& a, const ProjectionField& b);

// (p (x) q)_{ij} = p . q_{ij}: scalar field p in M_m(C(X)) against a fixed
// projection q in M_{m'}(A); output lives in M_{m m'}(C(X,A)).
ProjectionField tensor_projection(const ProjectionField& p, const MatrixOverAlgebra& q);

// Pairwise operator-norm oscillation |p(x) - p(x')|, memoized.
std::function<double(int, int)> oscillation_metric(const ProjectionField& p);

// Largest oscillation of p over any set of the cover.
double cover_oscillation(const OpenCover& cover, const ProjectionField& p);

// a_p(x,t) = p(x_0) + sum_i t_i (p(x_i) - p(x_0)); throws when the tuple's
// oscillation exceeds the 1/4 norm bound.
MatrixOverAlgebra affine_segment(const ProjectionField& p, const std::vector<int>& tuple,
                                 const RVec& t, double oscillation_bound = 0.25);

// e_p(x,t): contour spectral projection of the affine segment.
MatrixOverAlgebra spectral_projection_field(const ProjectionField& p,
                                            const std::vector<int>& tuple, const RVec& t,
                                            const ContourOptions& opts = {});

// d/dt_s of e_p(x,t) for s = 1..degree(tuple set), by the analytic resolvent
// formula (1/2 pi i) Int R (p(x_s)-p(x_0)) R dlambda.
std::vector<MatrixOverAlgebra> partial_derivatives_e(const ProjectionField& p,
                                                     const std::vector<int>& tuple,
                                                     const RVec& t,
                                                     const ContourOptions& opts = {});

struct ChernOptions {
  ContourOptions contour;
  int simplex_points_per_axis = 0;  // 0: 16 for n=1, 8 for n=2
  double oscillation_bound = 0.25;
  double imaginary_tol = 1e-9;
  bool check_cover_oscillation = true;
};

// Ch^{2n}_phi(p) on the given tuples.  Degree 0 is phi(p(x)); degree 2n >= 2
// is (-1)^n / (n! (2 pi i)^n) Int_{Delta^{2n}} phi(e de ^ ... ^ de), the
// normalization under which the Bott projection on S^2 pairs to 1 against
// the fundamental chain.  n > 2 is rejected.
Cochain chern_cochain(const ProjectionField& p, int n, const OpenCover& cover,
                      const CoverTupleSetPtr& tuples, const ChernOptions& opts = {});

// (d f)(x_0..x_{k+1}) = sum_j (-1)^j f(.. x_j-hat ..) on the target tuples;
// every face must be present in f's tuple set.
Cochain coboundary(const Cochain& f, const CoverTupleSetPtr& target);

// sup |d c| over the given higher tuples.
double cocycle_residual(const Cochain& c, const CoverTupleSetPtr& higher);

struct CoboundarySolve {
  Cochain f;               // minimum-norm least-squares solution of d f = c
  double residual_inf = 0;  // sup |d f - c|
  double rhs_inf = 0;       // sup |c|
};

// Sparse least squares for d f = c over the face closure of c's tuples.
// Small residual certifies that the class of c vanishes on the sampled
// complex; an underdetermined system is reported through the residual, not
// an exception.
CoboundarySolve solve_coboundary(const Cochain& c, const OpenCover& cover);

// Pairing of a degree-2n cochain with an oriented chain: each chain tuple
// contributes sign times the alternation of c over the tuple's orderings, so
// closed mesh chains annihilate coboundaries exactly.  Every ordering of a
// chain tuple must be present in c's tuple set.
double pair_with_chain(const Cochain& c, const OrientedChain& chain);

// All orderings of every chain tuple, for mandatory tuple enumeration.
std::vector<std::vector<int>> chain_tuple_orderings(const OrientedChain& chain);

}  // namespace aschern
