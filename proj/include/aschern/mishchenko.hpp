// Finite-group, finite-sample realization of the module formulas behind the
// Mishchenko bundle: Rieffel's bimodule Y, the equivariant module Z, the
// crossed product Z x G, the module M of sections with its frame, and the
// isomorphism Phi from Y* (x) (Z x G) onto M.  Every sum is finite here, so
// the identities are checked to rounding.

#pragma once

#include "aschern/flat_bundle.hpp"

#include <map>
#include <unordered_map>

namespace aschern {

struct PrincipalBundle {
  SampledSpace total;  // X~
  SampledSpace base;   // X = X~/G
  GroupTable group;
  std::vector<std::vector<int>> action;  // action[g][y] = y.g (right action)
  std::vector<int> quotient;             // point map X~ -> X

  std::vector<std::vector<int>> fibers;  // filled by validate()

  int group_order() const { return group.order(); }
  int act(int g, int y) const {
    return action[static_cast<std::size_t>(g)][static_cast<std::size_t>(y)];
  }

  // Right action, freeness, G-invariant quotient, |fiber| = |G|.
  void validate();

  // The unique g with y1.g = y2 for fiber-mates y1, y2.
  int group_element_between(int y1, int y2) const;

  // C(X, C[G]) as a site algebra: one site per base point, block dim |G|.
  SiteAlgebraPtr function_algebra() const;
};

// Degree-d cyclic cover of the circle: X~ = S^1 with d*n points over
// X = S^1 with n points, G = Z/d acting by rotation.
PrincipalBundle cyclic_cover_circle(int base_points, int degree);

// Trivial bundle X x G with sheets separated by `sheet_gap` in an extra
// coordinate.
PrincipalBundle product_bundle(const SampledSpace& base, const GroupTable& group,
                               double sheet_gap = 8.0);

enum class ModuleTag { Y, Z, M, ZG };

struct ModuleVector {
  ModuleTag tag = ModuleTag::Y;
  // One slot on X~ for Y/Z/M; |G| slots (one per group element) for ZG.
  std::vector<CVec> data;

  static ModuleVector on_total(ModuleTag tag, CVec v);
  static ModuleVector crossed(std::vector<CVec> per_group);
};

// Elements of C_c(G, C_0(X~)) (crossed-product algebra) and C_c(G, C(X))
// share the per-group-element layout.
using CrossedFunction = std::vector<CVec>;

// <xi|zeta>(x) = sum_{p(y)=x} conj(xi(y)) zeta(y).
CVec y_inner(const PrincipalBundle& b, const CVec& xi, const CVec& zeta);

// f . xi = sum_g f(g) alpha_g(xi), alpha_g(xi)(y) = xi(y.g).
CVec y_left_action(const PrincipalBundle& b, const CrossedFunction& f, const CVec& xi);

// Phi(Theta_{xi,zeta})(g) = xi alpha_g(conj(zeta)).
CrossedFunction rank_one_to_crossed(const PrincipalBundle& b, const CVec& xi,
                                    const CVec& zeta);

// Convolution product on C_c(G, C_0(X~)); also the left action on Z x G.
CrossedFunction crossed_convolve(const PrincipalBundle& b, const CrossedFunction& f,
                                 const CrossedFunction& g);

// Adjoint f*(g) = alpha_g(conj(f(g^{-1}))).
CrossedFunction crossed_star(const PrincipalBundle& b, const CrossedFunction& f);

// V(g)(xi)(y) = xi(y.g); unitary for y_inner, and a group homomorphism.
CVec z_group_action(const PrincipalBundle& b, int g, const CVec& xi);

// <xi|zeta>(t)(x) = sum_{p(y)=x} conj(xi(y)) zeta(y.t) as raw values
// (row t, column x).
Mat m_inner_values(const PrincipalBundle& b, const CVec& xi, const CVec& zeta);

// The same inner product packaged as an element of C(X, C[G]), so
// positivity can be read off sitewise.
MatrixOverAlgebra m_inner(const PrincipalBundle& b, const CVec& xi, const CVec& zeta);

// (xi . f)(y) = sum_g f(g)(p(y)) xi(y.g^{-1}) for f in C_c(G, C(X)).
CVec m_right_action(const PrincipalBundle& b, const CVec& xi, const CrossedFunction& f);

// <xi|zeta>(t) = sum_g <xi(g)|zeta(g t)>_Z for xi, zeta in C_c(G, Z).
Mat crossed_inner_values(const PrincipalBundle& b, const std::vector<CVec>& xi,
                         const std::vector<CVec>& zeta);
MatrixOverAlgebra crossed_inner(const PrincipalBundle& b, const std::vector<CVec>& xi,
                                const std::vector<CVec>& zeta);

// (f . xi)(t) = sum_g f(g) V(g)(xi(g^{-1} t)).
std::vector<CVec> crossed_left_action(const PrincipalBundle& b, const CrossedFunction& f,
                                      const std::vector<CVec>& xi);

// Phi(<xi| (x) zeta) = sum_g V(g^{-1})(conj(xi) zeta(g)), landing in M.
CVec phi_iso(const PrincipalBundle& b, const CVec& xi, const std::vector<CVec>& zeta);

// Inner product of two elementary tensors <xi|(x)zeta in Y* (x) (Z x G),
// computed through the module operations (the proof's left-hand side).
Mat tensor_inner_values(const PrincipalBundle& b, const CVec& xi1,
                        const std::vector<CVec>& zeta1, const CVec& xi2,
                        const std::vector<CVec>& zeta2);

// Frame sqrt(rho_i) from local sections: per cover set, the section sheet
// through the least-index preimage point.
struct MishchenkoFrame {
  std::vector<std::unordered_map<int, int>> section;  // set i: base x -> lift y
  std::vector<CVec> sqrt_rho;                         // on X~
  std::map<std::pair<int, int>, std::map<int, int>> transition;  // (i,j): x -> g
};

MishchenkoFrame mishchenko_frame(const PrincipalBundle& b, const OpenCover& cover,
                                 const PartitionOfUnity& chi);

// The frame's transitions as a unitary cocycle over C*_r(G) (q = 1, m = 1),
// for the cross-check against the flat-bundle projection.
UnitaryCocycle frame_cocycle(const PrincipalBundle& b, const MishchenkoFrame& frame,
                             const GroupAlgebra& ga, const OpenCover& cover);

struct MishchenkoOptions {
  std::uint64_t seed = 11;
  int random_pairs = 100;
  double tol = 1e-10;
};

struct MishchenkoReport {
  // Named residuals; all should sit at rounding level.
  std::map<std::string, double> residuals;
  double worst() const;
  bool pass(double tol) const { return worst() <= tol; }
};

// Runs every identity of the module layer on random vectors: positivity,
// G-invariance, the rank-one isomorphism, frame reconstruction, the frame
// gram identity against the flat-bundle projection, and inner-product
// preservation of Phi on `random_pairs` random tensor pairs.
MishchenkoReport mishchenko_verify(const PrincipalBundle& b, const OpenCover& cover,
                                   const PartitionOfUnity& chi,
                                   const MishchenkoOptions& opts = {});

// Deterministic complex gaussian-ish vector for tests and the verifier.
CVec random_cvec(SplitMix64& rng, int n);

}  // namespace aschern
