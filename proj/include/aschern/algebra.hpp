// Site-indexed block-matrix model of a unital *-algebra A with a faithful
// tracial state phi.  An element assigns a complex (k x k)-matrix to every
// site; phi is the weighted normalized matrix trace.  Matrix algebras M_m(A)
// over the same site structure reuse the representation with (m*k x m*k)
// blocks.  Finite group algebras (regular representation) and a circle-grid
// stand-in for C*_r(Z) are provided as constructors.

#pragma once

#include "aschern/common.hpp"

#include <memory>
#include <vector>

namespace aschern {

class SiteAlgebra {
 public:
  // weights must be strictly positive and sum to 1 within 1e-12.
  SiteAlgebra(int num_sites, int block_dim, std::vector<double> weights);

  // One site, k = 1, weight 1: plain complex numbers (A = C).
  static std::shared_ptr<const SiteAlgebra> trivial();

  // One site, block dimension k, weight 1: A = M_k(C) with normalized trace.
  static std::shared_ptr<const SiteAlgebra> full_matrix(int k);

  int num_sites() const { return num_sites_; }
  int block_dim() const { return block_dim_; }
  double weight(int s) const { return weights_[static_cast<std::size_t>(s)]; }

  bool same_structure(const SiteAlgebra& other) const;

 private:
  int num_sites_;
  int block_dim_;
  std::vector<double> weights_;
};

using SiteAlgebraPtr = std::shared_ptr<const SiteAlgebra>;

// Element of M_m(A): per site an (m*k x m*k) complex matrix.  Values are
// immutable in spirit: operations return new elements.
class MatrixOverAlgebra {
 public:
  // Placeholder zero of M_1(C); aggregate members overwrite it.
  MatrixOverAlgebra();
  MatrixOverAlgebra(SiteAlgebraPtr parent, int size, std::vector<Mat> data);

  static MatrixOverAlgebra zero(SiteAlgebraPtr parent, int size);
  static MatrixOverAlgebra identity(SiteAlgebraPtr parent, int size);

  const SiteAlgebraPtr& parent() const { return parent_; }
  int size() const { return size_; }
  int dim() const { return size_ * parent_->block_dim(); }
  const Mat& at(int site) const { return data_[static_cast<std::size_t>(site)]; }
  Mat& at(int site) { return data_[static_cast<std::size_t>(site)]; }

  MatrixOverAlgebra adjoint() const;
  // Sup over sites of the operator 2-norm (the C*-norm of the direct sum).
  double norm() const;

  // (m x m)-block structure helpers: block (i, j) as an element of M_b(A)
  // where size() == nblocks * b.
  Mat block(int site, int i, int j, int b) const;

  MatrixOverAlgebra& operator+=(const MatrixOverAlgebra& rhs);
  MatrixOverAlgebra& operator-=(const MatrixOverAlgebra& rhs);
  MatrixOverAlgebra& operator*=(cplx scale);

  friend MatrixOverAlgebra operator+(MatrixOverAlgebra a, const MatrixOverAlgebra& b) {
    a += b;
    return a;
  }
  friend MatrixOverAlgebra operator-(MatrixOverAlgebra a, const MatrixOverAlgebra& b) {
    a -= b;
    return a;
  }
  friend MatrixOverAlgebra operator*(cplx s, MatrixOverAlgebra a) {
    a *= s;
    return a;
  }

 private:
  SiteAlgebraPtr parent_;
  int size_;
  std::vector<Mat> data_;
};

// Plain algebra elements are the size-1 case.
using AlgebraElement = MatrixOverAlgebra;

// Sitewise matrix product; throws DimensionMismatch on incompatible inputs.
MatrixOverAlgebra mul(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b);

inline MatrixOverAlgebra operator*(const MatrixOverAlgebra& a,
                                   const MatrixOverAlgebra& b) {
  return mul(a, b);
}

// phi(a) = sum_s w_s (1/k) Tr a(s); on M_m(A) this is sum_i phi(a_ii), so
// phi(1_m) = m.
cplx trace_phi(const MatrixOverAlgebra& a);

// Direct sum along the block index: result in M_{m_a + m_b}(A).
MatrixOverAlgebra direct_sum(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b);

struct ContourOptions {
  int nodes = 64;
  // Resolvent norms above this abort with ContourPierced.
  double resolvent_norm_limit = 1e6;
};

// (1/2 pi i) Int_{|lambda-1|=1/2} (lambda - a)^{-1} d lambda by the
// trapezoid rule with `nodes` points, counterclockwise.  Spectrally accurate
// when the spectrum stays off the contour.
MatrixOverAlgebra contour_spectral_projection(const MatrixOverAlgebra& a,
                                              const ContourOptions& opts = {});

// Projection p = e e* (1 + (e - e*)(e* - e))^{-1} with phi(p) = phi(e).
// Requires |e^2 - e| < idempotency_tol.
MatrixOverAlgebra idempotent_to_projection(const MatrixOverAlgebra& e,
                                           double idempotency_tol = 1e-8);

// ---------------------------------------------------------------------------
// Finite groups.

struct GroupTable {
  // mul[g][h] = g*h, elements 0..order-1.
  std::vector<std::vector<int>> mul;

  int order() const { return static_cast<int>(mul.size()); }
  int identity() const { return identity_; }
  int inverse(int g) const { return inverse_[static_cast<std::size_t>(g)]; }
  int product(int g, int h) const {
    return mul[static_cast<std::size_t>(g)][static_cast<std::size_t>(h)];
  }

  // Checks closure, identity, inverses and associativity; throws Error.
  void validate();

  static GroupTable cyclic(int n);
  static GroupTable symmetric3();
  static GroupTable dihedral(int n);  // order 2n
  // By name: "Z<n>", "S3", "D<n>"; throws on unknown names.
  static GroupTable by_name(const std::string& name);

 private:
  int identity_ = -1;
  std::vector<int> inverse_;
};

struct GroupAlgebra {
  SiteAlgebraPtr algebra;  // one site, k = |G|, canonical trace
  GroupTable table;
  // lambda[g]: permutation unitary of the left regular representation.
  std::vector<AlgebraElement> lambda;

  const AlgebraElement& unit(int g) const {
    return lambda[static_cast<std::size_t>(g)];
  }
};

// Left regular representation of a validated group table; phi(lambda_g) is
// delta_{g,e}.
GroupAlgebra group_algebra(GroupTable table);

// N equispaced points on the unit circle, k = 1, uniform weights.  The trace
// is the grid average, exact on Laurent polynomials of degree < N.
SiteAlgebraPtr circle_algebra(int grid_size);

// z-coordinate of site s of circle_algebra(N).
cplx circle_site(int grid_size, int s);

// Element f(z) sampled on the grid of circle_algebra(N).
AlgebraElement circle_element(const SiteAlgebraPtr& alg,
                              const std::function<cplx(cplx)>& f);

}  // namespace aschern
