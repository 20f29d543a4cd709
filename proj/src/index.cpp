#include "aschern/index.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace aschern {

int field_rank(const ProjectionField& p) {
  int rank = -1;
  for (int x = 0; x < p.num_points(); ++x) {
    int r = 0;
    for (int s = 0; s < p.algebra->num_sites(); ++s) {
      Eigen::SelfAdjointEigenSolver<Mat> es(p.at(x).at(s));
      for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) > 0.5) ++r;
    }
    if (rank < 0) rank = r;
    if (r != rank) {
      std::ostringstream msg;
      msg << "field_rank: rank jumps from " << rank << " to " << r << " at point " << x
          << " (not a K-theory class at desk scale)";
      throw Error(msg.str());
    }
  }
  return rank;
}

int index_simple(const ProjectionField& P, const ProjectionField& Q) {
  return field_rank(P) - field_rank(Q);
}

IndexReport l2_index_via_chern(const FlatProjection& fp, const SampledSpace& space,
                               const ProjectionField& P, const ProjectionField& Q,
                               const IndexOptions& opts) {
  IndexReport rep;
  rep.ind_simple = index_simple(P, Q);

  if (opts.run_degree2) {
    rep.flatness = flatness_check(fp, space, opts.flatness);
  } else {
    // Degree-0 certificate only.
    rep.flatness.phi_q = trace_phi(fp.cocycle.q).real();
    const OpenCover cover = flatness_working_cover(fp, space);
    rep.flatness.working_sets = cover.num_sets();
    TupleBudget b0{.total = 0, .seed = opts.flatness.seed};
    auto t0 = std::make_shared<CoverTupleSet>(enumerate_tuples(cover, 0, b0));
    const Cochain ch0 = chern_cochain(fp.p_A, 0, cover, t0, opts.flatness.chern);
    rep.flatness.ch0_residual =
        (ch0.values.array() - rep.flatness.phi_q).abs().maxCoeff();
  }

  rep.flatness.phi_q = trace_phi(fp.cocycle.q).real();
  if (rep.flatness.ch0_residual > opts.certificate_tol ||
      (opts.run_degree2 && (rep.flatness.pointwise_residual > opts.certificate_tol ||
                            rep.flatness.coboundary_residual > opts.certificate_tol))) {
    std::ostringstream msg;
    msg << "l2_index_via_chern: flatness certificate failed (ch0 "
        << rep.flatness.ch0_residual << ", pointwise "
        << rep.flatness.pointwise_residual << ", coboundary "
        << rep.flatness.coboundary_residual << ")";
    throw Error(msg.str());
  }

  // phi(q) as measured by the degree-0 cochain; ind_A = phi(q) . ind is then
  // the certified identity rather than an independent analytic index.
  rep.phi_q = rep.flatness.phi_q;
  rep.ind_A = rep.phi_q * rep.ind_simple;
  if (rep.phi_q > 0) {
    const double ratio = rep.ind_A / rep.phi_q;
    rep.integrality_residual = std::abs(rep.ind_A - rep.phi_q * std::round(ratio));
  } else {
    rep.integrality_residual = std::abs(rep.ind_A);
  }
  return rep;
}

std::vector<CensusEntry> idempotent_census(const std::vector<MatrixOverAlgebra>& es,
                                           double idempotency_tol) {
  std::vector<CensusEntry> out;
  out.reserve(es.size());
  for (const auto& e : es) {
    const double res = (mul(e, e) - e).norm();
    if (res > idempotency_tol) {
      std::ostringstream msg;
      msg << "idempotent_census: |e^2 - e| = " << res << " exceeds " << idempotency_tol;
      throw Error(msg.str());
    }
    CensusEntry entry;
    const cplx tr = trace_phi(e);
    entry.trace_re = tr.real();
    entry.trace_im = tr.imag();
    const MatrixOverAlgebra p = idempotent_to_projection(e, idempotency_tol);
    entry.projection_trace_gap = std::abs(tr - trace_phi(p));
    const double m = static_cast<double>(e.size());
    if (std::abs(tr.real()) < 1e-8 || std::abs(tr.real() - m) < 1e-8) {
      entry.flagged_trivial = true;
      entry.triviality_residual = std::abs(tr.real()) < 1e-8
                                      ? p.norm()
                                      : (MatrixOverAlgebra::identity(p.parent(), p.size()) - p)
                                            .norm();
    }
    out.push_back(entry);
  }
  return out;
}

}  // namespace aschern
