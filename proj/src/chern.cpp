#include "aschern/chern.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/Sparse>
#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace aschern {

double Cochain::value_at(const std::vector<int>& tuple) const {
  const int id = tuple_set->find(tuple);
  if (id < 0) throw Error("Cochain: tuple not in the sampled tuple set");
  return values(id);
}

void gauss_legendre_01(int m, std::vector<double>& nodes, std::vector<double>& weights) {
  if (m < 1) throw Error("gauss_legendre_01: need at least one node");
  RMat jacobi = RMat::Zero(m, m);
  for (int k = 1; k < m; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<RMat> es(jacobi);
  nodes.resize(static_cast<std::size_t>(m));
  weights.resize(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    nodes[static_cast<std::size_t>(k)] = 0.5 * (es.eigenvalues()(k) + 1.0);
    const double v0 = es.eigenvectors()(0, k);
    weights[static_cast<std::size_t>(k)] = v0 * v0;  // 2 v0^2 scaled by 1/2
  }
}

SimplexRule SimplexRule::build(int degree, int points_per_axis) {
  if (degree < 1) throw Error("SimplexRule: degree must be >= 1");
  std::vector<double> gl_nodes, gl_weights;
  gauss_legendre_01(points_per_axis, gl_nodes, gl_weights);

  SimplexRule rule;
  rule.degree = degree;
  const int m = points_per_axis;
  std::vector<int> digits(static_cast<std::size_t>(degree), 0);
  for (;;) {
    // Duffy transform of the tensor node u: t_i = u_i * (1 - sum_{<i} t_j).
    RVec t(degree);
    double remaining = 1.0;
    double jac = 1.0;
    double w = 1.0;
    for (int i = 0; i < degree; ++i) {
      const int di = digits[static_cast<std::size_t>(i)];
      t(i) = gl_nodes[static_cast<std::size_t>(di)] * remaining;
      jac *= remaining;
      w *= gl_weights[static_cast<std::size_t>(di)];
      remaining -= t(i);
    }
    rule.nodes.push_back(std::move(t));
    rule.weights.push_back(w * jac);

    int pos = degree - 1;
    while (pos >= 0 && ++digits[static_cast<std::size_t>(pos)] == m) {
      digits[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return rule;
}

double ProjectionField::projection_residual() const {
  double worst = 0.0;
  for (const auto& v : value) {
    worst = std::max(worst, (mul(v, v) - v).norm());
    worst = std::max(worst, (v.adjoint() - v).norm());
  }
  return worst;
}

void ProjectionField::validate(double tol) const {
  if (value.empty()) throw Error("ProjectionField: no points");
  for (const auto& v : value)
    if (!v.parent()->same_structure(*algebra) || v.size() != size)
      throw DimensionMismatch("ProjectionField: inconsistent entry shape");
  const double res = projection_residual();
  if (res > tol) {
    std::ostringstream msg;
    msg << "ProjectionField: projection residual " << res << " exceeds " << tol;
    throw Error(msg.str());
  }
}

ProjectionField constant_field(int num_points, const MatrixOverAlgebra& value) {
  ProjectionField f;
  f.algebra = value.parent();
  f.size = value.size();
  f.value.assign(static_cast<std::size_t>(num_points), value);
  return f;
}

ProjectionField bott_field(const SampledSpace& sphere) {
  if (sphere.points.cols() != 3) throw Error("bott_field: needs points in R^3");
  auto triv = SiteAlgebra::trivial();
  ProjectionField f;
  f.algebra = triv;
  f.size = 2;
  f.value.reserve(static_cast<std::size_t>(sphere.num_points()));
  for (int i = 0; i < sphere.num_points(); ++i) {
    Eigen::Vector3d n = sphere.points.row(i).transpose();
    n.normalize();
    Mat m(2, 2);
    m(0, 0) = 0.5 * (1.0 + n.z());
    m(1, 1) = 0.5 * (1.0 - n.z());
    m(0, 1) = 0.5 * cplx(n.x(), -n.y());
    m(1, 0) = 0.5 * cplx(n.x(), n.y());
    f.value.emplace_back(triv, 2, std::vector<Mat>{std::move(m)});
  }
  return f;
}

ProjectionField direct_sum_field(const ProjectionField& a, const ProjectionField& b) {
  if (a.num_points() != b.num_points())
    throw DimensionMismatch("direct_sum_field: point counts differ");
  ProjectionField f;
  f.algebra = a.algebra;
  f.size = a.size + b.size;
  f.value.reserve(a.value.size());
  for (int x = 0; x < a.num_points(); ++x)
    f.value.push_back(direct_sum(a.at(x), b.at(x)));
  return f;
}

ProjectionField tensor_projection(const ProjectionField& p, const MatrixOverAlgebra& q) {
  if (p.algebra->block_dim() != 1 || p.algebra->num_sites() != 1)
    throw DimensionMismatch("tensor_projection: p must be a scalar field");
  const double qres = (mul(q, q) - q).norm() + (q.adjoint() - q).norm();
  if (qres > 1e-8) throw Error("tensor_projection: q is not a projection");

  const auto alg = q.parent();
  const int k = alg->block_dim();
  const int m = p.size;
  const int mp = q.size();
  ProjectionField out;
  out.algebra = alg;
  out.size = m * mp;
  out.value.reserve(p.value.size());
  for (int x = 0; x < p.num_points(); ++x) {
    const Mat& px = p.at(x).at(0);
    std::vector<Mat> site_data;
    site_data.reserve(static_cast<std::size_t>(alg->num_sites()));
    for (int s = 0; s < alg->num_sites(); ++s) {
      Mat res = Mat::Zero(m * mp * k, m * mp * k);
      for (int i = 0; i < mp; ++i)
        for (int j = 0; j < mp; ++j) {
          const Mat qij = q.at(s).block(i * k, j * k, k, k);
          for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
              res.block((i * m + a) * k, (j * m + b) * k, k, k) = px(a, b) * qij;
        }
      site_data.push_back(std::move(res));
    }
    out.value.emplace_back(alg, out.size, std::move(site_data));
  }
  return out;
}

std::function<double(int, int)> oscillation_metric(const ProjectionField& p) {
  auto cache = std::make_shared<std::map<std::pair<int, int>, double>>();
  auto mutex = std::make_shared<std::mutex>();
  const ProjectionField* field = &p;
  return [cache, mutex, field](int i, int j) {
    if (i == j) return 0.0;
    const auto key = std::minmax(i, j);
    {
      std::lock_guard<std::mutex> lock(*mutex);
      auto it = cache->find(key);
      if (it != cache->end()) return it->second;
    }
    const double v = (field->at(i) - field->at(j)).norm();
    std::lock_guard<std::mutex> lock(*mutex);
    cache->emplace(key, v);
    return v;
  };
}

double cover_oscillation(const OpenCover& cover, const ProjectionField& p) {
  auto metric = oscillation_metric(p);
  double worst = 0.0;
  for (const auto& u : cover.sets)
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = i + 1; j < u.size(); ++j)
        worst = std::max(worst, metric(u[i], u[j]));
  return worst;
}

MatrixOverAlgebra affine_segment(const ProjectionField& p, const std::vector<int>& tuple,
                                 const RVec& t, double oscillation_bound) {
  const int deg = static_cast<int>(tuple.size()) - 1;
  if (t.size() != deg) throw DimensionMismatch("affine_segment: simplex dimension");
  MatrixOverAlgebra a = p.at(tuple[0]);
  for (int s = 1; s <= deg; ++s) {
    MatrixOverAlgebra diff = p.at(tuple[static_cast<std::size_t>(s)]) - p.at(tuple[0]);
    if (diff.norm() > oscillation_bound + 1e-9) {
      std::ostringstream msg;
      msg << "affine_segment: oscillation |p(x_" << s << ") - p(x_0)| exceeds "
          << oscillation_bound;
      throw Error(msg.str());
    }
    a += t(s - 1) * diff;
  }
  return a;
}

MatrixOverAlgebra spectral_projection_field(const ProjectionField& p,
                                            const std::vector<int>& tuple, const RVec& t,
                                            const ContourOptions& opts) {
  return contour_spectral_projection(affine_segment(p, tuple, t), opts);
}

std::vector<MatrixOverAlgebra> partial_derivatives_e(const ProjectionField& p,
                                                     const std::vector<int>& tuple,
                                                     const RVec& t,
                                                     const ContourOptions& opts) {
  const int deg = static_cast<int>(tuple.size()) - 1;
  const MatrixOverAlgebra a = affine_segment(p, tuple, t);
  const auto alg = p.algebra;
  const int d = a.dim();
  const double r = 0.5;

  std::vector<MatrixOverAlgebra> out(
      static_cast<std::size_t>(deg), MatrixOverAlgebra::zero(alg, a.size()));
  for (int s = 0; s < alg->num_sites(); ++s) {
    std::vector<Mat> diffs;
    diffs.reserve(static_cast<std::size_t>(deg));
    for (int i = 1; i <= deg; ++i)
      diffs.push_back(p.at(tuple[static_cast<std::size_t>(i)]).at(s) -
                      p.at(tuple[0]).at(s));
    for (int j = 0; j < opts.nodes; ++j) {
      const double theta = 2.0 * std::numbers::pi * j / opts.nodes;
      const cplx phase = std::polar(1.0, theta);
      const cplx lambda = 1.0 + r * phase;
      const Mat resolvent =
          (lambda * Mat::Identity(d, d) - a.at(s)).partialPivLu().inverse();
      if (!resolvent.allFinite() ||
          resolvent.cwiseAbs().maxCoeff() * d > opts.resolvent_norm_limit)
        throw ContourPierced("partial_derivatives_e: contour pierced");
      const cplx c = (r / opts.nodes) * phase;
      for (int i = 0; i < deg; ++i)
        out[static_cast<std::size_t>(i)].at(s) +=
            c * (resolvent * diffs[static_cast<std::size_t>(i)] * resolvent);
    }
  }
  return out;
}

namespace {

struct SignedPermutations {
  std::vector<std::vector<int>> perms;  // values in 0..k-1
  std::vector<int> signs;
};

SignedPermutations signed_permutations(int k) {
  SignedPermutations out;
  std::vector<int> p(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) p[static_cast<std::size_t>(i)] = i;
  do {
    int inversions = 0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        if (p[static_cast<std::size_t>(i)] > p[static_cast<std::size_t>(j)]) ++inversions;
    out.perms.push_back(p);
    out.signs.push_back(inversions % 2 == 0 ? 1 : -1);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// phi-weighted trace contribution of one site: w_s Tr(m) / k.
cplx site_trace(const SiteAlgebraPtr& alg, int site, const Mat& m) {
  return alg->weight(site) * m.trace() / static_cast<double>(alg->block_dim());
}

// Integrand sum_{sigma} sign(sigma) phi(e de_{sigma(1)} ... de_{sigma(2n)})
// for one tuple at one simplex node, all sites accumulated.
cplx antisymmetrized_trace(const SiteAlgebraPtr& alg, const std::vector<Mat>& e,
                           const std::vector<std::vector<Mat>>& de,
                           const SignedPermutations& sp) {
  const int deg = static_cast<int>(de.size());
  cplx total = 0.0;
  for (int s = 0; s < alg->num_sites(); ++s) {
    const auto& es = e[static_cast<std::size_t>(s)];
    cplx acc = 0.0;
    if (deg == 2) {
      const Mat m01 = de[0][static_cast<std::size_t>(s)] * de[1][static_cast<std::size_t>(s)];
      const Mat m10 = de[1][static_cast<std::size_t>(s)] * de[0][static_cast<std::size_t>(s)];
      acc = (es * (m01 - m10)).trace();
    } else {
      // Pair products reused across the 24 permutations.
      Mat pair[4][4];
      for (int a = 0; a < deg; ++a)
        for (int b = 0; b < deg; ++b)
          if (a != b)
            pair[a][b] = de[static_cast<std::size_t>(a)][static_cast<std::size_t>(s)] *
                         de[static_cast<std::size_t>(b)][static_cast<std::size_t>(s)];
      for (std::size_t q = 0; q < sp.perms.size(); ++q) {
        const auto& perm = sp.perms[q];
        const Mat prod = pair[perm[0]][perm[1]] * pair[perm[2]][perm[3]];
        acc += static_cast<double>(sp.signs[q]) * (es * prod).trace();
      }
    }
    total += alg->weight(s) * acc / static_cast<double>(alg->block_dim());
  }
  return total;
}

}  // namespace

Cochain chern_cochain(const ProjectionField& p, int n, const OpenCover& cover,
                      const CoverTupleSetPtr& tuples, const ChernOptions& opts) {
  if (n < 0 || n > 2)
    throw Error("chern_cochain: only n = 0, 1, 2 are supported at desk scale");
  if (tuples->degree != 2 * n)
    throw DimensionMismatch("chern_cochain: tuple set degree must be 2n");

  if (n >= 1 && opts.check_cover_oscillation) {
    const double osc = cover_oscillation(cover, p);
    if (osc > opts.oscillation_bound + 1e-9) {
      std::ostringstream msg;
      msg << "chern_cochain: cover oscillation " << osc << " violates the "
          << opts.oscillation_bound << " bound";
      throw Error(msg.str());
    }
  }

  Cochain out;
  out.degree = 2 * n;
  out.tuple_set = tuples;
  out.values = RVec::Zero(tuples->size());

  if (n == 0) {
    for (int i = 0; i < tuples->size(); ++i) {
      const cplx v = trace_phi(p.at(tuples->tuples[static_cast<std::size_t>(i)][0]));
      if (std::abs(v.imag()) > opts.imaginary_tol)
        throw Error("chern_cochain: nonreal degree-0 value");
      out.values(i) = v.real();
    }
    return out;
  }

  const int deg = 2 * n;
  const int ppa = opts.simplex_points_per_axis > 0 ? opts.simplex_points_per_axis
                                                   : (n == 1 ? 16 : 8);
  const SimplexRule rule = SimplexRule::build(deg, ppa);
  const SignedPermutations sp = signed_permutations(deg);
  // (-1)^n / (n! (2 pi i)^n)
  const cplx scale = std::pow(cplx(0.0, -2.0 * std::numbers::pi), -n) /
                     (n == 1 ? 1.0 : 2.0);
  const auto alg = p.algebra;
  const int d = p.at(0).dim();
  const double r = 0.5;
  const int M = opts.contour.nodes;

  std::vector<std::string> failures(static_cast<std::size_t>(tuples->size()));
  parallel_for(tuples->size(), [&](int ti) {
    const auto& tuple = tuples->tuples[static_cast<std::size_t>(ti)];
    try {
      bool degenerate = true;
      for (int i = 1; i <= deg && degenerate; ++i)
        if (tuple[static_cast<std::size_t>(i)] != tuple[0]) degenerate = false;
      if (degenerate) {
        out.values(ti) = 0.0;  // all differences vanish identically
        return;
      }
      // Oscillation precondition once per tuple; the affine segment then
      // stays within 1/4 of p(x_0) for every simplex node.
      std::vector<std::vector<Mat>> diffs(static_cast<std::size_t>(deg));
      bool all_zero = true;
      for (int i = 1; i <= deg; ++i) {
        MatrixOverAlgebra delta = p.at(tuple[static_cast<std::size_t>(i)]) - p.at(tuple[0]);
        const double nd = delta.norm();
        if (nd > opts.oscillation_bound + 1e-9) {
          std::ostringstream msg;
          msg << "chern_cochain: tuple " << ti << " oscillation " << nd
              << " violates the bound";
          throw Error(msg.str());
        }
        if (nd > 0.0) all_zero = false;
        auto& slot = diffs[static_cast<std::size_t>(i - 1)];
        slot.reserve(static_cast<std::size_t>(alg->num_sites()));
        for (int s = 0; s < alg->num_sites(); ++s) slot.push_back(delta.at(s));
      }
      if (all_zero) {
        out.values(ti) = 0.0;
        return;
      }

      cplx integral = 0.0;
      std::vector<Mat> e(static_cast<std::size_t>(alg->num_sites()));
      std::vector<std::vector<Mat>> de(
          static_cast<std::size_t>(deg),
          std::vector<Mat>(static_cast<std::size_t>(alg->num_sites())));
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const RVec& t = rule.nodes[q];
        for (int s = 0; s < alg->num_sites(); ++s) {
          Mat a = p.at(tuple[0]).at(s);
          for (int i = 0; i < deg; ++i)
            a += t(i) * diffs[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)];
          Mat esum = Mat::Zero(d, d);
          std::vector<Mat> dsum(static_cast<std::size_t>(deg), Mat::Zero(d, d));
          for (int j = 0; j < M; ++j) {
            const double theta = 2.0 * std::numbers::pi * j / M;
            const cplx phase = std::polar(1.0, theta);
            const cplx lambda = 1.0 + r * phase;
            const Mat resolvent =
                (lambda * Mat::Identity(d, d) - a).partialPivLu().inverse();
            if (!resolvent.allFinite() ||
                resolvent.cwiseAbs().maxCoeff() * d > opts.contour.resolvent_norm_limit)
              throw ContourPierced("chern_cochain: contour pierced");
            const cplx c = (r / M) * phase;
            esum.noalias() += c * resolvent;
            for (int i = 0; i < deg; ++i)
              dsum[static_cast<std::size_t>(i)].noalias() +=
                  c * (resolvent *
                       diffs[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)] *
                       resolvent);
          }
          e[static_cast<std::size_t>(s)] = std::move(esum);
          for (int i = 0; i < deg; ++i)
            de[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)] =
                std::move(dsum[static_cast<std::size_t>(i)]);
        }
        integral += rule.weights[q] * antisymmetrized_trace(alg, e, de, sp);
      }
      const cplx v = scale * integral;
      if (std::abs(v.imag()) > opts.imaginary_tol) {
        std::ostringstream msg;
        msg << "chern_cochain: imaginary part " << v.imag() << " at tuple " << ti;
        throw Error(msg.str());
      }
      out.values(ti) = v.real();
    } catch (const std::exception& ex) {
      failures[static_cast<std::size_t>(ti)] = ex.what();
    }
  });
  for (const auto& f : failures)
    if (!f.empty()) throw Error(f);
  return out;
}

Cochain coboundary(const Cochain& f, const CoverTupleSetPtr& target) {
  if (target->degree != f.degree + 1)
    throw DimensionMismatch("coboundary: target degree must be one higher");
  Cochain out;
  out.degree = target->degree;
  out.tuple_set = target;
  out.values = RVec::Zero(target->size());
  std::vector<int> face(static_cast<std::size_t>(f.degree + 1));
  for (int ti = 0; ti < target->size(); ++ti) {
    const auto& t = target->tuples[static_cast<std::size_t>(ti)];
    double acc = 0.0;
    for (std::size_t omit = 0; omit < t.size(); ++omit) {
      std::size_t w = 0;
      for (std::size_t i = 0; i < t.size(); ++i)
        if (i != omit) face[w++] = t[i];
      const int id = f.tuple_set->find(face);
      if (id < 0) throw Error("coboundary: missing face value");
      acc += (omit % 2 == 0 ? 1.0 : -1.0) * f.values(id);
    }
    out.values(ti) = acc;
  }
  return out;
}

double cocycle_residual(const Cochain& c, const CoverTupleSetPtr& higher) {
  return coboundary(c, higher).sup_norm();
}

CoboundarySolve solve_coboundary(const Cochain& c, const OpenCover& cover) {
  auto lower = std::make_shared<CoverTupleSet>(face_closure(cover, *c.tuple_set));
  const int rows = c.tuple_set->size();
  const int cols = lower->size();

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(rows) * (static_cast<std::size_t>(c.degree) + 1));
  std::vector<int> face(static_cast<std::size_t>(c.degree));
  for (int ti = 0; ti < rows; ++ti) {
    const auto& t = c.tuple_set->tuples[static_cast<std::size_t>(ti)];
    for (std::size_t omit = 0; omit < t.size(); ++omit) {
      std::size_t w = 0;
      for (std::size_t i = 0; i < t.size(); ++i)
        if (i != omit) face[w++] = t[i];
      const int id = lower->find(face);
      trips.emplace_back(ti, id, omit % 2 == 0 ? 1.0 : -1.0);
    }
  }
  Eigen::SparseMatrix<double> D(rows, cols);
  D.setFromTriplets(trips.begin(), trips.end());

  Eigen::LeastSquaresConjugateGradient<Eigen::SparseMatrix<double>> solver;
  solver.setTolerance(1e-14);
  solver.setMaxIterations(std::max(2000, 20 * cols));
  solver.compute(D);
  RVec x = solver.solve(c.values);

  CoboundarySolve out;
  out.f.degree = lower->degree;
  out.f.tuple_set = std::move(lower);
  out.f.values = std::move(x);
  RVec resid = D * out.f.values - c.values;
  out.residual_inf = resid.size() ? resid.cwiseAbs().maxCoeff() : 0.0;
  out.rhs_inf = c.sup_norm();
  return out;
}

double pair_with_chain(const Cochain& c, const OrientedChain& chain) {
  if (chain.degree != c.degree)
    throw DimensionMismatch("pair_with_chain: degree mismatch");
  const SignedPermutations sp = signed_permutations(c.degree + 1);
  double fact = 1.0;
  for (int i = 2; i <= c.degree + 1; ++i) fact *= i;
  double acc = 0.0;
  for (std::size_t ci = 0; ci < chain.tuples.size(); ++ci) {
    const auto& t = chain.tuples[ci];
    double alt = 0.0;
    std::vector<int> reordered(t.size());
    for (std::size_t q = 0; q < sp.perms.size(); ++q) {
      for (std::size_t i = 0; i < t.size(); ++i)
        reordered[i] = t[static_cast<std::size_t>(sp.perms[q][i])];
      const int id = c.tuple_set->find(reordered);
      if (id < 0)
        throw Error("pair_with_chain: chain tuple ordering missing from tuple set");
      alt += static_cast<double>(sp.signs[q]) * c.values(id);
    }
    acc += static_cast<double>(chain.signs[ci]) * alt / fact;
  }
  return acc;
}

std::vector<std::vector<int>> chain_tuple_orderings(const OrientedChain& chain) {
  const SignedPermutations sp = signed_permutations(chain.degree + 1);
  std::vector<std::vector<int>> out;
  out.reserve(chain.tuples.size() * sp.perms.size());
  for (const auto& t : chain.tuples)
    for (const auto& perm : sp.perms) {
      std::vector<int> reordered(t.size());
      for (std::size_t i = 0; i < t.size(); ++i)
        reordered[i] = t[static_cast<std::size_t>(perm[i])];
      out.push_back(std::move(reordered));
    }
  return out;
}

}  // namespace aschern
