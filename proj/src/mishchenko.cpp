#include "aschern/mishchenko.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <sstream>

namespace aschern {

void PrincipalBundle::validate() {
  total.validate();
  base.validate();
  const int G = group_order();
  const int ny = total.num_points();
  const int nx = base.num_points();
  group.validate();

  if (static_cast<int>(action.size()) != G)
    throw DimensionMismatch("PrincipalBundle: one permutation per group element");
  for (const auto& perm : action) {
    if (static_cast<int>(perm.size()) != ny)
      throw DimensionMismatch("PrincipalBundle: permutation size mismatch");
    std::vector<char> seen(static_cast<std::size_t>(ny), 0);
    for (int v : perm) {
      if (v < 0 || v >= ny || seen[static_cast<std::size_t>(v)])
        throw Error("PrincipalBundle: action is not a permutation");
      seen[static_cast<std::size_t>(v)] = 1;
    }
  }
  const int e = group.identity();
  for (int y = 0; y < ny; ++y)
    if (act(e, y) != y) throw Error("PrincipalBundle: identity must act trivially");
  for (int g = 0; g < G; ++g)
    for (int h = 0; h < G; ++h)
      for (int y = 0; y < ny; ++y)
        if (act(group.product(g, h), y) != act(h, act(g, y)))
          throw Error("PrincipalBundle: not a right action");
  for (int g = 0; g < G; ++g) {
    if (g == e) continue;
    for (int y = 0; y < ny; ++y)
      if (act(g, y) == y) throw Error("PrincipalBundle: action is not free");
  }

  if (static_cast<int>(quotient.size()) != ny)
    throw DimensionMismatch("PrincipalBundle: quotient map size mismatch");
  fibers.assign(static_cast<std::size_t>(nx), {});
  for (int y = 0; y < ny; ++y) {
    const int x = quotient[static_cast<std::size_t>(y)];
    if (x < 0 || x >= nx) throw Error("PrincipalBundle: quotient out of range");
    fibers[static_cast<std::size_t>(x)].push_back(y);
  }
  for (const auto& f : fibers)
    if (static_cast<int>(f.size()) != G)
      throw Error("PrincipalBundle: fiber size must equal |G|");
  for (int g = 0; g < G; ++g)
    for (int y = 0; y < ny; ++y)
      if (quotient[static_cast<std::size_t>(act(g, y))] !=
          quotient[static_cast<std::size_t>(y)])
        throw Error("PrincipalBundle: quotient is not G-invariant");
}

int PrincipalBundle::group_element_between(int y1, int y2) const {
  for (int g = 0; g < group_order(); ++g)
    if (act(g, y1) == y2) return g;
  throw Error("PrincipalBundle: points are not fiber-mates");
}

SiteAlgebraPtr PrincipalBundle::function_algebra() const {
  const int nx = base.num_points();
  std::vector<double> w(static_cast<std::size_t>(nx), 1.0 / nx);
  double sum = 0.0;
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
  return std::make_shared<const SiteAlgebra>(nx, group_order(), std::move(w));
}

PrincipalBundle cyclic_cover_circle(int base_points, int degree) {
  if (base_points < 3 || degree < 1)
    throw Error("cyclic_cover_circle: need >= 3 base points and degree >= 1");
  PrincipalBundle b;
  b.base = circle_space(base_points);
  b.total = circle_space(base_points * degree);
  b.group = GroupTable::cyclic(degree);
  const int ny = base_points * degree;
  b.action.assign(static_cast<std::size_t>(degree),
                  std::vector<int>(static_cast<std::size_t>(ny)));
  for (int g = 0; g < degree; ++g)
    for (int y = 0; y < ny; ++y)
      b.action[static_cast<std::size_t>(g)][static_cast<std::size_t>(y)] =
          (y + g * base_points) % ny;
  b.quotient.resize(static_cast<std::size_t>(ny));
  for (int y = 0; y < ny; ++y) b.quotient[static_cast<std::size_t>(y)] = y % base_points;
  b.validate();
  return b;
}

PrincipalBundle product_bundle(const SampledSpace& base, const GroupTable& group,
                               double sheet_gap) {
  PrincipalBundle b;
  b.base = base;
  b.group = group;
  b.group.validate();
  const int G = b.group.order();
  const int nx = base.num_points();
  RMat pts(nx * G, base.points.cols() + 1);
  for (int x = 0; x < nx; ++x)
    for (int g = 0; g < G; ++g) {
      pts.row(x * G + g).head(base.points.cols()) = base.points.row(x);
      pts(x * G + g, base.points.cols()) = sheet_gap * g;
    }
  b.total = space_from_points(std::move(pts));
  b.action.assign(static_cast<std::size_t>(G),
                  std::vector<int>(static_cast<std::size_t>(nx * G)));
  b.quotient.resize(static_cast<std::size_t>(nx * G));
  for (int x = 0; x < nx; ++x)
    for (int g = 0; g < G; ++g) {
      b.quotient[static_cast<std::size_t>(x * G + g)] = x;
      for (int h = 0; h < G; ++h)
        b.action[static_cast<std::size_t>(h)][static_cast<std::size_t>(x * G + g)] =
            x * G + b.group.product(g, h);
    }
  b.validate();
  return b;
}

ModuleVector ModuleVector::on_total(ModuleTag tag, CVec v) {
  if (tag == ModuleTag::ZG) throw Error("ModuleVector: ZG needs per-group data");
  ModuleVector m;
  m.tag = tag;
  m.data.push_back(std::move(v));
  return m;
}

ModuleVector ModuleVector::crossed(std::vector<CVec> per_group) {
  ModuleVector m;
  m.tag = ModuleTag::ZG;
  m.data = std::move(per_group);
  return m;
}

CVec y_inner(const PrincipalBundle& b, const CVec& xi, const CVec& zeta) {
  CVec out = CVec::Zero(b.base.num_points());
  for (int x = 0; x < b.base.num_points(); ++x)
    for (int y : b.fibers[static_cast<std::size_t>(x)])
      out(x) += std::conj(xi(y)) * zeta(y);
  return out;
}

CVec y_left_action(const PrincipalBundle& b, const CrossedFunction& f, const CVec& xi) {
  CVec out = CVec::Zero(b.total.num_points());
  for (int g = 0; g < b.group_order(); ++g)
    for (int y = 0; y < b.total.num_points(); ++y)
      out(y) += f[static_cast<std::size_t>(g)](y) * xi(b.act(g, y));
  return out;
}

CrossedFunction rank_one_to_crossed(const PrincipalBundle& b, const CVec& xi,
                                    const CVec& zeta) {
  CrossedFunction out(static_cast<std::size_t>(b.group_order()),
                      CVec::Zero(b.total.num_points()));
  for (int g = 0; g < b.group_order(); ++g)
    for (int y = 0; y < b.total.num_points(); ++y)
      out[static_cast<std::size_t>(g)](y) = xi(y) * std::conj(zeta(b.act(g, y)));
  return out;
}

CrossedFunction crossed_convolve(const PrincipalBundle& b, const CrossedFunction& f,
                                 const CrossedFunction& g) {
  CrossedFunction out(static_cast<std::size_t>(b.group_order()),
                      CVec::Zero(b.total.num_points()));
  for (int t = 0; t < b.group_order(); ++t)
    for (int s = 0; s < b.group_order(); ++s) {
      const int rest = b.group.product(b.group.inverse(s), t);
      for (int y = 0; y < b.total.num_points(); ++y)
        out[static_cast<std::size_t>(t)](y) +=
            f[static_cast<std::size_t>(s)](y) * g[static_cast<std::size_t>(rest)](b.act(s, y));
    }
  return out;
}

CrossedFunction crossed_star(const PrincipalBundle& b, const CrossedFunction& f) {
  CrossedFunction out(static_cast<std::size_t>(b.group_order()),
                      CVec::Zero(b.total.num_points()));
  for (int g = 0; g < b.group_order(); ++g) {
    const int ginv = b.group.inverse(g);
    for (int y = 0; y < b.total.num_points(); ++y)
      out[static_cast<std::size_t>(g)](y) =
          std::conj(f[static_cast<std::size_t>(ginv)](b.act(g, y)));
  }
  return out;
}

CVec z_group_action(const PrincipalBundle& b, int g, const CVec& xi) {
  CVec out(b.total.num_points());
  for (int y = 0; y < b.total.num_points(); ++y) out(y) = xi(b.act(g, y));
  return out;
}

Mat m_inner_values(const PrincipalBundle& b, const CVec& xi, const CVec& zeta) {
  Mat out = Mat::Zero(b.group_order(), b.base.num_points());
  for (int t = 0; t < b.group_order(); ++t)
    for (int x = 0; x < b.base.num_points(); ++x)
      for (int y : b.fibers[static_cast<std::size_t>(x)])
        out(t, x) += std::conj(xi(y)) * zeta(b.act(t, y));
  return out;
}

namespace {

MatrixOverAlgebra package_group_valued(const PrincipalBundle& b, const Mat& values) {
  const int G = b.group_order();
  auto alg = b.function_algebra();
  std::vector<Mat> sites;
  sites.reserve(static_cast<std::size_t>(b.base.num_points()));
  for (int x = 0; x < b.base.num_points(); ++x) {
    Mat m = Mat::Zero(G, G);
    for (int t = 0; t < G; ++t)
      for (int h = 0; h < G; ++h) m(b.group.product(t, h), h) += values(t, x);
    sites.push_back(std::move(m));
  }
  return MatrixOverAlgebra(alg, 1, std::move(sites));
}

}  // namespace

MatrixOverAlgebra m_inner(const PrincipalBundle& b, const CVec& xi, const CVec& zeta) {
  return package_group_valued(b, m_inner_values(b, xi, zeta));
}

CVec m_right_action(const PrincipalBundle& b, const CVec& xi, const CrossedFunction& f) {
  CVec out = CVec::Zero(b.total.num_points());
  for (int g = 0; g < b.group_order(); ++g) {
    const int ginv = b.group.inverse(g);
    for (int y = 0; y < b.total.num_points(); ++y)
      out(y) += f[static_cast<std::size_t>(g)](b.quotient[static_cast<std::size_t>(y)]) *
                xi(b.act(ginv, y));
  }
  return out;
}

Mat crossed_inner_values(const PrincipalBundle& b, const std::vector<CVec>& xi,
                         const std::vector<CVec>& zeta) {
  Mat out = Mat::Zero(b.group_order(), b.base.num_points());
  for (int t = 0; t < b.group_order(); ++t)
    for (int g = 0; g < b.group_order(); ++g) {
      const CVec inner =
          y_inner(b, xi[static_cast<std::size_t>(g)],
                  zeta[static_cast<std::size_t>(b.group.product(g, t))]);
      out.row(t) += inner.transpose();
    }
  return out;
}

MatrixOverAlgebra crossed_inner(const PrincipalBundle& b, const std::vector<CVec>& xi,
                                const std::vector<CVec>& zeta) {
  return package_group_valued(b, crossed_inner_values(b, xi, zeta));
}

std::vector<CVec> crossed_left_action(const PrincipalBundle& b, const CrossedFunction& f,
                                      const std::vector<CVec>& xi) {
  std::vector<CVec> out(static_cast<std::size_t>(b.group_order()),
                        CVec::Zero(b.total.num_points()));
  for (int t = 0; t < b.group_order(); ++t)
    for (int g = 0; g < b.group_order(); ++g) {
      const int rest = b.group.product(b.group.inverse(g), t);
      for (int y = 0; y < b.total.num_points(); ++y)
        out[static_cast<std::size_t>(t)](y) +=
            f[static_cast<std::size_t>(g)](y) *
            xi[static_cast<std::size_t>(rest)](b.act(g, y));
    }
  return out;
}

CVec phi_iso(const PrincipalBundle& b, const CVec& xi, const std::vector<CVec>& zeta) {
  CVec out = CVec::Zero(b.total.num_points());
  for (int g = 0; g < b.group_order(); ++g) {
    const int ginv = b.group.inverse(g);
    for (int y = 0; y < b.total.num_points(); ++y) {
      const int z = b.act(ginv, y);
      out(y) += std::conj(xi(z)) * zeta[static_cast<std::size_t>(g)](z);
    }
  }
  return out;
}

Mat tensor_inner_values(const PrincipalBundle& b, const CVec& xi1,
                        const std::vector<CVec>& zeta1, const CVec& xi2,
                        const std::vector<CVec>& zeta2) {
  const int G = b.group_order();
  Mat out = Mat::Zero(G, b.base.num_points());
  for (int t = 0; t < G; ++t)
    for (int g = 0; g < G; ++g)
      for (int h = 0; h < G; ++h) {
        const int rest = b.group.product(b.group.inverse(h), b.group.product(g, t));
        for (int x = 0; x < b.base.num_points(); ++x)
          for (int y : b.fibers[static_cast<std::size_t>(x)]) {
            const int yh = b.act(h, y);
            out(t, x) += std::conj(zeta1[static_cast<std::size_t>(g)](y)) * xi1(y) *
                         std::conj(xi2(yh)) * zeta2[static_cast<std::size_t>(rest)](yh);
          }
      }
  return out;
}

MishchenkoFrame mishchenko_frame(const PrincipalBundle& b, const OpenCover& cover,
                                 const PartitionOfUnity& chi) {
  chi.validate(cover);
  const int N = cover.num_sets();
  const int ny = b.total.num_points();

  // Sheet-splitting threshold: safely below the smallest displacement of any
  // nontrivial group element.
  double min_move = std::numeric_limits<double>::infinity();
  for (int g = 0; g < b.group_order(); ++g) {
    if (g == b.group.identity()) continue;
    for (int y = 0; y < ny; ++y) min_move = std::min(min_move, b.total.d(y, b.act(g, y)));
  }
  const double tau = b.group_order() == 1 ? std::numeric_limits<double>::infinity()
                                          : 0.45 * min_move;

  MishchenkoFrame frame;
  frame.section.resize(static_cast<std::size_t>(N));
  frame.sqrt_rho.assign(static_cast<std::size_t>(N), CVec::Zero(ny));

  for (int i = 0; i < N; ++i) {
    std::vector<int> pre;
    for (int y = 0; y < ny; ++y) {
      const int x = b.quotient[static_cast<std::size_t>(y)];
      if (cover.contains(i, x)) pre.push_back(y);
    }
    if (pre.empty()) throw Error("mishchenko_frame: empty cover set preimage");
    // Connected component (threshold graph) through the least preimage point.
    std::vector<char> in_component(static_cast<std::size_t>(ny), 0);
    std::deque<int> queue{pre.front()};
    in_component[static_cast<std::size_t>(pre.front())] = 1;
    while (!queue.empty()) {
      const int y = queue.front();
      queue.pop_front();
      for (int z : pre)
        if (!in_component[static_cast<std::size_t>(z)] && b.total.d(y, z) <= tau) {
          in_component[static_cast<std::size_t>(z)] = 1;
          queue.push_back(z);
        }
    }
    auto& sec = frame.section[static_cast<std::size_t>(i)];
    for (int y : pre) {
      if (!in_component[static_cast<std::size_t>(y)]) continue;
      const int x = b.quotient[static_cast<std::size_t>(y)];
      if (sec.count(x)) {
        std::ostringstream msg;
        msg << "mishchenko_frame: cover set " << i
            << " is not trivializing (sheet hits a fiber twice)";
        throw Error(msg.str());
      }
      sec[x] = y;
    }
    for (int x : cover.sets[static_cast<std::size_t>(i)])
      if (!sec.count(x)) {
        std::ostringstream msg;
        msg << "mishchenko_frame: section over set " << i << " misses base point " << x;
        throw Error(msg.str());
      }
    for (const auto& [x, y] : sec)
      frame.sqrt_rho[static_cast<std::size_t>(i)](y) = std::sqrt(chi.at(i, x));
  }

  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (i == j) continue;
      std::map<int, int> g_of;
      for (const auto& [x, yi] : frame.section[static_cast<std::size_t>(i)]) {
        auto it = frame.section[static_cast<std::size_t>(j)].find(x);
        if (it == frame.section[static_cast<std::size_t>(j)].end()) continue;
        g_of[x] = b.group_element_between(yi, it->second);
      }
      if (!g_of.empty()) frame.transition[{i, j}] = std::move(g_of);
    }
  return frame;
}

UnitaryCocycle frame_cocycle(const PrincipalBundle& b, const MishchenkoFrame& frame,
                             const GroupAlgebra& ga, const OpenCover& cover) {
  UnitaryCocycle c;
  c.algebra = ga.algebra;
  c.q = MatrixOverAlgebra::identity(ga.algebra, 1);
  c.cover = cover;
  for (const auto& [key, g_of] : frame.transition) {
    std::map<int, std::vector<int>> by_value;
    for (const auto& [x, g] : g_of) by_value[g].push_back(x);
    for (const auto& [g, points] : by_value)
      c.set_transition_at(key.first, key.second, points, ga.unit(g));
  }
  (void)b;
  return c;
}

double MishchenkoReport::worst() const {
  double w = 0.0;
  for (const auto& [name, v] : residuals) w = std::max(w, v);
  return w;
}

CVec random_cvec(SplitMix64& rng, int n) {
  CVec v(n);
  for (int i = 0; i < n; ++i) {
    // Box-Muller on splitmix uniforms; portable and deterministic.
    const double u1 = std::max(rng.next_double(), 1e-300);
    const double u2 = rng.next_double();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    v(i) = 0.5 * mag *
           cplx(std::cos(2.0 * std::numbers::pi * u2), std::sin(2.0 * std::numbers::pi * u2));
  }
  return v;
}

namespace {

double min_eigenvalue(const MatrixOverAlgebra& a) {
  double worst = std::numeric_limits<double>::infinity();
  for (int s = 0; s < a.parent()->num_sites(); ++s) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a.at(s));
    worst = std::min(worst, es.eigenvalues().minCoeff());
  }
  return worst;
}

std::vector<CVec> random_crossed(SplitMix64& rng, const PrincipalBundle& b) {
  std::vector<CVec> out;
  out.reserve(static_cast<std::size_t>(b.group_order()));
  for (int g = 0; g < b.group_order(); ++g)
    out.push_back(random_cvec(rng, b.total.num_points()));
  return out;
}

}  // namespace

MishchenkoReport mishchenko_verify(const PrincipalBundle& b, const OpenCover& cover,
                                   const PartitionOfUnity& chi,
                                   const MishchenkoOptions& opts) {
  MishchenkoReport rep;
  SplitMix64 rng(opts.seed);
  const int ny = b.total.num_points();
  auto& res = rep.residuals;
  auto bump = [&res](const std::string& name, double v) {
    auto [it, inserted] = res.emplace(name, v);
    if (!inserted) it->second = std::max(it->second, v);
  };

  for (int trial = 0; trial < 8; ++trial) {
    const CVec xi = random_cvec(rng, ny);
    const CVec zeta = random_cvec(rng, ny);

    bump("y_inner_positivity",
         std::max(0.0, -y_inner(b, xi, xi).real().minCoeff()) +
             y_inner(b, xi, xi).imag().cwiseAbs().maxCoeff());

    for (int g = 0; g < b.group_order(); ++g) {
      const CVec lhs = y_inner(b, z_group_action(b, g, xi), z_group_action(b, g, zeta));
      bump("y_inner_g_invariance",
           (lhs - y_inner(b, xi, zeta)).cwiseAbs().maxCoeff());
    }

    // Theta_{xi,zeta}(v) = xi <zeta|v> versus the crossed-product image.
    const CVec v = random_cvec(rng, ny);
    const CrossedFunction theta = rank_one_to_crossed(b, xi, zeta);
    CVec direct = CVec::Zero(ny);
    const CVec inner = y_inner(b, zeta, v);
    for (int y = 0; y < ny; ++y)
      direct(y) = xi(y) * inner(b.quotient[static_cast<std::size_t>(y)]);
    bump("rank_one_identity",
         (y_left_action(b, theta, v) - direct).cwiseAbs().maxCoeff());

    // *-representation on Y: <f.xi|zeta> = <xi|f*.zeta>, and convolution
    // compatibility (f*g).xi = f.(g.xi).
    const CrossedFunction f = random_crossed(rng, b);
    const CrossedFunction g2 = random_crossed(rng, b);
    bump("crossed_star_representation",
         (y_inner(b, y_left_action(b, f, xi), zeta) -
          y_inner(b, xi, y_left_action(b, crossed_star(b, f), zeta)))
             .cwiseAbs()
             .maxCoeff());
    bump("crossed_convolution_action",
         (y_left_action(b, crossed_convolve(b, f, g2), xi) -
          y_left_action(b, f, y_left_action(b, g2, xi)))
             .cwiseAbs()
             .maxCoeff());

    for (int g = 0; g < b.group_order(); ++g) {
      bump("z_unitarity",
           (y_inner(b, z_group_action(b, g, xi), z_group_action(b, g, zeta)) -
            y_inner(b, xi, zeta))
               .cwiseAbs()
               .maxCoeff());
      // V(g) V(h) = V(gh) under the right-action convention.
      for (int h = 0; h < b.group_order(); ++h)
        bump("z_homomorphism",
             (z_group_action(b, g, z_group_action(b, h, xi)) -
              z_group_action(b, b.group.product(g, h), xi))
                 .cwiseAbs()
                 .maxCoeff());
    }

    // m-inner at t = e reduces to the Y-inner product.
    const Mat mv = m_inner_values(b, xi, zeta);
    bump("m_inner_at_identity_matches_y",
         (mv.row(b.group.identity()).transpose() - y_inner(b, xi, zeta))
             .cwiseAbs()
             .maxCoeff());
    bump("m_positivity", std::max(0.0, -min_eigenvalue(m_inner(b, xi, xi))));

    const std::vector<CVec> cx = random_crossed(rng, b);
    bump("crossed_positivity", std::max(0.0, -min_eigenvalue(crossed_inner(b, cx, cx))));
  }

  // Frame identities and the cross-module gram check.
  const MishchenkoFrame frame = mishchenko_frame(b, cover, chi);
  const GroupAlgebra ga = group_algebra(b.group);
  const UnitaryCocycle cocycle = frame_cocycle(b, frame, ga, cover);
  const FlatProjection fp = build_flat_projection(cocycle, chi);
  const int N = cover.num_sets();
  const int G = b.group_order();
  for (int x = 0; x < b.base.num_points(); ++x) {
    Mat gram = Mat::Zero(N * G, N * G);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const Mat vals = m_inner_values(b, frame.sqrt_rho[static_cast<std::size_t>(i)],
                                        frame.sqrt_rho[static_cast<std::size_t>(j)]);
        Mat entry = Mat::Zero(G, G);
        for (int t = 0; t < G; ++t)
          for (int h = 0; h < G; ++h) entry(b.group.product(t, h), h) += vals(t, x);
        gram.block(i * G, j * G, G, G) = entry;
      }
    bump("frame_gram_identity", op_norm(gram - fp.p_A.at(x).at(0)));
  }

  for (int trial = 0; trial < 8; ++trial) {
    const CVec xi = random_cvec(rng, ny);
    CVec rebuilt = CVec::Zero(ny);
    for (int i = 0; i < N; ++i) {
      const Mat coeff =
          m_inner_values(b, frame.sqrt_rho[static_cast<std::size_t>(i)], xi);
      CrossedFunction f(static_cast<std::size_t>(G), CVec::Zero(b.base.num_points()));
      for (int g = 0; g < G; ++g) f[static_cast<std::size_t>(g)] = coeff.row(g).transpose();
      rebuilt += m_right_action(b, frame.sqrt_rho[static_cast<std::size_t>(i)], f);
    }
    bump("frame_reconstruction", (rebuilt - xi).cwiseAbs().maxCoeff());
  }

  // Phi preserves inner products on random elementary tensors.
  for (int pair = 0; pair < opts.random_pairs; ++pair) {
    const CVec xi1 = random_cvec(rng, ny);
    const CVec xi2 = random_cvec(rng, ny);
    const std::vector<CVec> z1 = random_crossed(rng, b);
    const std::vector<CVec> z2 = random_crossed(rng, b);
    const Mat lhs = tensor_inner_values(b, xi1, z1, xi2, z2);
    const Mat rhs = m_inner_values(b, phi_iso(b, xi1, z1), phi_iso(b, xi2, z2));
    bump("phi_inner_products", (lhs - rhs).cwiseAbs().maxCoeff());
  }

  // Dense image: Phi(<conj(psi)| (x) phi lambda_e) = psi phi with psi = 1.
  {
    const CVec phi_vec = random_cvec(rng, ny);
    const CVec psi = CVec::Ones(ny);
    std::vector<CVec> zeta(static_cast<std::size_t>(G), CVec::Zero(ny));
    zeta[static_cast<std::size_t>(b.group.identity())] = phi_vec;
    bump("phi_dense_image",
         (phi_iso(b, psi.conjugate(), zeta) - phi_vec).cwiseAbs().maxCoeff());
  }
  return rep;
}

}  // namespace aschern
