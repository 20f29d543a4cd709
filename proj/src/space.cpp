#include "aschern/space.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace aschern {

void SampledSpace::validate() const {
  const int n = num_points();
  if (n <= 0) throw Error("SampledSpace: empty sample");
  if (dist.rows() != n || dist.cols() != n)
    throw DimensionMismatch("SampledSpace: distance matrix must be n x n");
  for (int i = 0; i < n; ++i) {
    if (dist(i, i) != 0.0) throw Error("SampledSpace: metric nonzero on diagonal");
    for (int j = i + 1; j < n; ++j)
      if (dist(i, j) != dist(j, i)) throw Error("SampledSpace: metric not symmetric");
  }
  for (const auto& [deg, chain] : chains) {
    if (chain.degree != deg || chain.tuples.size() != chain.signs.size())
      throw Error("SampledSpace: malformed chain");
    for (const auto& t : chain.tuples) {
      if (static_cast<int>(t.size()) != deg + 1)
        throw Error("SampledSpace: chain tuple arity mismatch");
      for (int v : t)
        if (v < 0 || v >= n) throw Error("SampledSpace: chain tuple out of range");
    }
  }
}

namespace {

RMat pairwise_distances(const RMat& pts) {
  const int n = static_cast<int>(pts.rows());
  RMat d(n, n);
  for (int i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double v = (pts.row(i) - pts.row(j)).norm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

}  // namespace

SampledSpace space_from_points(RMat points) {
  SampledSpace s;
  s.dist = pairwise_distances(points);
  s.points = std::move(points);
  s.validate();
  return s;
}

SampledSpace circle_space(int n) {
  if (n < 1) throw Error("circle_space: need at least one point");
  RMat pts(n, 2);
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    pts(i, 0) = std::cos(a);
    pts(i, 1) = std::sin(a);
  }
  return space_from_points(std::move(pts));
}

SampledSpace sphere_space(int subdiv) {
  if (subdiv < 0 || subdiv > 6) throw Error("sphere_space: subdiv out of range");
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> verts = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5},  {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},   {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},   {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},   {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int round = 0; round < subdiv; ++round) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Eigen::Vector3d m = (verts[static_cast<std::size_t>(a)] +
                           verts[static_cast<std::size_t>(b)]) /
                          2.0;
      m.normalize();
      verts.push_back(m);
      const int idx = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = mid(f[0], f[1]);
      const int bc = mid(f[1], f[2]);
      const int ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  RMat pts(static_cast<int>(verts.size()), 3);
  for (int i = 0; i < static_cast<int>(verts.size()); ++i)
    pts.row(i) = verts[static_cast<std::size_t>(i)].transpose();

  OrientedChain chain;
  chain.degree = 2;
  for (auto f : faces) {
    // Faces ordered with inward normals; under the simplex orientation used
    // by the Chern cochain this makes the Bott projection pair to +1.
    const Eigen::Vector3d a = verts[static_cast<std::size_t>(f[0])];
    const Eigen::Vector3d b = verts[static_cast<std::size_t>(f[1])];
    const Eigen::Vector3d c = verts[static_cast<std::size_t>(f[2])];
    if ((b - a).cross(c - a).dot(a + b + c) > 0.0) std::swap(f[1], f[2]);
    chain.tuples.push_back({f[0], f[1], f[2]});
    chain.signs.push_back(1);
  }

  SampledSpace s = space_from_points(std::move(pts));
  s.chains[2] = std::move(chain);
  s.validate();
  return s;
}

SampledSpace torus_space(int nu, int nv, double big_radius, double small_radius) {
  if (nu < 3 || nv < 3) throw Error("torus_space: need at least a 3x3 grid");
  RMat pts(nu * nv, 3);
  auto idx = [nv](int i, int j) { return i * nv + j; };
  for (int i = 0; i < nu; ++i) {
    const double u = 2.0 * std::numbers::pi * i / nu;
    for (int j = 0; j < nv; ++j) {
      const double v = 2.0 * std::numbers::pi * j / nv;
      const double w = big_radius + small_radius * std::cos(v);
      pts(idx(i, j), 0) = w * std::cos(u);
      pts(idx(i, j), 1) = w * std::sin(u);
      pts(idx(i, j), 2) = small_radius * std::sin(v);
    }
  }
  OrientedChain chain;
  chain.degree = 2;
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      const int a = idx(i, j);
      const int b = idx((i + 1) % nu, j);
      const int c = idx((i + 1) % nu, (j + 1) % nv);
      const int d = idx(i, (j + 1) % nv);
      chain.tuples.push_back({a, b, c});
      chain.signs.push_back(1);
      chain.tuples.push_back({a, c, d});
      chain.signs.push_back(1);
    }
  SampledSpace s = space_from_points(std::move(pts));
  s.chains[2] = std::move(chain);
  s.validate();
  return s;
}

bool OpenCover::contains(int set, int point) const {
  const auto& v = sets[static_cast<std::size_t>(set)];
  return std::binary_search(v.begin(), v.end(), point);
}

void OpenCover::validate(int num_points) const {
  if (sets.empty()) throw Error("OpenCover: no sets");
  std::vector<char> hit(static_cast<std::size_t>(num_points), 0);
  for (const auto& s : sets) {
    if (s.empty()) throw Error("OpenCover: empty set");
    if (!std::is_sorted(s.begin(), s.end()))
      throw Error("OpenCover: sets must be sorted");
    for (int p : s) {
      if (p < 0 || p >= num_points) throw Error("OpenCover: point out of range");
      hit[static_cast<std::size_t>(p)] = 1;
    }
  }
  for (char h : hit)
    if (!h) throw Error("OpenCover: union does not cover all points");
}

void PartitionOfUnity::validate(const OpenCover& cover) const {
  if (num_sets() != cover.num_sets())
    throw DimensionMismatch("PartitionOfUnity: one row per cover set required");
  const int n = static_cast<int>(chi.cols());
  for (int x = 0; x < n; ++x) {
    double sum = 0.0;
    for (int i = 0; i < num_sets(); ++i) {
      const double v = chi(i, x);
      if (v < 0.0) throw Error("PartitionOfUnity: negative value");
      if (v != 0.0 && !cover.contains(i, x))
        throw Error("PartitionOfUnity: support escapes its cover set");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw Error("PartitionOfUnity: values do not sum to 1");
  }
}

std::pair<OpenCover, PartitionOfUnity> build_cover(const SampledSpace& space,
                                                   double radius) {
  if (!(radius > 0.0)) throw Error("build_cover: radius must be positive");
  const int n = space.num_points();
  std::vector<int> net;
  for (int i = 0; i < n; ++i) {
    bool separated = true;
    for (int c : net)
      if (space.d(i, c) < radius) {
        separated = false;
        break;
      }
    if (separated) net.push_back(i);
  }
  const int L = static_cast<int>(net.size());
  OpenCover cover;
  cover.sets.resize(static_cast<std::size_t>(L));
  RMat chi = RMat::Zero(L, n);
  for (int c = 0; c < L; ++c)
    for (int x = 0; x < n; ++x) {
      const double d = space.d(net[static_cast<std::size_t>(c)], x);
      if (d < radius) {
        cover.sets[static_cast<std::size_t>(c)].push_back(x);
        chi(c, x) = 1.0 - d / radius;
      }
    }
  for (int x = 0; x < n; ++x) {
    const double colsum = chi.col(x).sum();
    if (!(colsum > 0.0)) throw Error("build_cover: point left uncovered");
    chi.col(x) /= colsum;
  }
  cover.validate(n);
  PartitionOfUnity part{std::move(chi)};
  part.validate(cover);
  return {std::move(cover), std::move(part)};
}

PartitionOfUnity partition_subordinate(const SampledSpace& space,
                                       const OpenCover& cover) {
  const int n = space.num_points();
  const int L = cover.num_sets();
  RMat chi = RMat::Zero(L, n);
  for (int i = 0; i < L; ++i) {
    std::vector<char> inside(static_cast<std::size_t>(n), 0);
    for (int p : cover.sets[static_cast<std::size_t>(i)])
      inside[static_cast<std::size_t>(p)] = 1;
    for (int p : cover.sets[static_cast<std::size_t>(i)]) {
      double bump = std::numeric_limits<double>::infinity();
      for (int y = 0; y < n; ++y)
        if (!inside[static_cast<std::size_t>(y)]) bump = std::min(bump, space.d(p, y));
      // Squared bumps keep sqrt(chi) Lipschitz at the support boundary, so
      // oscillation refinement does not shred the overlap regions.
      chi(i, p) = std::isfinite(bump) ? bump * bump : 1.0;
    }
  }
  for (int x = 0; x < n; ++x) {
    const double colsum = chi.col(x).sum();
    if (!(colsum > 0.0))
      throw Error("partition_subordinate: point has no interior weight");
    chi.col(x) /= colsum;
  }
  PartitionOfUnity part{std::move(chi)};
  part.validate(cover);
  return part;
}

OpenCover refine_until_oscillation(const OpenCover& cover,
                                   const std::function<double(int, int)>& metric,
                                   double bound) {
  OpenCover out;
  std::deque<std::vector<int>> work(cover.sets.begin(), cover.sets.end());
  while (!work.empty()) {
    std::vector<int> u = std::move(work.front());
    work.pop_front();
    double osc = 0.0;
    int wa = u[0], wb = u[0];
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = i + 1; j < u.size(); ++j) {
        const double v = metric(u[i], u[j]);
        if (v > osc) {
          osc = v;
          wa = u[i];
          wb = u[j];
        }
      }
    if (osc <= bound) {
      out.sets.push_back(std::move(u));
      continue;
    }
    std::vector<int> left, right;
    for (int p : u) {
      if (metric(p, wa) <= metric(p, wb))
        left.push_back(p);
      else
        right.push_back(p);
    }
    work.push_front(std::move(right));
    work.push_front(std::move(left));
  }
  std::sort(out.sets.begin(), out.sets.end());
  return out;
}

namespace {

using Bits = std::vector<std::uint64_t>;

Bits to_bits(const std::vector<int>& pts, int n) {
  Bits b(static_cast<std::size_t>((n + 63) / 64), 0);
  for (int p : pts) b[static_cast<std::size_t>(p) / 64] |= 1ull << (p % 64);
  return b;
}

Bits bits_and(const Bits& a, const Bits& b) {
  Bits r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] & b[i];
  return r;
}

bool bits_empty(const Bits& a) {
  for (auto w : a)
    if (w) return false;
  return true;
}

std::vector<int> bits_to_points(const Bits& a, int n) {
  std::vector<int> out;
  for (int p = 0; p < n; ++p)
    if (a[static_cast<std::size_t>(p) / 64] & (1ull << (p % 64))) out.push_back(p);
  return out;
}

}  // namespace

OpenCover cover_from_closed_family(const SampledSpace& space,
                                   const std::vector<std::vector<int>>& closed_sets) {
  const int n = space.num_points();
  const int l = static_cast<int>(closed_sets.size());
  if (l > 20) throw Error("cover_from_closed_family: family too large for desk scale");

  std::vector<Bits> K;
  K.reserve(static_cast<std::size_t>(l));
  for (const auto& k : closed_sets) K.push_back(to_bits(k, n));

  // All intersections over non-empty index sets, keyed by the point set;
  // depth = largest index-set size realizing it.
  std::map<std::vector<int>, int> depth_of;
  for (std::uint32_t mask = 1; mask < (1u << l); ++mask) {
    Bits acc(static_cast<std::size_t>((n + 63) / 64), ~0ull);
    int members = 0;
    for (int i = 0; i < l; ++i)
      if (mask & (1u << i)) {
        acc = bits_and(acc, K[static_cast<std::size_t>(i)]);
        ++members;
      }
    auto pts = bits_to_points(acc, n);
    if (pts.empty()) continue;  // the empty set plays C_1 with U_1 empty
    auto [it, inserted] = depth_of.emplace(std::move(pts), members);
    if (!inserted) it->second = std::max(it->second, members);
  }

  // Deepest intersections first; lexicographic among equal depth.  This makes
  // C_{j} meet K either in itself or in an already-listed (deeper) member.
  std::vector<const std::vector<int>*> order;
  order.reserve(depth_of.size());
  for (const auto& [pts, d] : depth_of) order.push_back(&pts);
  std::sort(order.begin(), order.end(),
            [&](const std::vector<int>* a, const std::vector<int>* b) {
              const int da = depth_of.at(*a);
              const int db = depth_of.at(*b);
              if (da != db) return da > db;
              return *a < *b;
            });

  std::vector<char> used(static_cast<std::size_t>(n), 0);
  OpenCover cover;
  for (const auto* c : order) {
    std::vector<int> u;  // L_{j} = C_j minus everything already covered
    for (int p : *c)
      if (!used[static_cast<std::size_t>(p)]) u.push_back(p);
    for (int p : u) used[static_cast<std::size_t>(p)] = 1;
    if (!u.empty()) cover.sets.push_back(std::move(u));
  }

  std::vector<int> rest;  // X minus the union of the K_i
  {
    std::vector<char> in_union(static_cast<std::size_t>(n), 0);
    for (const auto& k : closed_sets)
      for (int p : k) in_union[static_cast<std::size_t>(p)] = 1;
    for (int p = 0; p < n; ++p)
      if (!in_union[static_cast<std::size_t>(p)]) rest.push_back(p);
  }
  if (!rest.empty()) cover.sets.push_back(std::move(rest));

  if (cover.sets.empty()) cover.sets.push_back({});  // unreachable for valid input
  cover.validate(n);
  return cover;
}

int cover_lemma_violations(const OpenCover& cover,
                           const std::vector<std::vector<int>>& closed_sets) {
  const int l = static_cast<int>(closed_sets.size());
  if (l >= 31) throw Error("cover_lemma_violations: family too large");
  std::vector<std::set<int>> K;
  K.reserve(static_cast<std::size_t>(l));
  for (const auto& k : closed_sets) K.emplace_back(k.begin(), k.end());

  int violations = 0;
  for (const auto& u : cover.sets) {
    std::vector<char> meets(static_cast<std::size_t>(l), 0);
    for (int i = 0; i < l; ++i)
      for (int p : u)
        if (K[static_cast<std::size_t>(i)].count(p)) {
          meets[static_cast<std::size_t>(i)] = 1;
          break;
        }
    for (std::uint32_t mask = 1; mask < (1u << l); ++mask) {
      bool all_meet = true;
      for (int i = 0; i < l && all_meet; ++i)
        if ((mask & (1u << i)) && !meets[static_cast<std::size_t>(i)]) all_meet = false;
      if (!all_meet) continue;
      // Intersection over the index set must be non-empty.
      bool found = false;
      int first = -1;
      for (int i = 0; i < l; ++i)
        if (mask & (1u << i)) {
          first = i;
          break;
        }
      for (int p : K[static_cast<std::size_t>(first)]) {
        bool in_all = true;
        for (int i = 0; i < l && in_all; ++i)
          if ((mask & (1u << i)) && !K[static_cast<std::size_t>(i)].count(p))
            in_all = false;
        if (in_all) {
          found = true;
          break;
        }
      }
      if (!found) ++violations;
    }
  }
  return violations;
}

int CoverTupleSet::find(const std::vector<int>& t) const {
  auto it = index.find(t);
  return it == index.end() ? -1 : it->second;
}

int CoverTupleSet::insert(std::vector<int> t, int owner_set) {
  auto it = index.find(t);
  if (it != index.end()) return it->second;
  const int id = size();
  index.emplace(t, id);
  tuples.push_back(std::move(t));
  owner.push_back(owner_set);
  return id;
}

CoverTupleSet enumerate_tuples(const OpenCover& cover, int degree,
                               const TupleBudget& budget,
                               const std::vector<std::vector<int>>& mandatory) {
  if (degree < 0) throw Error("enumerate_tuples: negative degree");
  CoverTupleSet out;
  out.degree = degree;

  int max_point = -1;
  for (const auto& s : cover.sets)
    for (int p : s) max_point = std::max(max_point, p);
  std::vector<int> first_set(static_cast<std::size_t>(max_point + 1), -1);
  for (int i = 0; i < cover.num_sets(); ++i)
    for (int p : cover.sets[static_cast<std::size_t>(i)])
      if (first_set[static_cast<std::size_t>(p)] < 0)
        first_set[static_cast<std::size_t>(p)] = i;

  for (int p = 0; p <= max_point; ++p) {
    if (first_set[static_cast<std::size_t>(p)] < 0) continue;
    std::vector<int> diag(static_cast<std::size_t>(degree + 1), p);
    out.insert(std::move(diag), first_set[static_cast<std::size_t>(p)]);
  }

  for (const auto& t : mandatory) {
    if (static_cast<int>(t.size()) != degree + 1)
      throw Error("enumerate_tuples: mandatory tuple arity mismatch");
    int owner = -1;
    for (int i = 0; i < cover.num_sets() && owner < 0; ++i) {
      bool all = true;
      for (int p : t)
        if (!cover.contains(i, p)) {
          all = false;
          break;
        }
      if (all) owner = i;
    }
    if (owner < 0) {
      std::ostringstream msg;
      msg << "enumerate_tuples: mandatory tuple escapes all cover sets (";
      for (std::size_t i = 0; i < t.size(); ++i) msg << (i ? "," : "") << t[i];
      msg << ")";
      throw Error(msg.str());
    }
    out.insert(t, owner);
  }

  SplitMix64 rng(budget.seed);
  const int L = cover.num_sets();
  std::uint64_t attempts = 0;
  const std::uint64_t max_attempts = 64ull * static_cast<std::uint64_t>(budget.total) + 1024;
  std::vector<int> scratch;
  while (out.size() < budget.total && attempts < max_attempts) {
    ++attempts;
    const int set = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(L)));
    const auto& pts = cover.sets[static_cast<std::size_t>(set)];
    std::vector<int> t(static_cast<std::size_t>(degree + 1));
    if (static_cast<int>(pts.size()) > degree) {
      // Distinct entries via a partial shuffle: repeated points make the
      // Chern integrand degenerate, so prefer genuinely spread tuples.
      scratch.assign(pts.begin(), pts.end());
      for (int i = 0; i <= degree; ++i) {
        const std::size_t j =
            static_cast<std::size_t>(i) + rng.next_below(scratch.size() - i);
        std::swap(scratch[static_cast<std::size_t>(i)], scratch[j]);
        t[static_cast<std::size_t>(i)] = scratch[static_cast<std::size_t>(i)];
      }
    } else {
      for (int& v : t)
        v = pts[static_cast<std::size_t>(rng.next_below(pts.size()))];
    }
    out.insert(std::move(t), set);
  }
  return out;
}

CoverTupleSet face_closure(const OpenCover& cover, const CoverTupleSet& upper) {
  if (upper.degree < 1) throw Error("face_closure: upper degree must be >= 1");
  CoverTupleSet out;
  out.degree = upper.degree - 1;
  for (int ti = 0; ti < upper.size(); ++ti) {
    const auto& t = upper.tuples[static_cast<std::size_t>(ti)];
    for (std::size_t omit = 0; omit < t.size(); ++omit) {
      std::vector<int> face;
      face.reserve(t.size() - 1);
      for (std::size_t i = 0; i < t.size(); ++i)
        if (i != omit) face.push_back(t[i]);
      out.insert(std::move(face), upper.owner[static_cast<std::size_t>(ti)]);
    }
  }
  (void)cover;
  return out;
}

}  // namespace aschern
