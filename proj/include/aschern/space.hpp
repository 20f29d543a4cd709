// Finite models of compact spaces: point samples with a metric, finite open
// covers, subordinate partitions of unity, sampled tuple sets near the
// diagonal, and the constructive open-cover lemma for families of closed
// sets.

#pragma once

#include "aschern/common.hpp"

#include <map>
#include <unordered_map>
#include <vector>

namespace aschern {

// Oriented (k+1)-tuples with +-1 signs; pairs with degree-k cochains.
struct OrientedChain {
  int degree = 0;
  std::vector<std::vector<int>> tuples;
  std::vector<int> signs;
};

struct SampledSpace {
  RMat points;  // n x d coordinates
  RMat dist;    // n x n, symmetric, zero diagonal
  std::map<int, OrientedChain> chains;  // optional fundamental chains per degree

  int num_points() const { return static_cast<int>(points.rows()); }
  double d(int i, int j) const { return dist(i, j); }

  void validate() const;
};

// n points on the unit circle (chordal metric).
SampledSpace circle_space(int n);

// Icosphere with `subdiv` subdivision rounds; carries the outward-oriented
// fundamental 2-chain of its faces.
SampledSpace sphere_space(int subdiv);

// nu x nv grid on a torus of radii R, r; carries a triangulated 2-chain.
SampledSpace torus_space(int nu, int nv, double big_radius = 2.0,
                         double small_radius = 0.8);

SampledSpace space_from_points(RMat points);

struct OpenCover {
  std::vector<std::vector<int>> sets;  // sorted point indices per set

  int num_sets() const { return static_cast<int>(sets.size()); }
  bool contains(int set, int point) const;
  void validate(int num_points) const;
};

struct PartitionOfUnity {
  RMat chi;  // num_sets x num_points, chi(i, x) >= 0

  int num_sets() const { return static_cast<int>(chi.rows()); }
  double at(int set, int point) const { return chi(set, point); }

  // Sum-to-one and support containment in `cover`.
  void validate(const OpenCover& cover) const;
};

// Metric-ball cover around a maximal radius-separated net, with a
// subordinate partition from normalized tent functions.
std::pair<OpenCover, PartitionOfUnity> build_cover(const SampledSpace& space,
                                                   double radius);

// Tent-function partition subordinate to an arbitrary cover: bump_i(x) is
// the distance from x to the complement of set i, normalized across sets.
PartitionOfUnity partition_subordinate(const SampledSpace& space,
                                       const OpenCover& cover);

// Splits cover sets until every set U satisfies
// max_{x,x' in U} metric(x, x') <= bound.  `metric` is typically the
// operator-norm oscillation of a projection field.  Singletons always pass,
// so this terminates; the output refines the input.
OpenCover refine_until_oscillation(const OpenCover& cover,
                                   const std::function<double(int, int)>& metric,
                                   double bound);

// Constructive cover lemma: given closed sets K_1..K_l (point subsets),
// returns a cover U such that for every U in it and every non-empty
// I subset {1..l}:  (U meets every K_i, i in I)  =>  (the K_i, i in I, have a
// common point).  Follows the inductive proof over the intersection family,
// processing deeper intersections first.
OpenCover cover_from_closed_family(const SampledSpace& space,
                                   const std::vector<std::vector<int>>& closed_sets);

// Exhaustively checks the lemma's implication for all non-empty I; returns
// the number of violations (0 when the postcondition holds).
int cover_lemma_violations(const OpenCover& cover,
                           const std::vector<std::vector<int>>& closed_sets);

struct TupleKeyHash {
  std::size_t operator()(const std::vector<int>& t) const {
    std::size_t h = 1469598103934665603ull;
    for (int v : t) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b9ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

struct CoverTupleSet {
  int degree = 0;                        // tuples have degree+1 entries
  std::vector<std::vector<int>> tuples;  // each inside its owner cover set
  std::vector<int> owner;                // index of a containing cover set
  std::unordered_map<std::vector<int>, int, TupleKeyHash> index;

  int size() const { return static_cast<int>(tuples.size()); }
  // -1 when absent.
  int find(const std::vector<int>& t) const;
  // Appends if absent; returns the tuple's index either way.
  int insert(std::vector<int> t, int owner_set);
};

struct TupleBudget {
  int total = 0;           // target number of tuples (diagonals always included)
  std::uint64_t seed = 1;  // deterministic sampling seed
};

// All diagonal tuples (x,...,x), every mandatory tuple (which must fit in a
// cover set), then a deterministic pseudo-random fill of in-set tuples up to
// the budget.
CoverTupleSet enumerate_tuples(const OpenCover& cover, int degree,
                               const TupleBudget& budget,
                               const std::vector<std::vector<int>>& mandatory = {});

// Degree-(k-1) tuple set holding every face of `upper` (plus diagonals);
// faces inherit the owner of their parent tuple.
CoverTupleSet face_closure(const OpenCover& cover, const CoverTupleSet& upper);

}  // namespace aschern
