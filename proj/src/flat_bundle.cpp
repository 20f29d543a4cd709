#include "aschern/flat_bundle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace aschern {

const MatrixOverAlgebra* Transition::value_at(int point) const {
  if (constant) return &values[static_cast<std::size_t>(*constant)];
  auto it = at.find(point);
  if (it == at.end()) return nullptr;
  return &values[static_cast<std::size_t>(it->second)];
}

void UnitaryCocycle::set_constant_transition(int i, int j, MatrixOverAlgebra value) {
  Transition t;
  t.values.push_back(std::move(value));
  t.constant = 0;
  transitions[{i, j}] = std::move(t);
}

void UnitaryCocycle::set_transition_at(int i, int j, const std::vector<int>& points,
                                       MatrixOverAlgebra value) {
  auto& t = transitions[{i, j}];
  if (t.constant) throw Error("set_transition_at: pair already has a constant value");
  t.values.push_back(std::move(value));
  const int id = static_cast<int>(t.values.size()) - 1;
  for (int p : points) t.at[p] = id;
}

void UnitaryCocycle::complete_adjoints() {
  std::vector<std::pair<int, int>> missing;
  for (const auto& [key, t] : transitions) {
    const auto rev = std::make_pair(key.second, key.first);
    if (key.first != key.second && transitions.find(rev) == transitions.end())
      missing.push_back(rev);
  }
  for (const auto& rev : missing) {
    const Transition& fwd = transitions.at({rev.second, rev.first});
    Transition t;
    t.values.reserve(fwd.values.size());
    for (const auto& v : fwd.values) t.values.push_back(v.adjoint());
    t.constant = fwd.constant;
    t.at = fwd.at;
    transitions[rev] = std::move(t);
  }
}

const MatrixOverAlgebra* UnitaryCocycle::transition_at(int i, int j, int x) const {
  if (i == j) {
    auto it = transitions.find({i, i});
    if (it == transitions.end()) return &q;
    const MatrixOverAlgebra* v = it->second.value_at(x);
    return v ? v : &q;
  }
  auto it = transitions.find({i, j});
  if (it == transitions.end()) return nullptr;
  return it->second.value_at(x);
}

namespace {

std::vector<std::vector<int>> support_sets(const PartitionOfUnity& chi) {
  std::vector<std::vector<int>> supp(static_cast<std::size_t>(chi.num_sets()));
  for (int i = 0; i < chi.num_sets(); ++i)
    for (int x = 0; x < chi.chi.cols(); ++x)
      if (chi.at(i, x) > 0.0) supp[static_cast<std::size_t>(i)].push_back(x);
  return supp;
}

}  // namespace

CocycleReport validate_cocycle(const UnitaryCocycle& c, const PartitionOfUnity& chi,
                               const OpenCover* working_cover) {
  if (chi.num_sets() != c.num_sets())
    throw DimensionMismatch("validate_cocycle: partition size does not match cover");
  CocycleReport rep;
  const int N = c.num_sets();
  const auto supp = support_sets(chi);

  auto record = [&rep](double& slot, double v, const std::string& what) {
    if (v > slot) slot = v;
    if (v > 1e-8) rep.violations.push_back(what);
  };

  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      std::vector<int> overlap;
      std::set_intersection(supp[static_cast<std::size_t>(i)].begin(),
                            supp[static_cast<std::size_t>(i)].end(),
                            supp[static_cast<std::size_t>(j)].begin(),
                            supp[static_cast<std::size_t>(j)].end(),
                            std::back_inserter(overlap));
      if (overlap.empty()) continue;  // degenerate overlap: g_ij exempt
      for (int x : overlap) {
        const MatrixOverAlgebra* g = c.transition_at(i, j, x);
        if (!g) {
          std::ostringstream msg;
          msg << "validate_cocycle: undefined transition g_" << i << j
              << " at point " << x;
          throw InvalidCocycle(msg.str());
        }
        if (i == j) {
          std::ostringstream what;
          what << "g_" << i << i << " != q at point " << x;
          record(rep.identity_residual, (*g - c.q).norm(), what.str());
        }
        {
          const double comp = std::max((mul(c.q, *g) - *g).norm(),
                                       (mul(*g, c.q) - *g).norm());
          std::ostringstream what;
          what << "q-compression fails for g_" << i << j << " at point " << x;
          record(rep.compression_residual, comp, what.str());
        }
        {
          const double uni = std::max((mul(g->adjoint(), *g) - c.q).norm(),
                                      (mul(*g, g->adjoint()) - c.q).norm());
          std::ostringstream what;
          what << "unitarity fails for g_" << i << j << " at point " << x;
          record(rep.unitarity_residual, uni, what.str());
        }
      }
    }

  // Cocycle relation on every sampled triple overlap meeting the supports.
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        for (int x : supp[static_cast<std::size_t>(i)]) {
          if (!(chi.at(j, x) > 0.0) || !(chi.at(k, x) > 0.0)) continue;
          const MatrixOverAlgebra* gij = c.transition_at(i, j, x);
          const MatrixOverAlgebra* gjk = c.transition_at(j, k, x);
          const MatrixOverAlgebra* gik = c.transition_at(i, k, x);
          if (!gij || !gjk || !gik) {
            std::ostringstream msg;
            msg << "validate_cocycle: undefined transition on the triple overlap ("
                << i << "," << j << "," << k << ") at point " << x;
            throw InvalidCocycle(msg.str());
          }
          const double res = (mul(*gij, *gjk) - *gik).norm();
          std::ostringstream what;
          what << "cocycle relation g_" << i << j << " g_" << j << k << " != g_" << i
               << k << " at point " << x;
          record(rep.cocycle_residual, res, what.str());
        }
      }

  if (working_cover) {
    for (const auto& u : working_cover->sets) {
      for (int i = 0; i < N && rep.locally_constant; ++i)
        for (int j = 0; j < N && rep.locally_constant; ++j) {
          const MatrixOverAlgebra* ref = nullptr;
          for (int x : u) {
            if (!(chi.at(i, x) > 0.0) || !(chi.at(j, x) > 0.0)) continue;
            const MatrixOverAlgebra* g = c.transition_at(i, j, x);
            if (!g) continue;
            if (!ref)
              ref = g;
            else if ((*ref - *g).norm() > 1e-12) {
              rep.locally_constant = false;
              std::ostringstream what;
              what << "g_" << i << j << " not constant on a working-cover set";
              rep.violations.push_back(what.str());
            }
          }
        }
    }
  }
  return rep;
}

FlatProjection build_flat_projection(const UnitaryCocycle& c,
                                     const PartitionOfUnity& chi, double tol) {
  const CocycleReport rep = validate_cocycle(c, chi);
  if (!rep.ok(tol)) {
    std::ostringstream msg;
    msg << "build_flat_projection: cocycle invalid (worst residual " << rep.worst()
        << ")";
    throw InvalidCocycle(msg.str());
  }

  const int N = c.num_sets();
  const int m = c.fiber_size();
  const auto alg = c.algebra;
  const int k = alg->block_dim();
  const int npoints = static_cast<int>(chi.chi.cols());

  FlatProjection fp{.p_A = {}, .p = {}, .sqrt_chi = chi.chi.cwiseSqrt(),
                    .cocycle = c, .partition = chi};

  auto triv = SiteAlgebra::trivial();
  fp.p.algebra = triv;
  fp.p.size = N;
  fp.p_A.algebra = alg;
  fp.p_A.size = N * m;

  for (int x = 0; x < npoints; ++x) {
    Mat scalar = Mat::Zero(N, N);
    std::vector<Mat> blocks(static_cast<std::size_t>(alg->num_sites()),
                            Mat::Zero(N * m * k, N * m * k));
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const double w = std::sqrt(chi.at(i, x) * chi.at(j, x));
        if (w == 0.0) continue;
        scalar(i, j) = w;
        const MatrixOverAlgebra* g = c.transition_at(i, j, x);
        if (!g) {
          std::ostringstream msg;
          msg << "build_flat_projection: undefined transition g_" << i << j
              << " on supp(chi_" << i << ") cap supp(chi_" << j << ") at point " << x;
          throw InvalidCocycle(msg.str());
        }
        for (int s = 0; s < alg->num_sites(); ++s)
          blocks[static_cast<std::size_t>(s)].block(i * m * k, j * m * k, m * k,
                                                    m * k) = w * g->at(s);
      }
    fp.p.value.emplace_back(triv, N, std::vector<Mat>{std::move(scalar)});
    fp.p_A.value.emplace_back(alg, N * m, std::move(blocks));
  }
  fp.p.validate(tol);
  fp.p_A.validate(tol);
  return fp;
}

namespace {

// Splits every working set so each g_ij is constant on it; points outside a
// pair's domain join the set's first value group.
OpenCover split_for_transition_constancy(const OpenCover& cover,
                                         const UnitaryCocycle& c,
                                         const PartitionOfUnity& chi) {
  OpenCover out = cover;
  for (const auto& [key, t] : c.transitions) {
    (void)t;
    const int i = key.first;
    const int j = key.second;
    OpenCover next;
    for (const auto& u : out.sets) {
      std::vector<const MatrixOverAlgebra*> reps;
      std::vector<std::vector<int>> groups;
      std::vector<int> unconstrained;
      for (int x : u) {
        const bool in_domain = chi.at(i, x) > 0.0 && chi.at(j, x) > 0.0;
        const MatrixOverAlgebra* g = in_domain ? c.transition_at(i, j, x) : nullptr;
        if (!g) {
          unconstrained.push_back(x);
          continue;
        }
        bool placed = false;
        for (std::size_t r = 0; r < reps.size(); ++r)
          if ((*reps[r] - *g).norm() <= 1e-12) {
            groups[r].push_back(x);
            placed = true;
            break;
          }
        if (!placed) {
          reps.push_back(g);
          groups.push_back({x});
        }
      }
      if (groups.size() <= 1) {
        next.sets.push_back(u);  // zero or one value: no split needed
        continue;
      }
      groups[0].insert(groups[0].end(), unconstrained.begin(), unconstrained.end());
      for (auto& grp : groups) {
        std::sort(grp.begin(), grp.end());
        next.sets.push_back(std::move(grp));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

OpenCover flatness_working_cover(const FlatProjection& fp, const SampledSpace& space,
                                 double oscillation_bound) {
  const auto supp = support_sets(fp.partition);
  const int N = fp.cocycle.num_sets();
  std::vector<std::vector<int>> K;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      std::vector<int> kij;
      std::set_intersection(supp[static_cast<std::size_t>(i)].begin(),
                            supp[static_cast<std::size_t>(i)].end(),
                            supp[static_cast<std::size_t>(j)].begin(),
                            supp[static_cast<std::size_t>(j)].end(),
                            std::back_inserter(kij));
      if (!kij.empty()) K.push_back(std::move(kij));
    }

  OpenCover cover = cover_from_closed_family(space, K);
  cover = split_for_transition_constancy(cover, fp.cocycle, fp.partition);
  cover = refine_until_oscillation(cover, oscillation_metric(fp.p_A), oscillation_bound);
  cover = refine_until_oscillation(cover, oscillation_metric(fp.p), oscillation_bound);

  if (cover_lemma_violations(cover, K) != 0)
    throw Error("flatness_working_cover: cover lemma property lost under refinement");
  cover.validate(space.num_points());
  return cover;
}

FlatnessReport flatness_check(const FlatProjection& fp, const SampledSpace& space,
                              const FlatnessOptions& opts) {
  if (opts.n < 1) throw Error("flatness_check: n must be >= 1 (degree 0 always runs)");
  FlatnessReport rep;
  rep.phi_q = trace_phi(fp.cocycle.q).real();

  const OpenCover cover = flatness_working_cover(fp, space, opts.chern.oscillation_bound);
  rep.working_sets = cover.num_sets();

  {
    const CocycleReport crep = validate_cocycle(fp.cocycle, fp.partition, &cover);
    if (!crep.ok(1e-8))
      throw Error("flatness_check: cocycle precondition failed on the working cover: " +
                  (crep.violations.empty() ? std::string("residual too large")
                                           : crep.violations.front()));
  }
  {
    const double osc_pa = cover_oscillation(cover, fp.p_A);
    const double osc_p = cover_oscillation(cover, fp.p);
    if (osc_pa > opts.chern.oscillation_bound + 1e-9 ||
        osc_p > opts.chern.oscillation_bound + 1e-9)
      throw Error("flatness_check: oscillation precondition failed after refinement");
  }

  // Degree 0.
  {
    TupleBudget b0{.total = 0, .seed = opts.seed};
    auto t0 = std::make_shared<CoverTupleSet>(enumerate_tuples(cover, 0, b0));
    ChernOptions c0 = opts.chern;
    Cochain ch0 = chern_cochain(fp.p_A, 0, cover, t0, c0);
    rep.ch0_residual = (ch0.values.array() - rep.phi_q).abs().maxCoeff();
  }

  // Degree 2n.
  const int deg = 2 * opts.n;
  const int dim = fp.p_A.at(0).dim();
  const int auto_budget =
      std::clamp(static_cast<int>(2.0e6 / std::pow(static_cast<double>(dim), 3.0)), 4, 24);
  const int extra = opts.tuple_budget > 0 ? opts.tuple_budget : auto_budget;
  const int high_extra = opts.high_tuple_budget > 0 ? opts.high_tuple_budget
                                                    : std::max(4, extra / 2);

  TupleBudget bh{.total = space.num_points() + high_extra, .seed = opts.seed + 1};
  auto t_high = std::make_shared<CoverTupleSet>(enumerate_tuples(cover, deg + 1, bh));
  const CoverTupleSet faces = face_closure(cover, *t_high);
  std::vector<std::vector<int>> mandatory = faces.tuples;
  // Evenly-spread tuples through the sets where p_A varies, so those regions
  // always contribute non-degenerate samples; capped to keep the budget in
  // charge of the total cost.
  int spread_left = std::max(4, extra);
  for (const auto& u : cover.sets) {
    if (static_cast<int>(u.size()) < deg + 1) continue;
    std::vector<int> spread(static_cast<std::size_t>(deg + 1));
    for (int i = 0; i <= deg; ++i)
      spread[static_cast<std::size_t>(i)] =
          u[static_cast<std::size_t>((i * (u.size() - 1)) / deg)];
    bool varies = false;
    for (int i = 1; i <= deg && !varies; ++i)
      varies = (fp.p_A.at(spread[static_cast<std::size_t>(i)]) - fp.p_A.at(spread[0]))
                   .norm() > 1e-12;
    if (varies && spread_left-- <= 0) continue;
    mandatory.push_back(std::move(spread));
  }
  TupleBudget bt{.total = static_cast<int>(mandatory.size()) + extra,
                 .seed = opts.seed + 2};
  auto t_mid =
      std::make_shared<CoverTupleSet>(enumerate_tuples(cover, deg, bt, mandatory));
  rep.tuples_evaluated = t_mid->size();
  // Active: at least two distinct nonzero increments, so the antisymmetrized
  // integrand is not forced to vanish by degeneracy alone.
  for (const auto& t : t_mid->tuples) {
    std::vector<MatrixOverAlgebra> deltas;
    for (std::size_t s = 1; s < t.size(); ++s) {
      MatrixOverAlgebra d = fp.p_A.at(t[s]) - fp.p_A.at(t[0]);
      if (d.norm() > 1e-12) deltas.push_back(std::move(d));
    }
    bool two_distinct = false;
    for (std::size_t i = 0; i < deltas.size() && !two_distinct; ++i)
      for (std::size_t j = i + 1; j < deltas.size() && !two_distinct; ++j)
        if ((deltas[i] - deltas[j]).norm() > 1e-12) two_distinct = true;
    if (two_distinct) ++rep.active_tuples;
  }

  const Cochain ch_pa = chern_cochain(fp.p_A, opts.n, cover, t_mid, opts.chern);
  const Cochain ch_p = chern_cochain(fp.p, opts.n, cover, t_mid, opts.chern);

  rep.pointwise_residual =
      (ch_pa.values - rep.phi_q * ch_p.values).cwiseAbs().maxCoeff();
  rep.cocycle_residual = cocycle_residual(ch_pa, t_high);
  if (opts.coboundary_certificate) {
    const CoboundarySolve cs = solve_coboundary(ch_pa, cover);
    rep.coboundary_residual = cs.residual_inf;
    rep.coboundary_rhs = cs.rhs_inf;
  }
  return rep;
}

}  // namespace aschern
