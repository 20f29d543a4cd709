#include "aschern/config.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace aschern {

namespace {

struct Check {
  std::string name;
  double value = 0;
  double tol = 0;
  bool lower_bound = false;  // pass when value >= tol instead of <=
  bool pass = false;
};

Check upper(std::string name, double value, double tol) {
  Check c{std::move(name), value, tol, false, value <= tol};
  return c;
}

Check lower(std::string name, double value, double tol) {
  Check c{std::move(name), value, tol, true, value >= tol};
  return c;
}

Json checks_json(const std::vector<Check>& checks, bool* all_pass) {
  Json arr = Json::array();
  bool ok = true;
  for (const auto& c : checks) {
    ok = ok && c.pass;
    Json j;
    j["name"] = c.name;
    j["value"] = c.value;
    j[c.lower_bound ? "min" : "tol"] = c.tol;
    j["pass"] = c.pass;
    arr.push_back(std::move(j));
  }
  if (all_pass) *all_pass = ok;
  return arr;
}

double tol_of(const ExperimentConfig& cfg, const char* name, double fallback) {
  double t = fallback;
  if (cfg.raw.contains("tolerances") && cfg.raw.at("tolerances").contains(name))
    t = cfg.raw.at("tolerances").at(name).get<double>();
  return t * cfg.tol_scale;
}

struct Budgets {
  int contour_nodes = 64;
  int simplex_points = 0;  // 0 = per-degree default
  int tuple_budget = 0;
  int high_tuple_budget = 0;
  std::uint64_t seed = 1;
};

Budgets budgets_of(const ExperimentConfig& cfg, std::uint64_t seed) {
  Budgets b;
  b.seed = seed;
  if (cfg.raw.contains("budgets")) {
    const Json& j = cfg.raw.at("budgets");
    if (j.contains("contour_nodes")) b.contour_nodes = j.at("contour_nodes").get<int>();
    if (j.contains("simplex_points")) b.simplex_points = j.at("simplex_points").get<int>();
    if (j.contains("tuple_budget")) b.tuple_budget = j.at("tuple_budget").get<int>();
    if (j.contains("high_tuple_budget"))
      b.high_tuple_budget = j.at("high_tuple_budget").get<int>();
  }
  return b;
}

ChernOptions chern_options(const Budgets& b) {
  ChernOptions opts;
  opts.contour.nodes = b.contour_nodes;
  opts.simplex_points_per_axis = b.simplex_points;
  return opts;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string cochain_csv(const Cochain& c) {
  std::ostringstream out;
  out << "index,owner,tuple,value\n";
  for (int i = 0; i < c.tuple_set->size(); ++i) {
    out << i << "," << c.tuple_set->owner[static_cast<std::size_t>(i)] << ",";
    const auto& t = c.tuple_set->tuples[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < t.size(); ++k) out << (k ? "|" : "") << t[k];
    out << "," << format_double(c.values(i)) << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------

Json run_chern(const ExperimentConfig& cfg, RunResult& result) {
  const SampledSpace space = space_from_config(cfg.raw);
  OpenCover cover = cover_from_config(cfg.raw, space);
  const Budgets budgets = budgets_of(cfg, cfg.seed);
  const int n = cfg.raw.contains("n") ? cfg.raw.at("n").get<int>() : 1;

  ProjectionField field;
  const Json& pj = cfg.raw.contains("projection") ? cfg.raw.at("projection") : Json();
  const std::string builtin =
      pj.is_object() && pj.contains("builtin") ? pj.at("builtin").get<std::string>()
                                               : std::string("bott");
  PartitionOfUnity chi{RMat()};
  if (builtin == "bott") {
    field = bott_field(space);
  } else if (builtin == "flat") {
    chi = partition_from_config(cfg.raw, space, cover);
    const UnitaryCocycle cocycle = cocycle_from_config(cfg.raw, cover);
    FlatProjection fp = build_flat_projection(cocycle, chi);
    field = (pj.contains("use") && pj.at("use").get<std::string>() == "p") ? fp.p
                                                                           : fp.p_A;
    cover = flatness_working_cover(fp, space);
  } else {
    throw ConfigError("/projection/builtin", "unknown projection '" + builtin + "'");
  }
  field.validate();
  cover = refine_until_oscillation(cover, oscillation_metric(field), 0.25);

  std::vector<std::vector<int>> mandatory;
  const bool has_chain = space.chains.count(2 * n) > 0;
  if (has_chain) mandatory = chain_tuple_orderings(space.chains.at(2 * n));

  TupleBudget high_budget{
      .total = space.num_points() +
               (budgets.high_tuple_budget > 0 ? budgets.high_tuple_budget : 64),
      .seed = budgets.seed + 1};
  auto t_high =
      std::make_shared<CoverTupleSet>(enumerate_tuples(cover, 2 * n + 1, high_budget));
  const CoverTupleSet faces = face_closure(cover, *t_high);
  std::vector<std::vector<int>> mids = faces.tuples;
  mids.insert(mids.end(), mandatory.begin(), mandatory.end());
  TupleBudget mid_budget{
      .total = static_cast<int>(mids.size()) +
               (budgets.tuple_budget > 0 ? budgets.tuple_budget : 32),
      .seed = budgets.seed + 2};
  auto t_mid = std::make_shared<CoverTupleSet>(enumerate_tuples(cover, 2 * n, mid_budget, mids));

  const Cochain ch = chern_cochain(field, n, cover, t_mid, chern_options(budgets));

  std::vector<Check> checks;
  checks.push_back(
      upper("cocycle_residual", cocycle_residual(ch, t_high), tol_of(cfg, "cocycle", 1e-8)));

  Json extras;
  extras["tuples"] = t_mid->size();
  extras["cover_sets"] = cover.num_sets();
  if (has_chain) {
    const double pairing = pair_with_chain(ch, space.chains.at(2 * n));
    extras["pairing"] = pairing;
    if (cfg.raw.contains("expect") && cfg.raw.at("expect").contains("pairing")) {
      const double want = cfg.raw.at("expect").at("pairing").get<double>();
      checks.push_back(upper("pairing_error", std::abs(pairing - want),
                             tol_of(cfg, "pairing", 0.05)));
    }
  }
  {
    const CoboundarySolve cs = solve_coboundary(ch, cover);
    extras["coboundary_residual"] = cs.residual_inf;
    extras["cochain_sup"] = cs.rhs_inf;
    if (cfg.raw.contains("expect")) {
      const Json& e = cfg.raw.at("expect");
      if (e.contains("coboundary_max"))
        checks.push_back(upper("coboundary_residual", cs.residual_inf,
                               e.at("coboundary_max").get<double>() * cfg.tol_scale));
      if (e.contains("coboundary_min_ratio"))
        checks.push_back(lower("coboundary_ratio",
                               cs.rhs_inf > 0 ? cs.residual_inf / cs.rhs_inf : 0.0,
                               e.at("coboundary_min_ratio").get<double>()));
    }
  }

  result.csv["cochain.csv"] = cochain_csv(ch);
  bool pass = false;
  Json summary;
  summary["checks"] = checks_json(checks, &pass);
  summary["results"] = std::move(extras);
  summary["pass"] = pass;
  return summary;
}

Json run_flatness(const ExperimentConfig& cfg, RunResult& result) {
  const SampledSpace space = space_from_config(cfg.raw);
  const OpenCover cover = cover_from_config(cfg.raw, space);
  const PartitionOfUnity chi = partition_from_config(cfg.raw, space, cover);
  const UnitaryCocycle cocycle = cocycle_from_config(cfg.raw, cover);
  const Budgets budgets = budgets_of(cfg, cfg.seed);

  const FlatProjection fp = build_flat_projection(cocycle, chi);
  FlatnessOptions opts;
  opts.chern = chern_options(budgets);
  opts.tuple_budget = budgets.tuple_budget;
  opts.high_tuple_budget = budgets.high_tuple_budget;
  opts.seed = budgets.seed;
  const FlatnessReport rep = flatness_check(fp, space, opts);

  std::vector<Check> checks;
  checks.push_back(upper("ch0_residual", rep.ch0_residual, tol_of(cfg, "ch0", 1e-10)));
  checks.push_back(upper("pointwise_residual", rep.pointwise_residual,
                         tol_of(cfg, "pointwise", 1e-8)));
  checks.push_back(
      upper("cocycle_residual", rep.cocycle_residual, tol_of(cfg, "cocycle", 1e-8)));
  checks.push_back(upper("coboundary_residual", rep.coboundary_residual,
                         tol_of(cfg, "coboundary", 1e-6)));

  {
    std::ostringstream csv;
    csv << "point,ch0\n";
    for (int x = 0; x < static_cast<int>(fp.p_A.value.size()); ++x)
      csv << x << "," << format_double(trace_phi(fp.p_A.at(x)).real()) << "\n";
    result.csv["ch0.csv"] = csv.str();
  }

  bool pass = false;
  Json summary;
  summary["checks"] = checks_json(checks, &pass);
  summary["results"] = {{"phi_q", rep.phi_q},
                        {"working_sets", rep.working_sets},
                        {"active_tuples", rep.active_tuples},
                        {"tuples", rep.tuples_evaluated},
                        {"cochain_sup", rep.coboundary_rhs}};
  summary["pass"] = pass;
  return summary;
}

Json run_mishchenko(const ExperimentConfig& cfg, RunResult& result) {
  const PrincipalBundle bundle = bundle_from_config(cfg.raw);
  const OpenCover cover = cover_from_config(cfg.raw, bundle.base);
  const PartitionOfUnity chi = partition_from_config(cfg.raw, bundle.base, cover);

  MishchenkoOptions opts;
  opts.seed = cfg.seed;
  if (cfg.raw.contains("budgets") && cfg.raw.at("budgets").contains("random_pairs"))
    opts.random_pairs = cfg.raw.at("budgets").at("random_pairs").get<int>();
  const MishchenkoReport rep = mishchenko_verify(bundle, cover, chi, opts);

  const double tol = tol_of(cfg, "mishchenko", 1e-10);
  std::vector<Check> checks;
  for (const auto& [name, value] : rep.residuals)
    checks.push_back(upper(name, value, tol));

  bool pass = false;
  Json summary;
  summary["checks"] = checks_json(checks, &pass);
  summary["pass"] = pass;
  (void)result;
  return summary;
}

Json run_index(const ExperimentConfig& cfg, RunResult& result) {
  const SampledSpace space = space_from_config(cfg.raw);
  const OpenCover cover = cover_from_config(cfg.raw, space);
  const PartitionOfUnity chi = partition_from_config(cfg.raw, space, cover);
  const UnitaryCocycle cocycle = cocycle_from_config(cfg.raw, cover);
  const Budgets budgets = budgets_of(cfg, cfg.seed);
  const FlatProjection fp = build_flat_projection(cocycle, chi);

  // K-theory class as a formal difference of constant-rank scalar fields.
  int p_rank = 1, q_rank = 0, class_dim = 2;
  if (cfg.raw.contains("klass")) {
    const Json& k = cfg.raw.at("klass");
    p_rank = k.contains("p_rank") ? k.at("p_rank").get<int>() : p_rank;
    q_rank = k.contains("q_rank") ? k.at("q_rank").get<int>() : q_rank;
    class_dim = k.contains("dim") ? k.at("dim").get<int>() : class_dim;
  }
  if (p_rank < 0 || q_rank < 0 || p_rank > class_dim || q_rank > class_dim)
    throw ConfigError("/klass", "ranks must lie in [0, dim]");
  auto rank_field = [&](int rank) {
    Mat m = Mat::Zero(class_dim, class_dim);
    for (int i = 0; i < rank; ++i) m(i, i) = 1.0;
    return constant_field(space.num_points(),
                          MatrixOverAlgebra(SiteAlgebra::trivial(), class_dim, {m}));
  };

  IndexOptions opts;
  opts.flatness.chern = chern_options(budgets);
  opts.flatness.tuple_budget = budgets.tuple_budget;
  opts.flatness.high_tuple_budget = budgets.high_tuple_budget;
  opts.flatness.seed = budgets.seed;
  opts.run_degree2 =
      !cfg.raw.contains("degree2") || cfg.raw.at("degree2").get<bool>();
  opts.certificate_tol = tol_of(cfg, "certificate", 1e-6);

  const IndexReport rep =
      l2_index_via_chern(fp, space, rank_field(p_rank), rank_field(q_rank), opts);

  std::vector<Check> checks;
  checks.push_back(upper("integrality_residual", rep.integrality_residual,
                         tol_of(cfg, "integrality", 1e-6)));
  checks.push_back(upper("ch0_residual", rep.flatness.ch0_residual,
                         tol_of(cfg, "ch0", 1e-10)));

  bool pass = false;
  Json summary;
  summary["checks"] = checks_json(checks, &pass);
  summary["results"] = {{"ind_simple", rep.ind_simple},
                        {"ind_A", rep.ind_A},
                        {"phi_q", rep.phi_q},
                        {"integrality_residual", rep.integrality_residual}};
  summary["pass"] = pass;
  (void)result;
  return summary;
}

Json run_cover_lemma(const ExperimentConfig& cfg, RunResult& result) {
  const SampledSpace space = space_from_config(cfg.raw);
  std::vector<Check> checks;
  Json runs = Json::array();

  auto run_family = [&](const std::vector<std::vector<int>>& family, const std::string& tag) {
    const OpenCover cover = cover_from_closed_family(space, family);
    const int violations = cover_lemma_violations(cover, family);
    runs.push_back({{"family", tag},
                    {"sets", static_cast<int>(family.size())},
                    {"cover_sets", cover.num_sets()},
                    {"violations", violations}});
    checks.push_back(upper("violations_" + tag, violations, 0));
  };

  if (cfg.raw.contains("closed_family") && cfg.raw.at("closed_family").contains("sets")) {
    run_family(cfg.raw.at("closed_family")
                   .at("sets")
                   .get<std::vector<std::vector<int>>>(),
               "explicit");
  } else {
    int trials = 10, l = 5;
    double density = 0.3;
    if (cfg.raw.contains("closed_family")) {
      const Json& f = cfg.raw.at("closed_family");
      trials = f.contains("trials") ? f.at("trials").get<int>() : trials;
      l = f.contains("count") ? f.at("count").get<int>() : l;
      density = f.contains("density") ? f.at("density").get<double>() : density;
    }
    SplitMix64 rng(cfg.seed);
    for (int trial = 0; trial < trials; ++trial) {
      std::vector<std::vector<int>> family(static_cast<std::size_t>(l));
      for (auto& k : family)
        for (int p = 0; p < space.num_points(); ++p)
          if (rng.next_double() < density) k.push_back(p);
      run_family(family, "seeded_" + std::to_string(trial));
    }
  }

  bool pass = false;
  Json summary;
  summary["checks"] = checks_json(checks, &pass);
  summary["results"] = {{"runs", std::move(runs)}};
  summary["pass"] = pass;
  (void)result;
  return summary;
}

Json run_selftest(const ExperimentConfig& cfg, RunResult& result) {
  std::vector<Check> checks;
  auto push = [&checks](const std::string& name, double value, double tol = 1e-9) {
    checks.push_back(upper("trivial/" + name, value, tol));
  };

  // tracial_algebra
  {
    const GroupAlgebra ga = group_algebra(GroupTable::cyclic(3));
    SplitMix64 rng(cfg.seed);
    MatrixOverAlgebra a = MatrixOverAlgebra::zero(ga.algebra, 2);
    for (int s = 0; s < ga.algebra->num_sites(); ++s)
      for (int r = 0; r < a.dim(); ++r)
        for (int c = 0; c < a.dim(); ++c)
          a.at(s)(r, c) = cplx(rng.next_double(-1, 1), rng.next_double(-1, 1));
    push("mul_identity",
         (mul(MatrixOverAlgebra::identity(ga.algebra, 2), a) - a).norm(), 1e-12);

    double lam = 0.0;
    for (int g = 0; g < 3; ++g)
      for (int h = 0; h < 3; ++h)
        lam = std::max(lam, (mul(ga.unit(g), ga.unit(h)) -
                             ga.unit(ga.table.product(g, h)))
                                .norm());
    push("regular_representation", lam, 0.0);
    push("trace_unital",
         std::abs(trace_phi(MatrixOverAlgebra::identity(ga.algebra, 2)) - 2.0), 1e-12);
    double tl = std::abs(trace_phi(ga.unit(0)) - 1.0);
    for (int g = 1; g < 3; ++g) tl = std::max(tl, std::abs(trace_phi(ga.unit(g))));
    push("trace_lambda", tl, 1e-12);
  }
  {
    auto c4 = circle_algebra(4);
    push("circle_trace_z",
         std::abs(trace_phi(circle_element(c4, [](cplx z) { return z; }))), 1e-12);
    push("circle_trace_one",
         std::abs(trace_phi(circle_element(c4, [](cplx) { return cplx(1.0); })) - 1.0),
         1e-12);
    auto c8 = circle_algebra(8);
    push("circle_trace_zzbar",
         std::abs(trace_phi(circle_element(
                      c8, [](cplx z) { return std::pow(z, 3) * std::pow(std::conj(z), 3); })) -
                  1.0),
         1e-12);
  }
  {
    auto triv = SiteAlgebra::trivial();
    Mat d(2, 2);
    d << 0.1, 0.0, 0.0, 0.9;
    MatrixOverAlgebra a(triv, 2, {d});
    Mat want(2, 2);
    want << 0.0, 0.0, 0.0, 1.0;
    const MatrixOverAlgebra e = contour_spectral_projection(a);
    push("contour_separated", (e - MatrixOverAlgebra(triv, 2, {want})).norm(), 1e-10);
    const MatrixOverAlgebra already(triv, 2, {want});
    push("contour_projection_fixed",
         (contour_spectral_projection(already) - already).norm(), 1e-12);
  }
  {
    auto m2 = SiteAlgebra::full_matrix(2);
    Mat em(2, 2);
    em << 1.0, 1.0, 0.0, 0.0;
    MatrixOverAlgebra e(m2, 1, {em});
    const MatrixOverAlgebra p = idempotent_to_projection(e);
    push("idempotent_trace_half", std::abs(trace_phi(e) - 0.5), 1e-12);
    push("idempotent_projection_trace", std::abs(trace_phi(p) - trace_phi(e)), 1e-10);
  }

  // base_space + cochains
  {
    const SampledSpace space = circle_space(12);
    auto [cover, chi] = build_cover(space, 0.9);
    push("partition_sums",
         (chi.chi.colwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);

    TupleBudget b2{.total = 40, .seed = 5};
    auto t2 = std::make_shared<CoverTupleSet>(enumerate_tuples(cover, 2, b2));
    auto t1 = std::make_shared<CoverTupleSet>(face_closure(cover, *t2));
    auto t0 = std::make_shared<CoverTupleSet>(face_closure(cover, *t1));

    SplitMix64 rng(cfg.seed + 1);
    Cochain f0{0, t0, RVec::Zero(t0->size())};
    for (int i = 0; i < t0->size(); ++i) f0.values(i) = rng.next_double(-1, 1);
    const Cochain df = coboundary(f0, t1);
    push("coboundary_squared", coboundary(df, t2).sup_norm(), 1e-12);
    push("exact_one_cochain_closed", cocycle_residual(df, t2), 1e-12);

    TupleBudget diag_only{.total = 0, .seed = 1};
    const CoverTupleSet diag = enumerate_tuples(cover, 2, diag_only);
    double diag_ok = diag.size() == space.num_points() ? 0.0 : 1.0;
    for (const auto& t : diag.tuples)
      if (t[0] != t[1] || t[1] != t[2]) diag_ok = 1.0;
    push("tuples_diagonal", diag_ok, 0.0);
  }
  {
    const SampledSpace one = space_from_points(RMat::Zero(1, 2));
    auto [cover, chi] = build_cover(one, 1.0);
    push("one_point_cover",
         std::abs(static_cast<double>(cover.num_sets()) - 1.0) +
             std::abs(chi.at(0, 0) - 1.0),
         0.0);
  }
  {
    const SampledSpace space = circle_space(40);
    std::vector<std::vector<int>> family = {{0, 1, 2, 3, 4}, {20, 21, 22, 23}};
    const OpenCover cover = cover_from_closed_family(space, family);
    double meets_both = 0.0;
    for (const auto& u : cover.sets) {
      bool m1 = false, m2 = false;
      for (int p : u) {
        m1 = m1 || (p >= 0 && p <= 4);
        m2 = m2 || (p >= 20 && p <= 23);
      }
      if (m1 && m2) meets_both = 1.0;
    }
    push("cover_lemma_disjoint",
         meets_both + cover_lemma_violations(cover, family), 0.0);
  }

  // chern on the sphere: spectral projection at t = 0 and a constant field.
  {
    const SampledSpace sphere = sphere_space(2);
    const ProjectionField bott = bott_field(sphere);
    const OpenCover cover = face_cover(sphere);
    const auto& face = sphere.chains.at(2).tuples.front();
    RVec t0 = RVec::Zero(2);
    push("affine_at_zero",
         (affine_segment(bott, face, t0) - bott.at(face[0])).norm(), 1e-12);
    push("spectral_at_zero",
         (spectral_projection_field(bott, face, t0) - bott.at(face[0])).norm(), 1e-10);
    RVec tmid(2);
    tmid << 0.25, 0.25;
    const MatrixOverAlgebra e = spectral_projection_field(bott, face, tmid);
    push("spectral_idempotent", (mul(e, e) - e).norm(), 1e-9);
    (void)cover;
  }
  {
    const GroupAlgebra ga = group_algebra(GroupTable::cyclic(2));
    Mat pm = Mat::Zero(4, 4);
    pm(0, 0) = 1.0;
    pm(1, 1) = 1.0;
    const MatrixOverAlgebra proj(ga.algebra, 2, {pm});
    const SampledSpace space = circle_space(10);
    const ProjectionField constant = constant_field(space.num_points(), proj);
    auto [cover, chi] = build_cover(space, 0.8);
    TupleBudget b{.total = 24, .seed = 3};
    auto t2 = std::make_shared<CoverTupleSet>(enumerate_tuples(cover, 2, b));
    const Cochain ch = chern_cochain(constant, 1, cover, t2);
    push("chern_constant_zero", ch.sup_norm(), 1e-12);
  }

  // flat bundle: trivial cocycle.
  {
    const SampledSpace space = circle_space(24);
    const OpenCover cover = arc_cover(space, 3, 75.0);
    const PartitionOfUnity chi = partition_subordinate(space, cover);
    const GroupAlgebra ga = group_algebra(GroupTable::cyclic(2));
    UnitaryCocycle cocycle;
    cocycle.algebra = ga.algebra;
    cocycle.q = MatrixOverAlgebra::identity(ga.algebra, 1);
    cocycle.cover = cover;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) cocycle.set_constant_transition(i, j, cocycle.q);
    const CocycleReport crep = validate_cocycle(cocycle, chi);
    push("trivial_cocycle_valid", crep.worst(), 1e-14);

    const FlatProjection fp = build_flat_projection(cocycle, chi);
    FlatnessOptions fopts;
    fopts.tuple_budget = 8;
    fopts.high_tuple_budget = 4;
    const FlatnessReport rep = flatness_check(fp, space, fopts);
    push("trivial_flatness_ch0", rep.ch0_residual, 1e-12);
    push("trivial_flatness_pointwise", rep.pointwise_residual, 1e-10);
    push("trivial_flatness_coboundary", rep.coboundary_residual, 1e-8);

    // Negative control: inconsistent pair of transitions must be reported.
    const GroupAlgebra z3 = group_algebra(GroupTable::cyclic(3));
    UnitaryCocycle bad;
    bad.algebra = z3.algebra;
    bad.q = MatrixOverAlgebra::identity(z3.algebra, 1);
    bad.cover = cover;
    bad.set_constant_transition(0, 1, z3.unit(1));
    bad.set_constant_transition(1, 0, z3.unit(1));  // not the adjoint of g_01
    bad.set_constant_transition(1, 2, z3.unit(0));
    bad.set_constant_transition(2, 1, z3.unit(0));
    bad.set_constant_transition(0, 2, z3.unit(0));
    bad.set_constant_transition(2, 0, z3.unit(0));
    const CocycleReport brep = validate_cocycle(bad, chi);
    push("corrupted_cocycle_detected", brep.cocycle_residual > 0.5 ? 0.0 : 1.0, 0.0);
  }

  // mishchenko basics on a small product bundle.
  {
    const PrincipalBundle b = product_bundle(circle_space(12), GroupTable::cyclic(2));
    SplitMix64 rng(cfg.seed + 2);
    const CVec xi = random_cvec(rng, b.total.num_points());
    push("z_identity_action",
         (z_group_action(b, b.group.identity(), xi) - xi).cwiseAbs().maxCoeff(), 0.0);
    const CVec moved = z_group_action(b, 1, z_group_action(b, 1, xi));
    push("z_involution", (moved - xi).cwiseAbs().maxCoeff(), 0.0);

    CVec delta = CVec::Zero(b.total.num_points());
    delta(3) = 1.0;
    const CVec inner = y_inner(b, delta, delta);
    double ok = std::abs(inner(b.quotient[3]).real() - 1.0);
    for (int x = 0; x < b.base.num_points(); ++x)
      if (x != b.quotient[3]) ok += std::abs(inner(x));
    push("y_inner_indicator", ok, 1e-14);
  }

  // index and census.
  {
    auto triv = SiteAlgebra::trivial();
    Mat one(1, 1), zero(1, 1);
    one << 1.0;
    zero << 0.0;
    const ProjectionField P = constant_field(6, MatrixOverAlgebra(triv, 1, {one}));
    const ProjectionField Q = constant_field(6, MatrixOverAlgebra(triv, 1, {zero}));
    push("index_one_minus_zero",
         std::abs(static_cast<double>(index_simple(P, Q)) - 1.0), 0.0);
    push("index_self", std::abs(static_cast<double>(index_simple(P, P))), 0.0);

    const GroupAlgebra ga = group_algebra(GroupTable::cyclic(3));
    std::vector<MatrixOverAlgebra> es = {MatrixOverAlgebra::zero(ga.algebra, 1),
                                         MatrixOverAlgebra::identity(ga.algebra, 1)};
    const auto census = idempotent_census(es);
    double census_ok = 0.0;
    if (!census[0].flagged_trivial || std::abs(census[0].trace_re) > 1e-12)
      census_ok = 1.0;
    if (!census[1].flagged_trivial || std::abs(census[1].trace_re - 1.0) > 1e-12)
      census_ok = 1.0;
    push("census_trivial_idempotents", census_ok, 0.0);
  }

  bool pass = false;
  Json summary;
  summary["checks"] = checks_json(checks, &pass);
  summary["pass"] = pass;
  (void)result;
  return summary;
}

}  // namespace

RunResult run(const ExperimentConfig& cfg_in, const RunOverrides& overrides) {
  ExperimentConfig cfg = cfg_in;
  if (!overrides.task.empty()) cfg.task = overrides.task;
  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.tol_scale) cfg.tol_scale = *overrides.tol_scale;

  RunResult result;
  Json summary;
  summary["task"] = cfg.task;
  summary["seed"] = cfg.seed;
  summary["tol_scale"] = cfg.tol_scale;

  try {
    Json body;
    if (cfg.task == "chern")
      body = run_chern(cfg, result);
    else if (cfg.task == "flatness")
      body = run_flatness(cfg, result);
    else if (cfg.task == "mishchenko-verify")
      body = run_mishchenko(cfg, result);
    else if (cfg.task == "index")
      body = run_index(cfg, result);
    else if (cfg.task == "cover-lemma")
      body = run_cover_lemma(cfg, result);
    else if (cfg.task == "selftest")
      body = run_selftest(cfg, result);
    else
      throw ConfigError("/task", "unknown task '" + cfg.task + "'");
    for (auto& [key, value] : body.items()) summary[key] = std::move(value);
    result.exit_code = summary.value("pass", false) ? 0 : 1;
  } catch (const ConfigError&) {
    throw;  // caller reports the pointer; exit code 2
  } catch (const Error& ex) {
    summary["error"] = ex.what();
    summary["pass"] = false;
    result.exit_code = 1;
  }
  result.summary = std::move(summary);
  return result;
}

}  // namespace aschern
