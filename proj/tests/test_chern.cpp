#include "aschern/chern.hpp"
#include "aschern/config.hpp"

#include <doctest.h>

#include "oracles.hpp"

using namespace aschern;

namespace {

// Shared small circle instance with a smooth complex projection field.
struct CircleInstance {
  SampledSpace space = circle_space(24);
  OpenCover cover;
  ProjectionField field;
  CoverTupleSetPtr t3, t2;

  CircleInstance(const SiteAlgebraPtr& alg, int size, int rank, std::uint64_t seed,
                 double amplitude = 0.12) {
    SplitMix64 rng(seed);
    field = oracles::smooth_field(rng, alg, space, size, rank, amplitude);
    cover = build_cover(space, 0.8).first;
    cover = refine_until_oscillation(cover, oscillation_metric(field), 0.25);
    t3 = std::make_shared<CoverTupleSet>(
        enumerate_tuples(cover, 3, {.total = space.num_points() + 8, .seed = seed}));
    const CoverTupleSet faces = face_closure(cover, *t3);
    t2 = std::make_shared<CoverTupleSet>(
        enumerate_tuples(cover, 2, {.total = faces.size() + 12, .seed = seed + 1},
                         faces.tuples));
  }
};

std::vector<int> first_nondegenerate(const CoverTupleSet& ts) {
  for (const auto& t : ts.tuples)
    if (!(t[0] == t[1] && t[1] == t[2])) return t;
  throw Error("no non-degenerate tuple sampled");
}

}  // namespace

TEST_CASE("simplex rule: weights sum to the simplex volume, nodes inside") {
  for (int deg : {2, 4}) {
    const SimplexRule rule = SimplexRule::build(deg, deg == 2 ? 16 : 8);
    double sum = 0.0;
    for (double w : rule.weights) {
      CHECK(w > 0.0);
      sum += w;
    }
    double volume = 1.0;
    for (int i = 2; i <= deg; ++i) volume /= i;
    CHECK(std::abs(sum - volume) < 1e-13);
    for (const auto& t : rule.nodes) {
      CHECK(t.minCoeff() >= 0.0);
      CHECK(t.sum() <= 1.0 + 1e-12);
    }
  }
  // Gauss-Legendre exactness on a degree-7 polynomial over [0,1].
  std::vector<double> nodes, weights;
  gauss_legendre_01(4, nodes, weights);
  double integral = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    integral += weights[i] * std::pow(nodes[i], 7);
  CHECK(std::abs(integral - 1.0 / 8.0) < 1e-14);
}

TEST_CASE("coboundary: telescoping, exactness, d^2 = 0, independent oracle") {
  const SampledSpace s1 = circle_space(14);
  auto [cover, chi] = build_cover(s1, 1.0);
  auto t2 = std::make_shared<CoverTupleSet>(
      enumerate_tuples(cover, 2, {.total = 50, .seed = 3}));
  auto t1 = std::make_shared<CoverTupleSet>(face_closure(cover, *t2));
  auto t0 = std::make_shared<CoverTupleSet>(face_closure(cover, *t1));

  // Constant 0-cochain: the face sum telescopes to zero.
  Cochain constant{0, t0, RVec::Ones(t0->size())};
  CHECK(coboundary(constant, t1).sup_norm() == 0.0);

  SplitMix64 rng(5);
  Cochain g0{0, t0, RVec::Zero(t0->size())};
  for (int i = 0; i < t0->size(); ++i) g0.values(i) = rng.next_double(-1, 1);
  const Cochain dg = coboundary(g0, t1);
  CHECK(cocycle_residual(dg, t2) < 1e-12);       // exact 1-cochain closed
  CHECK(coboundary(dg, t2).sup_norm() < 1e-12);  // d^2 = 0

  for (int i = 0; i < t2->size(); ++i)
    CHECK(std::abs(coboundary(dg, t2).values(i) -
                   oracles::independent_coboundary_value(dg, t2->tuples[i])) < 1e-13);

  // Missing face is an error.
  auto sparse = std::make_shared<CoverTupleSet>();
  sparse->degree = 1;
  sparse->insert({0, 1}, 0);
  Cochain incomplete{1, sparse, RVec::Zero(1)};
  CHECK_THROWS_WITH_AS(coboundary(incomplete, t2), doctest::Contains("missing face"),
                       Error);
}

TEST_CASE("affine segment and spectral projection field") {
  const GroupAlgebra ga = group_algebra(GroupTable::cyclic(3));
  CircleInstance inst(ga.algebra, 2, 2, 21);
  const auto tuple = first_nondegenerate(*inst.t2);

  RVec t0 = RVec::Zero(2);
  CHECK((affine_segment(inst.field, tuple, t0) - inst.field.at(tuple[0])).norm() <
        1e-14);
  const std::vector<int> diag = {tuple[0], tuple[0], tuple[0]};
  RVec tmid(2);
  tmid << 0.3, 0.4;
  CHECK((affine_segment(inst.field, diag, tmid) - inst.field.at(tuple[0])).norm() <
        1e-14);

  SplitMix64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    RVec t(2);
    t << rng.next_double(), 0.0;
    t(1) = rng.next_double() * (1.0 - t(0));
    const MatrixOverAlgebra a = affine_segment(inst.field, tuple, t);
    CHECK((a - inst.field.at(tuple[0])).norm() <= 0.25 + 1e-9);
    const MatrixOverAlgebra e = spectral_projection_field(inst.field, tuple, t);
    CHECK((e - oracles::eigenprojection(a)).norm() < 1e-9);
    CHECK((mul(e, e) - e).norm() < 1e-9);
    CHECK((e.adjoint() - e).norm() < 1e-9);
  }
  CHECK((spectral_projection_field(inst.field, tuple, t0) - inst.field.at(tuple[0]))
            .norm() < 1e-12);

  // Oscillation precondition: a far-apart pair of points violates the bound.
  ProjectionField jumpy = inst.field;
  Mat far = Mat::Identity(jumpy.at(0).dim(), jumpy.at(0).dim());
  jumpy.value[static_cast<std::size_t>(tuple[1])] =
      MatrixOverAlgebra(ga.algebra, 2, {far});
  CHECK_THROWS_WITH_AS(affine_segment(jumpy, tuple, tmid),
                       doctest::Contains("oscillation"), Error);
}

TEST_CASE("partial derivatives match finite differences") {
  const GroupAlgebra ga = group_algebra(GroupTable::cyclic(2));
  CircleInstance inst(ga.algebra, 2, 1, 33);
  const auto tuple = first_nondegenerate(*inst.t2);

  // Constant field: all derivatives vanish.
  const ProjectionField constant = constant_field(
      inst.space.num_points(), inst.field.at(tuple[0]));
  RVec t(2);
  t << 0.2, 0.3;
  for (const auto& d : partial_derivatives_e(constant, tuple, t))
    CHECK(d.norm() < 1e-13);

  // One repeated endpoint: that slot's derivative vanishes.
  const std::vector<int> repeated = {tuple[0], tuple[0], tuple[2]};
  const auto reps = partial_derivatives_e(inst.field, repeated, t);
  CHECK(reps[0].norm() < 1e-13);

  const auto analytic = partial_derivatives_e(inst.field, tuple, t);
  const auto numeric =
      oracles::finite_difference_derivatives(inst.field, tuple, t, 1e-5);
  const MatrixOverAlgebra e = spectral_projection_field(inst.field, tuple, t);
  for (int s = 0; s < 2; ++s) {
    CHECK((analytic[s] - numeric[s]).norm() < 1e-6);
    // Derivative of the idempotent relation: e (d_s e) e = 0.
    CHECK(mul(mul(e, analytic[s]), e).norm() < 1e-9);
  }
}

TEST_CASE("chern cochain: degree 0, constants, reality, degree cap") {
  const GroupAlgebra ga = group_algebra(GroupTable::cyclic(3));
  CircleInstance inst(ga.algebra, 2, 2, 55);

  auto t0 = std::make_shared<CoverTupleSet>(
      enumerate_tuples(inst.cover, 0, {.total = 0, .seed = 1}));
  const Cochain ch0 = chern_cochain(inst.field, 0, inst.cover, t0);
  for (int i = 0; i < ch0.values.size(); ++i)
    CHECK(std::abs(ch0.values(i) - 2.0 / 3.0) < 1e-10);  // rank 2 of 6, normalized

  const ProjectionField constant =
      constant_field(inst.space.num_points(), inst.field.at(0));
  const Cochain flat = chern_cochain(constant, 1, inst.cover, inst.t2);
  CHECK(flat.sup_norm() == 0.0);

  CHECK_THROWS_WITH_AS(chern_cochain(inst.field, 3, inst.cover, inst.t2),
                       doctest::Contains("n = 0, 1, 2"), Error);

  const Cochain ch2 = chern_cochain(inst.field, 1, inst.cover, inst.t2);
  CHECK(cocycle_residual(ch2, inst.t3) < 1e-8);
}

TEST_CASE("chern additivity and multiplicativity at the cochain level") {
  const GroupAlgebra ga = group_algebra(GroupTable::cyclic(3));
  CircleInstance inst(ga.algebra, 2, 1, 91);
  SplitMix64 rng(92);
  const ProjectionField other =
      oracles::smooth_field(rng, ga.algebra, inst.space, 2, 2, 0.1);

  OpenCover cover = refine_until_oscillation(
      inst.cover, oscillation_metric(direct_sum_field(inst.field, other)), 0.25);
  cover = refine_until_oscillation(cover, oscillation_metric(other), 0.25);
  auto t3 = std::make_shared<CoverTupleSet>(
      enumerate_tuples(cover, 3, {.total = inst.space.num_points() + 4, .seed = 8}));
  const CoverTupleSet faces = face_closure(cover, *t3);
  auto t2 = std::make_shared<CoverTupleSet>(
      enumerate_tuples(cover, 2, {.total = faces.size() + 10, .seed = 9}, faces.tuples));

  const Cochain lhs =
      chern_cochain(direct_sum_field(inst.field, other), 1, cover, t2);
  const Cochain a = chern_cochain(inst.field, 1, cover, t2);
  const Cochain b = chern_cochain(other, 1, cover, t2);
  CHECK((lhs.values - a.values - b.values).cwiseAbs().maxCoeff() < 1e-10);

  // Multiplicativity: scalar field tensor a fixed projection over A.
  SplitMix64 rng2(17);
  const ProjectionField scalar =
      oracles::smooth_field(rng2, SiteAlgebra::trivial(), inst.space, 2, 1, 0.12);
  const MatrixOverAlgebra q = oracles::random_projection(rng2, ga.algebra, 2, 3);
  const ProjectionField tensored = tensor_projection(scalar, q);
  tensored.validate(1e-8);

  OpenCover cover2 =
      refine_until_oscillation(inst.cover, oscillation_metric(scalar), 0.25);
  cover2 = refine_until_oscillation(cover2, oscillation_metric(tensored), 0.25);
  auto u3 = std::make_shared<CoverTupleSet>(
      enumerate_tuples(cover2, 3, {.total = inst.space.num_points() + 4, .seed = 18}));
  const CoverTupleSet ufaces = face_closure(cover2, *u3);
  auto u2 = std::make_shared<CoverTupleSet>(enumerate_tuples(
      cover2, 2, {.total = ufaces.size() + 10, .seed = 19}, ufaces.tuples));

  const Cochain big = chern_cochain(tensored, 1, cover2, u2);
  const Cochain small = chern_cochain(scalar, 1, cover2, u2);
  const double phi_q = trace_phi(q).real();
  CHECK((big.values - phi_q * small.values).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(small.sup_norm() > 1e-6);  // the control is not vacuous
}

TEST_CASE("tensor projection block structure") {
  const GroupAlgebra ga = group_algebra(GroupTable::cyclic(2));
  SplitMix64 rng(3);
  const SampledSpace s1 = circle_space(6);
  const ProjectionField p =
      oracles::smooth_field(rng, SiteAlgebra::trivial(), s1, 2, 1, 0.1);

  // q = 1: the result is p in every diagonal block.
  const MatrixOverAlgebra one = MatrixOverAlgebra::identity(ga.algebra, 1);
  const ProjectionField pq = tensor_projection(p, one);
  CHECK(pq.size == 2);
  for (int x = 0; x < 6; ++x)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const Mat block = pq.at(x).at(0).block(a * 2, b * 2, 2, 2);
        CHECK(std::abs(block(0, 0) - p.at(x).at(0)(a, b)) < 1e-14);
        CHECK(std::abs(block(1, 1) - p.at(x).at(0)(a, b)) < 1e-14);
        CHECK(std::abs(block(0, 1)) + std::abs(block(1, 0)) < 1e-14);
      }

  // p = 1: constant field equal to q.
  auto triv = SiteAlgebra::trivial();
  const ProjectionField ones = constant_field(6, MatrixOverAlgebra::identity(triv, 1));
  const MatrixOverAlgebra q = oracles::random_projection(rng, ga.algebra, 2, 2);
  const ProjectionField qf = tensor_projection(ones, q);
  for (int x = 0; x < 6; ++x) CHECK((qf.at(x) - q).norm() < 1e-12);

  CHECK_THROWS_AS(tensor_projection(p, oracles::random_element(rng, ga.algebra, 2)),
                  Error);
}

TEST_CASE("coboundary solve: exact classes, trivialized bundles, Bott obstruction") {
  const SampledSpace s1 = circle_space(14);
  auto [cover, chi] = build_cover(s1, 1.0);
  auto t2 = std::make_shared<CoverTupleSet>(
      enumerate_tuples(cover, 2, {.total = 60, .seed = 12}));
  auto t1 = std::make_shared<CoverTupleSet>(face_closure(cover, *t2));

  SplitMix64 rng(13);
  Cochain g{1, t1, RVec::Zero(t1->size())};
  for (int i = 0; i < t1->size(); ++i) g.values(i) = rng.next_double(-1, 1);
  const Cochain dg = coboundary(g, t2);
  const CoboundarySolve solve = solve_coboundary(dg, cover);
  CHECK(solve.residual_inf < 1e-10);
  CHECK((coboundary(solve.f, t2).values - dg.values).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("sphere: Bott class versus a globally trivialized companion") {
  const SampledSpace sphere = sphere_space(2);
  const OpenCover cover = face_cover(sphere);
  const ProjectionField bott = bott_field(sphere);

  const auto orderings = chain_tuple_orderings(sphere.chains.at(2));
  auto t3 = std::make_shared<CoverTupleSet>(
      enumerate_tuples(cover, 3, {.total = sphere.num_points() + 40, .seed = 2}));
  std::vector<std::vector<int>> mids = face_closure(cover, *t3).tuples;
  mids.insert(mids.end(), orderings.begin(), orderings.end());
  auto t2 = std::make_shared<CoverTupleSet>(enumerate_tuples(
      cover, 2, {.total = static_cast<int>(mids.size()), .seed = 3}, mids));

  const Cochain ch = chern_cochain(bott, 1, cover, t2);
  CHECK(cocycle_residual(ch, t3) < 1e-8);

  // Pairing with the fundamental chain: +1, matching the lattice Berry-phase
  // oracle on the same mesh.
  const double pairing = pair_with_chain(ch, sphere.chains.at(2));
  const double oracle = oracles::berry_chern_number(bott, sphere.chains.at(2));
  CHECK(std::abs(oracle - 1.0) < 1e-6);
  CHECK(std::abs(pairing - 1.0) < 0.05);
  CHECK(std::abs(pairing - oracle) < 0.05);

  // A coboundary pairs to zero against the fundamental cycle.
  SplitMix64 rng(4);
  auto t1 = std::make_shared<CoverTupleSet>(face_closure(cover, *t2));
  Cochain g{1, t1, RVec::Zero(t1->size())};
  for (int i = 0; i < t1->size(); ++i) g.values(i) = rng.next_double(-1, 1);
  CHECK(std::abs(pair_with_chain(coboundary(g, t2), sphere.chains.at(2))) < 1e-8);

  // Zero cochain pairs to zero.
  Cochain zero{2, t2, RVec::Zero(t2->size())};
  CHECK(pair_with_chain(zero, sphere.chains.at(2)) == 0.0);

  // Bott: the least-squares certificate stays bounded away from zero.
  const CoboundarySolve obstructed = solve_coboundary(ch, cover);
  CHECK(obstructed.residual_inf >= 0.1 * obstructed.rhs_inf);

  // Globally conjugated companion of the same rank: class zero, so the
  // certificate collapses.
  ProjectionField trivial;
  trivial.algebra = SiteAlgebra::trivial();
  trivial.size = 2;
  for (int x = 0; x < sphere.num_points(); ++x) {
    const double s = 0.35 * sphere.points(x, 0);
    Mat h(2, 2);
    h << 0.0, cplx(0.6, -0.3), cplx(0.6, 0.3), 0.2;
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Mat u = Mat::Zero(2, 2);
    for (int i = 0; i < 2; ++i)
      u += std::polar(1.0, s * es.eigenvalues()(i)) * es.eigenvectors().col(i) *
           es.eigenvectors().col(i).adjoint();
    Mat diag = Mat::Zero(2, 2);
    diag(0, 0) = 1.0;
    trivial.value.emplace_back(trivial.algebra, 2, std::vector<Mat>{u * diag * u.adjoint()});
  }
  const Cochain cht = chern_cochain(trivial, 1, cover, t2);
  const CoboundarySolve cleared = solve_coboundary(cht, cover);
  CHECK(cleared.residual_inf < 1e-6);
  CHECK(std::abs(pair_with_chain(cht, sphere.chains.at(2))) < 0.05);
}

TEST_CASE("quadrature convergence of the chern cochain") {
  const GroupAlgebra ga = group_algebra(GroupTable::cyclic(2));
  CircleInstance inst(ga.algebra, 2, 1, 71);

  ChernOptions coarse;
  coarse.simplex_points_per_axis = 16;
  ChernOptions fine;
  fine.simplex_points_per_axis = 32;
  const Cochain a = chern_cochain(inst.field, 1, inst.cover, inst.t2, coarse);
  const Cochain b = chern_cochain(inst.field, 1, inst.cover, inst.t2, fine);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-6);

  ChernOptions contour_fine;
  contour_fine.contour.nodes = 128;
  const Cochain c = chern_cochain(inst.field, 1, inst.cover, inst.t2, contour_fine);
  CHECK((a.values - c.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("n = 2 chern cochain: constant fields vanish, varying fields close") {
  const GroupAlgebra ga = group_algebra(GroupTable::cyclic(2));
  const SampledSpace s1 = circle_space(8);
  auto [cover, chi] = build_cover(s1, 0.9);
  SplitMix64 rng(88);
  const ProjectionField constant =
      constant_field(8, oracles::random_projection(rng, ga.algebra, 1, 1));
  auto t4 = std::make_shared<CoverTupleSet>(
      enumerate_tuples(cover, 4, {.total = 12, .seed = 1}));
  const Cochain ch4 = chern_cochain(constant, 2, cover, t4);
  CHECK(ch4.sup_norm() == 0.0);

  // A genuinely varying field: degree-4 values are real and the cocycle
  // identity holds through the 24-permutation antisymmetrized trace.
  const SampledSpace circle = circle_space(16);
  SplitMix64 rng2(89);
  const ProjectionField field =
      oracles::smooth_field(rng2, SiteAlgebra::trivial(), circle, 2, 1, 0.05);
  OpenCover cover2 = build_cover(circle, 1.2).first;
  cover2 = refine_until_oscillation(cover2, oscillation_metric(field), 0.25);
  auto t5 = std::make_shared<CoverTupleSet>(
      enumerate_tuples(cover2, 5, {.total = circle.num_points() + 2, .seed = 4}));
  auto t4b = std::make_shared<CoverTupleSet>(face_closure(cover2, *t5));
  ChernOptions opts;
  opts.simplex_points_per_axis = 6;  // keep the 4-dimensional rule small
  const Cochain ch4b = chern_cochain(field, 2, cover2, t4b, opts);
  CHECK(cocycle_residual(ch4b, t5) < 1e-8);
}
