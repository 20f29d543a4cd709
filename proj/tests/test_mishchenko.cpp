#include "aschern/mishchenko.hpp"
#include "aschern/config.hpp"

#include <doctest.h>

#include "oracles.hpp"

using namespace aschern;

namespace {

PrincipalBundle triple_cover() { return cyclic_cover_circle(48, 3); }

}  // namespace

TEST_CASE("principal bundle validation") {
  PrincipalBundle b = triple_cover();
  CHECK(b.total.num_points() == 144);
  CHECK(b.fibers[0].size() == 3);
  CHECK(b.group_element_between(0, 48) == 1);

  // A non-free action is rejected (all elements acting trivially still forms
  // a right action, so freeness is the check that trips).
  PrincipalBundle broken = b;
  broken.action[1] = broken.action[0];
  broken.action[2] = broken.action[0];
  CHECK_THROWS_WITH_AS(broken.validate(), doctest::Contains("free"), Error);
}

TEST_CASE("Y module: inner product, left action, rank-one isomorphism") {
  const PrincipalBundle b = triple_cover();
  SplitMix64 rng(5);
  const int ny = b.total.num_points();

  {
    // Indicator of a point: the inner product is the indicator of its image.
    CVec delta = CVec::Zero(ny);
    delta(10) = 1.0;
    const CVec inner = y_inner(b, delta, delta);
    for (int x = 0; x < b.base.num_points(); ++x)
      CHECK(std::abs(inner(x) - (x == b.quotient[10] ? 1.0 : 0.0)) < 1e-15);
  }

  for (int trial = 0; trial < 5; ++trial) {
    const CVec xi = random_cvec(rng, ny);
    const CVec zeta = random_cvec(rng, ny);
    CHECK((y_inner(b, xi, zeta) - oracles::brute_y_inner(b, xi, zeta))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    for (int g = 0; g < 3; ++g)
      CHECK((y_inner(b, z_group_action(b, g, xi), z_group_action(b, g, zeta)) -
             y_inner(b, xi, zeta))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
    CHECK(y_inner(b, xi, xi).real().minCoeff() >= 0.0);
  }

  // Theta_{xi,zeta} acts exactly like its crossed-product image.
  for (int trial = 0; trial < 5; ++trial) {
    const CVec xi = random_cvec(rng, ny);
    const CVec zeta = random_cvec(rng, ny);
    const CrossedFunction theta = rank_one_to_crossed(b, xi, zeta);
    for (int basis = 0; basis < ny; basis += 17) {
      CVec v = CVec::Zero(ny);
      v(basis) = 1.0;
      const CVec inner = y_inner(b, zeta, v);
      CVec direct(ny);
      for (int y = 0; y < ny; ++y) direct(y) = xi(y) * inner(b.quotient[y]);
      CHECK((y_left_action(b, theta, v) - direct).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  {
    // zeta = 0 gives the zero element; same-fiber indicators give one term.
    const CVec zero = CVec::Zero(ny);
    const CrossedFunction image = rank_one_to_crossed(b, random_cvec(rng, ny), zero);
    for (const auto& slot : image) CHECK(slot.cwiseAbs().maxCoeff() == 0.0);

    CVec e1 = CVec::Zero(ny), e2 = CVec::Zero(ny);
    e1(7) = 1.0;
    e2(b.act(1, 7)) = 1.0;  // the fiber-mate one step around
    const CrossedFunction single = rank_one_to_crossed(b, e1, e2);
    int nonzero_slots = 0;
    for (int g = 0; g < 3; ++g)
      if (single[static_cast<std::size_t>(g)].cwiseAbs().maxCoeff() > 0.0)
        ++nonzero_slots;
    CHECK(nonzero_slots == 1);
    CHECK(std::abs(single[1](7) - 1.0) < 1e-15);
  }
}

TEST_CASE("Z module group action is a unitary homomorphism") {
  const PrincipalBundle b = triple_cover();
  SplitMix64 rng(6);
  const CVec xi = random_cvec(rng, b.total.num_points());
  CHECK((z_group_action(b, b.group.identity(), xi) - xi).cwiseAbs().maxCoeff() == 0.0);
  for (int g = 0; g < 3; ++g) {
    const CVec inv = z_group_action(b, b.group.inverse(g), z_group_action(b, g, xi));
    CHECK((inv - xi).cwiseAbs().maxCoeff() == 0.0);
    for (int h = 0; h < 3; ++h)
      CHECK((z_group_action(b, g, z_group_action(b, h, xi)) -
             z_group_action(b, b.group.product(g, h), xi))
                .cwiseAbs()
                .maxCoeff() == 0.0);
  }
}

TEST_CASE("M module: identity slot, positivity, frame identities") {
  const PrincipalBundle b = triple_cover();
  SplitMix64 rng(7);
  const int ny = b.total.num_points();
  const CVec xi = random_cvec(rng, ny);
  const CVec zeta = random_cvec(rng, ny);

  const Mat mv = m_inner_values(b, xi, zeta);
  CHECK((mv.row(b.group.identity()).transpose() - y_inner(b, xi, zeta))
            .cwiseAbs()
            .maxCoeff() < 1e-13);

  // Positivity through the group-algebra representation.
  const MatrixOverAlgebra gram = m_inner(b, xi, xi);
  for (int s = 0; s < gram.parent()->num_sites(); ++s) {
    Eigen::SelfAdjointEigenSolver<Mat> es(gram.at(s));
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }

  const OpenCover cover = arc_cover(b.base, 3, 75.0);
  const PartitionOfUnity chi = partition_subordinate(b.base, cover);
  const MishchenkoFrame frame = mishchenko_frame(b, cover, chi);

  // Gram entries are sqrt(chi_i chi_j) lambda_{g_ij}; compare against the
  // flat-bundle projection built from the derived cocycle.
  const GroupAlgebra ga = group_algebra(b.group);
  const UnitaryCocycle cocycle = frame_cocycle(b, frame, ga, cover);
  const FlatProjection fp = build_flat_projection(cocycle, chi);
  const int G = 3;
  double worst = 0.0;
  for (int x = 0; x < b.base.num_points(); ++x) {
    Mat gramx = Mat::Zero(3 * G, 3 * G);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const Mat vals = m_inner_values(b, frame.sqrt_rho[i], frame.sqrt_rho[j]);
        for (int t = 0; t < G; ++t)
          for (int h = 0; h < G; ++h)
            gramx(i * G + b.group.product(t, h), j * G + h) += vals(t, x).real();
      }
    worst = std::max(worst, (gramx - fp.p_A.at(x).at(0)).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-12);

  // The derived transitions are not all trivial: the cover is glued with a
  // genuine monodromy.
  bool nontrivial = false;
  for (const auto& [key, g_of] : frame.transition)
    for (const auto& [x, g] : g_of)
      if (g != b.group.identity()) nontrivial = true;
  CHECK(nontrivial);

  // Frame reconstruction.
  for (int trial = 0; trial < 5; ++trial) {
    const CVec v = random_cvec(rng, ny);
    CVec rebuilt = CVec::Zero(ny);
    for (int i = 0; i < 3; ++i) {
      const Mat coeff = m_inner_values(b, frame.sqrt_rho[i], v);
      CrossedFunction f(3, CVec::Zero(b.base.num_points()));
      for (int g = 0; g < 3; ++g) f[static_cast<std::size_t>(g)] = coeff.row(g).transpose();
      rebuilt += m_right_action(b, frame.sqrt_rho[i], f);
    }
    CHECK((rebuilt - v).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("M right action is adjointable: <xi.f|zeta> = f* <xi|zeta>") {
  const PrincipalBundle b = triple_cover();
  SplitMix64 rng(23);
  const int ny = b.total.num_points();
  const int G = 3;

  // Product and star on C(X) (x) C[G] in the (group element, base point)
  // value table picture.
  auto convolve = [&](const Mat& a, const Mat& c) {
    Mat out = Mat::Zero(G, b.base.num_points());
    for (int t = 0; t < G; ++t)
      for (int s = 0; s < G; ++s) {
        const int rest = b.group.product(b.group.inverse(s), t);
        out.row(t) += a.row(s).cwiseProduct(c.row(rest));
      }
    return out;
  };
  auto star = [&](const Mat& a) {
    Mat out(G, b.base.num_points());
    for (int t = 0; t < G; ++t)
      out.row(t) = a.row(b.group.inverse(t)).conjugate();
    return out;
  };

  for (int trial = 0; trial < 5; ++trial) {
    const CVec xi = random_cvec(rng, ny);
    const CVec zeta = random_cvec(rng, ny);
    CrossedFunction f;
    Mat f_values(G, b.base.num_points());
    for (int g = 0; g < G; ++g) {
      f.push_back(random_cvec(rng, b.base.num_points()));
      f_values.row(g) = f.back().transpose();
    }
    const Mat lhs = m_inner_values(b, m_right_action(b, xi, f), zeta);
    const Mat rhs = convolve(star(f_values), m_inner_values(b, xi, zeta));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);

    // Conjugate symmetry of the inner product.
    const Mat fwd = m_inner_values(b, xi, zeta);
    const Mat bwd = m_inner_values(b, zeta, xi);
    CHECK((fwd - star(bwd)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("crossed module: identity-supported reduction and positivity") {
  const PrincipalBundle b = triple_cover();
  SplitMix64 rng(8);
  const int ny = b.total.num_points();

  // xi supported at g = e: the inner product reduces to the Z-module inner
  // product, concentrated in the identity slot.
  const CVec base = random_cvec(rng, ny);
  std::vector<CVec> xi(3, CVec::Zero(ny));
  xi[static_cast<std::size_t>(b.group.identity())] = base;
  const Mat ci = crossed_inner_values(b, xi, xi);
  const CVec z_inner = y_inner(b, base, base);
  for (int t = 0; t < 3; ++t) {
    if (t == b.group.identity())
      CHECK((ci.row(t).transpose() - z_inner).cwiseAbs().maxCoeff() < 1e-12);
    else
      CHECK(ci.row(t).cwiseAbs().maxCoeff() < 1e-12);
  }

  // Positivity via the eigenvalue oracle.
  std::vector<CVec> random_xi;
  for (int g = 0; g < 3; ++g) random_xi.push_back(random_cvec(rng, ny));
  const MatrixOverAlgebra gram = crossed_inner(b, random_xi, random_xi);
  for (int s = 0; s < gram.parent()->num_sites(); ++s) {
    Eigen::SelfAdjointEigenSolver<Mat> es(gram.at(s));
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }
}

TEST_CASE("Phi: dense-image trick, zero, inner-product preservation") {
  const PrincipalBundle b = triple_cover();
  SplitMix64 rng(9);
  const int ny = b.total.num_points();

  {
    const CVec phi_vec = random_cvec(rng, ny);
    std::vector<CVec> zeta(3, CVec::Zero(ny));
    zeta[static_cast<std::size_t>(b.group.identity())] = phi_vec;
    const CVec psi = CVec::Ones(ny);
    CHECK((phi_iso(b, psi.conjugate(), zeta) - phi_vec).cwiseAbs().maxCoeff() < 1e-13);

    std::vector<CVec> zero(3, CVec::Zero(ny));
    CHECK(phi_iso(b, phi_vec, zero).cwiseAbs().maxCoeff() == 0.0);
  }

  double worst_lib = 0.0, worst_oracle = 0.0;
  for (int pair = 0; pair < 25; ++pair) {
    const CVec xi1 = random_cvec(rng, ny);
    const CVec xi2 = random_cvec(rng, ny);
    std::vector<CVec> z1, z2;
    for (int g = 0; g < 3; ++g) {
      z1.push_back(random_cvec(rng, ny));
      z2.push_back(random_cvec(rng, ny));
    }
    const Mat lhs = tensor_inner_values(b, xi1, z1, xi2, z2);
    const Mat rhs = m_inner_values(b, phi_iso(b, xi1, z1), phi_iso(b, xi2, z2));
    const Mat oracle = oracles::phi_inner_triple_sum(b, xi1, z1, xi2, z2);
    worst_lib = std::max(worst_lib, (lhs - rhs).cwiseAbs().maxCoeff());
    worst_oracle = std::max(worst_oracle, (rhs - oracle).cwiseAbs().maxCoeff());
  }
  CHECK(worst_lib < 1e-10);
  CHECK(worst_oracle < 1e-10);
}

TEST_CASE("mishchenko_verify passes on covers and product bundles") {
  {
    const PrincipalBundle b = triple_cover();
    const OpenCover cover = arc_cover(b.base, 3, 75.0);
    const PartitionOfUnity chi = partition_subordinate(b.base, cover);
    MishchenkoOptions opts;
    opts.random_pairs = 30;
    const MishchenkoReport rep = mishchenko_verify(b, cover, chi, opts);
    CHECK(rep.worst() < 1e-10);
  }
  {
    const PrincipalBundle b = product_bundle(circle_space(24), GroupTable::symmetric3());
    const OpenCover cover = arc_cover(b.base, 2, 100.0);
    const PartitionOfUnity chi = partition_subordinate(b.base, cover);
    MishchenkoOptions opts;
    opts.random_pairs = 10;
    const MishchenkoReport rep = mishchenko_verify(b, cover, chi, opts);
    CHECK(rep.worst() < 1e-10);
  }
}
