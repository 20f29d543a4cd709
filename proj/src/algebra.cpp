#include "aschern/algebra.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

namespace aschern {

namespace {

void require_same_shape(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b,
                        const char* where) {
  if (!a.parent()->same_structure(*b.parent()) || a.size() != b.size()) {
    std::ostringstream msg;
    msg << where << ": operands live in different matrix algebras (size " << a.size()
        << " vs " << b.size() << ")";
    throw DimensionMismatch(msg.str());
  }
}

}  // namespace

SiteAlgebra::SiteAlgebra(int num_sites, int block_dim, std::vector<double> weights)
    : num_sites_(num_sites), block_dim_(block_dim), weights_(std::move(weights)) {
  if (num_sites_ <= 0 || block_dim_ <= 0)
    throw Error("SiteAlgebra: need at least one site and positive block dimension");
  if (static_cast<int>(weights_.size()) != num_sites_)
    throw DimensionMismatch("SiteAlgebra: one weight per site required");
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0)) throw Error("SiteAlgebra: weights must be strictly positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw Error("SiteAlgebra: weights must sum to 1");
}

SiteAlgebraPtr SiteAlgebra::trivial() {
  return std::make_shared<const SiteAlgebra>(1, 1, std::vector<double>{1.0});
}

SiteAlgebraPtr SiteAlgebra::full_matrix(int k) {
  return std::make_shared<const SiteAlgebra>(1, k, std::vector<double>{1.0});
}

bool SiteAlgebra::same_structure(const SiteAlgebra& other) const {
  if (this == &other) return true;
  if (num_sites_ != other.num_sites_ || block_dim_ != other.block_dim_) return false;
  for (int s = 0; s < num_sites_; ++s)
    if (weights_[static_cast<std::size_t>(s)] != other.weights_[static_cast<std::size_t>(s)])
      return false;
  return true;
}

MatrixOverAlgebra::MatrixOverAlgebra()
    : parent_(SiteAlgebra::trivial()), size_(1), data_{Mat::Zero(1, 1)} {}

MatrixOverAlgebra::MatrixOverAlgebra(SiteAlgebraPtr parent, int size,
                                     std::vector<Mat> data)
    : parent_(std::move(parent)), size_(size), data_(std::move(data)) {
  if (size_ <= 0) throw DimensionMismatch("MatrixOverAlgebra: size must be positive");
  if (static_cast<int>(data_.size()) != parent_->num_sites())
    throw DimensionMismatch("MatrixOverAlgebra: one matrix per site required");
  const int d = dim();
  for (const Mat& m : data_)
    if (m.rows() != d || m.cols() != d)
      throw DimensionMismatch("MatrixOverAlgebra: site matrix has wrong dimension");
}

MatrixOverAlgebra MatrixOverAlgebra::zero(SiteAlgebraPtr parent, int size) {
  const int d = size * parent->block_dim();
  std::vector<Mat> data(static_cast<std::size_t>(parent->num_sites()), Mat::Zero(d, d));
  return MatrixOverAlgebra(std::move(parent), size, std::move(data));
}

MatrixOverAlgebra MatrixOverAlgebra::identity(SiteAlgebraPtr parent, int size) {
  const int d = size * parent->block_dim();
  std::vector<Mat> data(static_cast<std::size_t>(parent->num_sites()),
                        Mat::Identity(d, d));
  return MatrixOverAlgebra(std::move(parent), size, std::move(data));
}

MatrixOverAlgebra MatrixOverAlgebra::adjoint() const {
  std::vector<Mat> data;
  data.reserve(data_.size());
  for (const Mat& m : data_) data.push_back(m.adjoint());
  return MatrixOverAlgebra(parent_, size_, std::move(data));
}

double MatrixOverAlgebra::norm() const {
  double best = 0.0;
  for (const Mat& m : data_) best = std::max(best, op_norm(m));
  return best;
}

Mat MatrixOverAlgebra::block(int site, int i, int j, int b) const {
  const int bd = b * parent_->block_dim();
  return data_[static_cast<std::size_t>(site)].block(i * bd, j * bd, bd, bd);
}

MatrixOverAlgebra& MatrixOverAlgebra::operator+=(const MatrixOverAlgebra& rhs) {
  require_same_shape(*this, rhs, "add");
  for (std::size_t s = 0; s < data_.size(); ++s) data_[s] += rhs.data_[s];
  return *this;
}

MatrixOverAlgebra& MatrixOverAlgebra::operator-=(const MatrixOverAlgebra& rhs) {
  require_same_shape(*this, rhs, "sub");
  for (std::size_t s = 0; s < data_.size(); ++s) data_[s] -= rhs.data_[s];
  return *this;
}

MatrixOverAlgebra& MatrixOverAlgebra::operator*=(cplx scale) {
  for (Mat& m : data_) m *= scale;
  return *this;
}

MatrixOverAlgebra mul(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b) {
  require_same_shape(a, b, "mul");
  std::vector<Mat> data;
  data.reserve(static_cast<std::size_t>(a.parent()->num_sites()));
  for (int s = 0; s < a.parent()->num_sites(); ++s) data.push_back(a.at(s) * b.at(s));
  return MatrixOverAlgebra(a.parent(), a.size(), std::move(data));
}

cplx trace_phi(const MatrixOverAlgebra& a) {
  cplx acc = 0.0;
  const double k = static_cast<double>(a.parent()->block_dim());
  for (int s = 0; s < a.parent()->num_sites(); ++s)
    acc += a.parent()->weight(s) * a.at(s).trace() / k;
  return acc;
}

MatrixOverAlgebra direct_sum(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b) {
  if (!a.parent()->same_structure(*b.parent()))
    throw DimensionMismatch("direct_sum: different site algebras");
  const int da = a.dim();
  const int db = b.dim();
  std::vector<Mat> data;
  data.reserve(static_cast<std::size_t>(a.parent()->num_sites()));
  for (int s = 0; s < a.parent()->num_sites(); ++s) {
    Mat m = Mat::Zero(da + db, da + db);
    m.topLeftCorner(da, da) = a.at(s);
    m.bottomRightCorner(db, db) = b.at(s);
    data.push_back(std::move(m));
  }
  return MatrixOverAlgebra(a.parent(), a.size() + b.size(), std::move(data));
}

MatrixOverAlgebra contour_spectral_projection(const MatrixOverAlgebra& a,
                                              const ContourOptions& opts) {
  if (opts.nodes < 4) throw Error("contour_spectral_projection: too few nodes");
  const int d = a.dim();
  const double r = 0.5;
  MatrixOverAlgebra out = MatrixOverAlgebra::zero(a.parent(), a.size());
  for (int s = 0; s < a.parent()->num_sites(); ++s) {
    Mat acc = Mat::Zero(d, d);
    for (int j = 0; j < opts.nodes; ++j) {
      const double theta = 2.0 * std::numbers::pi * j / opts.nodes;
      const cplx phase = std::polar(1.0, theta);
      const cplx lambda = 1.0 + r * phase;
      Eigen::PartialPivLU<Mat> lu(lambda * Mat::Identity(d, d) - a.at(s));
      Mat resolvent = lu.inverse();
      if (!resolvent.allFinite() ||
          resolvent.cwiseAbs().maxCoeff() * d > opts.resolvent_norm_limit) {
        std::ostringstream msg;
        msg << "contour pierced: resolvent blow-up at node " << j << " (site " << s
            << ")";
        throw ContourPierced(msg.str());
      }
      acc += (r / opts.nodes) * phase * resolvent;
    }
    out.at(s) = acc;
  }
  return out;
}

MatrixOverAlgebra idempotent_to_projection(const MatrixOverAlgebra& e,
                                           double idempotency_tol) {
  const double res = (mul(e, e) - e).norm();
  if (res > idempotency_tol) {
    std::ostringstream msg;
    msg << "idempotent_to_projection: |e^2 - e| = " << res << " exceeds "
        << idempotency_tol;
    throw Error(msg.str());
  }
  const MatrixOverAlgebra es = e.adjoint();
  const int d = e.dim();
  std::vector<Mat> data;
  data.reserve(static_cast<std::size_t>(e.parent()->num_sites()));
  for (int s = 0; s < e.parent()->num_sites(); ++s) {
    const Mat& m = e.at(s);
    const Mat ms = es.at(s);
    Mat denom = Mat::Identity(d, d) + (m - ms) * (ms - m);
    data.push_back(m * ms * denom.partialPivLu().inverse());
  }
  return MatrixOverAlgebra(e.parent(), e.size(), std::move(data));
}

// ---------------------------------------------------------------------------

void GroupTable::validate() {
  const int n = order();
  if (n <= 0) throw Error("group table: empty");
  for (const auto& row : mul) {
    if (static_cast<int>(row.size()) != n) throw Error("group table: ragged table");
    for (int v : row)
      if (v < 0 || v >= n) throw Error("group table: entry out of range");
  }
  identity_ = -1;
  for (int e = 0; e < n; ++e) {
    bool ok = true;
    for (int g = 0; g < n; ++g)
      if (product(e, g) != g || product(g, e) != g) {
        ok = false;
        break;
      }
    if (ok) {
      identity_ = e;
      break;
    }
  }
  if (identity_ < 0) throw Error("group table: no identity element");
  inverse_.assign(static_cast<std::size_t>(n), -1);
  for (int g = 0; g < n; ++g) {
    for (int h = 0; h < n; ++h)
      if (product(g, h) == identity_ && product(h, g) == identity_) {
        inverse_[static_cast<std::size_t>(g)] = h;
        break;
      }
    if (inverse_[static_cast<std::size_t>(g)] < 0)
      throw Error("group table: non-invertible element");
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (product(product(a, b), c) != product(a, product(b, c)))
          throw Error("group table: non-associative");
}

GroupTable GroupTable::cyclic(int n) {
  GroupTable t;
  t.mul.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
  for (int g = 0; g < n; ++g)
    for (int h = 0; h < n; ++h) t.mul[static_cast<std::size_t>(g)][static_cast<std::size_t>(h)] = (g + h) % n;
  t.validate();
  return t;
}

GroupTable GroupTable::symmetric3() {
  // Permutations of {0,1,2} in lexicographic one-line order.
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                           {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  auto index_of = [&](const int p[3]) {
    for (int i = 0; i < 6; ++i)
      if (perms[i][0] == p[0] && perms[i][1] == p[1] && perms[i][2] == p[2]) return i;
    return -1;
  };
  GroupTable t;
  t.mul.assign(6, std::vector<int>(6));
  for (int g = 0; g < 6; ++g)
    for (int h = 0; h < 6; ++h) {
      int comp[3];
      for (int x = 0; x < 3; ++x) comp[x] = perms[g][perms[h][x]];
      t.mul[static_cast<std::size_t>(g)][static_cast<std::size_t>(h)] = index_of(comp);
    }
  t.validate();
  return t;
}

GroupTable GroupTable::dihedral(int n) {
  // Elements (r, f) with r in Z/n, f in {0,1}; index = r + n*f.
  const int order = 2 * n;
  GroupTable t;
  t.mul.assign(static_cast<std::size_t>(order), std::vector<int>(static_cast<std::size_t>(order)));
  auto idx = [n](int r, int f) { return ((r % n + n) % n) + n * f; };
  for (int r1 = 0; r1 < n; ++r1)
    for (int f1 = 0; f1 < 2; ++f1)
      for (int r2 = 0; r2 < n; ++r2)
        for (int f2 = 0; f2 < 2; ++f2) {
          // (r1,f1)*(r2,f2) = (r1 + (-1)^{f1} r2, f1+f2)
          const int r = f1 == 0 ? r1 + r2 : r1 - r2;
          t.mul[static_cast<std::size_t>(idx(r1, f1))][static_cast<std::size_t>(idx(r2, f2))] =
              idx(r, (f1 + f2) % 2);
        }
  t.validate();
  return t;
}

GroupTable GroupTable::by_name(const std::string& name) {
  if (name == "S3") return symmetric3();
  if (name.size() >= 2 && name[0] == 'Z') return cyclic(std::stoi(name.substr(1)));
  if (name.size() >= 2 && name[0] == 'D') return dihedral(std::stoi(name.substr(1)));
  throw Error("unknown group name: " + name);
}

GroupAlgebra group_algebra(GroupTable table) {
  table.validate();
  const int n = table.order();
  GroupAlgebra ga;
  ga.algebra = SiteAlgebra::full_matrix(n);
  ga.table = table;
  ga.lambda.reserve(static_cast<std::size_t>(n));
  for (int g = 0; g < n; ++g) {
    Mat m = Mat::Zero(n, n);
    for (int h = 0; h < n; ++h) m(table.product(g, h), h) = 1.0;
    ga.lambda.push_back(AlgebraElement(ga.algebra, 1, {std::move(m)}));
  }
  return ga;
}

SiteAlgebraPtr circle_algebra(int grid_size) {
  if (grid_size < 1) throw Error("circle_algebra: grid_size must be >= 1");
  std::vector<double> w(static_cast<std::size_t>(grid_size), 1.0 / grid_size);
  // Renormalize exactly so the weight-sum invariant holds at any N.
  double sum = 0.0;
  for (double x : w) sum += x;
  for (double& x : w) x /= sum;
  return std::make_shared<const SiteAlgebra>(grid_size, 1, std::move(w));
}

cplx circle_site(int grid_size, int s) {
  return std::polar(1.0, 2.0 * std::numbers::pi * s / grid_size);
}

AlgebraElement circle_element(const SiteAlgebraPtr& alg,
                              const std::function<cplx(cplx)>& f) {
  std::vector<Mat> data;
  data.reserve(static_cast<std::size_t>(alg->num_sites()));
  for (int s = 0; s < alg->num_sites(); ++s) {
    Mat m(1, 1);
    m(0, 0) = f(circle_site(alg->num_sites(), s));
    data.push_back(std::move(m));
  }
  return AlgebraElement(alg, 1, std::move(data));
}

}  // namespace aschern
