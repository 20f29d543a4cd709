#include "aschern/config.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace aschern {

namespace {

const Json& need(const Json& j, const std::string& pointer, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError(pointer + "/" + key, "missing required field");
  return j.at(key);
}

template <typename T>
T need_as(const Json& j, const std::string& pointer, const char* key) {
  const Json& v = need(j, pointer, key);
  try {
    return v.get<T>();
  } catch (const std::exception&) {
    throw ConfigError(pointer + "/" + key, "wrong type");
  }
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const Json& j) {
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  ExperimentConfig cfg;
  cfg.raw = j;
  cfg.task = need_as<std::string>(j, "", "task");
  static const char* tasks[] = {"chern",       "flatness",   "mishchenko-verify",
                                "index",       "cover-lemma", "selftest"};
  bool known = false;
  for (const char* t : tasks)
    if (cfg.task == t) known = true;
  if (!known) throw ConfigError("/task", "unknown task '" + cfg.task + "'");
  cfg.seed = get_or<std::uint64_t>(j, "seed", 1);
  cfg.tol_scale = get_or<double>(j, "tol_scale", 1.0);
  if (!(cfg.tol_scale > 0.0)) throw ConfigError("/tol_scale", "must be positive");
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& ex) {
    throw ConfigError("", std::string("invalid JSON: ") + ex.what());
  }
  return parse(j);
}

SampledSpace space_from_config(const Json& cfg) {
  const Json& s = need(cfg, "", "space");
  if (s.contains("builtin")) {
    const auto name = need_as<std::string>(s, "/space", "builtin");
    if (name == "circle") return circle_space(need_as<int>(s, "/space", "n"));
    if (name == "sphere") return sphere_space(need_as<int>(s, "/space", "subdiv"));
    if (name == "torus")
      return torus_space(need_as<int>(s, "/space", "nu"), need_as<int>(s, "/space", "nv"));
    throw ConfigError("/space/builtin", "unknown builtin '" + name + "'");
  }
  if (s.contains("points")) {
    const auto pts = need_as<std::vector<std::vector<double>>>(s, "/space", "points");
    if (pts.empty()) throw ConfigError("/space/points", "empty point list");
    RMat m(static_cast<int>(pts.size()), static_cast<int>(pts.front().size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pts[i].size() != pts.front().size())
        throw ConfigError("/space/points", "ragged coordinate list");
      for (std::size_t k = 0; k < pts[i].size(); ++k)
        m(static_cast<int>(i), static_cast<int>(k)) = pts[i][k];
    }
    return space_from_points(std::move(m));
  }
  throw ConfigError("/space", "need either 'builtin' or 'points'");
}

OpenCover arc_cover(const SampledSpace& circle, int count, double halfwidth_deg) {
  if (circle.points.cols() != 2)
    throw Error("arc_cover: expects a planar circle sample");
  if (count < 1) throw Error("arc_cover: need at least one arc");
  OpenCover cover;
  cover.sets.resize(static_cast<std::size_t>(count));
  for (int p = 0; p < circle.num_points(); ++p) {
    const double angle =
        std::atan2(circle.points(p, 1), circle.points(p, 0)) * 180.0 / std::numbers::pi;
    for (int i = 0; i < count; ++i) {
      const double center = 360.0 * i / count;
      double delta = std::fmod(std::abs(angle - center), 360.0);
      if (delta > 180.0) delta = 360.0 - delta;
      if (delta <= halfwidth_deg + 1e-9)
        cover.sets[static_cast<std::size_t>(i)].push_back(p);
    }
  }
  cover.validate(circle.num_points());
  return cover;
}

OpenCover face_cover(const SampledSpace& space) {
  auto it = space.chains.find(2);
  if (it == space.chains.end())
    throw Error("face_cover: space carries no 2-chain");
  OpenCover cover;
  for (const auto& t : it->second.tuples) {
    std::vector<int> set(t.begin(), t.end());
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    cover.sets.push_back(std::move(set));
  }
  std::sort(cover.sets.begin(), cover.sets.end());
  cover.sets.erase(std::unique(cover.sets.begin(), cover.sets.end()), cover.sets.end());
  cover.validate(space.num_points());
  return cover;
}

OpenCover cover_from_config(const Json& cfg, const SampledSpace& space) {
  const Json& c = need(cfg, "", "cover");
  if (c.contains("arcs")) {
    const Json& a = c.at("arcs");
    return arc_cover(space, need_as<int>(a, "/cover/arcs", "count"),
                     need_as<double>(a, "/cover/arcs", "halfwidth_deg"));
  }
  if (c.contains("radius"))
    return build_cover(space, need_as<double>(c, "/cover", "radius")).first;
  if (get_or<bool>(c, "faces", false)) return face_cover(space);
  if (c.contains("sets")) {
    OpenCover cover;
    cover.sets = need_as<std::vector<std::vector<int>>>(c, "/cover", "sets");
    for (auto& s : cover.sets) std::sort(s.begin(), s.end());
    cover.validate(space.num_points());
    return cover;
  }
  throw ConfigError("/cover", "need 'arcs', 'radius', 'faces' or 'sets'");
}

PartitionOfUnity partition_from_config(const Json& cfg, const SampledSpace& space,
                                       const OpenCover& cover) {
  if (cfg.contains("partition") && cfg.at("partition").is_object() &&
      cfg.at("partition").contains("chi")) {
    const auto rows = need_as<std::vector<std::vector<double>>>(cfg.at("partition"),
                                                                "/partition", "chi");
    if (static_cast<int>(rows.size()) != cover.num_sets())
      throw ConfigError("/partition/chi", "one row per cover set required");
    RMat chi(cover.num_sets(), space.num_points());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (static_cast<int>(rows[i].size()) != space.num_points())
        throw ConfigError("/partition/chi", "one column per point required");
      for (int x = 0; x < space.num_points(); ++x)
        chi(static_cast<int>(i), x) = rows[i][static_cast<std::size_t>(x)];
    }
    PartitionOfUnity part{std::move(chi)};
    part.validate(cover);
    return part;
  }
  return partition_subordinate(space, cover);
}

SiteAlgebraPtr algebra_from_config(const Json& cfg, GroupAlgebra* group_out) {
  const Json& a = need(cfg, "", "algebra");
  const auto type = need_as<std::string>(a, "/algebra", "type");
  if (type == "group") {
    GroupTable table;
    if (a.contains("name")) {
      try {
        table = GroupTable::by_name(a.at("name").get<std::string>());
      } catch (const std::exception& ex) {
        throw ConfigError("/algebra/name", ex.what());
      }
    } else if (a.contains("table")) {
      table.mul = need_as<std::vector<std::vector<int>>>(a, "/algebra", "table");
      try {
        table.validate();
      } catch (const std::exception& ex) {
        throw ConfigError("/algebra/table", ex.what());
      }
    } else {
      throw ConfigError("/algebra", "group algebra needs 'name' or 'table'");
    }
    GroupAlgebra ga = group_algebra(std::move(table));
    if (group_out) *group_out = ga;
    return ga.algebra;
  }
  if (type == "circle") return circle_algebra(need_as<int>(a, "/algebra", "grid"));
  if (type == "matrix") return SiteAlgebra::full_matrix(need_as<int>(a, "/algebra", "dim"));
  if (type == "trivial") return SiteAlgebra::trivial();
  throw ConfigError("/algebra/type", "unknown algebra type '" + type + "'");
}

UnitaryCocycle cocycle_from_config(const Json& cfg, const OpenCover& cover) {
  GroupAlgebra ga;
  const SiteAlgebraPtr alg = algebra_from_config(cfg, &ga);
  const bool is_group = need_as<std::string>(need(cfg, "", "algebra"), "/algebra",
                                             "type") == "group";

  const Json& c = need(cfg, "", "cocycle");
  const int m = get_or<int>(c, "fiber_size", 1);
  if (m < 1) throw ConfigError("/cocycle/fiber_size", "must be positive");

  UnitaryCocycle cocycle;
  cocycle.algebra = alg;
  cocycle.cover = cover;

  // Fiber projection q.
  const Json q_spec = c.contains("q") ? c.at("q") : Json("identity");
  if (q_spec.is_string() && q_spec.get<std::string>() == "identity") {
    cocycle.q = MatrixOverAlgebra::identity(alg, m);
  } else if (q_spec.is_object() && q_spec.contains("rank")) {
    const int rank = q_spec.at("rank").get<int>();
    const int d = m * alg->block_dim();
    if (rank < 0 || rank > d) throw ConfigError("/cocycle/q/rank", "rank out of range");
    std::vector<Mat> data(static_cast<std::size_t>(alg->num_sites()), Mat::Zero(d, d));
    for (auto& site : data)
      for (int i = 0; i < rank; ++i) site(i, i) = 1.0;
    cocycle.q = MatrixOverAlgebra(alg, m, std::move(data));
  } else {
    throw ConfigError("/cocycle/q", "expected \"identity\" or {\"rank\": r}");
  }

  if (get_or<bool>(c, "trivial", false)) {
    for (int i = 0; i < cover.num_sets(); ++i)
      for (int j = 0; j < cover.num_sets(); ++j)
        if (i != j) cocycle.set_constant_transition(i, j, cocycle.q);
  }

  if (c.contains("transitions")) {
    const Json& ts = c.at("transitions");
    if (!ts.is_array()) throw ConfigError("/cocycle/transitions", "expected an array");
    int idx = 0;
    for (const auto& t : ts) {
      std::ostringstream ptr;
      ptr << "/cocycle/transitions/" << idx++;
      const int i = need_as<int>(t, ptr.str(), "i");
      const int j = need_as<int>(t, ptr.str(), "j");
      if (i < 0 || i >= cover.num_sets() || j < 0 || j >= cover.num_sets())
        throw ConfigError(ptr.str(), "cover set index out of range");
      if (t.contains("g")) {
        if (!is_group)
          throw ConfigError(ptr.str() + "/g",
                            "group-element transitions need a group algebra");
        const int g = t.at("g").get<int>();
        if (g < 0 || g >= ga.table.order())
          throw ConfigError(ptr.str() + "/g", "unknown group element");
        // lambda_g compressed by q; for q = 1 this is just lambda_g in M_m.
        MatrixOverAlgebra u = MatrixOverAlgebra::zero(alg, m);
        for (int s = 0; s < alg->num_sites(); ++s)
          for (int block = 0; block < m; ++block)
            u.at(s).block(block * alg->block_dim(), block * alg->block_dim(),
                          alg->block_dim(), alg->block_dim()) = ga.unit(g).at(s);
        u = mul(mul(cocycle.q, u), cocycle.q);
        cocycle.set_constant_transition(i, j, std::move(u));
      } else if (t.contains("u")) {
        // Explicit unitary: row-major complex pairs, one matrix per site
        // ([[ [re,im], ... ], ...]; wrap in an extra list for several sites).
        const int d = m * alg->block_dim();
        Json sites = t.at("u");
        if (alg->num_sites() == 1 && sites.is_array() && !sites.empty() &&
            sites.front().is_array() && !sites.front().empty() &&
            sites.front().front().is_array() &&
            sites.front().front().size() == 2 &&
            sites.front().front().front().is_number())
          sites = Json::array({sites});
        if (!sites.is_array() || static_cast<int>(sites.size()) != alg->num_sites())
          throw ConfigError(ptr.str() + "/u", "one matrix per site required");
        std::vector<Mat> data;
        for (const auto& rows : sites) {
          if (!rows.is_array() || static_cast<int>(rows.size()) != d)
            throw ConfigError(ptr.str() + "/u", "matrix must be " + std::to_string(d) +
                                                    " rows of complex pairs");
          Mat mat(d, d);
          for (int r = 0; r < d; ++r) {
            const auto& row = rows.at(static_cast<std::size_t>(r));
            if (!row.is_array() || static_cast<int>(row.size()) != d)
              throw ConfigError(ptr.str() + "/u", "row length mismatch");
            for (int cidx = 0; cidx < d; ++cidx) {
              const auto& pair = row.at(static_cast<std::size_t>(cidx));
              if (!pair.is_array() || pair.size() != 2)
                throw ConfigError(ptr.str() + "/u", "entries are [re, im] pairs");
              mat(r, cidx) = cplx(pair.at(0).get<double>(), pair.at(1).get<double>());
            }
          }
          data.push_back(std::move(mat));
        }
        cocycle.set_constant_transition(i, j,
                                        MatrixOverAlgebra(alg, m, std::move(data)));
      } else {
        throw ConfigError(ptr.str(), "transition needs 'g' or 'u'");
      }
    }
  }
  cocycle.complete_adjoints();
  return cocycle;
}

PrincipalBundle bundle_from_config(const Json& cfg) {
  const Json& b = need(cfg, "", "bundle");
  if (b.contains("builtin")) {
    const auto name = b.at("builtin").get<std::string>();
    if (name == "cyclic_cover")
      return cyclic_cover_circle(need_as<int>(b, "/bundle", "base_points"),
                                 need_as<int>(b, "/bundle", "degree"));
    if (name == "product") {
      GroupTable table;
      try {
        table = GroupTable::by_name(need_as<std::string>(b, "/bundle", "group"));
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& ex) {
        throw ConfigError("/bundle/group", ex.what());
      }
      return product_bundle(space_from_config(cfg), table);
    }
    throw ConfigError("/bundle/builtin", "unknown builtin '" + name + "'");
  }

  // Explicit bundle: total-space sample, action permutations, quotient map.
  PrincipalBundle bundle;
  {
    const auto pts = need_as<std::vector<std::vector<double>>>(b, "/bundle", "points");
    if (pts.empty()) throw ConfigError("/bundle/points", "empty point list");
    RMat m(static_cast<int>(pts.size()), static_cast<int>(pts.front().size()));
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t k = 0; k < pts[i].size(); ++k)
        m(static_cast<int>(i), static_cast<int>(k)) = pts[i][k];
    bundle.total = space_from_points(std::move(m));
  }
  if (b.contains("group") && b.at("group").is_string()) {
    try {
      bundle.group = GroupTable::by_name(b.at("group").get<std::string>());
    } catch (const std::exception& ex) {
      throw ConfigError("/bundle/group", ex.what());
    }
  } else {
    bundle.group.mul = need_as<std::vector<std::vector<int>>>(b, "/bundle", "group");
    try {
      bundle.group.validate();
    } catch (const std::exception& ex) {
      throw ConfigError("/bundle/group", ex.what());
    }
  }
  bundle.action = need_as<std::vector<std::vector<int>>>(b, "/bundle", "action");
  bundle.quotient = need_as<std::vector<int>>(b, "/bundle", "quotient");
  {
    // Base sample: explicit coordinates, or one representative per fiber.
    const int nx = bundle.quotient.empty()
                       ? 0
                       : 1 + *std::max_element(bundle.quotient.begin(),
                                               bundle.quotient.end());
    RMat base(nx, bundle.total.points.cols());
    std::vector<char> seen(static_cast<std::size_t>(nx), 0);
    for (std::size_t y = 0; y < bundle.quotient.size(); ++y) {
      const int x = bundle.quotient[y];
      if (x < 0) throw ConfigError("/bundle/quotient", "negative base index");
      if (!seen[static_cast<std::size_t>(x)]) {
        base.row(x) = bundle.total.points.row(static_cast<int>(y));
        seen[static_cast<std::size_t>(x)] = 1;
      }
    }
    bundle.base = space_from_points(std::move(base));
  }
  try {
    bundle.validate();
  } catch (const std::exception& ex) {
    throw ConfigError("/bundle", ex.what());
  }
  return bundle;
}

}  // namespace aschern
