// Python bindings for the main operations: config-driven task runner plus
// direct access to the functional-calculus and group-algebra primitives.

#include "aschern/config.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace aschern;

namespace {

MatrixOverAlgebra wrap_plain(const Mat& m) {
  if (m.rows() != m.cols()) throw Error("expected a square matrix");
  return MatrixOverAlgebra(SiteAlgebra::trivial(), static_cast<int>(m.rows()), {m});
}

py::dict run_task(const std::string& config_json, const std::string& task,
                  std::optional<std::uint64_t> seed, std::optional<double> tol_scale) {
  ExperimentConfig cfg = ExperimentConfig::parse_text(config_json);
  RunOverrides overrides;
  overrides.task = task;
  overrides.seed = seed;
  overrides.tol_scale = tol_scale;
  const RunResult result = run(cfg, overrides);
  py::dict out;
  out["exit_code"] = result.exit_code;
  out["summary"] = result.summary.dump(2);
  py::dict csv;
  for (const auto& [name, contents] : result.csv) csv[py::str(name)] = contents;
  out["csv"] = csv;
  return out;
}

}  // namespace

PYBIND11_MODULE(_aschern, m) {
  m.doc() =
      "Flat-bundle and Mishchenko projections over sampled compact spaces, "
      "tracial Alexander-Spanier Chern characters, and index identities";

  // Translators run newest-first, so the base class goes first.
  py::register_exception<Error>(m, "AschernError");
  py::register_exception<ConfigError>(m, "ConfigError");

  m.def("run_task", &run_task, py::arg("config_json"), py::arg("task") = "",
        py::arg("seed") = py::none(), py::arg("tol_scale") = py::none(),
        "Run a task from a JSON config; returns exit_code, summary and CSV dumps");

  m.def(
      "contour_spectral_projection",
      [](const Mat& a, int nodes) {
        ContourOptions opts;
        opts.nodes = nodes;
        return contour_spectral_projection(wrap_plain(a), opts).at(0);
      },
      py::arg("a"), py::arg("nodes") = 64,
      "Spectral projection onto the spectrum near 1 via the contour integral");

  m.def(
      "idempotent_to_projection",
      [](const Mat& e) { return idempotent_to_projection(wrap_plain(e)).at(0); },
      py::arg("e"), "Projection with the same trace as the idempotent e");

  m.def(
      "normalized_trace",
      [](const Mat& a) { return a.trace() / static_cast<double>(a.rows()); },
      py::arg("a"), "Normalized matrix trace (the tracial state of M_k)");

  m.def(
      "regular_representation",
      [](const std::string& name) {
        const GroupAlgebra ga = group_algebra(GroupTable::by_name(name));
        std::vector<Mat> out;
        out.reserve(ga.lambda.size());
        for (const auto& u : ga.lambda) out.push_back(u.at(0));
        return out;
      },
      py::arg("group"), "Permutation unitaries of the left regular representation");

  m.def(
      "group_table",
      [](const std::string& name) { return GroupTable::by_name(name).mul; },
      py::arg("group"), "Multiplication table for Z<n>, D<n> or S3");

  m.def(
      "cover_lemma_violations",
      [](const std::vector<std::vector<double>>& points,
         const std::vector<std::vector<int>>& closed_sets) {
        if (points.empty()) throw Error("empty point list");
        RMat pts(static_cast<int>(points.size()), static_cast<int>(points[0].size()));
        for (std::size_t i = 0; i < points.size(); ++i)
          for (std::size_t j = 0; j < points[i].size(); ++j)
            pts(static_cast<int>(i), static_cast<int>(j)) = points[i][j];
        const SampledSpace space = space_from_points(std::move(pts));
        const OpenCover cover = cover_from_closed_family(space, closed_sets);
        return cover_lemma_violations(cover, closed_sets);
      },
      py::arg("points"), py::arg("closed_sets"),
      "Build the cover-lemma cover and count violations (0 = lemma holds)");

  m.def(
      "bott_chern_pairing",
      [](int subdiv, int contour_nodes, int simplex_points) {
        const SampledSpace sphere = sphere_space(subdiv);
        const ProjectionField bott = bott_field(sphere);
        const OpenCover cover = face_cover(sphere);
        const auto mandatory = chain_tuple_orderings(sphere.chains.at(2));
        TupleBudget high{.total = sphere.num_points(), .seed = 3};
        auto t3 = std::make_shared<CoverTupleSet>(enumerate_tuples(cover, 3, high));
        std::vector<std::vector<int>> mids = face_closure(cover, *t3).tuples;
        mids.insert(mids.end(), mandatory.begin(), mandatory.end());
        TupleBudget mid{.total = static_cast<int>(mids.size()), .seed = 4};
        auto t2 = std::make_shared<CoverTupleSet>(enumerate_tuples(cover, 2, mid, mids));
        ChernOptions opts;
        opts.contour.nodes = contour_nodes;
        opts.simplex_points_per_axis = simplex_points;
        const Cochain ch = chern_cochain(bott, 1, cover, t2, opts);
        return pair_with_chain(ch, sphere.chains.at(2));
      },
      py::arg("subdiv") = 2, py::arg("contour_nodes") = 64,
      py::arg("simplex_points") = 16,
      "Ch^2 of the Bott projection paired with the fundamental chain of S^2");
}
