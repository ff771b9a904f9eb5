#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sketchpca/distributions.hpp"
#include "sketchpca/experiment.hpp"
#include "sketchpca/generate.hpp"
#include "sketchpca/io.hpp"
#include "sketchpca/mixing.hpp"
#include "sketchpca/sketch.hpp"
#include "sketchpca/spca.hpp"
#include "sketchpca/spectral.hpp"

namespace py = pybind11;
using namespace sketchpca;

namespace {

Matrix matrix_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> arr) {
  if (arr.ndim() != 2) throw std::invalid_argument("expected a 2-d array");
  const auto rows = static_cast<std::size_t>(arr.shape(0));
  const auto cols = static_cast<std::size_t>(arr.shape(1));
  std::vector<double> values(arr.data(), arr.data() + rows * cols);
  return Matrix::dense(rows, cols, std::move(values));
}

py::array_t<double> matrix_to_array(const Matrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  std::vector<double> dense = m.to_dense();
  std::copy(dense.begin(), dense.end(), out.mutable_data());
  return out;
}

py::array_t<double> loadings_to_array(const ComponentSet& set) {
  py::array_t<double> out({set.dim, set.k});
  auto buf = out.mutable_unchecked<2>();
  for (std::size_t c = 0; c < set.k; ++c)
    for (std::size_t i = 0; i < set.dim; ++i)
      buf(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(c)) = set.columns[c][i];
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "element-wise matrix sketches and sparse principal components";
  m.attr("__version__") = std::string(kToolVersion);

  py::register_exception<ConvergenceError>(m, "ConvergenceFailure");

  py::class_<Matrix>(m, "Matrix")
      .def_static("from_dense", &matrix_from_array, py::arg("array"))
      .def_static(
          "from_coo",
          [](std::size_t rows, std::size_t cols,
             const std::vector<std::tuple<std::size_t, std::size_t, double>>& triples) {
            std::vector<Entry> entries;
            entries.reserve(triples.size());
            for (const auto& [i, j, v] : triples) entries.push_back({i, j, v});
            return Matrix::sparse(rows, cols, std::move(entries));
          },
          py::arg("rows"), py::arg("cols"), py::arg("triples"))
      .def_property_readonly("rows", &Matrix::rows)
      .def_property_readonly("cols", &Matrix::cols)
      .def_property_readonly("nnz", &Matrix::nnz)
      .def_property_readonly("is_sparse", &Matrix::sparse_storage)
      .def("to_dense", &matrix_to_array)
      .def("__repr__", [](const Matrix& a) {
        return "<Matrix " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
               " nnz=" + std::to_string(a.nnz()) + ">";
      });

  py::class_<SpectralSummary>(m, "SpectralSummary")
      .def_readonly("spectral_norm", &SpectralSummary::spectral_norm)
      .def_readonly("frobenius_norm", &SpectralSummary::frobenius_norm)
      .def_readonly("l1_norm", &SpectralSummary::l1_norm)
      .def_readonly("min_singular", &SpectralSummary::min_singular)
      .def_readonly("min_singular_computed", &SpectralSummary::min_singular_computed)
      .def_readonly("stable_rank", &SpectralSummary::stable_rank);

  m.def("norms", &norms, py::arg("a"), py::arg("compute_min_singular") = false,
        py::arg("seed") = 0);
  m.def("center_columns", &center_columns, py::arg("a"));
  m.def(
      "gram_apply",
      [](const Matrix& a, const std::vector<double>& x) { return gram_apply(a, x); },
      py::arg("a"), py::arg("x"));

  py::enum_<DistributionKind>(m, "DistributionKind")
      .value("hybrid", DistributionKind::Hybrid)
      .value("uniform", DistributionKind::Uniform)
      .value("leverage", DistributionKind::Leverage);

  py::class_<SamplingDistribution>(m, "SamplingDistribution")
      .def_readonly("kind", &SamplingDistribution::kind)
      .def_readonly("alpha", &SamplingDistribution::alpha)
      .def_readonly("rank", &SamplingDistribution::rank)
      .def_property_readonly("size",
                             [](const SamplingDistribution& d) { return d.table.size(); })
      .def("probabilities", [](const SamplingDistribution& d) {
        std::vector<std::tuple<std::size_t, std::size_t, double>> out;
        out.reserve(d.table.size());
        for (const Entry& e : d.table) out.emplace_back(e.row, e.col, e.value);
        return out;
      });

  m.def("hybrid_probabilities", &hybrid_probabilities, py::arg("a"), py::arg("alpha"));
  m.def("uniform_probabilities", &uniform_probabilities, py::arg("a"),
        py::arg("nonzeros_only") = false);

  py::class_<LeverageScores>(m, "LeverageScores")
      .def_readonly("row_scores", &LeverageScores::row_scores)
      .def_readonly("col_scores", &LeverageScores::col_scores)
      .def_readonly("rank", &LeverageScores::rank);

  m.def("leverage_scores", &leverage_scores, py::arg("a"), py::arg("rank"),
        py::arg("seed") = 0);
  m.def("leverage_probabilities", &leverage_probabilities, py::arg("scores"), py::arg("rows"),
        py::arg("cols"));

  py::class_<SketchResult>(m, "SketchResult")
      .def_readonly("sketch", &SketchResult::sketch)
      .def_readonly("samples", &SketchResult::samples)
      .def_readonly("seed", &SketchResult::seed)
      .def_readonly("alpha", &SketchResult::alpha)
      .def_readonly("distinct_entries_hit", &SketchResult::distinct_entries_hit);

  m.def("sample_sketch", &sample_sketch, py::arg("a"), py::arg("dist"), py::arg("s"),
        py::arg("seed"), py::arg("threads") = 1);
  m.def("threshold_sketch", &threshold_sketch, py::arg("a"), py::arg("delta"));
  m.def(
      "select_threshold",
      [](const Matrix& a, double eps, std::uint64_t seed) {
        const ThresholdChoice c = select_threshold(a, eps, seed);
        return std::make_pair(c.delta, c.lost_energy);
      },
      py::arg("a"), py::arg("eps"), py::arg("seed") = 0);
  m.def(
      "spectral_deviation",
      [](const Matrix& a, const Matrix& b, std::uint64_t seed) {
        const SpectralDeviation d = spectral_deviation(a, b, seed);
        return std::make_pair(d.op_norm_diff, d.gram_diff);
      },
      py::arg("a"), py::arg("b"), py::arg("seed") = 0);

  py::class_<MixingProfile>(m, "MixingProfile")
      .def_readonly("alpha_grid", &MixingProfile::alpha_grid)
      .def_readonly("objective_values", &MixingProfile::objective_values)
      .def_readonly("alpha_star", &MixingProfile::alpha_star)
      .def_readonly("objective_at_star", &MixingProfile::objective_at_star)
      .def_readonly("rho2_at_star", &MixingProfile::rho2_at_star)
      .def_readonly("gamma_at_star", &MixingProfile::gamma_at_star)
      .def_readonly("eps", &MixingProfile::eps)
      .def_readonly("sigma_min_sq", &MixingProfile::sigma_min_sq)
      .def_readonly("sigma_min_exact", &MixingProfile::sigma_min_exact)
      .def_readonly("spectral_norm", &MixingProfile::spectral_norm);

  m.def(
      "xi_table",
      [](const Matrix& a, double alpha) {
        std::vector<std::tuple<std::size_t, std::size_t, double>> out;
        for (const Entry& e : xi_table(a, alpha)) out.emplace_back(e.row, e.col, e.value);
        return out;
      },
      py::arg("a"), py::arg("alpha"));
  m.def("rho_squared", &rho_squared, py::arg("a"), py::arg("alpha"), py::arg("sigma_min_sq"));
  m.def("gamma_bound", &gamma_bound, py::arg("a"), py::arg("alpha"), py::arg("seed") = 0);
  m.def("optimize_alpha", &optimize_alpha, py::arg("a"), py::arg("eps"),
        py::arg("grid_lo") = 0.01, py::arg("grid_hi") = 1.0, py::arg("grid_steps") = 100,
        py::arg("sigma_min_sq") = -1.0, py::arg("seed") = 0);
  m.def("sample_complexity", &sample_complexity, py::arg("rho2"), py::arg("gamma"),
        py::arg("eps"), py::arg("delta"), py::arg("m"), py::arg("n"), py::arg("k"));

  py::class_<ComponentSet>(m, "ComponentSet")
      .def_readonly("dim", &ComponentSet::dim)
      .def_readonly("k", &ComponentSet::k)
      .def_readonly("r", &ComponentSet::r)
      .def_readonly("converged", &ComponentSet::converged)
      .def_property_readonly("loadings", &loadings_to_array);

  m.def("exact_pca", &exact_pca, py::arg("a"), py::arg("k"), py::arg("seed") = 0);
  m.def("truncate_components", &truncate_components, py::arg("components"), py::arg("r"));
  m.def("iter_sparse_pca", &iter_sparse_pca, py::arg("a"), py::arg("k"), py::arg("r"),
        py::arg("restarts") = 8, py::arg("tol") = 1e-9, py::arg("max_iter") = 2000,
        py::arg("seed") = 0);
  m.def("brute_force_spca", &brute_force_spca, py::arg("a"), py::arg("k"), py::arg("r"));
  m.def("variance", &variance, py::arg("a"), py::arg("components"));
  m.def(
      "recovery_gap",
      [](const Matrix& a, const Matrix& sketch, std::size_t k, std::size_t r,
         std::uint64_t seed) {
        const RecoveryGap g = recovery_gap(a, sketch, k, r, seed);
        return std::make_pair(g.lhs_deficit, g.bound);
      },
      py::arg("a"), py::arg("sketch"), py::arg("k"), py::arg("r"), py::arg("seed") = 0);

  m.def(
      "generate",
      [](const std::string& name, std::size_t rows, std::size_t cols, std::size_t rank,
         double exponent, double noise, std::uint64_t seed) {
        GeneratorParams params;
        params.m = rows;
        params.n = cols;
        params.rank = rank;
        params.exponent = exponent;
        params.noise = noise;
        return generate(name, params, seed);
      },
      py::arg("name"), py::arg("m"), py::arg("n"), py::arg("rank") = 2,
      py::arg("exponent") = 1.0, py::arg("noise") = 0.0, py::arg("seed") = 0);

  m.def("load_matrix", &load_matrix, py::arg("path"), py::arg("format"));
  m.def("save_matrix", &save_matrix, py::arg("a"), py::arg("path"), py::arg("format"));
}
