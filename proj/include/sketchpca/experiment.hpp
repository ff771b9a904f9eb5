#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sketchpca/generate.hpp"
#include "sketchpca/matrix.hpp"

namespace sketchpca {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class Variant { GMax, GSp, HMax, HSp, UMax, USp, LSp, TSp };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& name);
/// True for the iterative-sparse-solver family (..._sp), false for the
/// truncation family (..._max).
bool variant_uses_sparse_solver(Variant v);

/// Either a file (path + format) or a named generator; exactly one.
struct DatasetSource {
  std::string path;
  std::string format = "matrixmarket";
  std::string generator;  // nonempty selects the generator
  GeneratorParams params;
  std::uint64_t generator_seed = 0;
};

struct ExperimentSpec {
  DatasetSource dataset;
  bool center = true;
  std::vector<Variant> variants;
  std::vector<std::size_t> r_list;
  std::size_t k = 1;
  /// Sample budget: explicit count wins; otherwise fraction of m*n (or of
  /// nnz when budget_on_nonzeros).
  std::size_t samples = 0;
  double sample_fraction = 0.0;
  bool budget_on_nonzeros = false;
  double eps = 0.5;
  double delta = 0.1;
  bool alpha_optimal = true;
  double alpha_fixed = 0.5;
  double threshold_eps = 0.1;  // T_sp cutoff selection
  std::vector<std::uint64_t> seeds;
  std::size_t leverage_rank = 2;
  bool uniform_nonzeros_only = false;
  std::size_t restarts = 8;
  double tol = 1e-9;
  std::size_t max_iter = 2000;
  /// Wall-clock timings are non-deterministic; they are collected and
  /// emitted only when asked for.
  bool collect_timings = false;
  bool record_deviations = false;
  unsigned threads = 1;
};

struct CellResult {
  Variant variant = Variant::GSp;
  std::size_t r = 0;
  std::uint64_t seed = 0;
  double f = 0.0;
  double ratio_vs_g = 0.0;
  std::size_t sketch_nnz = 0;
  std::size_t s_used = 0;
  double alpha = 0.0;          // hybrid cells only (NaN otherwise)
  double op_norm_diff = 0.0;   // NaN unless deviations recorded
  double gram_diff = 0.0;
  double solver_ms = 0.0;      // NaN unless timings collected
  double sketch_ms = 0.0;
  std::string error;  // empty on success
};

struct MedianResult {
  Variant variant = Variant::GSp;
  std::size_t r = 0;
  double f = 0.0;
  double ratio_vs_g = 0.0;
  double solver_ms = 0.0;  // NaN unless timings collected
};

struct ExperimentReport {
  ExperimentSpec spec;
  double alpha = 0.0;  // hybrid alpha actually used
  double rho2 = 0.0;
  double gamma = 0.0;
  double sigma_min_sq = 0.0;
  bool sigma_min_exact = false;
  std::size_t s_used = 0;
  double threshold_delta = 0.0;   // T_sp only
  double threshold_lost = 0.0;
  std::vector<CellResult> cells;      // one per (variant, r, seed)
  std::vector<MedianResult> medians;  // one per (variant, r)
};

/// Center, build distributions, sketch, solve every (variant, r, seed) cell,
/// evaluate f against the original centered matrix, aggregate medians.
/// Per-cell failures are recorded in the cell and do not stop the run.
ExperimentReport run_experiment(const ExperimentSpec& spec);

std::string report_to_json(const ExperimentReport& report);
std::string report_to_csv(const ExperimentReport& report);

/// format: "json" or "csv".
void emit_report(const ExperimentReport& report, const std::string& format,
                 const std::string& path);

}  // namespace sketchpca
