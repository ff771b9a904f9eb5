#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sketchpca/distributions.hpp"
#include "sketchpca/experiment.hpp"
#include "sketchpca/generate.hpp"
#include "sketchpca/io.hpp"
#include "sketchpca/mixing.hpp"
#include "sketchpca/sketch.hpp"
#include "sketchpca/spca.hpp"
#include "sketchpca/spectral.hpp"

namespace {

using sketchpca::Matrix;
using ordered_json = nlohmann::ordered_json;

struct GlobalOpts {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string format;  // per-subcommand default when empty
};

Matrix load_input(const std::string& path, const std::string& format, bool center) {
  Matrix m = sketchpca::load_matrix(path, format);
  return center ? sketchpca::center_columns(m) : m;
}

std::string pick_format(const GlobalOpts& g, const char* fallback) {
  return g.format.empty() ? fallback : g.format;
}

void print_json(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_generate(const GlobalOpts& g, const std::string& name,
                 const sketchpca::GeneratorParams& params, const std::string& out) {
  const Matrix m = sketchpca::generate(name, params, g.seed);
  sketchpca::save_matrix(m, out, pick_format(g, "matrixmarket"));
  ordered_json j;
  j["generator"] = name;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["nnz"] = m.nnz();
  j["seed"] = g.seed;
  j["path"] = out;
  print_json(j);
  return 0;
}

int cmd_sketch(const GlobalOpts& g, const std::string& input, const std::string& input_format,
               bool center, const std::string& dist_name, double alpha, bool optimal_alpha,
               double eps, std::size_t rank, std::size_t samples, double fraction,
               bool budget_nnz, const std::string& out) {
  const Matrix a = load_input(input, input_format, center);
  sketchpca::SamplingDistribution dist;
  double alpha_used = alpha;
  if (dist_name == "hybrid") {
    if (optimal_alpha) alpha_used = sketchpca::optimize_alpha(a, eps).alpha_star;
    dist = sketchpca::hybrid_probabilities(a, alpha_used);
  } else if (dist_name == "uniform") {
    dist = sketchpca::uniform_probabilities(a, false);
  } else if (dist_name == "uniform-nnz") {
    dist = sketchpca::uniform_probabilities(a, true);
  } else if (dist_name == "leverage") {
    dist = sketchpca::leverage_probabilities(sketchpca::leverage_scores(a, rank, g.seed),
                                             a.rows(), a.cols());
  } else {
    throw std::invalid_argument("unknown distribution '" + dist_name + "'");
  }
  std::size_t s = samples;
  if (s == 0) {
    const std::size_t base = budget_nnz ? a.nnz() : a.rows() * a.cols();
    s = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(base)));
  }
  const sketchpca::SketchResult result = sketchpca::sample_sketch(a, dist, s, g.seed, g.threads);
  sketchpca::save_matrix(result.sketch, out, pick_format(g, "matrixmarket"));
  ordered_json j;
  j["distribution"] = dist_name;
  if (dist_name == "hybrid") j["alpha"] = alpha_used;
  j["s"] = result.samples;
  j["seed"] = result.seed;
  j["distinct_entries_hit"] = result.distinct_entries_hit;
  j["sketch_nnz"] = result.sketch.nnz();
  j["path"] = out;
  print_json(j);
  return 0;
}

int cmd_alpha(const GlobalOpts& g, const std::string& input, const std::string& input_format,
              bool center, double eps, double delta, double grid_lo, double grid_hi,
              std::size_t grid_steps, const std::string& sigma_mode, std::size_t k) {
  const Matrix a = load_input(input, input_format, center);
  double sigma_min_sq = -1.0;
  if (sigma_mode == "skip") sigma_min_sq = 0.0;
  else if (sigma_mode == "exact") sigma_min_sq = sketchpca::min_singular_sq_exact(a);
  else if (sigma_mode != "auto") throw std::invalid_argument("--sigma-min must be auto|exact|skip");
  const sketchpca::MixingProfile profile =
      sketchpca::optimize_alpha(a, eps, grid_lo, grid_hi, grid_steps, sigma_min_sq, g.seed);
  ordered_json j;
  j["alpha_star"] = profile.alpha_star;
  j["objective"] = profile.objective_at_star;
  j["rho2"] = profile.rho2_at_star;
  j["gamma"] = profile.gamma_at_star;
  j["eps"] = profile.eps;
  j["sigma_min_sq"] = profile.sigma_min_sq;
  j["sigma_min_exact"] = profile.sigma_min_exact;
  j["sigma_min_mode"] = sigma_mode;
  j["spectral_norm"] = profile.spectral_norm;
  j["grid"] = {grid_lo, grid_hi, grid_steps};
  j["sample_complexity"] = sketchpca::sample_complexity(
      profile.rho2_at_star, profile.gamma_at_star, eps, delta, a.rows(), a.cols(), k);
  j["k"] = k;
  j["delta"] = delta;
  print_json(j);
  return 0;
}

int cmd_spca(const GlobalOpts& g, const std::string& input, const std::string& input_format,
             bool center, const std::string& method, std::size_t k, std::size_t r,
             std::size_t restarts, double tol, std::size_t max_iter, const std::string& out) {
  const Matrix a = load_input(input, input_format, center);
  sketchpca::ComponentSet set;
  if (method == "exact") {
    set = sketchpca::exact_pca(a, k, g.seed);
  } else if (method == "max_r") {
    set = sketchpca::truncate_components(sketchpca::exact_pca(a, k, g.seed), r);
  } else if (method == "iter_sparse") {
    set = sketchpca::iter_sparse_pca(a, k, r, restarts, tol, max_iter, g.seed);
  } else if (method == "brute_force") {
    set = sketchpca::brute_force_spca(a, k, r);
  } else {
    throw std::invalid_argument("unknown method '" + method + "'");
  }
  if (!out.empty()) {
    // Loadings as an n x k dense grid.
    std::vector<double> grid(set.dim * set.k);
    for (std::size_t c = 0; c < set.k; ++c)
      for (std::size_t i = 0; i < set.dim; ++i) grid[i * set.k + c] = set.columns[c][i];
    sketchpca::save_matrix(Matrix::dense(set.dim, set.k, std::move(grid)), out,
                           pick_format(g, "csv"));
  }
  ordered_json j;
  j["method"] = method;
  j["k"] = set.k;
  j["r"] = set.r;
  j["f"] = sketchpca::variance(a, set);
  j["converged"] = set.converged;
  if (!out.empty()) j["path"] = out;
  print_json(j);
  if (!set.converged) throw sketchpca::ConvergenceError("solver did not converge");
  return 0;
}

int cmd_deviate(const GlobalOpts& g, const std::string& a_path, const std::string& a_format,
                const std::string& b_path, const std::string& b_format) {
  const Matrix a = sketchpca::load_matrix(a_path, a_format);
  const Matrix b = sketchpca::load_matrix(b_path, b_format);
  const sketchpca::SpectralDeviation dev = sketchpca::spectral_deviation(a, b, g.seed);
  ordered_json j;
  j["op_norm_diff"] = dev.op_norm_diff;
  j["gram_diff"] = dev.gram_diff;
  print_json(j);
  return 0;
}

int cmd_bench(const GlobalOpts& g, sketchpca::ExperimentSpec spec,
              const std::vector<std::string>& variant_names, const std::string& alpha_mode,
              const std::string& out) {
  for (const std::string& name : variant_names)
    spec.variants.push_back(sketchpca::parse_variant(name));
  if (alpha_mode == "optimal") {
    spec.alpha_optimal = true;
  } else {
    spec.alpha_optimal = false;
    spec.alpha_fixed = std::stod(alpha_mode);
  }
  spec.threads = g.threads;
  const sketchpca::ExperimentReport report = sketchpca::run_experiment(spec);
  const std::string format = pick_format(g, "json");
  sketchpca::emit_report(report, format, out);
  std::cout << "report written to " << out << " (" << format << ", "
            << report.cells.size() << " cells)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"element-wise matrix sketches and sparse principal components"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "global RNG seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads")->capture_default_str();
  app.add_option("--format", g.format,
                 "output format (matrixmarket|csv for matrices, json|csv for reports)");
  app.fallthrough();  // let the global flags appear after the subcommand

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic matrix");
  std::string gen_name, gen_out;
  sketchpca::GeneratorParams gen_params;
  gen->add_option("--name", gen_name, "spiky_powerlaw|low_rank_noise|binary_pixel")->required();
  gen->add_option("--m", gen_params.m, "rows")->required();
  gen->add_option("--n", gen_params.n, "cols")->required();
  gen->add_option("--rank", gen_params.rank, "template rank")->capture_default_str();
  gen->add_option("--exponent", gen_params.exponent, "power-law exponent")->capture_default_str();
  gen->add_option("--noise", gen_params.noise, "relative noise level")->capture_default_str();
  gen->add_option("--out", gen_out, "output path")->required();

  // sketch
  auto* sk = app.add_subcommand("sketch", "sample a sparse sketch");
  std::string sk_in, sk_in_format = "matrixmarket", sk_dist = "hybrid", sk_out;
  bool sk_center = false, sk_optimal = false, sk_budget_nnz = false;
  double sk_alpha = 0.5, sk_eps = 0.5, sk_fraction = 0.1;
  std::size_t sk_samples = 0, sk_rank = 2;
  sk->add_option("--input", sk_in, "input matrix")->required();
  sk->add_option("--input-format", sk_in_format, "matrixmarket|csv")->capture_default_str();
  sk->add_flag("--center", sk_center, "center columns before sketching");
  sk->add_option("--dist", sk_dist, "hybrid|uniform|uniform-nnz|leverage")
      ->capture_default_str();
  sk->add_option("--alpha", sk_alpha, "hybrid mixing parameter")->capture_default_str();
  sk->add_flag("--optimal-alpha", sk_optimal, "pick alpha by bound minimization");
  sk->add_option("--eps", sk_eps, "accuracy parameter for --optimal-alpha")
      ->capture_default_str();
  sk->add_option("--rank", sk_rank, "rank for leverage scores")->capture_default_str();
  sk->add_option("--samples", sk_samples, "sample count (overrides --fraction)");
  sk->add_option("--fraction", sk_fraction, "budget as fraction of entries")
      ->capture_default_str();
  sk->add_flag("--budget-nonzeros", sk_budget_nnz, "fraction counts nonzeros, not all entries");
  sk->add_option("--out", sk_out, "output path")->required();

  // alpha
  auto* al = app.add_subcommand("alpha", "optimal mixing parameter and sample size");
  std::string al_in, al_in_format = "matrixmarket", al_sigma = "auto";
  bool al_center = false;
  double al_eps = 0.5, al_delta = 0.1, al_lo = 0.01, al_hi = 1.0;
  std::size_t al_steps = 100, al_k = 1;
  al->add_option("--input", al_in, "input matrix")->required();
  al->add_option("--input-format", al_in_format, "matrixmarket|csv")->capture_default_str();
  al->add_flag("--center", al_center, "center columns first");
  al->add_option("--eps", al_eps, "accuracy parameter")->capture_default_str();
  al->add_option("--delta", al_delta, "failure probability")->capture_default_str();
  al->add_option("--grid-lo", al_lo, "grid lower end")->capture_default_str();
  al->add_option("--grid-hi", al_hi, "grid upper end")->capture_default_str();
  al->add_option("--grid-steps", al_steps, "grid points")->capture_default_str();
  al->add_option("--sigma-min", al_sigma, "auto|exact|skip")->capture_default_str();
  al->add_option("--k", al_k, "component count for the sample bound")->capture_default_str();

  // spca
  auto* sp = app.add_subcommand("spca", "sparse principal components");
  std::string sp_in, sp_in_format = "matrixmarket", sp_method = "iter_sparse", sp_out;
  bool sp_center = false;
  std::size_t sp_k = 1, sp_r = 10, sp_restarts = 8, sp_max_iter = 2000;
  double sp_tol = 1e-9;
  sp->add_option("--input", sp_in, "input matrix")->required();
  sp->add_option("--input-format", sp_in_format, "matrixmarket|csv")->capture_default_str();
  sp->add_flag("--center", sp_center, "center columns first");
  sp->add_option("--method", sp_method, "exact|max_r|iter_sparse|brute_force")
      ->capture_default_str();
  sp->add_option("--k", sp_k, "components")->capture_default_str();
  sp->add_option("--r", sp_r, "per-column sparsity")->capture_default_str();
  sp->add_option("--restarts", sp_restarts, "random restarts")->capture_default_str();
  sp->add_option("--tol", sp_tol, "relative objective tolerance")->capture_default_str();
  sp->add_option("--max-iter", sp_max_iter, "iteration cap")->capture_default_str();
  sp->add_option("--out", sp_out, "loadings output path");

  // deviate
  auto* dv = app.add_subcommand("deviate", "spectral deviation between two matrices");
  std::string dv_a, dv_a_format = "matrixmarket", dv_b, dv_b_format = "matrixmarket";
  dv->add_option("--a", dv_a, "first matrix")->required();
  dv->add_option("--a-format", dv_a_format, "matrixmarket|csv")->capture_default_str();
  dv->add_option("--b", dv_b, "second matrix")->required();
  dv->add_option("--b-format", dv_b_format, "matrixmarket|csv")->capture_default_str();

  // bench
  auto* be = app.add_subcommand("bench", "run an experiment grid and write a report");
  sketchpca::ExperimentSpec be_spec;
  std::vector<std::string> be_variants;
  std::string be_alpha = "optimal", be_out = "report.json";
  bool be_no_center = false;
  be->add_option("--data", be_spec.dataset.path, "input matrix path");
  be->add_option("--data-format", be_spec.dataset.format, "matrixmarket|csv")
      ->capture_default_str();
  be->add_option("--generator", be_spec.dataset.generator,
                 "spiky_powerlaw|low_rank_noise|binary_pixel (instead of --data)");
  be->add_option("--m", be_spec.dataset.params.m, "generator rows");
  be->add_option("--n", be_spec.dataset.params.n, "generator cols");
  be->add_option("--rank", be_spec.dataset.params.rank, "generator rank")
      ->capture_default_str();
  be->add_option("--exponent", be_spec.dataset.params.exponent, "generator exponent")
      ->capture_default_str();
  be->add_option("--noise", be_spec.dataset.params.noise, "generator noise")
      ->capture_default_str();
  be->add_option("--gen-seed", be_spec.dataset.generator_seed, "generator seed")
      ->capture_default_str();
  be->add_flag("--no-center", be_no_center, "skip column centering");
  be->add_option("--variants", be_variants, "comma list, e.g. G_sp,H_sp,U_sp")
      ->required()
      ->delimiter(',');
  be->add_option("--r-list", be_spec.r_list, "sparsity grid")->required()->delimiter(',');
  be->add_option("--k", be_spec.k, "components")->capture_default_str();
  be->add_option("--samples", be_spec.samples, "sample count (overrides --fraction)");
  be->add_option("--fraction", be_spec.sample_fraction, "budget fraction");
  be->add_flag("--budget-nonzeros", be_spec.budget_on_nonzeros,
               "fraction counts nonzeros, not all entries");
  be->add_option("--eps", be_spec.eps, "accuracy parameter")->capture_default_str();
  be->add_option("--delta", be_spec.delta, "failure probability")->capture_default_str();
  be->add_option("--alpha", be_alpha, "'optimal' or a fixed value")->capture_default_str();
  be->add_option("--threshold-eps", be_spec.threshold_eps, "T_sp energy parameter")
      ->capture_default_str();
  be->add_option("--seeds", be_spec.seeds, "comma list of seeds")->required()->delimiter(',');
  be->add_option("--leverage-rank", be_spec.leverage_rank, "rank for L_sp scores")
      ->capture_default_str();
  be->add_flag("--uniform-nonzeros", be_spec.uniform_nonzeros_only,
               "uniform support over nonzeros only");
  be->add_option("--restarts", be_spec.restarts, "solver restarts")->capture_default_str();
  be->add_option("--tol", be_spec.tol, "solver tolerance")->capture_default_str();
  be->add_option("--max-iter", be_spec.max_iter, "solver iteration cap")
      ->capture_default_str();
  be->add_flag("--timings", be_spec.collect_timings,
               "measure solver/sketch wall-clock (report is no longer byte-reproducible)");
  be->add_flag("--deviations", be_spec.record_deviations, "record spectral deviations");
  be->add_option("--out", be_out, "report path")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (*gen) return cmd_generate(g, gen_name, gen_params, gen_out);
    if (*sk)
      return cmd_sketch(g, sk_in, sk_in_format, sk_center, sk_dist, sk_alpha, sk_optimal,
                        sk_eps, sk_rank, sk_samples, sk_fraction, sk_budget_nnz, sk_out);
    if (*al)
      return cmd_alpha(g, al_in, al_in_format, al_center, al_eps, al_delta, al_lo, al_hi,
                       al_steps, al_sigma, al_k);
    if (*sp)
      return cmd_spca(g, sp_in, sp_in_format, sp_center, sp_method, sp_k, sp_r, sp_restarts,
                      sp_tol, sp_max_iter, sp_out);
    if (*dv) return cmd_deviate(g, dv_a, dv_a_format, dv_b, dv_b_format);
    if (*be) {
      be_spec.center = !be_no_center;
      return cmd_bench(g, std::move(be_spec), be_variants, be_alpha, be_out);
    }
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const sketchpca::ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
