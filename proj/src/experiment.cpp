#include "sketchpca/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <optional>

#include <nlohmann/json.hpp>

#include "sketchpca/distributions.hpp"
#include "sketchpca/io.hpp"
#include "sketchpca/mixing.hpp"
#include "sketchpca/rng.hpp"
#include "sketchpca/sketch.hpp"
#include "sketchpca/spca.hpp"
#include "sketchpca/spectral.hpp"

namespace sketchpca {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Alpha search grid used by optimal-alpha runs; echoed in the report.
constexpr double kAlphaGridLo = 0.01;
constexpr double kAlphaGridHi = 1.0;
constexpr std::size_t kAlphaGridSteps = 100;

using ordered_json = nlohmann::ordered_json;

double monotonic_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

double median_of(std::vector<double> values) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

bool has_variant(const ExperimentSpec& spec, Variant v) {
  return std::find(spec.variants.begin(), spec.variants.end(), v) != spec.variants.end();
}

void validate(const ExperimentSpec& spec) {
  if (spec.variants.empty()) throw std::invalid_argument("experiment: no variants");
  if (spec.r_list.empty()) throw std::invalid_argument("experiment: empty r list");
  if (spec.seeds.empty()) throw std::invalid_argument("experiment: no seeds");
  if (spec.k == 0) throw std::invalid_argument("experiment: k must be >= 1");
  if (spec.samples == 0 && !(spec.sample_fraction > 0.0))
    throw std::invalid_argument("experiment: sample budget must be >= 1");
  const bool any_max = has_variant(spec, Variant::HMax) || has_variant(spec, Variant::UMax);
  const bool any_sp = has_variant(spec, Variant::HSp) || has_variant(spec, Variant::USp) ||
                      has_variant(spec, Variant::LSp) || has_variant(spec, Variant::TSp);
  if (any_max && !has_variant(spec, Variant::GMax))
    throw std::invalid_argument("experiment: *_max variants need G_max for their ratios");
  if (any_sp && !has_variant(spec, Variant::GSp))
    throw std::invalid_argument("experiment: *_sp variants need G_sp for their ratios");
}

struct SeedSketches {
  std::optional<SketchResult> hybrid, uniform, leverage;
  double hybrid_ms = kNaN, uniform_ms = kNaN, leverage_ms = kNaN;
  SpectralDeviation hybrid_dev{kNaN, kNaN}, uniform_dev{kNaN, kNaN}, leverage_dev{kNaN, kNaN};
};

// Solve one cell; `time_it` controls the warm-up + 5-repeat protocol.
struct SolveOutcome {
  ComponentSet components;
  double solver_ms = kNaN;
};

}  // namespace

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::GMax: return "G_max";
    case Variant::GSp: return "G_sp";
    case Variant::HMax: return "H_max";
    case Variant::HSp: return "H_sp";
    case Variant::UMax: return "U_max";
    case Variant::USp: return "U_sp";
    case Variant::LSp: return "L_sp";
    case Variant::TSp: return "T_sp";
  }
  throw std::invalid_argument("unknown variant");
}

Variant parse_variant(const std::string& name) {
  for (Variant v : {Variant::GMax, Variant::GSp, Variant::HMax, Variant::HSp, Variant::UMax,
                    Variant::USp, Variant::LSp, Variant::TSp})
    if (variant_name(v) == name) return v;
  throw std::invalid_argument("unknown variant '" + name + "'");
}

bool variant_uses_sparse_solver(Variant v) {
  switch (v) {
    case Variant::GMax:
    case Variant::HMax:
    case Variant::UMax: return false;
    default: return true;
  }
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  ExperimentReport report;
  report.spec = spec;

  Matrix raw = spec.dataset.generator.empty()
                   ? load_matrix(spec.dataset.path, spec.dataset.format)
                   : generate(spec.dataset.generator, spec.dataset.params,
                              spec.dataset.generator_seed);
  const Matrix data = spec.center ? center_columns(raw) : std::move(raw);

  const std::size_t budget_base =
      spec.budget_on_nonzeros ? data.nnz() : data.rows() * data.cols();
  const std::size_t s =
      spec.samples > 0
          ? spec.samples
          : static_cast<std::size_t>(
                std::ceil(spec.sample_fraction * static_cast<double>(budget_base)));
  if (s == 0) throw std::invalid_argument("experiment: sample budget is zero");
  report.s_used = s;

  const bool needs_hybrid = has_variant(spec, Variant::HMax) || has_variant(spec, Variant::HSp);
  const bool needs_uniform = has_variant(spec, Variant::UMax) || has_variant(spec, Variant::USp);
  const bool needs_leverage = has_variant(spec, Variant::LSp);
  const bool needs_threshold = has_variant(spec, Variant::TSp);

  std::optional<SamplingDistribution> hybrid_dist, uniform_dist, leverage_dist;
  report.alpha = kNaN;
  if (needs_hybrid) {
    if (spec.alpha_optimal) {
      const MixingProfile profile =
          optimize_alpha(data, spec.eps, kAlphaGridLo, kAlphaGridHi, kAlphaGridSteps);
      report.alpha = profile.alpha_star;
      report.rho2 = profile.rho2_at_star;
      report.gamma = profile.gamma_at_star;
      report.sigma_min_sq = profile.sigma_min_sq;
      report.sigma_min_exact = profile.sigma_min_exact;
    } else {
      report.alpha = spec.alpha_fixed;
      report.rho2 = kNaN;
      report.gamma = kNaN;
    }
    hybrid_dist = hybrid_probabilities(data, report.alpha);
  }
  if (needs_uniform) uniform_dist = uniform_probabilities(data, spec.uniform_nonzeros_only);
  if (needs_leverage)
    leverage_dist = leverage_probabilities(
        leverage_scores(data, spec.leverage_rank, derive_seed(0xD15Cu, 0)), data.rows(),
        data.cols());

  std::optional<Matrix> threshold_sk;
  report.threshold_delta = kNaN;
  report.threshold_lost = kNaN;
  if (needs_threshold) {
    const ThresholdChoice choice = select_threshold(data, spec.threshold_eps);
    report.threshold_delta = choice.delta;
    report.threshold_lost = choice.lost_energy;
    threshold_sk = threshold_sketch(data, choice.delta);
  }
  SpectralDeviation threshold_dev{kNaN, kNaN};
  if (needs_threshold && spec.record_deviations)
    threshold_dev = spectral_deviation(data, *threshold_sk, derive_seed(0xDE7Au, 3));

  auto solve_cell = [&](Variant variant, const Matrix& input, std::size_t r,
                        std::uint64_t solver_seed, bool time_it) {
    auto run_once = [&]() {
      if (variant_uses_sparse_solver(variant))
        return iter_sparse_pca(input, spec.k, r, spec.restarts, spec.tol, spec.max_iter,
                               solver_seed);
      return truncate_components(exact_pca(input, spec.k, solver_seed), r);
    };
    SolveOutcome out{run_once(), kNaN};
    if (time_it) {
      std::vector<double> times(5);
      for (double& t : times) {
        const double t0 = monotonic_ms();
        ComponentSet repeat = run_once();
        t = monotonic_ms() - t0;
      }
      out.solver_ms = median_of(std::move(times));
    }
    return out;
  };

  auto run_seed = [&](std::uint64_t seed, bool threaded_sampler) {
    SeedSketches sk;
    const unsigned sampler_threads = threaded_sampler ? spec.threads : 1;
    auto build = [&](const SamplingDistribution& dist, std::uint64_t stream, double& ms,
                     SpectralDeviation& dev) {
      const double t0 = monotonic_ms();
      SketchResult result = sample_sketch(data, dist, s, derive_seed(seed, stream),
                                          sampler_threads);
      if (spec.collect_timings) ms = monotonic_ms() - t0;
      if (spec.record_deviations)
        dev = spectral_deviation(data, result.sketch, derive_seed(seed, stream + 100));
      return result;
    };
    if (hybrid_dist) sk.hybrid = build(*hybrid_dist, 1, sk.hybrid_ms, sk.hybrid_dev);
    if (uniform_dist) sk.uniform = build(*uniform_dist, 2, sk.uniform_ms, sk.uniform_dev);
    if (leverage_dist) sk.leverage = build(*leverage_dist, 3, sk.leverage_ms, sk.leverage_dev);

    std::vector<CellResult> cells;
    for (std::size_t r : spec.r_list) {
      for (std::size_t vi = 0; vi < spec.variants.size(); ++vi) {
        const Variant variant = spec.variants[vi];
        CellResult cell;
        cell.variant = variant;
        cell.r = r;
        cell.seed = seed;
        cell.f = kNaN;
        cell.ratio_vs_g = kNaN;
        cell.alpha = kNaN;
        cell.op_norm_diff = kNaN;
        cell.gram_diff = kNaN;
        cell.solver_ms = kNaN;
        cell.sketch_ms = kNaN;
        try {
          const Matrix* input = &data;
          switch (variant) {
            case Variant::GMax:
            case Variant::GSp: break;
            case Variant::HMax:
            case Variant::HSp:
              input = &sk.hybrid->sketch;
              cell.alpha = report.alpha;
              cell.sketch_ms = sk.hybrid_ms;
              cell.op_norm_diff = sk.hybrid_dev.op_norm_diff;
              cell.gram_diff = sk.hybrid_dev.gram_diff;
              cell.s_used = s;
              break;
            case Variant::UMax:
            case Variant::USp:
              input = &sk.uniform->sketch;
              cell.sketch_ms = sk.uniform_ms;
              cell.op_norm_diff = sk.uniform_dev.op_norm_diff;
              cell.gram_diff = sk.uniform_dev.gram_diff;
              cell.s_used = s;
              break;
            case Variant::LSp:
              input = &sk.leverage->sketch;
              cell.sketch_ms = sk.leverage_ms;
              cell.op_norm_diff = sk.leverage_dev.op_norm_diff;
              cell.gram_diff = sk.leverage_dev.gram_diff;
              cell.s_used = s;
              break;
            case Variant::TSp:
              input = &*threshold_sk;
              cell.op_norm_diff = threshold_dev.op_norm_diff;
              cell.gram_diff = threshold_dev.gram_diff;
              break;
          }
          cell.sketch_nnz = input->nnz();
          const std::uint64_t solver_seed = derive_seed(derive_seed(seed, 1000 + vi), r);
          SolveOutcome out = solve_cell(variant, *input, r, solver_seed, spec.collect_timings);
          cell.solver_ms = out.solver_ms;
          // The evaluation convention: f is always measured on the original
          // centered data, never on the sketch.
          cell.f = variance(data, out.components);
        } catch (const std::exception& e) {
          cell.error = e.what();
        }
        cells.push_back(std::move(cell));
      }
    }
    return cells;
  };

  const bool parallel_seeds =
      spec.threads > 1 && !spec.collect_timings && spec.seeds.size() > 1;
  std::vector<std::vector<CellResult>> per_seed(spec.seeds.size());
  if (parallel_seeds) {
    std::vector<std::future<std::vector<CellResult>>> jobs;
    jobs.reserve(spec.seeds.size());
    for (std::uint64_t seed : spec.seeds)
      jobs.push_back(
          std::async(std::launch::async, [&, seed] { return run_seed(seed, false); }));
    for (std::size_t i = 0; i < jobs.size(); ++i) per_seed[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < spec.seeds.size(); ++i)
      per_seed[i] = run_seed(spec.seeds[i], true);
  }
  for (auto& cells : per_seed)
    report.cells.insert(report.cells.end(), std::make_move_iterator(cells.begin()),
                        std::make_move_iterator(cells.end()));

  // Ratios against the same-seed G counterpart.
  auto find_cell = [&](Variant v, std::size_t r, std::uint64_t seed) -> const CellResult* {
    for (const CellResult& c : report.cells)
      if (c.variant == v && c.r == r && c.seed == seed) return &c;
    return nullptr;
  };
  for (CellResult& cell : report.cells) {
    if (!cell.error.empty()) continue;
    const Variant denom =
        variant_uses_sparse_solver(cell.variant) ? Variant::GSp : Variant::GMax;
    if (cell.variant == denom) {
      cell.ratio_vs_g = 1.0;
      continue;
    }
    const CellResult* g = find_cell(denom, cell.r, cell.seed);
    if (g != nullptr && g->error.empty() && g->f != 0.0) cell.ratio_vs_g = cell.f / g->f;
  }

  for (std::size_t r : spec.r_list) {
    for (Variant variant : spec.variants) {
      MedianResult med;
      med.variant = variant;
      med.r = r;
      std::vector<double> fs, ratios, times;
      for (const CellResult& c : report.cells) {
        if (c.variant != variant || c.r != r || !c.error.empty()) continue;
        fs.push_back(c.f);
        if (std::isfinite(c.ratio_vs_g)) ratios.push_back(c.ratio_vs_g);
        if (std::isfinite(c.solver_ms)) times.push_back(c.solver_ms);
      }
      med.f = median_of(std::move(fs));
      med.ratio_vs_g = median_of(std::move(ratios));
      med.solver_ms = median_of(std::move(times));
      report.medians.push_back(med);
    }
  }
  return report;
}

namespace {

ordered_json json_number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

ordered_json spec_to_json(const ExperimentSpec& spec) {
  ordered_json dataset;
  if (spec.dataset.generator.empty()) {
    dataset["path"] = spec.dataset.path;
    dataset["format"] = spec.dataset.format;
  } else {
    dataset["generator"] = spec.dataset.generator;
    dataset["m"] = spec.dataset.params.m;
    dataset["n"] = spec.dataset.params.n;
    dataset["rank"] = spec.dataset.params.rank;
    dataset["exponent"] = spec.dataset.params.exponent;
    dataset["noise"] = spec.dataset.params.noise;
    dataset["generator_seed"] = spec.dataset.generator_seed;
  }
  ordered_json j;
  j["dataset"] = std::move(dataset);
  j["center"] = spec.center;
  std::vector<std::string> names;
  for (Variant v : spec.variants) names.push_back(variant_name(v));
  j["variants"] = names;
  j["r_list"] = spec.r_list;
  j["k"] = spec.k;
  j["samples"] = spec.samples;
  j["sample_fraction"] = spec.sample_fraction;
  j["budget_on_nonzeros"] = spec.budget_on_nonzeros;
  j["eps"] = spec.eps;
  j["delta"] = spec.delta;
  j["alpha_mode"] = spec.alpha_optimal ? "optimal" : "fixed";
  j["alpha_fixed"] = spec.alpha_fixed;
  j["threshold_eps"] = spec.threshold_eps;
  j["seeds"] = spec.seeds;
  j["leverage_rank"] = spec.leverage_rank;
  j["uniform_nonzeros_only"] = spec.uniform_nonzeros_only;
  j["restarts"] = spec.restarts;
  j["tol"] = spec.tol;
  j["max_iter"] = spec.max_iter;
  j["collect_timings"] = spec.collect_timings;
  j["record_deviations"] = spec.record_deviations;
  return j;
}

}  // namespace

std::string report_to_json(const ExperimentReport& report) {
  ordered_json j;
  j["schema_version"] = 1;
  j["tool_version"] = std::string(kToolVersion);
  j["spec"] = spec_to_json(report.spec);
  ordered_json mixing;
  mixing["alpha"] = json_number(report.alpha);
  if (report.spec.alpha_optimal)
    mixing["grid"] = {kAlphaGridLo, kAlphaGridHi, kAlphaGridSteps};
  mixing["rho2"] = json_number(report.rho2);
  mixing["gamma"] = json_number(report.gamma);
  mixing["sigma_min_sq"] = json_number(report.sigma_min_sq);
  mixing["sigma_min_exact"] = report.sigma_min_exact;
  mixing["s_used"] = report.s_used;
  j["mixing"] = std::move(mixing);
  if (std::isfinite(report.threshold_delta)) {
    ordered_json th;
    th["delta"] = report.threshold_delta;
    th["lost_energy"] = report.threshold_lost;
    j["threshold"] = std::move(th);
  }
  ordered_json cells = ordered_json::array();
  for (const CellResult& c : report.cells) {
    ordered_json jc;
    jc["variant"] = variant_name(c.variant);
    jc["r"] = c.r;
    jc["seed"] = c.seed;
    jc["f"] = json_number(c.f);
    jc["ratio_vs_g"] = json_number(c.ratio_vs_g);
    jc["sketch_nnz"] = c.sketch_nnz;
    jc["s_used"] = c.s_used;
    jc["alpha"] = json_number(c.alpha);
    if (report.spec.record_deviations) {
      jc["op_norm_diff"] = json_number(c.op_norm_diff);
      jc["gram_diff"] = json_number(c.gram_diff);
    }
    if (!c.error.empty()) jc["error"] = c.error;
    cells.push_back(std::move(jc));
  }
  j["results"] = std::move(cells);
  ordered_json medians = ordered_json::array();
  for (const MedianResult& m : report.medians) {
    ordered_json jm;
    jm["variant"] = variant_name(m.variant);
    jm["r"] = m.r;
    jm["f"] = json_number(m.f);
    jm["ratio_vs_g"] = json_number(m.ratio_vs_g);
    medians.push_back(std::move(jm));
  }
  j["medians"] = std::move(medians);
  if (report.spec.collect_timings) {
    ordered_json timings = ordered_json::array();
    for (const CellResult& c : report.cells) {
      ordered_json jt;
      jt["variant"] = variant_name(c.variant);
      jt["r"] = c.r;
      jt["seed"] = c.seed;
      jt["solver_ms"] = json_number(c.solver_ms);
      jt["sketch_ms"] = json_number(c.sketch_ms);
      timings.push_back(std::move(jt));
    }
    for (const MedianResult& m : report.medians) {
      ordered_json jt;
      jt["variant"] = variant_name(m.variant);
      jt["r"] = m.r;
      jt["seed"] = "median";
      jt["solver_ms"] = json_number(m.solver_ms);
      timings.push_back(std::move(jt));
    }
    j["timings"] = std::move(timings);
  }
  return j.dump(2) + "\n";
}

namespace {

std::string csv_value(double v) {
  if (!std::isfinite(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string report_to_csv(const ExperimentReport& report) {
  std::string out = "variant,r,seed,f,ratio_vs_g,sketch_nnz,s_used,alpha";
  if (report.spec.record_deviations) out += ",op_norm_diff,gram_diff";
  if (report.spec.collect_timings) out += ",solver_ms,sketch_ms";
  out += ",error\n";
  auto emit_cell = [&](const CellResult& c, const std::string& seed_label) {
    out += variant_name(c.variant) + "," + std::to_string(c.r) + "," + seed_label + "," +
           csv_value(c.f) + "," + csv_value(c.ratio_vs_g) + "," +
           std::to_string(c.sketch_nnz) + "," + std::to_string(c.s_used) + "," +
           csv_value(c.alpha);
    if (report.spec.record_deviations)
      out += "," + csv_value(c.op_norm_diff) + "," + csv_value(c.gram_diff);
    if (report.spec.collect_timings)
      out += "," + csv_value(c.solver_ms) + "," + csv_value(c.sketch_ms);
    out += "," + c.error + "\n";
  };
  for (const CellResult& c : report.cells) emit_cell(c, std::to_string(c.seed));
  for (const MedianResult& m : report.medians) {
    CellResult c;
    c.variant = m.variant;
    c.r = m.r;
    c.f = m.f;
    c.ratio_vs_g = m.ratio_vs_g;
    c.solver_ms = m.solver_ms;
    c.sketch_ms = kNaN;
    c.alpha = kNaN;
    c.op_norm_diff = kNaN;
    c.gram_diff = kNaN;
    emit_cell(c, "median");
  }
  return out;
}

void emit_report(const ExperimentReport& report, const std::string& format,
                 const std::string& path) {
  std::string body;
  if (format == "json")
    body = report_to_json(report);
  else if (format == "csv")
    body = report_to_csv(report);
  else
    throw std::invalid_argument("emit_report: unknown format '" + format + "'");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  out << body;
  if (!out.flush()) throw ParseError(path + ": write failed");
}

}  // namespace sketchpca
