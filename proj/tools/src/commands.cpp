#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "bvs/baseline.hpp"
#include "bvs/csv.hpp"
#include "bvs/dataset.hpp"
#include "bvs/diagnostics.hpp"
#include "bvs/draws_io.hpp"
#include "bvs/error.hpp"
#include "bvs/prediction.hpp"
#include "bvs/prior.hpp"
#include "bvs/report.hpp"
#include "bvs/rng.hpp"
#include "bvs/sampler.hpp"
#include "bvs/sensitivity.hpp"
#include "bvs/summaries.hpp"

#ifndef BVS_VERSION
#define BVS_VERSION "unknown"
#endif

namespace bvs::cli {

namespace fs = std::filesystem;
using nlohmann::json;

Context::Context(std::string command, Settings settings, std::ostream& log)
    : s_(std::move(settings)), log_(log), out_dir_(output_directory(s_)) {
  manifest_.command = std::move(command);
  manifest_.config = settings_to_json(s_);
  manifest_.version = BVS_VERSION;
  manifest_.started_at = utc_timestamp();
  add_seed("root", s_.seed);
}

void Context::add_input(const fs::path& path) {
  for (const auto& d : manifest_.inputs)
    if (d.path == path.string()) return;
  manifest_.inputs.push_back({path.string(), sha256_file(path)});
}

void Context::add_seed(const std::string& name, std::uint64_t seed) { manifest_.seeds[name] = seed; }

void Context::write_output(const std::string& name, const std::string& content) {
  std::error_code ec;
  fs::create_directories(out_dir_, ec);
  if (ec) throw DataError("cannot create output directory '" + out_dir_.string() + "': " + ec.message());
  const fs::path path = out_dir_ / name;
  {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write '" + path.string() + "'");
    os << content;
  }
  manifest_.outputs.push_back({path.string(), sha256_hex(content)});
  log_ << "wrote " << path.string() << "\n";
}

void Context::finish() {
  manifest_.finished_at = utc_timestamp();
  const fs::path path = out_dir_ / (manifest_.command + ".manifest.json");
  std::error_code ec;
  fs::create_directories(out_dir_, ec);
  std::ofstream os(path);
  if (!os) throw DataError("cannot write '" + path.string() + "'");
  os << manifest_.to_json().dump(2) << "\n";
}

namespace {

// --- input assembly --------------------------------------------------------

// Column roles when no encoding spec is given: 0/1 columns are binary, other
// numeric columns continuous, anything else categorical.
EncodingSpec infer_encoding(const fs::path& path, const std::string& outcome) {
  const csv::Table table = csv::read(path);
  EncodingSpec spec;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (table.header[c] == outcome) continue;
    bool numeric = true;
    bool zero_one = true;
    for (const auto& row : table.rows) {
      if (row[c].empty()) continue;
      const auto v = csv::parse_double(row[c]);
      if (!v) {
        numeric = false;
        break;
      }
      if (*v != 0.0 && *v != 1.0) zero_one = false;
    }
    ColumnEncoding enc;
    enc.role = !numeric ? ColumnRole::categorical : zero_one ? ColumnRole::binary : ColumnRole::continuous;
    spec.columns[table.header[c]] = enc;
  }
  return spec;
}

Dataset load_data(Context& ctx) {
  const Settings& s = ctx.settings();
  if (s.data.empty()) throw ConfigError("--data is required");
  if (!fs::exists(s.data)) throw DataError("data file '" + s.data + "' does not exist");
  ctx.add_input(s.data);
  EncodingSpec spec;
  if (!s.spec.empty()) {
    spec = load_encoding_spec(s.spec);
    ctx.add_input(s.spec);
  } else {
    spec = infer_encoding(s.data, s.outcome);
    ctx.log() << "note: no --spec given; column roles inferred from values\n";
  }
  if (s.missing == "impute")
    spec.missing = MissingPolicy::impute;
  else if (s.missing == "complete-case")
    spec.missing = MissingPolicy::complete_case;
  else if (!s.missing.empty())
    throw ConfigError("--missing must be 'complete-case' or 'impute'");

  Dataset ds = standardize(load_csv(s.data, spec, s.outcome));
  for (const auto& w : ds.encoding_log().warnings) ctx.log() << "warning: " << w << "\n";
  ctx.log() << "data: n=" << ds.n() << " P=" << ds.num_factors() << " positives=" << ds.positives() << "\n";
  return ds;
}

PriorConfig build_prior(Context& ctx, const Dataset& ds) {
  const Settings& s = ctx.settings();
  PriorConfig cfg;
  if (!s.prior_file.empty()) {
    std::ifstream in(s.prior_file);
    if (!in) throw ConfigError("cannot open prior file '" + s.prior_file + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    cfg = prior_from_json(buf.str());
    ctx.add_input(s.prior_file);
    if (cfg.w.size() != ds.num_factors())
      throw ConfigError("prior file has " + std::to_string(cfg.w.size()) + " weights but the data has " +
                        std::to_string(ds.num_factors()) + " factors");
  } else {
    const double p = static_cast<double>(ds.num_factors());
    double m = s.expected_model_size.value_or(5.0);
    if (!s.expected_model_size && m > p) {
      m = p / 2.0;
      ctx.log() << "note: default expected model size 5 exceeds P; using P/2 = " << m << "\n";
    }
    cfg = default_prior(ds.num_factors(), m);
    if (s.slab == "gprior")
      cfg.slab = SlabPolicy::g_prior;
    else if (s.slab == "diag")
      cfg.slab = SlabPolicy::diagonal;
    else
      throw ConfigError("--slab must be 'gprior' or 'diag'");
    cfg.g = s.g;
    cfg.v = s.v;
    cfg.intercept_variance = s.intercept_variance;
  }
  if (!s.w_file.empty()) {
    std::ifstream in(s.w_file);
    if (!in) throw ConfigError("cannot open w file '" + s.w_file + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    apply_w_overrides(cfg, ds.factor_names(), buf.str());
    ctx.add_input(s.w_file);
  }
  cfg.validate();
  return cfg;
}

ChainConfig build_chain(const Settings& s, std::uint64_t seed) {
  ChainConfig chain;
  chain.iterations = s.iters;
  chain.burn_in = s.burn_in;
  chain.thin = s.thin;
  chain.moves_per_sweep = s.moves_per_sweep;
  if (!(s.swap_prob >= 0.0 && s.swap_prob <= 1.0)) throw ConfigError("--swap-prob must lie in [0, 1]");
  chain.move_mix = MoveMix{1.0 - s.swap_prob, s.swap_prob};
  chain.seed = seed;
  chain.validate();
  return chain;
}

CvOptions build_cv(Context& ctx) {
  const Settings& s = ctx.settings();
  CvOptions cv;
  cv.folds = s.folds;
  cv.seed = derive_seed(s.seed, SeedStream::cv);
  cv.jobs = s.jobs;
  if (s.pooling == "pooled")
    cv.pooling = AucPooling::pooled;
  else if (s.pooling == "fold-mean")
    cv.pooling = AucPooling::fold_mean;
  else
    throw ConfigError("--pooling must be 'pooled' or 'fold-mean'");
  ctx.add_seed("cv", cv.seed);
  return cv;
}

fs::path draws_path(const Context& ctx) {
  const Settings& s = ctx.settings();
  return s.draws.empty() ? ctx.out_dir() / "draws.bvs" : fs::path(s.draws);
}

PosteriorDraws load_chain(Context& ctx) {
  const fs::path path = draws_path(ctx);
  if (!fs::exists(path)) throw DataError("chain artifact '" + path.string() + "' not found; run `bvs run` first");
  ctx.add_input(path);
  PosteriorDraws draws = load_draws(path);
  if (draws.size() == 0) throw DataError("chain artifact '" + path.string() + "' holds no draws");
  return draws;
}

void check_alignment(const PosteriorDraws& draws, const Dataset& ds) {
  if (draws.factor_names != ds.factor_names())
    throw DataError("chain artifact factors do not match the data's factors; was it produced from this file?");
}

std::vector<std::size_t> factor_indices(const Dataset& ds, const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  for (const auto& n : names) out.push_back(ds.require_factor(n));
  return out;
}

std::string safe_name(const std::string& name) {
  std::string out;
  for (char c : name) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out;
}

template <class Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

// --- commands --------------------------------------------------------------

void cmd_run(Context& ctx) {
  const Dataset ds = load_data(ctx);
  const PriorConfig prior = build_prior(ctx, ds);
  const ChainConfig chain = build_chain(ctx.settings(), derive_seed(ctx.settings().seed, SeedStream::chain));
  ctx.add_seed("chain", chain.seed);
  ctx.log() << "running " << chain.iterations << " sweeps (" << chain.burn_in << " burn-in, thin " << chain.thin
            << ")\n";
  const PosteriorDraws draws = run_chain(ds, prior, chain);
  ctx.write_output("draws.bvs", render([&](std::ostream& os) { write_draws(os, draws); }));
  const AcceptanceRates rates = acceptance_rate(draws);
  ctx.log() << "kept " << draws.size() << " draws in " << draws.telemetry.wall_seconds
            << " s; acceptance add/delete " << rates.add_delete << ", swap " << rates.swap << "\n";
}

void cmd_report(Context& ctx) {
  const Settings& s = ctx.settings();
  const PosteriorDraws draws = load_chain(ctx);
  const Dataset ds = load_data(ctx);
  check_alignment(draws, ds);
  const auto names = draws.factor_names;

  const auto summaries = mpp(draws);
  std::vector<std::size_t> rows;
  if (!s.show.empty()) rows = table_rows_with_next_highest(summaries, factor_indices(ds, s.show), s.next_highest);
  ctx.write_output("mpp.csv", render([&](std::ostream& os) { report::write_mpp_csv(os, summaries, rows); }));

  const auto all_models = jpp(draws);
  std::vector<ModelSummary> top(all_models.begin(),
                                all_models.begin() + static_cast<std::ptrdiff_t>(std::min(s.top, all_models.size())));
  std::vector<double> refit;
  json warnings = json::array();
  if (s.refit_auc) {
    const CvOptions cv = build_cv(ctx);
    for (const auto& m : top) {
      try {
        refit.push_back(kfold_refit_auc(ds, m.indicator, cv).auc);
      } catch (const Error& e) {
        refit.push_back(std::nan(""));
        warnings.push_back("refit AUC for model " + m.indicator.to_string() + " failed: " + e.what());
      }
    }
  }
  ctx.write_output("jpp.csv", render([&](std::ostream& os) { report::write_jpp_csv(os, top, names, refit); }));

  const InclusionMatrix inc = inclusion_matrix(all_models, s.inclusion_rows);
  if (inc.truncated)
    warnings.push_back("only " + std::to_string(inc.bits.rows()) + " distinct models visited; inclusion matrix truncated");
  ctx.write_output("inclusion.csv", render([&](std::ostream& os) { report::write_inclusion_csv(os, inc, names); }));

  const CorrelationReport corr = correlation_matrix(ds);
  ctx.write_output("corr.csv", render([&](std::ostream& os) { report::write_correlation_csv(os, corr, names); }));

  LeverageOptions lev_opts;
  lev_opts.threshold_multiplier = s.leverage_multiplier;
  if (!s.group_by.empty()) lev_opts.group_by = s.group_by;
  const LeverageReport lev = leverage(ds, lev_opts);
  for (const auto& w : lev.warnings) warnings.push_back(w);
  ctx.write_output("leverage.csv", render([&](std::ostream& os) { report::write_leverage_csv(os, lev); }));

  ctx.write_output("trace.csv", render([&](std::ostream& os) {
    csv::write_row(os, {"draw", "model_size", "beta:(intercept)"});
    for (std::size_t d = 0; d < draws.size(); ++d)
      csv::write_row(os, {std::to_string(d), std::to_string(draws.gammas[d].size()),
                          csv::format_double(draws.betas(static_cast<Eigen::Index>(d), 0))});
  }));

  if (draws.size() >= 10) {
    std::vector<report::EssRow> ess_rows;
    auto add = [&](const std::string& label, const std::vector<double>& series) {
      const EssResult r = effective_sample_size(series);
      ess_rows.push_back({label, r.ess, r.degenerate});
    };
    std::vector<double> size_series;
    for (const auto& g : draws.gammas) size_series.push_back(static_cast<double>(g.size()));
    add("model_size", size_series);
    for (Eigen::Index j = 0; j < draws.betas.cols(); ++j) {
      const Eigen::VectorXd col = draws.betas.col(j);
      add(j == 0 ? std::string("beta:(intercept)") : "beta:" + names[static_cast<std::size_t>(j - 1)],
          std::vector<double>(col.data(), col.data() + col.size()));
    }
    ctx.write_output("ess.csv", render([&](std::ostream& os) { report::write_ess_csv(os, ess_rows); }));
  } else {
    warnings.push_back("fewer than 10 draws; ESS not computed");
  }

  const AcceptanceRates rates = acceptance_rate(draws);
  json summary{{"draws", draws.size()},
               {"distinct_models", all_models.size()},
               {"mpp_jpp_consistency", mpp_jpp_consistency(draws)},
               {"total_jpp", total_jpp(all_models, draws.size())},
               {"acceptance", {{"add_delete", rates.add_delete}, {"swap", rates.swap}, {"overall", rates.overall}}},
               {"rank_deficient_rejections", draws.telemetry.rank_deficient_rejections},
               {"correlation",
                {{"threshold", corr.threshold},
                 {"pairs_counted", corr.pairs_counted},
                 {"pairs_above", corr.pairs_above},
                 {"fraction_above", number_or_null(corr.fraction_above)},
                 {"undefined_factors", corr.undefined_factors}}},
               {"leverage", {{"threshold", lev.threshold}, {"flagged", lev.flagged.size()}}},
               {"warnings", warnings}};
  ctx.write_output("report.json", summary.dump(2) + "\n");
  for (const auto& w : warnings) ctx.log() << "warning: " << w.get<std::string>() << "\n";
}

void cmd_cv(Context& ctx) {
  const Settings& s = ctx.settings();
  if (s.bma == s.subset.has_value()) throw ConfigError("cv: give exactly one of --subset or --bma");
  const Dataset ds = load_data(ctx);
  const CvOptions cv = build_cv(ctx);
  PredictionReport rep;
  if (s.bma) {
    const PriorConfig prior = build_prior(ctx, ds);
    const ChainConfig chain = build_chain(s, derive_seed(s.seed, SeedStream::bma_cv));
    ctx.add_seed("bma_cv", chain.seed);
    rep = bma_cv_auc(ds, prior, chain, cv);
  } else {
    rep = kfold_refit_auc(ds, indicator_of(ds.num_factors(), factor_indices(ds, *s.subset)), cv);
  }
  for (const auto& w : rep.warnings) ctx.log() << "warning: " << w << "\n";
  ctx.write_output("cv.json", report::prediction_report_json(rep) + "\n");
  ctx.write_output("roc.csv", render([&](std::ostream& os) { report::write_roc_csv(os, rep.roc); }));
  ctx.log() << "AUC " << rep.auc << " (pooled " << rep.pooled_auc << ", mean over folds " << rep.mean_fold_auc
            << ")\n";
}

void cmd_nested_curve(Context& ctx) {
  const Settings& s = ctx.settings();
  const Dataset ds = load_data(ctx);
  std::vector<std::size_t> ranking;
  if (!s.ranking.empty()) {
    ranking = factor_indices(ds, s.ranking);
  } else {
    const PosteriorDraws draws = load_chain(ctx);
    check_alignment(draws, ds);
    ranking = rank_by_mpp(mpp(draws));
  }
  const CvOptions cv = build_cv(ctx);
  const auto curve = nested_auc_curve(ds, ranking, cv);
  ctx.write_output("nested_curve.csv",
                   render([&](std::ostream& os) { report::write_nested_curve_csv(os, curve, ds.factor_names()); }));
}

namespace {

struct BaselineRun {
  ScreenResult screen;
  StepwiseResult stepwise;
};

BaselineRun run_baseline(Context& ctx, const Dataset& ds) {
  const Settings& s = ctx.settings();
  BaselineRun out;
  out.screen = single_factor_screen(ds, s.screen_threshold);
  for (const auto& r : out.screen.rows)
    if (!r.warning.empty()) ctx.log() << "warning: " << r.name << ": " << r.warning << "\n";
  if (out.screen.retained.empty()) {
    ctx.log() << "note: no factor passed the screen; stepwise model is empty\n";
  } else {
    out.stepwise = stepwise_select(ds, out.screen.retained, s.enter_p, s.exit_p);
  }
  return out;
}

}  // namespace

void cmd_baseline(Context& ctx) {
  const Dataset ds = load_data(ctx);
  const BaselineRun base = run_baseline(ctx, ds);
  ctx.write_output("screen.csv", render([&](std::ostream& os) { report::write_screen_csv(os, base.screen); }));
  ctx.write_output("baseline.csv", render([&](std::ostream& os) {
    csv::write_row(os, {"factor", "p_single", "p_multi"});
    const auto names = ds.factor_names();
    for (std::size_t k = 0; k < names.size(); ++k) {
      std::string single, multi;
      for (const auto& r : base.screen.rows)
        if (r.factor == k && r.converged) single = csv::format_double(r.p);
      for (std::size_t j = 0; j < base.stepwise.final_factors.size(); ++j)
        if (base.stepwise.final_factors[j] == k) multi = csv::format_double(base.stepwise.final_pvalues[j]);
      csv::write_row(os, {names[k], single, multi});
    }
  }));
  ctx.write_output("stepwise_trace.txt", format_stepwise_trace(base.stepwise, ds.factor_names()));
}

void cmd_compare(Context& ctx) {
  const PosteriorDraws draws = load_chain(ctx);
  const Dataset ds = load_data(ctx);
  check_alignment(draws, ds);
  const BaselineRun base = run_baseline(ctx, ds);
  const auto rows = report::build_comparison(base.screen, base.stepwise, mpp(draws));
  ctx.write_output("compare.csv", render([&](std::ostream& os) { report::write_comparison_csv(os, rows); }));
}

void cmd_sensitivity(Context& ctx) {
  const Settings& s = ctx.settings();
  if (s.factors.empty() && s.scan_fixed_other.empty())
    throw ConfigError("sensitivity: give --factor (repeatable) and/or --scan-fixed-other");
  const Dataset ds = load_data(ctx);
  const PriorConfig base = build_prior(ctx, ds);
  const std::uint64_t sens_seed = derive_seed(s.seed, SeedStream::sensitivity);
  ctx.add_seed("sensitivity", sens_seed);
  const std::vector<double> grid = s.grid.empty() ? default_sensitivity_grid() : s.grid;

  std::ostringstream summary;
  csv::write_row(summary, {"factor", "class", "min_interior_mpp", "max_interior_mpp"});
  for (const auto& name : s.factors) {
    const std::size_t k = ds.require_factor(name);
    const ChainConfig chain = build_chain(s, derive_seed(sens_seed, k));
    ctx.log() << "sweeping " << name << " over " << grid.size() << " grid points\n";
    const SensitivityCurve curve = prior_sweep(ds, name, grid, s.fixed_other, chain, base, s.jobs);
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (!curve.errors[i].empty()) ctx.log() << "warning: " << name << " w=" << grid[i] << ": " << curve.errors[i] << "\n";
    ctx.write_output("sensitivity_" + safe_name(name) + ".csv",
                     render([&](std::ostream& os) { report::write_sensitivity_csv(os, curve); }));
    double lo = 1.0, hi = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (grid[i] > 0.0 && grid[i] < 1.0 && !std::isnan(curve.mpp_at[i])) {
        lo = std::min(lo, curve.mpp_at[i]);
        hi = std::max(hi, curve.mpp_at[i]);
      }
    std::string cls;
    try {
      cls = to_string(classify_sensitivity(curve));
    } catch (const ConfigError&) {
      cls = "insufficient-grid";
    }
    csv::write_row(summary, {name, cls, lo <= hi ? csv::format_double(lo) : "", lo <= hi ? csv::format_double(hi) : ""});
  }
  if (!s.factors.empty()) ctx.write_output("sensitivity_summary.csv", summary.str());

  if (!s.scan_fixed_other.empty()) {
    // Coarse scan: BMA cross-validated AUC with every factor at the same w.
    const CvOptions cv = build_cv(ctx);
    const ChainConfig chain = build_chain(s, derive_seed(s.seed, SeedStream::bma_cv));
    ctx.add_seed("bma_cv", chain.seed);
    std::ostringstream os;
    csv::write_row(os, {"fixed_other", "bma_auc"});
    for (double w : s.scan_fixed_other) {
      if (!(w > 0.0 && w < 1.0)) throw ConfigError("--scan-fixed-other values must lie in (0, 1)");
      PriorConfig cfg = base;
      cfg.w.assign(ds.num_factors(), w);
      cfg.expected_model_size = w * static_cast<double>(ds.num_factors());
      const PredictionReport rep = bma_cv_auc(ds, cfg, chain, cv);
      csv::write_row(os, {csv::format_double(w), csv::format_double(rep.auc)});
    }
    ctx.write_output("fixed_other_scan.csv", os.str());
  }
}

void cmd_leverage(Context& ctx) {
  const Settings& s = ctx.settings();
  const Dataset ds = load_data(ctx);
  LeverageOptions opts;
  opts.threshold_multiplier = s.leverage_multiplier;
  if (!s.group_by.empty()) opts.group_by = s.group_by;
  const LeverageReport lev = leverage(ds, opts);
  for (const auto& w : lev.warnings) ctx.log() << "warning: " << w << "\n";
  ctx.write_output("leverage.csv", render([&](std::ostream& os) { report::write_leverage_csv(os, lev); }));
  ctx.log() << lev.flagged.size() << " of " << ds.n() << " observations above leverage threshold " << lev.threshold
            << "\n";
}

}  // namespace bvs::cli
