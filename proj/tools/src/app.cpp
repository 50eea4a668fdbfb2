#include "app.hpp"

#include <CLI11.hpp>
#include <functional>
#include <iostream>

#include "bvs/error.hpp"
#include "commands.hpp"

namespace bvs::cli {

namespace {

void data_options(CLI::App* app, FlagValues& f) {
  app->add_option("--data", f.data, "input CSV file");
  app->add_option("--spec", f.spec, "encoding spec JSON (column roles); inferred from values when absent");
  app->add_option("--outcome", f.outcome, "outcome column name (default y)");
  app->add_option("--missing", f.missing, "missing-data policy")->check(CLI::IsMember({"complete-case", "impute"}));
}

void prior_options(CLI::App* app, FlagValues& f) {
  app->add_option("--prior", f.prior_file, "PriorConfig JSON file (replaces the flags below)");
  app->add_option("--expected-model-size", f.expected_model_size, "prior expected model size m (default 5)");
  app->add_option("--slab", f.slab, "slab covariance policy")->check(CLI::IsMember({"gprior", "diag"}));
  app->add_option("--g", f.g, "g-prior scale (default n)");
  app->add_option("--v", f.v, "diagonal slab variance (default 4)");
  app->add_option("--intercept-variance", f.intercept_variance, "intercept prior variance (default 100)");
  app->add_option("--w-file", f.w_file, "CSV of per-factor prior overrides (columns factor,w)");
}

void chain_options(CLI::App* app, FlagValues& f) {
  app->add_option("--iters", f.iters, "total sweeps including burn-in (default 110000)");
  app->add_option("--burn-in", f.burn_in, "burn-in sweeps (default 10000)");
  app->add_option("--thin", f.thin, "keep every thin-th sweep (default 1)");
  app->add_option("--moves-per-sweep", f.moves_per_sweep, "model moves per latent sweep (default 5)");
  app->add_option("--swap-prob", f.swap_prob, "probability of a swap proposal (default 0.5)");
}

void cv_options(CLI::App* app, FlagValues& f) {
  app->add_option("--folds", f.folds, "cross-validation folds (default 5)");
  app->add_option("--pooling", f.pooling, "headline AUC")->check(CLI::IsMember({"pooled", "fold-mean"}));
}

void draws_option(CLI::App* app, FlagValues& f) {
  app->add_option("--draws", f.draws, "chain artifact (default <out>/draws.bvs)");
}

void list_option(CLI::App* app, const std::string& name, std::optional<std::vector<std::string>>& dst,
                 const std::string& help) {
  app->add_option_function<std::string>(
      name,
      [&dst](const std::string& v) {
        if (!dst) dst.emplace();
        for (auto& item : split_list(v)) dst->push_back(item);
      },
      help);
}

void number_list_option(CLI::App* app, const std::string& name, std::optional<std::vector<double>>& dst,
                        const std::string& help) {
  app->add_option_function<std::string>(
      name,
      [&dst, name](const std::string& v) {
        if (!dst) dst.emplace();
        for (auto& item : split_list(v)) {
          try {
            std::size_t used = 0;
            dst->push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
          } catch (const std::exception&) {
            throw CLI::ValidationError(name, "'" + item + "' is not a number");
          }
        }
      },
      help);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const DataError*>(&e)) return 2;
  if (dynamic_cast<const NumericalError*>(&e)) return 3;
  return 1;
}

}  // namespace

int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian variable selection for binary outcomes (probit spike-and-slab)", "bvs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", BVS_VERSION);

  FlagValues f;
  auto global = [&](CLI::App* sub) {
    sub->add_option("--seed", f.seed, "manifest seed; expanded into chain, CV and sensitivity sub-seeds");
    sub->add_option("--jobs", f.jobs, "worker threads for folds and grid points (default 1)");
    sub->add_option("--out", f.out, "output directory (default $BVS_OUTPUT_DIR or ./bvs-out)");
    sub->add_option("--config", f.config, "JSON config file or a previous run manifest; flags take precedence");
  };

  std::function<void(Context&)> action;
  std::string command;
  auto sub = [&](const char* name, const char* help, void (*fn)(Context&)) {
    CLI::App* s = app.add_subcommand(name, help);
    global(s);
    s->callback([&, name, fn] {
      command = name;
      action = fn;
    });
    return s;
  };

  CLI::App* run = sub("run", "run the sampler and write the chain artifact", cmd_run);
  data_options(run, f);
  prior_options(run, f);
  chain_options(run, f);

  CLI::App* report = sub("report", "MPP/JPP tables, inclusion matrix, correlations, leverage, ESS", cmd_report);
  data_options(report, f);
  draws_option(report, f);
  cv_options(report, f);
  report->add_option("--top", f.top, "rows of jpp.csv (default 20)");
  report->add_option("--inclusion-rows", f.inclusion_rows, "rows of inclusion.csv (default 100)");
  list_option(report, "--show", f.show, "factors always listed in mpp.csv; enables the next-highest layout");
  report->add_option("--next-highest", f.next_highest, "extra highest-MPP rows with --show (default 10)");
  report->add_option("--refit-auc", f.refit_auc, "cross-validated logistic refit AUC per JPP row (default true)");
  report->add_option("--group-by", f.group_by, "categorical source column used to label leverage rows");
  report->add_option("--leverage-multiplier", f.leverage_multiplier, "flag h > multiplier * columns / n");

  CLI::App* cv = sub("cv", "cross-validated AUC of a factor subset refit or of BMA predictions", cmd_cv);
  data_options(cv, f);
  prior_options(cv, f);
  chain_options(cv, f);
  cv_options(cv, f);
  list_option(cv, "--subset", f.subset, "comma-separated factors for the logistic refit (\"\" for intercept only)");
  cv->add_flag("--bma", f.bma, "score held-out rows by model averaging over per-fold chains");

  CLI::App* nested = sub("nested-curve", "AUC of refits on the top-s factors by MPP", cmd_nested_curve);
  data_options(nested, f);
  draws_option(nested, f);
  cv_options(nested, f);
  list_option(nested, "--ranking", f.ranking, "explicit factor order instead of the chain's MPP ranking");

  CLI::App* baseline = sub("baseline", "single-factor screen and stepwise logistic regression", cmd_baseline);
  data_options(baseline, f);
  baseline->add_option("--screen-threshold", f.screen_threshold, "single-factor p-value threshold (default 0.003)");
  baseline->add_option("--enter-p", f.enter_p, "stepwise entry p-value (default 0.05)");
  baseline->add_option("--exit-p", f.exit_p, "stepwise exit p-value (default 0.10)");

  CLI::App* compare = sub("compare", "p_single, p_multi and MPP side by side", cmd_compare);
  data_options(compare, f);
  draws_option(compare, f);
  compare->add_option("--screen-threshold", f.screen_threshold, "single-factor p-value threshold (default 0.003)");
  compare->add_option("--enter-p", f.enter_p, "stepwise entry p-value (default 0.05)");
  compare->add_option("--exit-p", f.exit_p, "stepwise exit p-value (default 0.10)");

  CLI::App* sens = sub("sensitivity", "MPP of a factor across a grid of its prior inclusion probability",
                       cmd_sensitivity);
  data_options(sens, f);
  prior_options(sens, f);
  chain_options(sens, f);
  cv_options(sens, f);
  list_option(sens, "--factor", f.factors, "factor to sweep (repeatable or comma-separated)");
  sens->add_option("--fixed-other", f.fixed_other, "prior inclusion probability of every other factor (default 0.78)");
  number_list_option(sens, "--grid", f.grid, "comma-separated w grid (default 0,0.1,...,1)");
  number_list_option(sens, "--scan-fixed-other", f.scan_fixed_other,
                     "comma-separated common w values scored by BMA cross-validated AUC");

  CLI::App* lev = sub("leverage", "hat-matrix leverage per observation", cmd_leverage);
  data_options(lev, f);
  lev->add_option("--group-by", f.group_by, "categorical source column used to label rows");
  lev->add_option("--leverage-multiplier", f.leverage_multiplier, "flag h > multiplier * columns / n (default 2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    const nlohmann::json config = f.config ? load_config_file(*f.config) : nlohmann::json::object();
    Context ctx(command, resolve_settings(f, config), err);
    action(ctx);
    ctx.finish();
  } catch (const std::exception& e) {
    err << "bvs " << command << ": error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 0;
}

}  // namespace bvs::cli
