#include "robustiv/cli/run.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "robustiv/cli/csv.hpp"
#include "robustiv/cli/report.hpp"
#include "robustiv/parallel.hpp"
#include "robustiv/simulate.hpp"
#include "robustiv/stats.hpp"

namespace robustiv::cli {

namespace {

struct DataArgs {
  std::string path;
  std::string outcome;
  std::string treatment;
  std::vector<std::string> iv;
  std::vector<std::string> covariates;
  bool drop_na = true;
};

struct CommonArgs {
  double alpha = 0.05;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string json_path;
  std::optional<double> tuning_1st;
  std::optional<double> tuning_2nd;
  std::string voting = "MaxClique";
};

std::vector<std::string> expand_all(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items)
    for (auto& s : expand_column_list(item)) out.push_back(std::move(s));
  return out;
}

std::vector<int> parse_powers(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad power list '" + s + "'");
    }
  }
  return out;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "TRUE" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "FALSE" || s == "0" || s == "no") return false;
  throw Error(ErrorCode::InvalidArgument, "expected true or false, got '" + s + "'");
}

void add_data_options(CLI::App* app, DataArgs& d, bool with_iv = true) {
  app->add_option("--data", d.path, "CSV file with a header row")->required();
  app->add_option("--outcome", d.outcome, "Outcome column")->required();
  app->add_option("--treatment", d.treatment, "Treatment column")->required();
  if (with_iv)
    app->add_option("--iv", d.iv, "Instrument columns (comma separated; Z1..Z10 ranges allowed)")
        ->required()
        ->delimiter(',');
  app->add_option("--covariates", d.covariates, "Covariate columns")->delimiter(',');
  app->add_option("--drop-na", d.drop_na, "Drop rows with missing values in the used columns")
      ->default_val(true);
}

void add_common_options(CLI::App* app, CommonArgs& c, bool tuning) {
  app->add_option("--alpha", c.alpha, "Significance level")->default_val(0.05);
  app->add_option("--seed", c.seed, "Random seed")->default_val(0);
  app->add_option("--threads", c.threads, "Worker threads (0: ROBUSTIV_THREADS or all cores)");
  app->add_option("--json", c.json_path, "Write the JSON report to this path ('-' for stdout)");
  if (tuning) {
    app->add_option("--tuning-1st,--tuning.1st", c.tuning_1st, "First-stage threshold (default sqrt(log n))");
    app->add_option("--tuning-2nd,--tuning.2nd", c.tuning_2nd, "Voting threshold (default sqrt(log n))");
    app->add_option("--voting", c.voting, "MaxClique or MP")
        ->check(CLI::IsMember({"MaxClique", "MP"}))
        ->default_val("MaxClique");
  }
}

Dataset load(const DataArgs& d) {
  ColumnSpec spec;
  spec.outcome = d.outcome;
  spec.treatment = d.treatment;
  spec.instruments = expand_all(d.iv);
  spec.covariates = expand_all(d.covariates);
  spec.drop_na = d.drop_na;
  return read_csv(d.path, spec);
}

AnalysisOptions analysis_options(const CommonArgs& c) {
  AnalysisOptions o;
  o.alpha = c.alpha;
  o.seed = c.seed;
  o.tuning_1st = c.tuning_1st;
  o.tuning_2nd = c.tuning_2nd;
  o.voting = c.voting == "MP" ? Voting::MP : Voting::MaxClique;
  o.validate();
  return o;
}

void emit(const Report& r, const CommonArgs& c, std::ostream& out) {
  check_report(r);
  if (c.json_path == "-") {
    out << to_json(r).dump(2) << '\n';
    return;
  }
  out << render_text(r);
  if (!c.json_path.empty()) {
    std::ofstream f(c.json_path, std::ios::binary);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + c.json_path + "'");
    f << to_json(r).dump(2) << '\n';
  }
}

std::vector<std::string> names_of_indices(const std::vector<std::string>& names, const std::vector<int>& idx) {
  std::vector<std::string> out;
  for (int j : idx) out.push_back(names[static_cast<std::size_t>(j)]);
  return out;
}

double median_of(const VectorXd& v) { return stats::median(std::span<const double>(v.data(), static_cast<std::size_t>(v.size()))); }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust instrumental-variable estimation and inference", "robustiv"};
  app.require_subcommand(1);

  DataArgs data;
  CommonArgs common;

  // tsht
  auto* tsht_cmd = app.add_subcommand("tsht", "Two-stage hard thresholding with invalid-IV detection");
  add_data_options(tsht_cmd, data);
  add_common_options(tsht_cmd, common, true);

  // search / sample
  int grid_points = 4001;
  std::optional<double> grid_lo, grid_hi;
  int M = 1000;
  std::optional<double> lambda;
  auto* search_cmd = app.add_subcommand("search", "Searching confidence interval robust to selection errors");
  auto* sample_cmd = app.add_subcommand("sample", "Sampling confidence interval");
  for (auto* cmd : {search_cmd, sample_cmd}) {
    add_data_options(cmd, data);
    add_common_options(cmd, common, true);
    cmd->add_option("--grid-points", grid_points, "Grid size")->default_val(4001);
    cmd->add_option("--grid-lo", grid_lo, "Lower grid bound");
    cmd->add_option("--grid-hi", grid_hi, "Upper grid bound");
  }
  sample_cmd->add_option("--M", M, "Number of resamples")->default_val(1000);
  sample_cmd->add_option("--lambda", lambda, "Shrinkage of the threshold (default (log n / M)^(1/(2|S|)))");

  // endotest
  std::string invalid_str = "true";
  std::string se_method = "influence";
  int bootstrap = 500;
  auto* endo_cmd = app.add_subcommand("endotest", "Endogeneity test allowing invalid IVs");
  add_data_options(endo_cmd, data);
  add_common_options(endo_cmd, common, true);
  endo_cmd->add_option("--invalid", invalid_str, "Allow invalid IVs (true/false)")->default_val("true");
  endo_cmd->add_option("--se", se_method, "influence or bootstrap")
      ->check(CLI::IsMember({"influence", "bootstrap"}))
      ->default_val("influence");
  endo_cmd->add_option("--bootstrap", bootstrap, "Bootstrap replicates for --se bootstrap")->default_val(500);

  // cf / tsls / pretest
  std::string d_powers = "1,2", z_powers = "1,2", x_powers = "1";
  std::optional<double> d1, d2;
  auto* cf_cmd = app.add_subcommand("cf", "Control function estimator");
  auto* tsls_cmd = app.add_subcommand("tsls", "Two-stage least squares with polynomial bases");
  auto* pretest_cmd = app.add_subcommand("pretest", "Hausman pretest between control function and TSLS");
  for (auto* cmd : {cf_cmd, tsls_cmd, pretest_cmd}) {
    add_data_options(cmd, data);
    add_common_options(cmd, common, false);
    cmd->add_option("--d-powers", d_powers, "Powers of the treatment")->default_val("1,2");
    cmd->add_option("--z-powers", z_powers, "Powers of the instruments")->default_val("1,2");
    cmd->add_option("--x-powers", x_powers, "Powers of the covariates")->default_val("1");
    cmd->add_option("--d1", d1, "Treatment level d1 (default d2 + 1)");
    cmd->add_option("--d2", d2, "Treatment level d2 (default median of D)");
  }

  // probitcf
  std::string w0_str = "auto";
  auto* probit_cmd = app.add_subcommand("probitcf", "Probit control function for a binary outcome");
  add_data_options(probit_cmd, data);
  add_common_options(probit_cmd, common, false);
  probit_cmd->add_option("--d1", d1, "Treatment level d1 (default d2 + 1)");
  probit_cmd->add_option("--d2", d2, "Treatment level d2 (default median of D)");
  probit_cmd->add_option("--w0", w0_str, "auto (column means), d2 (means over rows with D = d2) or comma-separated values")
      ->default_val("auto");
  probit_cmd->add_option("--bootstrap", bootstrap, "Bootstrap replicates")->default_val(500);
  probit_cmd->add_option("--invalid", invalid_str, "Allow invalid IVs (true/false)")->default_val("true");

  // simulate
  std::string design = "linear";
  std::ptrdiff_t sim_n = 500;
  int sim_pz = 10, sim_px = 0, sim_invalid = 3;
  double err_corr = 0.8, beta = 1.0;
  bool heteroscedastic = false;
  std::string sim_out, truth_out;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic dataset (CSV) and its truth (JSON)");
  sim_cmd->add_option("--design", design, "linear or probit")->check(CLI::IsMember({"linear", "probit"}))->default_val("linear");
  sim_cmd->add_option("--n", sim_n, "Sample size")->default_val(500);
  sim_cmd->add_option("--pz", sim_pz, "Number of candidate instruments")->default_val(10);
  sim_cmd->add_option("--px", sim_px, "Number of covariates")->default_val(0);
  sim_cmd->add_option("--invalid", sim_invalid, "Number of invalid instruments (the first ones)")->default_val(3);
  sim_cmd->add_option("--err-corr", err_corr, "Correlation of the two error terms")->default_val(0.8);
  sim_cmd->add_option("--beta", beta, "Treatment effect")->default_val(1.0);
  sim_cmd->add_flag("--heteroscedastic", heteroscedastic, "Scale the outcome error by sqrt((1 + Z1^2) / 2)");
  sim_cmd->add_option("--seed", common.seed, "Random seed")->default_val(0);
  sim_cmd->add_option("--out", sim_out, "CSV output path (default stdout)");
  sim_cmd->add_option("--truth", truth_out, "Truth JSON output path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    if (common.threads > 0) set_thread_count(common.threads);

    if (sim_cmd->parsed()) {
      nlohmann::json truth;
      Dataset ds;
      if (design == "linear") {
        LinearSimConfig cfg = default_linear_config(sim_n, sim_pz, sim_px, sim_invalid, err_corr, common.seed);
        cfg.beta = beta;
        cfg.heteroscedastic = heteroscedastic;
        LinearSim sim = gen_linear_iv(cfg);
        ds = std::move(sim.data);
        truth = {{"design", "linear"}, {"n", sim_n}, {"beta", beta}, {"sigma12", sim.truth.sigma12},
                 {"valid", names_of_indices(ds.z_names, sim.truth.valid)},
                 {"invalid", names_of_indices(ds.z_names, sim.truth.invalid)},
                 {"gamma", std::vector<double>(cfg.gamma.data(), cfg.gamma.data() + cfg.pz)},
                 {"pi", std::vector<double>(cfg.pi.data(), cfg.pi.data() + cfg.pz)}};
      } else {
        ProbitSimConfig cfg;
        cfg.n = sim_n;
        cfg.pz = sim_pz;
        cfg.px = sim_px;
        cfg.beta = beta;
        cfg.gamma_z = VectorXd::Ones(sim_pz);
        cfg.gamma_x = VectorXd::Constant(sim_px, 0.5);
        cfg.kappa_z = VectorXd::Zero(sim_pz);
        if (sim_invalid < 0 || sim_invalid > sim_pz) throw Error(ErrorCode::InvalidArgument, "--invalid must lie in [0, pz]");
        cfg.kappa_z.head(sim_invalid).setConstant(0.5);
        cfg.kappa_x = VectorXd::Constant(sim_px, 0.3);
        cfg.err_corr = err_corr;
        cfg.seed = common.seed;
        ProbitSim sim = gen_probit_iv(cfg);
        ds = std::move(sim.data);
        const auto& t = sim.truth;
        truth = {{"design", "probit"}, {"n", sim_n}, {"beta", beta}, {"beta_star", t.beta_star},
                 {"sigma_e", t.sigma_e}, {"rho", t.rho},
                 {"kappa_w", std::vector<double>(t.kappa_w.data(), t.kappa_w.data() + t.kappa_w.size())},
                 {"gamma_w", std::vector<double>(t.gamma_w.data(), t.gamma_w.data() + t.gamma_w.size())}};
      }
      truth["seed"] = common.seed;
      if (sim_out.empty()) {
        write_csv(out, ds);
      } else {
        std::ofstream f(sim_out, std::ios::binary);
        if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + sim_out + "'");
        write_csv(f, ds);
      }
      if (!truth_out.empty()) {
        std::ofstream f(truth_out, std::ios::binary);
        if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + truth_out + "'");
        f << truth.dump(2) << '\n';
      }
      return kExitOk;
    }

    const Dataset ds = load(data);
    const AnalysisOptions opts = analysis_options(common);

    if (tsht_cmd->parsed()) {
      emit(make_report(tsht(ds, opts), ds, opts.alpha), common, out);
    } else if (search_cmd->parsed() || sample_cmd->parsed()) {
      const ReducedForm rf = reduced_form_fit(ds);
      const IndexSet S_hat = select_relevant(rf, opts.lambda1(ds.n()));
      Grid grid = default_grid(rf, S_hat, grid_points);
      if (grid_lo) grid.lo = *grid_lo;
      if (grid_hi) grid.hi = *grid_hi;
      grid.validate();
      IntervalResult ci;
      if (search_cmd->parsed()) {
        ci = searching_ci(rf, S_hat, opts.alpha, grid);
      } else {
        SamplingOptions so;
        so.M = M;
        so.lambda = lambda;
        so.seed = opts.seed;
        ci = sampling_ci(rf, S_hat, opts.alpha, so, grid);
      }
      emit(make_report(ci, S_hat, ds, opts.alpha), common, out);
    } else if (endo_cmd->parsed()) {
      EndoOptions eo;
      eo.invalid = parse_bool(invalid_str);
      eo.se_method = se_method == "bootstrap" ? EndoSeMethod::Bootstrap : EndoSeMethod::Influence;
      eo.bootstrap_reps = bootstrap;
      emit(make_report(endo_test(ds, eo, opts), ds), common, out);
    } else if (cf_cmd->parsed() || tsls_cmd->parsed() || pretest_cmd->parsed()) {
      BasisSpec spec;
      spec.d_powers = parse_powers(d_powers);
      spec.z_powers = parse_powers(z_powers);
      spec.x_powers = parse_powers(x_powers);
      const double lvl2 = d2.value_or(median_of(ds.d));
      const double lvl1 = d1.value_or(lvl2 + 1.0);
      if (cf_cmd->parsed()) {
        const CfFit fit = cf_fit(ds, spec);
        emit(make_report(fit, opts.alpha, {causal_effect(fit, lvl1, lvl2, opts.alpha)}), common, out);
      } else if (tsls_cmd->parsed()) {
        const TslsFit fit = tsls_fit(ds, spec);
        emit(make_report(fit, opts.alpha, {causal_effect(fit, lvl1, lvl2, opts.alpha)}), common, out);
      } else {
        const PretestResult p = hausman_pretest(ds, spec, opts.alpha);
        const EffectEstimate e = p.chosen == PretestChoice::ControlFunction
                                     ? causal_effect(p.cf, lvl1, lvl2, opts.alpha)
                                     : causal_effect(p.tsls, lvl1, lvl2, opts.alpha);
        emit(make_report(p, {e}), common, out);
      }
    } else if (probit_cmd->parsed()) {
      const double lvl2 = d2.value_or(median_of(ds.d));
      const double lvl1 = d1.value_or(lvl2 + 1.0);
      VectorXd w0;
      if (w0_str == "auto") {
        w0 = default_w0(ds);
      } else if (w0_str == "d2") {
        w0 = default_w0(ds, lvl2);
      } else {
        std::vector<double> vals;
        std::stringstream ss(w0_str);
        std::string item;
        while (std::getline(ss, item, ',')) {
          try {
            vals.push_back(std::stod(item));
          } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, "bad --w0 value '" + item + "'");
          }
        }
        w0 = Eigen::Map<VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
      }
      CateOptions co;
      co.B = bootstrap;
      co.invalid = parse_bool(invalid_str);
      emit(make_report(cate_ci(ds, lvl1, lvl2, w0, co, opts), ds, opts.alpha), common, out);
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_statistical(e.code()) ? kExitStatistical : kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace robustiv::cli
