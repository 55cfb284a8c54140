#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "lpep/inference.hpp"
#include "lpep/io.hpp"
#include "lpep/oracle.hpp"
#include "lpep/separation.hpp"
#include "lpep/simgen.hpp"

namespace lpep {

namespace {

DeltaPriorKind parse_delta_kind(const std::string& s) {
  if (s == "fixed") return DeltaPriorKind::FixedUnitInfo;
  if (s == "hyper-gn") return DeltaPriorKind::HyperGOverN;
  if (s == "robust") return DeltaPriorKind::Robust;
  throw DataError("unknown delta prior '" + s + "' (choose fixed|hyper-gn|robust)");
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file " + path);
  out << text << "\n";
}

McmcConfig build_mcmc_config(const RunConfig& rc, int n) {
  McmcConfig mc;
  mc.iterations = rc.iterations;
  mc.burn_in = rc.burn_in;
  mc.seed = rc.seed;
  mc.delta_prior.kind = rc.delta_kind;
  mc.delta_prior.n_star = n;
  mc.model_prior.a = rc.model_prior_a;
  mc.model_prior.b = rc.model_prior_b;
  return mc;
}

int run_fit(const RunConfig& rc) {
  Dataset data = load_csv(rc.input_path, rc.response_column, rc.standardize);
  const McmcConfig mc = build_mcmc_config(rc, data.n());
  DrawStore draws = run_chains(data, mc, rc.chains);
  if (!rc.draw_log.empty()) write_draw_log(rc.draw_log, draws);
  const PosteriorSummary summary = summarize(draws);
  emit(summary_to_json(summary, draws), rc.output_path);
  return 0;
}

int run_oracle(const RunConfig& rc, int quad_order, bool allow_large) {
  Dataset data = load_csv(rc.input_path, rc.response_column, rc.standardize);
  DeltaPrior dp{rc.delta_kind, data.n()};
  ModelPrior mp{rc.model_prior_a, rc.model_prior_b};
  const OracleResult res = exact_model_posterior(data, dp, quad_order, mp, allow_large);
  nlohmann::json j;
  nlohmann::json models = nlohmann::json::array();
  for (const auto& [key, prob] : res.model_posteriors)
    models.push_back({{"bits", format_gamma_bits(key, data.p())},
                      {"prob", prob},
                      {"log_marginal", res.model_log_marginals.at(key)}});
  j["models"] = models;
  j["ystar_normalizer"] = res.ystar_normalizer;
  emit(j.dump(2), rc.output_path);
  return 0;
}

int run_check_separation(const RunConfig& rc) {
  Dataset data = load_csv(rc.input_path, rc.response_column, rc.standardize);
  const SeparationReport rep = detect_separation(data);
  nlohmann::json j;
  j["separated"] = rep.separated;
  j["detector"] = rep.detector;
  if (rep.witness_direction) {
    j["witness"] = std::vector<double>(
        rep.witness_direction->data(),
        rep.witness_direction->data() + rep.witness_direction->size());
  }
  emit(j.dump(2), rc.output_path);
  return 0;
}

int run_simulate(const Scenario& sc, const std::string& out_path) {
  Dataset data = gen_dataset(sc);
  write_dataset_csv(out_path, data);
  return 0;
}

int run_replicate(const Scenario& sc, int reps, const RunConfig& rc) {
  std::ostringstream csv;
  csv << "rep,seed,map_match,f1,model_size,amse\n";
  csv.precision(12);
  for (int rep = 0; rep < reps; ++rep) {
    Scenario s = sc;
    s.replication_seed = rc.seed + static_cast<std::uint64_t>(rep);
    Dataset data = gen_dataset(s);
    McmcConfig mc = build_mcmc_config(rc, data.n());
    mc.seed = s.replication_seed;
    DrawStore draws = run_chains(data, mc, rc.chains);
    PosteriorSummary summary = summarize(draws);

    const Vector truth = true_coefficients(s.p_true, s.p);
    ModelIndicator truth_model = ModelIndicator::null_model(s.p);
    for (int j = 1; j <= s.p; ++j)
      if (truth[j] != 0.0) truth_model.set(j, true);

    const SelectionMetrics sel = selection_metrics(summary.map_model, truth_model);
    const double mse = amse(summary.bma_mean, truth, s.p);
    csv << rep << "," << s.replication_seed << "," << (sel.exact_match ? 1 : 0) << ",";
    if (sel.f1) csv << *sel.f1;
    csv << "," << summary.mean_model_size << "," << mse << "\n";
    std::cerr << "[replicate] rep " << rep << ": map_match=" << sel.exact_match
              << " size=" << summary.mean_model_size << " amse=" << mse << "\n";
  }
  emit(csv.str(), rc.output_path);
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Bayesian variable selection for logistic regression under the LPEP prior"};
  app.require_subcommand(1);

  RunConfig rc;
  std::string delta_name = "fixed";
  int quad_order = 32;
  bool allow_large = false;
  Scenario sc;
  int reps = 1;

  auto add_data_opts = [&](CLI::App* cmd) {
    cmd->add_option("csv", rc.input_path, "input CSV file")->required();
    cmd->add_option("--response", rc.response_column,
                    "response column name or 0-based index (default y)");
    cmd->add_flag("--standardize", rc.standardize, "center/scale covariates");
  };
  auto add_prior_opts = [&](CLI::App* cmd) {
    cmd->add_option("--delta", delta_name, "delta prior: fixed|hyper-gn|robust");
    cmd->add_option("--model-prior-a", rc.model_prior_a, "Beta-Binomial a (default 1)");
    cmd->add_option("--model-prior-b", rc.model_prior_b, "Beta-Binomial b (default 1)");
  };

  CLI::App* fit = app.add_subcommand("fit", "run the MCMC and write a posterior summary");
  add_data_opts(fit);
  add_prior_opts(fit);
  fit->add_option("--iterations", rc.iterations, "total iterations incl. burn-in");
  fit->add_option("--burn-in", rc.burn_in, "burn-in iterations");
  fit->add_option("--chains", rc.chains, "number of chains");
  fit->add_option("--seed", rc.seed, "RNG seed")->required();
  fit->add_option("--out", rc.output_path, "summary JSON path (default stdout)");
  fit->add_option("--draw-log", rc.draw_log, "optional per-iteration CSV log");

  CLI::App* sim = app.add_subcommand("simulate", "write a synthetic scenario CSV");
  sim->add_option("--n", sc.n, "sample size")->required();
  sim->add_option("--p", sc.p, "number of covariates")->required();
  sim->add_option("--p-true", sc.p_true, "true model size: 0|5|10|20")->required();
  sim->add_option("--r", sc.r, "AR(1) design correlation")->required();
  sim->add_option("--seed", sc.replication_seed, "RNG seed")->required();
  std::string sim_out;
  sim->add_option("--out", sim_out, "output CSV path")->required();

  CLI::App* rep = app.add_subcommand("replicate", "run the simulation pipeline");
  rep->add_option("--n", sc.n, "sample size");
  rep->add_option("--p", sc.p, "number of covariates")->required();
  rep->add_option("--p-true", sc.p_true, "true model size: 0|5|10|20")->required();
  rep->add_option("--r", sc.r, "AR(1) design correlation");
  rep->add_option("--reps", reps, "number of replications")->required();
  rep->add_option("--seed", rc.seed, "base seed (replication k uses seed+k)")->required();
  add_prior_opts(rep);
  rep->add_option("--iterations", rc.iterations, "total iterations incl. burn-in");
  rep->add_option("--burn-in", rc.burn_in, "burn-in iterations");
  rep->add_option("--chains", rc.chains, "chains per replication");
  rep->add_option("--out", rc.output_path, "metrics CSV path (default stdout)");

  CLI::App* orc = app.add_subcommand("oracle", "exact model posterior for tiny instances");
  add_data_opts(orc);
  add_prior_opts(orc);
  orc->add_option("--quad-order", quad_order, "Gauss-Hermite order (default 32)");
  orc->add_flag("--force-large", allow_large, "override the n<=12, p<=3 bound");
  orc->add_option("--out", rc.output_path, "output JSON path (default stdout)");

  CLI::App* sep = app.add_subcommand("check-separation", "print the separation report");
  add_data_opts(sep);
  sep->add_option("--out", rc.output_path, "output JSON path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    rc.delta_kind = parse_delta_kind(delta_name);
    if (fit->parsed()) return run_fit(rc);
    if (sim->parsed()) return run_simulate(sc, sim_out);
    if (rep->parsed()) return run_replicate(sc, reps, rc);
    if (orc->parsed()) return run_oracle(rc, quad_order, allow_large);
    if (sep->parsed()) return run_check_separation(rc);
  } catch (const NumericError& e) {
    std::cerr << "error: numeric: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace lpep
