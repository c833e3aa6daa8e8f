#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace cannings::cli;

namespace {

void add_model_options(CLI::App* cmd, ModelOpts& model) {
  cmd->add_option("--n", model.n, "population size N")->required();
  cmd->add_option("--s", model.s, "selection strength s in [0,1)");
  cmd->add_option("--s-exponent", model.s_exponent,
                  "selection exponent b with s = N^-b");
  cmd->add_option("--weights", model.weights,
                  "weight model: wf | dirichlet:A | dirichlet-type:gamma:K:T | "
                  "dirichlet-type:uniform:A:B | dirichlet-type:const:C")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "cannings_asg: Cannings frequency processes with selection, their "
      "ancestral selection processes, and duality-based fixation estimates"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts global;
  app.add_option("--seed", global.seed, "master seed")->capture_default_str();
  app.add_option("--threads", global.threads,
                 "worker threads (0: hardware concurrency)")
      ->envname("CANNINGS_ASG_THREADS")
      ->capture_default_str();
  app.add_option("--out", global.out, "output file, '-' for stdout")
      ->capture_default_str();
  app.add_option("--format", global.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_flag("--strict", global.strict,
               "escalate diagnostic warnings to exit code 4");
  app.add_flag("--timing", global.timing,
               "fill the wall_time_s column (off keeps outputs reproducible)");
  app.set_config("--config", "",
                 "config file: flat key=value lines, subcommand keys as\n"
                 "command.key=value or under a [command] section");

  int rc = 0;

  auto* fix = app.add_subcommand("fixation",
                                 "fixation probability of a single beneficial "
                                 "mutant by four routes");
  ModelOpts fix_model;
  FixationOpts fix_opts;
  add_model_options(fix, fix_model);
  fix->add_option("--mode", fix_opts.mode, "forward | dual | exact | closed-form")
      ->required();
  fix->add_option("--gamma", fix_opts.gamma,
                  "Moran neutral rate (closed-form; default rho^2 of weights)");
  fix->add_option("--replicates", fix_opts.replicates, "forward replicates")
      ->capture_default_str();
  fix->add_option("--k0", fix_opts.k0, "initial wildtype count (default N-1)");
  fix->add_option("--max-gens", fix_opts.max_gens,
                  "forward horizon (default 50 N / max(s, 1/N))");
  fix->add_option("--burn-in", fix_opts.burn_in,
                  "CASP burn-in (default ceil(20 (1/s) ln N))");
  fix->add_option("--thinning", fix_opts.thinning,
                  "CASP thinning (default ceil(1/s))");
  fix->add_option("--samples", fix_opts.samples, "CASP equilibrium samples")
      ->capture_default_str();
  fix->callback([&] { rc = cmd_fixation(global, fix_model, fix_opts); });

  auto* dual = app.add_subcommand(
      "duality", "pathwise, sampling, moment and exact duality checks");
  ModelOpts dual_model;
  DualityOpts dual_opts;
  add_model_options(dual, dual_model);
  dual->add_option("--kind", dual_opts.kind,
                   "pathwise | sampling | moment | exact")
      ->required();
  dual->add_option("--k", dual_opts.k, "initial wildtype count (default N-1)");
  dual->add_option("--sample", dual_opts.sample,
                   "sample size n (default max(1, N/10))");
  dual->add_option("--g", dual_opts.g, "generations")->capture_default_str();
  dual->add_option("--replicates", dual_opts.replicates, "Monte Carlo size")
      ->capture_default_str();
  dual->add_option("--dump-matrices", dual_opts.dump_matrices,
                   "exact: write PREFIX.forward.csv and PREFIX.casp.csv");
  dual->add_option("--dump-realization", dual_opts.dump_realization,
                   "pathwise: write one realization (a failing one if any)");
  dual->callback([&] { rc = cmd_duality(global, dual_model, dual_opts); });

  auto* eq = app.add_subcommand("equilibrium",
                                "equilibrium of the CASP or the MASP with "
                                "normality and closed-form comparisons");
  ModelOpts eq_model;
  EquilibriumOpts eq_opts;
  add_model_options(eq, eq_model);
  eq->add_option("--target", eq_opts.target, "casp | masp")->required();
  eq->add_option("--gamma", eq_opts.gamma,
                 "MASP neutral rate (default rho^2 of weights)");
  eq->add_option("--burn-in", eq_opts.burn_in, "CASP burn-in");
  eq->add_option("--thinning", eq_opts.thinning, "CASP thinning");
  eq->add_option("--samples", eq_opts.samples, "CASP samples")
      ->capture_default_str();
  eq->add_option("--jumps", eq_opts.jumps, "MASP embedded jumps")
      ->capture_default_str();
  eq->add_option("--jump-burn-in", eq_opts.jump_burn_in, "MASP burn-in jumps")
      ->capture_default_str();
  eq->add_option("--b0", eq_opts.b0, "MASP start state (default N p)");
  eq->add_option("--histogram-out", eq_opts.histogram_out,
                 "write the histogram to this file");
  eq->callback([&] { rc = cmd_equilibrium(global, eq_model, eq_opts); });

  auto* trans = app.add_subcommand(
      "transitions", "one-step CASP jump probabilities against the "
                     "Moran-like reference");
  ModelOpts trans_model;
  TransitionsOpts trans_opts;
  add_model_options(trans, trans_model);
  trans->add_option("--k", trans_opts.k, "state to step from")->required();
  trans->add_option("--replicates", trans_opts.replicates, "one-step samples")
      ->capture_default_str();
  trans->add_option("--c-err", trans_opts.c_err, "error budget constant")
      ->capture_default_str();
  trans->callback([&] { rc = cmd_transitions(global, trans_model, trans_opts); });

  auto* cond = app.add_subcommand(
      "conditions", "moment-condition report for a weight model over an N grid");
  ConditionsOpts cond_opts;
  cond->add_option("--weights", cond_opts.weights, "weight model")
      ->capture_default_str();
  cond->add_option("--n-grid", cond_opts.n_grid, "population sizes")
      ->required()
      ->delimiter(',');
  cond->add_option("--k-const", cond_opts.k_const, "constant K in the bound")
      ->capture_default_str();
  cond->add_option("--replicates", cond_opts.replicates,
                   "empirical moment replicates")
      ->capture_default_str();
  cond->callback([&] { rc = cmd_conditions(global, cond_opts); });

  auto* sweep = app.add_subcommand(
      "sweep", "fixation estimates across (N, b, weights) grids; resumable");
  SweepOpts sweep_opts;
  sweep->add_option("--n-grid", sweep_opts.n_grid, "population sizes")
      ->required()
      ->delimiter(',');
  sweep->add_option("--b-grid", sweep_opts.b_grid, "selection exponents")
      ->required()
      ->delimiter(',');
  sweep->add_option("--weights-list", sweep_opts.weights_list, "weight models")
      ->required()
      ->delimiter(',');
  sweep->add_option("--mode", sweep_opts.mode, "fixation mode per grid point")
      ->capture_default_str();
  sweep->add_option("--replicates", sweep_opts.fixation.replicates,
                    "forward replicates")
      ->capture_default_str();
  sweep->add_option("--samples", sweep_opts.fixation.samples, "CASP samples")
      ->capture_default_str();
  sweep->add_option("--burn-in", sweep_opts.fixation.burn_in, "CASP burn-in");
  sweep->add_option("--thinning", sweep_opts.fixation.thinning, "CASP thinning");
  sweep->callback([&] { rc = cmd_sweep(global, sweep_opts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const PropertyFailure& e) {
    std::cerr << "property failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
