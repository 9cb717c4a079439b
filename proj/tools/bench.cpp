// bench: experiment runner, complexity calculator and rank-one approximation
// of tensor files.

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "cpdeflate/experiments.hpp"
#include "cpdeflate/rank1.hpp"

namespace cd = cpdeflate;

namespace {

struct ExperimentArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  bool paper_scale = false;
  std::optional<std::string> out;
};

// Precedence: built-in defaults < config file < --paper-scale < explicit flags.
cd::ExperimentConfig resolve(const std::string& experiment, const ExperimentArgs& args) {
  cd::ExperimentConfig c =
      args.config_path.empty() ? cd::default_config(experiment) : cd::load_config(args.config_path, experiment);
  if (args.paper_scale) c.trials = cd::paper_scale_trials(experiment);
  if (args.seed) c.seed = *args.seed;
  if (args.trials) c.trials = *args.trials;
  if (args.out) c.output_dir = *args.out;
  cd::validate(c);
  return c;
}

int run_experiment(const std::string& experiment, const ExperimentArgs& args) {
  const cd::ExperimentConfig config = resolve(experiment, args);
  const cd::ExperimentResult result = cd::run_experiment(config);
  cd::write_outputs(result, config.output_dir);
  int failures = 0;
  for (const auto& row : result.rows) failures += row.status != "ok";
  std::cout << experiment << ": " << result.rows.size() << " rows written to " << config.output_dir << '\n';
  if (failures) std::cerr << experiment << ": " << failures << " failed trial(s), see status column\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank-one approximation and deflation CP benchmarks"};
  app.require_subcommand(1);

  ExperimentArgs exp_args;
  for (const char* name : {"fig2", "tables", "fig3", "fig4", "fig5", "conjecture"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", exp_args.config_path, "key = value config file (defaults when omitted)")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", exp_args.seed, "master seed");
    sub->add_option("--trials", exp_args.trials, "trials per cell")->check(CLI::PositiveNumber);
    sub->add_flag("--paper-scale", exp_args.paper_scale, "use the original trial counts");
    sub->add_option("--out", exp_args.out, "output directory");
  }

  std::string algorithm;
  std::vector<cd::Index> dims;
  cd::Index rank = 1;
  int k = 1;
  CLI::App* complexity = app.add_subcommand("complexity", "per-iteration multiplication count");
  complexity->add_option("--algorithm", algorithm, "als | cg | thosvd | seroap | dcpd-thosvd | dcpd-seroap")
      ->required();
  complexity->add_option("--dims", dims, "tensor dimensions")->required()->delimiter(',');
  complexity->add_option("--rank", rank, "CP rank R");
  complexity->add_option("--k", k, "power iterations per singular triplet");

  std::string tensor_path;
  std::string method = "seroap";
  CLI::App* approx = app.add_subcommand("approx", "rank-one approximation of a tensor file");
  approx->add_option("--tensor", tensor_path, "tensor text file")->required()->check(CLI::ExistingFile);
  approx->add_option("--method", method, "thosvd | seroap | seroap+ce | oracle");

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* chosen = app.get_subcommands().front();
    const std::string name = chosen->get_name();
    if (name == "complexity") {
      const cd::FlopEstimate est = cd::complexity_estimate(algorithm, dims, rank, k);
      std::cout << est.algorithm << " dims=" << cd::shape_to_string(est.dims) << " N=" << est.order
                << " R=" << est.rank << " k=" << est.k << " count=" << est.count << '\n';
      return 0;
    }
    if (name == "approx") {
      const cd::Tensor t = cd::read_tensor_file(tensor_path);
      const cd::Rank1Term term = cd::operator_by_name(method).apply(t);
      std::cout << std::setprecision(10) << "method " << method << "\nlambda " << term.lambda.real() << ' '
                << term.lambda.imag() << "\nresidual " << cd::residual(t, term) << '\n';
      for (std::size_t n = 0; n < term.factors.size(); ++n) {
        std::cout << "factor " << n;
        for (const auto& z : term.factors[n]) std::cout << ' ' << z.real() << ' ' << z.imag();
        std::cout << '\n';
      }
      return 0;
    }
    return run_experiment(name, exp_args);
  } catch (const std::exception& ex) {
    std::cerr << "bench: " << ex.what() << '\n';
    return 1;
  }
}
