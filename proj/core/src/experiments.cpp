#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cpdeflate/diagnostics.hpp"
#include "cpdeflate/experiments.hpp"
#include "cpdeflate/parallel.hpp"
#include "cpdeflate/rank1.hpp"
#include "cpdeflate/solvers.hpp"

namespace cpdeflate {

namespace {

struct TrialOutcome {
  bool ok = true;
  std::string error;
};

std::string snr_label(double snr) { return std::isinf(snr) ? "inf" : format_double(snr); }

ResultRow make_row(const ExperimentConfig& c, const std::string& shape, const std::string& rank,
                   const std::string& snr, const std::string& algorithm, const std::string& statistic,
                   double value) {
  ResultRow row;
  row.experiment = c.experiment;
  row.shape = shape;
  row.rank = rank;
  row.snr_db = snr;
  row.algorithm = algorithm;
  row.statistic = statistic;
  row.value = value;
  row.trials = c.trials;
  return row;
}

void error_rows(const ExperimentConfig& c, std::vector<ResultRow>& rows, const std::vector<TrialOutcome>& outcomes,
                const std::string& shape, const std::string& rank, const std::string& snr,
                const std::string& algorithm) {
  int failed = 0;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    if (outcomes[k].ok) continue;
    ++failed;
    ResultRow row = make_row(c, shape, rank, snr, algorithm, "trial_error", 0.0);
    row.trial = std::to_string(k);
    row.status = "error: " + outcomes[k].error;
    rows.push_back(std::move(row));
  }
  rows.push_back(make_row(c, shape, rank, snr, algorithm, "failed_trials", failed));
}

Tensor nonzero_random(const Shape& shape, Field field, Rng& rng) {
  while (true) {
    Tensor t = random_tensor(shape, field, Distribution::kUniform, rng);
    if (squared_norm(t) > 0.0) return t;
  }
}

// A CP test instance: exact rank-R tensor (optionally unit norm) plus noise,
// and a random initial model for the iterative solvers.
struct Instance {
  Tensor clean;
  Tensor noisy;
  CPModel init;
};

Instance make_instance(const ExperimentConfig& c, const Shape& shape, Index rank, double snr, std::uint64_t seed) {
  Rng rng(seed);
  Instance inst;
  inst.clean = random_cp(shape, rank, c.field, Distribution::kUniform, rng).second;
  if (c.normalize) {
    const double n = norm(inst.clean);
    if (n > 0) inst.clean *= Complex(1.0 / n);
  }
  inst.noisy = std::isinf(snr) ? inst.clean : add_noise(inst.clean, snr, rng);
  inst.init = random_cp_model(shape, rank, c.field, rng);
  return inst;
}

bool is_dcpd(const std::string& algorithm) { return algorithm.rfind("dcpd-", 0) == 0; }

// Residual history (initial value first) of one CP solver run.
std::vector<double> run_cp(const std::string& algorithm, const Instance& inst, Index rank, const StopRule& stop,
                           const ExperimentConfig& c) {
  if (algorithm == "als") return als(inst.noisy, inst.init, stop).report.residual_history;
  if (algorithm == "cg") return cg_els(inst.noisy, inst.init, stop).report.residual_history;
  if (is_dcpd(algorithm)) {
    const std::string phi_name = algorithm.substr(5);
    Rank1Operator phi = phi_name == "oracle" ? oracle_operator({c.oracle_restarts}) : operator_by_name(phi_name);
    DcpdOptions opts;
    opts.stop = stop;
    return dcpd(inst.noisy, rank, phi, opts).report.residual_history;
  }
  throw std::invalid_argument("unknown CP algorithm '" + algorithm + "'");
}

double mean_of(const std::vector<double>& v, const std::vector<TrialOutcome>& ok) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < v.size(); ++k)
    if (ok[k].ok) {
      sum += v[k];
      ++n;
    }
  return n ? sum / n : std::nan("");
}

template <class Body>
std::vector<TrialOutcome> run_trials(int trials, Body&& body) {
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
  parallel_for(trials, [&](int k) {
    try {
      body(k);
    } catch (const std::exception& ex) {
      outcomes[static_cast<std::size_t>(k)] = {false, ex.what()};
    }
  });
  return outcomes;
}

std::uint64_t cell_seed(const ExperimentConfig& c, std::uint64_t cell, int trial) {
  return derive_seed(c.seed, cell, static_cast<std::uint64_t>(trial));
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentResult run_fig2(const ExperimentConfig& c) {
  validate(c);
  ExperimentResult result{c, {}};
  std::vector<Index> ranks = c.ranks.empty() ? std::vector<Index>{0} : c.ranks;
  std::uint64_t cell = 0;
  for (const auto& shape : c.shapes) {
    for (Index rank : ranks) {
      const std::string shape_s = shape_to_string(shape);
      const std::string rank_s = rank == 0 ? "" : std::to_string(rank);
      std::vector<double> delta(static_cast<std::size_t>(c.trials), 0.0);
      const auto outcomes = run_trials(c.trials, [&](int k) {
        Rng rng(cell_seed(c, cell, k));
        const Tensor t = rank == 0 ? nonzero_random(shape, c.field, rng)
                                   : random_cp(shape, rank, c.field, Distribution::kUniform, rng).second;
        delta[static_cast<std::size_t>(k)] = compare_rank1(t, thosvd_operator(), seroap_operator());
      });
      double lowest = INFINITY;
      int negative = 0;
      for (std::size_t k = 0; k < delta.size(); ++k) {
        if (!outcomes[k].ok) continue;
        lowest = std::min(lowest, delta[k]);
        negative += delta[k] < -1e-10;
        if (c.per_trial_rows) {
          ResultRow row = make_row(c, shape_s, rank_s, "", "thosvd-seroap", "delta_phi", delta[k]);
          row.trial = std::to_string(k);
          result.rows.push_back(std::move(row));
        }
      }
      result.rows.push_back(make_row(c, shape_s, rank_s, "", "thosvd-seroap", "min_delta_phi", lowest));
      result.rows.push_back(make_row(c, shape_s, rank_s, "", "thosvd-seroap", "mean_delta_phi", mean_of(delta, outcomes)));
      result.rows.push_back(make_row(c, shape_s, rank_s, "", "thosvd-seroap", "negative_count", negative));
      error_rows(c, result.rows, outcomes, shape_s, rank_s, "", "thosvd-seroap");
      ++cell;
    }
  }
  return result;
}

ExperimentResult run_tables(const ExperimentConfig& c) {
  validate(c);
  for (const auto& a : c.algorithms)
    if (a != "thosvd" && a != "seroap" && a != "als" && a != "ce")
      throw std::invalid_argument("tables: unknown algorithm '" + a + "'");
  ExperimentResult result{c, {}};
  std::uint64_t cell = 0;
  for (const auto& shape : c.shapes) {
    const std::string shape_s = shape_to_string(shape);
    const auto n = static_cast<std::size_t>(c.trials);
    std::vector<double> d_th(n), d_se(n), d_als(n), d_ce(n), it_als(n), it_ce(n);
    const auto outcomes = run_trials(c.trials, [&](int k) {
      const auto i = static_cast<std::size_t>(k);
      const std::uint64_t seed = cell_seed(c, cell, k);
      Rng rng(seed);
      const Tensor t = nonzero_random(shape, c.field, rng);
      OracleOptions oracle;
      oracle.restarts = c.oracle_restarts;
      oracle.seed = derive_seed(seed, 1);
      const double best = residual(t, best_rank1_oracle(t, oracle));
      const Rank1Term se = seroap(t);
      CEState state;
      const Rank1Term ce = ce_refine(t, se, {}, &state);
      const Rank1AlsResult al = rank1_als(t, se, c.max_iterations, c.relative_change);
      d_th[i] = residual(t, thosvd(t)) - best;
      d_se[i] = residual(t, se) - best;
      d_ce[i] = residual(t, ce) - best;
      d_als[i] = residual(t, al.term) - best;
      it_ce[i] = state.iterations;
      it_als[i] = al.iterations;
    });
    auto mse = [&](const std::vector<double>& d) {
      std::vector<double> sq(d.size());
      std::transform(d.begin(), d.end(), sq.begin(), [](double v) { return v * v; });
      return mean_of(sq, outcomes);
    };
    auto beaten = [&](const std::vector<double>& d) {
      int count = 0;
      for (std::size_t k = 0; k < d.size(); ++k) count += outcomes[k].ok && d[k] < -1e-9;
      return count;
    };
    for (const auto& a : c.algorithms) {
      const std::vector<double>& d = a == "thosvd" ? d_th : a == "seroap" ? d_se : a == "als" ? d_als : d_ce;
      result.rows.push_back(make_row(c, shape_s, "1", "", a, "mse", mse(d)));
      result.rows.push_back(make_row(c, shape_s, "1", "", a, "oracle_beaten_count", beaten(d)));
      if (a == "als") result.rows.push_back(make_row(c, shape_s, "1", "", a, "mean_iterations", mean_of(it_als, outcomes)));
      if (a == "ce") result.rows.push_back(make_row(c, shape_s, "1", "", a, "mean_iterations", mean_of(it_ce, outcomes)));
    }
    error_rows(c, result.rows, outcomes, shape_s, "1", "", "all");
    ++cell;
  }
  return result;
}

ExperimentResult run_fig3(const ExperimentConfig& c) {
  validate(c);
  ExperimentResult result{c, {}};
  std::uint64_t cell = 0;
  for (const auto& shape : c.shapes) {
    for (Index rank : c.ranks) {
      const std::string shape_s = shape_to_string(shape);
      const std::string rank_s = std::to_string(rank);
      const std::size_t algs = c.algorithms.size();
      const auto n = static_cast<std::size_t>(c.trials);
      std::vector<std::vector<double>> final_res(algs, std::vector<double>(n));
      std::vector<std::vector<double>> iterations(algs, std::vector<double>(n));
      const auto outcomes = run_trials(c.trials, [&](int k) {
        const Instance inst = make_instance(c, shape, rank, INFINITY, cell_seed(c, cell, k));
        for (std::size_t a = 0; a < algs; ++a) {
          const std::string& alg = c.algorithms[a];
          const StopRule stop{is_dcpd(alg) ? c.dcpd_max_iterations : c.max_iterations, c.relative_change,
                              c.success_threshold};
          const auto history = run_cp(alg, inst, rank, stop, c);
          final_res[a][static_cast<std::size_t>(k)] = history.back();
          iterations[a][static_cast<std::size_t>(k)] = static_cast<double>(history.size() - 1);
        }
      });
      for (std::size_t a = 0; a < algs; ++a) {
        const std::string& alg = c.algorithms[a];
        int successes = 0;
        for (std::size_t k = 0; k < n; ++k) {
          if (!outcomes[k].ok) continue;
          successes += final_res[a][k] <= c.success_threshold;
          if (c.per_trial_rows) {
            ResultRow row = make_row(c, shape_s, rank_s, "inf", alg, "final_residual", final_res[a][k]);
            row.trial = std::to_string(k);
            result.rows.push_back(std::move(row));
          }
        }
        result.rows.push_back(make_row(c, shape_s, rank_s, "inf", alg, "success_percent", 100.0 * successes / c.trials));
        result.rows.push_back(make_row(c, shape_s, rank_s, "inf", alg, "mean_iterations", mean_of(iterations[a], outcomes)));
        error_rows(c, result.rows, outcomes, shape_s, rank_s, "inf", alg);
      }
      ++cell;
    }
  }
  return result;
}

namespace {

// Shared body of fig4 and fig5: fixed-budget residual curves per algorithm.
struct CurveCell {
  std::vector<std::vector<std::vector<double>>> curves;  // [algorithm][trial][iteration]
  std::vector<TrialOutcome> outcomes;
};

CurveCell run_curves(const ExperimentConfig& c, const Shape& shape, Index rank, double snr, std::uint64_t cell) {
  CurveCell out;
  const std::size_t algs = c.algorithms.size();
  const auto len = static_cast<std::size_t>(c.max_iterations) + 1;
  out.curves.assign(algs, std::vector<std::vector<double>>(static_cast<std::size_t>(c.trials)));
  out.outcomes = run_trials(c.trials, [&](int k) {
    const Instance inst = make_instance(c, shape, rank, snr, cell_seed(c, cell, k));
    const StopRule stop{c.max_iterations, c.relative_change, 0.0};
    for (std::size_t a = 0; a < algs; ++a) {
      auto history = run_cp(c.algorithms[a], inst, rank, stop, c);
      history.resize(len, history.back());  // a run that stopped early stays at its last value
      out.curves[a][static_cast<std::size_t>(k)] = std::move(history);
    }
  });
  return out;
}

double curve_mean(const CurveCell& cell, std::size_t a, std::size_t iteration) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < cell.outcomes.size(); ++k)
    if (cell.outcomes[k].ok) {
      sum += cell.curves[a][k][iteration];
      ++n;
    }
  return n ? sum / n : std::nan("");
}

}  // namespace

ExperimentResult run_fig4(const ExperimentConfig& c) {
  validate(c);
  ExperimentResult result{c, {}};
  std::uint64_t cell_id = 0;
  for (const auto& shape : c.shapes) {
    for (Index rank : c.ranks) {
      for (double snr : c.snr_db) {
        const CurveCell cell = run_curves(c, shape, rank, snr, cell_id++);
        const std::string shape_s = shape_to_string(shape);
        const std::string rank_s = std::to_string(rank);
        const std::string snr_s = snr_label(snr);
        std::vector<int> points = c.report_iterations;
        if (points.empty()) {
          points.resize(static_cast<std::size_t>(c.max_iterations) + 1);
          std::iota(points.begin(), points.end(), 0);
        }
        for (std::size_t a = 0; a < c.algorithms.size(); ++a) {
          const std::string& alg = c.algorithms[a];
          for (int it : points) {
            if (it < 0 || it > c.max_iterations) throw std::invalid_argument("fig4: report iteration out of range");
            ResultRow row = make_row(c, shape_s, rank_s, snr_s, alg, "mean_residual",
                                     curve_mean(cell, a, static_cast<std::size_t>(it)));
            row.iteration = std::to_string(it);
            result.rows.push_back(std::move(row));
          }
          result.rows.push_back(make_row(c, shape_s, rank_s, snr_s, alg, "terminal_mean_residual",
                                         curve_mean(cell, a, static_cast<std::size_t>(c.max_iterations))));
          error_rows(c, result.rows, cell.outcomes, shape_s, rank_s, snr_s, alg);
        }
      }
    }
  }
  return result;
}

ExperimentResult run_fig5(const ExperimentConfig& c) {
  validate(c);
  ExperimentResult result{c, {}};
  std::uint64_t cell_id = 0;
  for (const auto& shape : c.shapes) {
    for (Index rank : c.ranks) {
      for (double snr : c.snr_db) {
        const CurveCell cell = run_curves(c, shape, rank, snr, cell_id++);
        const std::string shape_s = shape_to_string(shape);
        const std::string rank_s = std::to_string(rank);
        const std::string snr_s = snr_label(snr);
        for (std::size_t a = 0; a < c.algorithms.size(); ++a) {
          const std::string& alg = c.algorithms[a];
          result.rows.push_back(make_row(c, shape_s, rank_s, snr_s, alg, "mean_final_residual",
                                         curve_mean(cell, a, static_cast<std::size_t>(c.max_iterations))));
          if (c.per_trial_rows) {
            for (std::size_t k = 0; k < cell.outcomes.size(); ++k) {
              if (!cell.outcomes[k].ok) continue;
              ResultRow row = make_row(c, shape_s, rank_s, snr_s, alg, "final_residual", cell.curves[a][k].back());
              row.trial = std::to_string(k);
              result.rows.push_back(std::move(row));
            }
          }
          error_rows(c, result.rows, cell.outcomes, shape_s, rank_s, snr_s, alg);
        }
      }
    }
  }
  return result;
}

ExperimentResult run_conjecture(const ExperimentConfig& c) {
  validate(c);
  ExperimentResult result{c, {}};
  const std::string& alg = c.algorithms.front();
  OracleOptions oracle;
  oracle.restarts = c.oracle_restarts;
  const Rank1Operator phi = alg == "oracle" ? oracle_operator(oracle) : operator_by_name(alg);

  EstimateFConfig f;
  f.shape = c.shapes.front();
  f.rank = c.ranks.front();
  f.sweeps = c.sweeps;
  f.beta_grid = c.beta_grid;
  f.trials = c.trials;
  f.seed = c.seed;
  f.field = c.field;
  f.empirical = !phi.best_rank1;
  const FEstimate est = estimate_F(f, phi);

  const std::string shape_s = shape_to_string(f.shape);
  const std::string rank_s = std::to_string(f.rank);
  for (std::size_t k = 0; k < est.beta.size(); ++k) {
    for (const auto& [name, value] : {std::pair<const char*, double>{"F_hat", est.probability[k]},
                                      {"wilson_lower", est.interval[k].lower},
                                      {"wilson_upper", est.interval[k].upper},
                                      {"half_width", est.interval[k].half_width()}}) {
      ResultRow row = make_row(c, shape_s, rank_s, "inf", phi.name, name, value);
      row.beta = format_double(est.beta[k]);
      row.iteration = std::to_string(est.sweeps);
      result.rows.push_back(std::move(row));
    }
  }
  result.rows.push_back(make_row(c, shape_s, rank_s, "inf", phi.name, "failed_trials", est.failed_trials));
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& c) {
  if (c.experiment == "fig2") return run_fig2(c);
  if (c.experiment == "tables") return run_tables(c);
  if (c.experiment == "fig3") return run_fig3(c);
  if (c.experiment == "fig4") return run_fig4(c);
  if (c.experiment == "fig5") return run_fig5(c);
  if (c.experiment == "conjecture") return run_conjecture(c);
  throw std::invalid_argument("unknown experiment '" + c.experiment + "'");
}

}  // namespace cpdeflate
