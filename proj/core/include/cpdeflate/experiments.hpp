#pragma once

// Monte-Carlo experiment drivers, their configuration format, result rows
// (CSV / JSON), and the per-iteration multiplication-count formulas.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cpdeflate/tensor.hpp"

namespace cpdeflate {

// ---------------------------------------------------------------------------
// Configuration
//
// Flat "key = value" text, one key per line, '#' starts a comment, list values
// are comma separated, shapes are written 3x4x5. Unknown keys are errors.

struct ExperimentConfig {
  std::string experiment;  // fig2 | tables | fig3 | fig4 | fig5 | conjecture
  std::vector<Shape> shapes;
  std::vector<Index> ranks;  // fig2: empty = unstructured tensors, else random_cp inputs
  Field field = Field::kReal;
  std::vector<double> snr_db;  // +inf = noiseless
  int trials = 1;
  std::uint64_t seed = 1;
  std::vector<std::string> algorithms;
  /// ALS and CG iteration budget; for fig4/fig5 the shared curve length.
  int max_iterations = 1000;
  /// DCPD sweep budget (fig3).
  int dcpd_max_iterations = 5000;
  /// Relative residual change stop for the CP solvers; 0 = fixed budget.
  double relative_change = 0.0;
  /// ||E|| threshold that counts as an exact decomposition (fig3).
  double success_threshold = 1e-6;
  /// Scale clean tensors to unit Frobenius norm before adding noise.
  bool normalize = true;
  int oracle_restarts = 64;
  /// Sweeps L for the conjecture experiment.
  int sweeps = 5;
  std::vector<double> beta_grid;  // radians; empty = default grid
  /// Iterations at which fig4 reports curve points; empty = every iteration.
  std::vector<int> report_iterations;
  bool per_trial_rows = true;
  std::string output_dir = "results";
};

/// Desk-scale defaults for an experiment id; throws on an unknown id.
ExperimentConfig default_config(const std::string& experiment);
/// Trial counts used in the original study (300 for fig2-fig5, 200 for the
/// tables, 500 for the conjecture run).
int paper_scale_trials(const std::string& experiment);

/// Applies key = value lines on top of `base`.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base);
ExperimentConfig load_config(const std::string& path, const std::string& experiment);
/// Every key, defaults expanded; parse_config(serialize(c)) reproduces c.
std::string serialize(const ExperimentConfig& config);
/// Throws std::invalid_argument describing the first invalid field.
void validate(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Results

struct ResultRow {
  std::string experiment;
  std::string shape;
  std::string rank;
  std::string snr_db;
  std::string algorithm;
  std::string trial;      // per-trial rows only
  std::string iteration;  // curve rows only
  std::string beta;       // conjecture rows only (radians)
  std::string statistic;
  double value = 0.0;
  int trials = 0;
  std::string status = "ok";
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ResultRow> rows;

  /// First row matching every non-empty selector; throws if none.
  const ResultRow& find(const std::string& statistic, const std::string& algorithm = "",
                        const std::string& shape = "", const std::string& snr_db = "",
                        const std::string& rank = "", const std::string& iteration = "") const;
};

/// RFC 4180 CSV with a header row.
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
/// JSON array of row objects.
void write_json(std::ostream& out, const std::vector<ResultRow>& rows);
/// Writes results.csv, results.json and resolved-config.txt into `dir`.
void write_outputs(const ExperimentResult& result, const std::string& dir);

std::string format_double(double v);  // shortest round-trip text, "inf" for +infinity

// ---------------------------------------------------------------------------
// Drivers

/// Delta-phi = ||T - thosvd(T)|| - ||T - seroap(T)|| per trial; per shape the
/// minimum, mean and the number of trials below -1e-10.
ExperimentResult run_fig2(const ExperimentConfig& config);
/// Rank-one MSE against best_rank1_oracle for THOSVD, SeROAP, and ALS and CE
/// initialized from SeROAP, plus mean ALS / CE iteration counts.
ExperimentResult run_tables(const ExperimentConfig& config);
/// Success percentage (final ||E|| <= threshold) of ALS, CG and DCPD on exact
/// low-rank tensors.
ExperimentResult run_fig3(const ExperimentConfig& config);
/// Mean ||E[R,l]|| per iteration under additive noise; one iteration is one
/// ALS sweep, one CG iteration or one DCPD sweep.
ExperimentResult run_fig4(const ExperimentConfig& config);
/// Mean final residual per (rank, SNR, algorithm).
ExperimentResult run_fig5(const ExperimentConfig& config);
/// Monte-Carlo F_L[beta] with Wilson intervals.
ExperimentResult run_conjecture(const ExperimentConfig& config);

ExperimentResult run_experiment(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Multiplication counts per iteration

struct FlopEstimate {
  std::string algorithm;
  Shape dims;
  Index rank = 0;
  int order = 0;
  int k = 0;
  std::uint64_t count = 0;
};

/// Leading-order counts, P = prod I_j:
///   als          N R P
///   cg           ((2^N + 1) R + N^2) P
///   thosvd       (2 N k + 2) P
///   seroap       (2 k + 2) P
///   dcpd-thosvd  (2 N k + 2) R P
///   dcpd-seroap  (2 k + 2) R P
FlopEstimate complexity_estimate(const std::string& algorithm, const Shape& dims, Index rank, int k);

}  // namespace cpdeflate
