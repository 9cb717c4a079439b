#include "cpdeflate/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cpdeflate/parallel.hpp"

namespace cpdeflate {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

Angle safe_angle(const Tensor& a, const Tensor& b) {
  if (squared_norm(a) == 0.0 || squared_norm(b) == 0.0) return Angle(kHalfPi);
  return angle(a, b);
}

void require_theorem_context(bool best_rank1, bool empirical, const std::string& name) {
  if (!best_rank1 && !empirical)
    throw std::invalid_argument("operator '" + name +
                                "' is not a best rank-1 approximation; pass empirical = true to study it anyway");
}

}  // namespace

const Angle& AngleTable::at(int r, int l) const {
  if (r < 1 || r > rank || l < 2 || l > sweeps) throw std::out_of_range("angle table: (r, l) out of range");
  return gamma[static_cast<std::size_t>(l - 2)][static_cast<std::size_t>(r - 1)];
}

double AngleTable::c_at(int l) const {
  if (l < 2 || l > sweeps) throw std::out_of_range("angle table: sweep out of range");
  return c[static_cast<std::size_t>(l - 2)];
}

AngleTable angle_table(const DeflationTrace& trace, GammaConvention convention) {
  if (!trace.retains_tensors()) throw std::invalid_argument("angle_table: trace recorded norms only");
  AngleTable table;
  table.rank = trace.rank;
  table.sweeps = trace.sweeps();
  const int big_r = static_cast<int>(trace.rank);
  for (int l = 2; l <= table.sweeps; ++l) {
    std::vector<Angle> row;
    double c = 1.0;
    for (int r = 1; r <= big_r; ++r) {
      const Tensor& e = r == 1 ? trace.e_at(big_r, l - 1) : trace.e_at(r - 1, l);
      const int xr = (convention == GammaConvention::kFirstComponent) ? 1 : r;
      const Angle g = safe_angle(e, trace.x_at(xr, l - 1));
      c *= g.sin();
      row.push_back(g);
    }
    table.gamma.push_back(std::move(row));
    table.c.push_back(std::clamp(c, 0.0, 1.0));
  }
  return table;
}

Lemma1Check check_lemma1(const Tensor& x, const Tensor& e, const Rank1Operator& phi, bool empirical) {
  require_theorem_context(phi.best_rank1, empirical, phi.name);
  Lemma1Check out;
  const Tensor y = x + e;
  if (squared_norm(y) == 0.0) {
    out.lhs = 0.0;
  } else {
    out.lhs = residual(y, phi.apply(y));
  }
  out.rhs = safe_angle(e, x).sin() * norm(e);
  out.holds = out.lhs <= out.rhs + kTheoremSlack;
  return out;
}

int CorollaryReport::violations() const {
  int v = 0;
  for (const auto& rec : corollary1) v += !rec.holds;
  for (const auto& rec : corollary2) v += !rec.holds;
  for (const auto& rec : stagnation) v += !rec.holds;
  return v;
}

CorollaryReport check_corollaries(const DeflationTrace& trace, bool empirical) {
  require_theorem_context(trace.best_rank1, empirical, trace.operator_name);
  const AngleTable table = angle_table(trace);
  const int big_r = static_cast<int>(trace.rank);
  CorollaryReport report;
  for (int l = 2; l <= trace.sweeps(); ++l) {
    for (int r = 1; r <= big_r; ++r) {
      const double before = r == 1 ? trace.step(big_r, l - 1).e_norm : trace.step(r - 1, l).e_norm;
      InequalityRecord rec;
      rec.r = r;
      rec.l = l;
      rec.lhs = trace.step(r, l).e_norm;
      rec.rhs = table.at(r, l).sin() * before;
      rec.holds = rec.lhs <= rec.rhs + kTheoremSlack;
      report.corollary1.push_back(rec);
    }
    const double prev = trace.sweep_residuals[static_cast<std::size_t>(l - 2)];
    const double cur = trace.sweep_residuals[static_cast<std::size_t>(l - 1)];
    InequalityRecord rec;
    rec.l = l;
    rec.lhs = cur;
    rec.rhs = table.c_at(l) * prev;
    rec.holds = rec.lhs <= rec.rhs + kTheoremSlack;
    report.corollary2.push_back(rec);

    if (prev >= 1e-4 && cur >= (1.0 - 1e-6) * prev) {
      StagnationRecord s;
      s.l = l;
      s.ratio = cur / prev;
      s.c = table.c_at(l);
      s.holds = s.c >= 1.0 - 1e-3;
      report.stagnation.push_back(s);
    }
  }
  return report;
}

int ConeReport::violations() const {
  int v = 0;
  for (const auto& rec : decay) v += !rec.holds;
  return v;
}

double predict_decay(const Angle& beta, int sweeps) {
  if (sweeps < 1) throw std::invalid_argument("predict_decay: sweeps must be at least 1");
  return std::pow(beta.sin(), sweeps - 1);
}

ConeReport beta_bound(const DeflationTrace& trace, bool empirical) {
  require_theorem_context(trace.best_rank1, empirical, trace.operator_name);
  const AngleTable table = angle_table(trace);
  ConeReport report;
  double beta = trace.sweeps() >= 2 ? 0.0 : kHalfPi;
  for (const auto& row : table.gamma) {
    double lowest = kHalfPi;
    for (const auto& g : row) lowest = std::min(lowest, g.radians());
    beta = std::max(beta, lowest);
  }
  report.beta_bound = Angle(beta);

  const auto& z = trace.sweep_residuals;
  for (std::size_t l = 1; l < z.size(); ++l) {
    const double ratio = z[l - 1] > 0 ? z[l] / z[l - 1] : 0.0;
    report.ratios.push_back(ratio);
    report.stagnating.push_back(z[l - 1] >= 1e-4 && ratio >= 1.0 - 1e-6);
    InequalityRecord rec;
    rec.l = static_cast<int>(l + 1);
    rec.lhs = z[l];
    rec.rhs = predict_decay(report.beta_bound, rec.l) * z[0];
    rec.holds = rec.lhs <= rec.rhs + kTheoremSlack;
    report.decay.push_back(rec);
  }
  return report;
}

WilsonInterval wilson_interval(int successes, int trials, double z) {
  if (trials <= 0 || successes < 0 || successes > trials)
    throw std::invalid_argument("wilson_interval: need 0 <= successes <= trials, trials > 0");
  const double n = trials;
  const double p = successes / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  // center and half coincide at p = 0 or 1 in exact arithmetic; pin the ends.
  const double lower = successes == 0 ? 0.0 : std::max(0.0, center - half);
  const double upper = successes == trials ? 1.0 : std::min(1.0, center + half);
  return {lower, upper};
}

std::vector<double> default_beta_grid() {
  std::vector<double> grid;
  for (int k = 0; k < 20; ++k) grid.push_back(kHalfPi * k / 20.0);
  grid.push_back(kHalfPi);
  for (double d : {1e-2, 1e-3, 1e-4}) grid.push_back(kHalfPi - d);
  std::sort(grid.begin(), grid.end());
  return grid;
}

FEstimate estimate_F(const EstimateFConfig& config, const Rank1Operator& phi) {
  require_theorem_context(phi.best_rank1, config.empirical, phi.name);
  if (config.trials < 1) throw std::invalid_argument("estimate_F: trials must be at least 1");
  if (config.sweeps < 1) throw std::invalid_argument("estimate_F: L must be at least 1");
  const std::vector<double> grid = config.beta_grid.empty() ? default_beta_grid() : config.beta_grid;
  for (double b : grid)
    if (!(b >= 0.0 && b <= kHalfPi)) throw std::invalid_argument("estimate_F: beta outside [0, pi/2]");

  // Per trial: which grid points satisfy the chained event (-1 = trial failed).
  std::vector<std::vector<int>> hits(static_cast<std::size_t>(config.trials));
  parallel_for(config.trials, [&](int trial) {
    auto& row = hits[static_cast<std::size_t>(trial)];
    try {
      const auto [model, t] = random_cp(config.shape, config.rank, config.field, Distribution::kUniform,
                                        derive_seed(config.seed, static_cast<std::uint64_t>(trial)));
      DcpdOptions opts;
      opts.stop = {config.sweeps, 0.0, 0.0};
      const DcpdResult run = dcpd(t, config.rank, phi, opts);
      std::vector<double> z = run.trace.sweep_residuals;
      z.resize(static_cast<std::size_t>(config.sweeps), 0.0);  // a run stops early only at exactly zero
      for (double b : grid) {
        const double s = std::sin(b);
        bool ok = true;
        for (std::size_t l = 1; l < z.size() && ok; ++l) ok = z[l] <= s * z[l - 1] + 1e-10;
        row.push_back(ok ? 1 : 0);
      }
    } catch (const std::exception&) {
      row.assign(1, -1);
    }
  });

  FEstimate out;
  out.sweeps = config.sweeps;
  out.beta = grid;
  out.trials = config.trials;
  out.successes.assign(grid.size(), 0);
  for (const auto& row : hits) {
    if (row.size() == 1 && row[0] == -1) {
      ++out.failed_trials;
      continue;
    }
    for (std::size_t k = 0; k < grid.size(); ++k) out.successes[k] += row[k];
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out.probability.push_back(static_cast<double>(out.successes[k]) / config.trials);
    out.interval.push_back(wilson_interval(out.successes[k], config.trials));
  }
  return out;
}

}  // namespace cpdeflate
