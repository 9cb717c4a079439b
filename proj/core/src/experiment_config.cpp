#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cpdeflate/experiments.hpp"

namespace cpdeflate {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  if (trim(value).empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = value.find(',', pos);
    out.push_back(trim(value.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

template <class T>
T parse_integer(const std::string& key, const std::string& text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::invalid_argument("config: '" + key + "' expects an integer, got '" + text + "'");
  return value;
}

double parse_double(const std::string& key, const std::string& text) {
  if (text == "inf" || text == "+inf" || text == "none") return kInf;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::invalid_argument("config: '" + key + "' expects a number, got '" + text + "'");
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw std::invalid_argument("config: '" + key + "' expects true or false, got '" + text + "'");
}

template <class T, class F>
std::string join(const std::vector<T>& items, F&& format) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += format(items[i]);
  }
  return out;
}

std::vector<Shape> cubes(Index from, Index to) {
  std::vector<Shape> out;
  for (Index n = from; n <= to; ++n) out.push_back({n, n, n});
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.output_dir = "results/" + experiment;
  if (experiment == "fig2") {
    c.shapes = {{3, 4, 5}, {3, 4, 20}, {3, 20, 20}, {20, 20, 20}};
    c.field = Field::kComplex;
    c.trials = 300;
    c.algorithms = {"thosvd", "seroap"};
  } else if (experiment == "tables") {
    c.shapes = {{2, 2, 2}, {3, 3, 3}};
    c.field = Field::kReal;
    c.trials = 200;
    c.algorithms = {"thosvd", "seroap", "als", "ce"};
    c.relative_change = 1e-10;
    c.per_trial_rows = false;
  } else if (experiment == "fig3") {
    c.shapes = cubes(3, 8);
    c.ranks = {3};
    c.trials = 50;
    c.algorithms = {"als", "cg", "dcpd-thosvd", "dcpd-seroap"};
  } else if (experiment == "fig4") {
    c.shapes = {{5, 5, 5}};
    c.ranks = {3};
    c.snr_db = {40, 30, 20};
    c.trials = 50;
    c.algorithms = {"als", "cg", "dcpd-thosvd", "dcpd-seroap"};
    c.max_iterations = 300;
    c.per_trial_rows = false;
  } else if (experiment == "fig5") {
    c.shapes = {{8, 8, 8}};
    c.ranks = {3, 4, 5, 6, 7};
    c.snr_db = {30, 40};
    c.trials = 50;
    c.algorithms = {"als", "cg", "dcpd-thosvd", "dcpd-seroap"};
    c.max_iterations = 500;
    c.per_trial_rows = false;
  } else if (experiment == "conjecture") {
    c.shapes = {{2, 2, 2}};
    c.ranks = {2};
    c.trials = 500;
    c.algorithms = {"oracle"};
    c.sweeps = 5;
    c.per_trial_rows = false;
  } else {
    throw std::invalid_argument("unknown experiment '" + experiment + "'");
  }
  return c;
}

int paper_scale_trials(const std::string& experiment) {
  if (experiment == "tables") return 200;
  if (experiment == "conjecture") return 500;
  if (experiment == "fig2" || experiment == "fig3" || experiment == "fig4" || experiment == "fig5") return 300;
  throw std::invalid_argument("unknown experiment '" + experiment + "'");
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig c) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "experiment") {
      c.experiment = value;
    } else if (key == "shapes") {
      c.shapes.clear();
      for (const auto& s : split_list(value)) c.shapes.push_back(parse_shape(s));
    } else if (key == "ranks") {
      c.ranks.clear();
      for (const auto& s : split_list(value)) c.ranks.push_back(parse_integer<Index>(key, s));
    } else if (key == "field") {
      c.field = parse_field(value);
    } else if (key == "snr_db") {
      c.snr_db.clear();
      for (const auto& s : split_list(value)) c.snr_db.push_back(parse_double(key, s));
    } else if (key == "trials") {
      c.trials = parse_integer<int>(key, value);
    } else if (key == "seed") {
      c.seed = parse_integer<std::uint64_t>(key, value);
    } else if (key == "algorithms") {
      c.algorithms = split_list(value);
    } else if (key == "max_iterations") {
      c.max_iterations = parse_integer<int>(key, value);
    } else if (key == "dcpd_max_iterations") {
      c.dcpd_max_iterations = parse_integer<int>(key, value);
    } else if (key == "relative_change") {
      c.relative_change = parse_double(key, value);
    } else if (key == "success_threshold") {
      c.success_threshold = parse_double(key, value);
    } else if (key == "normalize") {
      c.normalize = parse_bool(key, value);
    } else if (key == "oracle_restarts") {
      c.oracle_restarts = parse_integer<int>(key, value);
    } else if (key == "sweeps") {
      c.sweeps = parse_integer<int>(key, value);
    } else if (key == "beta_grid") {
      c.beta_grid.clear();
      for (const auto& s : split_list(value)) c.beta_grid.push_back(parse_double(key, s));
    } else if (key == "report_iterations") {
      c.report_iterations.clear();
      for (const auto& s : split_list(value)) c.report_iterations.push_back(parse_integer<int>(key, s));
    } else if (key == "per_trial_rows") {
      c.per_trial_rows = parse_bool(key, value);
    } else if (key == "out") {
      c.output_dir = value;
    } else {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, const std::string& experiment) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  ExperimentConfig c = parse_config(in, default_config(experiment));
  if (c.experiment != experiment)
    throw std::invalid_argument("config '" + path + "' is for experiment '" + c.experiment + "', not '" +
                                experiment + "'");
  return c;
}

std::string serialize(const ExperimentConfig& c) {
  std::ostringstream out;
  auto id = [](const std::string& s) { return s; };
  auto num = [](double v) { return format_double(v); };
  auto integer = [](auto v) { return std::to_string(v); };
  out << "experiment = " << c.experiment << '\n'
      << "shapes = " << join(c.shapes, shape_to_string) << '\n'
      << "ranks = " << join(c.ranks, integer) << '\n'
      << "field = " << to_string(c.field) << '\n'
      << "snr_db = " << join(c.snr_db, num) << '\n'
      << "trials = " << c.trials << '\n'
      << "seed = " << c.seed << '\n'
      << "algorithms = " << join(c.algorithms, id) << '\n'
      << "max_iterations = " << c.max_iterations << '\n'
      << "dcpd_max_iterations = " << c.dcpd_max_iterations << '\n'
      << "relative_change = " << format_double(c.relative_change) << '\n'
      << "success_threshold = " << format_double(c.success_threshold) << '\n'
      << "normalize = " << (c.normalize ? "true" : "false") << '\n'
      << "oracle_restarts = " << c.oracle_restarts << '\n'
      << "sweeps = " << c.sweeps << '\n'
      << "beta_grid = " << join(c.beta_grid, num) << '\n'
      << "report_iterations = " << join(c.report_iterations, integer) << '\n'
      << "per_trial_rows = " << (c.per_trial_rows ? "true" : "false") << '\n'
      << "out = " << c.output_dir << '\n';
  return out.str();
}

void validate(const ExperimentConfig& c) {
  default_config(c.experiment);  // throws on an unknown id
  if (c.trials < 1) throw std::invalid_argument("config: trials must be at least 1");
  if (c.shapes.empty()) throw std::invalid_argument("config: at least one shape is required");
  for (const auto& s : c.shapes) shape_size(s);
  for (Index r : c.ranks)
    if (r < 1) throw std::invalid_argument("config: ranks must be positive");
  if (c.max_iterations < 1 || c.dcpd_max_iterations < 1)
    throw std::invalid_argument("config: iteration budgets must be at least 1");
  if (!(c.relative_change >= 0.0) || !(c.success_threshold >= 0.0))
    throw std::invalid_argument("config: tolerances must be non-negative");
  if (c.oracle_restarts < 0) throw std::invalid_argument("config: oracle_restarts must be non-negative");
  if (c.sweeps < 1) throw std::invalid_argument("config: sweeps must be at least 1");
  for (double s : c.snr_db)
    if (std::isnan(s)) throw std::invalid_argument("config: SNR must be a number or inf");
  const bool needs_rank = c.experiment == "fig3" || c.experiment == "fig4" || c.experiment == "fig5" ||
                          c.experiment == "conjecture";
  if (needs_rank && c.ranks.empty()) throw std::invalid_argument("config: experiment needs at least one rank");
  if ((c.experiment == "fig4" || c.experiment == "fig5") && c.snr_db.empty())
    throw std::invalid_argument("config: experiment needs at least one SNR (inf for noiseless)");
  if (c.algorithms.empty()) throw std::invalid_argument("config: at least one algorithm is required");
  if (c.experiment == "tables") {
    for (const auto& s : c.shapes)
      if (s.size() != 3) throw std::invalid_argument("config: the tables experiment needs three-way shapes");
  }
}

}  // namespace cpdeflate
