#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cpdeflate/experiments.hpp"

namespace cpdeflate {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

const ResultRow& ExperimentResult::find(const std::string& statistic, const std::string& algorithm,
                                        const std::string& shape, const std::string& snr_db,
                                        const std::string& rank, const std::string& iteration) const {
  auto match = [](const std::string& want, const std::string& have) { return want.empty() || want == have; };
  for (const auto& row : rows) {
    if (row.statistic == statistic && match(algorithm, row.algorithm) && match(shape, row.shape) &&
        match(snr_db, row.snr_db) && match(rank, row.rank) && match(iteration, row.iteration) && row.trial.empty())
      return row;
  }
  throw std::out_of_range("no result row for statistic '" + statistic + "' algorithm '" + algorithm + "' shape '" +
                          shape + "' snr '" + snr_db + "' rank '" + rank + "' iteration '" + iteration + "'");
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "experiment,shape,rank,snr_db,algorithm,trial,iteration,beta,statistic,value,trials,status\r\n";
  for (const auto& r : rows) {
    out << csv_field(r.experiment) << ',' << csv_field(r.shape) << ',' << csv_field(r.rank) << ','
        << csv_field(r.snr_db) << ',' << csv_field(r.algorithm) << ',' << csv_field(r.trial) << ','
        << csv_field(r.iteration) << ',' << csv_field(r.beta) << ',' << csv_field(r.statistic) << ',' << format_double(r.value) << ','
        << r.trials << ',' << csv_field(r.status) << "\r\n";
  }
}

void write_json(std::ostream& out, const std::vector<ResultRow>& rows) {
  nlohmann::ordered_json array = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json o;
    o["experiment"] = r.experiment;
    o["shape"] = r.shape;
    o["rank"] = r.rank;
    o["snr_db"] = r.snr_db;
    o["algorithm"] = r.algorithm;
    o["trial"] = r.trial;
    o["iteration"] = r.iteration;
    o["beta"] = r.beta;
    o["statistic"] = r.statistic;
    if (std::isfinite(r.value))
      o["value"] = r.value;
    else
      o["value"] = format_double(r.value);
    o["trials"] = r.trials;
    o["status"] = r.status;
    array.push_back(std::move(o));
  }
  out << array.dump(2) << '\n';
}

void write_outputs(const ExperimentResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  auto open = [&](const char* name) {
    std::ofstream f(base / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + (base / name).string() + "'");
    return f;
  };
  {
    auto f = open("results.csv");
    write_csv(f, result.rows);
  }
  {
    auto f = open("results.json");
    write_json(f, result.rows);
  }
  {
    auto f = open("resolved-config.txt");
    f << serialize(result.config);
  }
}

}  // namespace cpdeflate
