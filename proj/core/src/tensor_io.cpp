#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cpdeflate/tensor.hpp"

namespace cpdeflate {

Tensor read_tensor(std::istream& in) {
  std::string header;
  while (std::getline(in, header))
    if (header.find_first_not_of(" \t\r") != std::string::npos) break;

  std::istringstream hs(header);
  std::string key;
  if (!(hs >> key) || key != "shape:") throw std::runtime_error("tensor file: expected 'shape:' header");
  Shape shape;
  Field field = Field::kReal;
  bool saw_field = false;
  std::string token;
  while (hs >> token) {
    if (token == "field:") {
      if (!(hs >> token)) throw std::runtime_error("tensor file: missing field value");
      field = parse_field(token);
      saw_field = true;
      break;
    }
    std::size_t used = 0;
    const long long extent = std::stoll(token, &used);
    if (used != token.size() || extent <= 0) throw std::runtime_error("tensor file: bad extent '" + token + "'");
    shape.push_back(static_cast<Index>(extent));
  }
  if (!saw_field) throw std::runtime_error("tensor file: missing 'field:'");

  const Index n = shape_size(shape);
  std::vector<Complex> data;
  data.reserve(static_cast<std::size_t>(n));
  std::string line;
  while (static_cast<Index>(data.size()) < n && std::getline(in, line)) {
    std::istringstream ls(line);
    double re = 0.0;
    if (!(ls >> re)) continue;  // blank line
    double im = 0.0;
    if (field == Field::kComplex && !(ls >> im))
      throw std::runtime_error("tensor file: complex entry needs 're im'");
    data.emplace_back(re, im);
  }
  if (static_cast<Index>(data.size()) != n) throw std::runtime_error("tensor file: too few entries");
  return Tensor(std::move(shape), std::move(data), field);
}

Tensor read_tensor_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tensor file '" + path + "'");
  return read_tensor(in);
}

void write_tensor(std::ostream& out, const Tensor& t) {
  out << "shape:";
  for (Index e : t.shape()) out << ' ' << e;
  out << " field: " << to_string(t.field()) << '\n';
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& z : t.data()) {
    out << z.real();
    if (t.field() == Field::kComplex) out << ' ' << z.imag();
    out << '\n';
  }
  out.precision(old);
}

}  // namespace cpdeflate
