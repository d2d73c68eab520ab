#include "npmix/dgp/dataset.hpp"

#include "npmix/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace npmix {

ObservationView::ObservationView(std::span<const double> x_columns, std::span<const double> z, std::size_t k)
    : x_(x_columns), z_(z), k_(k) {
  if (x_.size() != z_.size() * k_) fail(ErrorKind::DomainError, "covariate storage does not match n*k");
}

Dataset::Dataset(std::size_t k, std::vector<double> x_columns, std::vector<double> z, std::vector<int> labels)
    : k_(k), x_(std::move(x_columns)), z_(std::move(z)), labels_(std::move(labels)) {
  if (k_ == 0) fail(ErrorKind::DomainError, "dataset needs at least one covariate");
  if (x_.size() != z_.size() * k_) fail(ErrorKind::DomainError, "covariate storage does not match n*k");
  if (!labels_.empty() && labels_.size() != z_.size()) fail(ErrorKind::DomainError, "label count differs from n");
  for (double v : x_)
    if (!std::isfinite(v)) fail(ErrorKind::DomainError, "non-finite covariate");
  for (double v : z_)
    if (!std::isfinite(v)) fail(ErrorKind::DomainError, "non-finite outcome");
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_csv(const Dataset& data, std::ostream& out, bool with_labels) {
  const bool labels = with_labels && data.has_labels();
  for (std::size_t d = 0; d < data.k(); ++d) out << "x" << (d + 1) << ",";
  out << "z" << (labels ? ",label" : "") << "\n";
  const ObservationView v = data.observations();
  for (std::size_t i = 0; i < data.n(); ++i) {
    for (std::size_t d = 0; d < data.k(); ++d) out << format_double(v.x(i, d)) << ",";
    out << format_double(v.z()[i]);
    if (labels) out << "," << data.latent_labels()[i];
    out << "\n";
  }
}

void write_csv(const Dataset& data, const std::string& path, bool with_labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  write_csv(data, out, with_labels);
  if (!out) fail(ErrorKind::IoError, "write to '" + path + "' failed");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\r')) --last;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
    fail(ErrorKind::IoError, "line " + std::to_string(line_no) + ": cannot parse number '" + s + "'");
  return v;
}

}  // namespace

Dataset read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::IoError, "empty dataset file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line);
  std::size_t k = 0;
  while (k < header.size() && header[k] == "x" + std::to_string(k + 1)) ++k;
  if (k == 0 || k >= header.size() || header[k] != "z") fail(ErrorKind::IoError, "header must be x1,...,xk,z[,label]");
  const bool labels = header.size() == k + 2 && header[k + 1] == "label";
  if (header.size() != k + 1 + (labels ? 1 : 0)) fail(ErrorKind::IoError, "unexpected header columns");

  std::vector<std::vector<double>> cols(k);
  std::vector<double> z;
  std::vector<int> lab;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size()) fail(ErrorKind::IoError, "line " + std::to_string(line_no) + ": wrong column count");
    for (std::size_t d = 0; d < k; ++d) cols[d].push_back(parse_double(cells[d], line_no));
    z.push_back(parse_double(cells[k], line_no));
    if (labels) {
      const double l = parse_double(cells[k + 1], line_no);
      if (l < 1 || l != std::floor(l)) fail(ErrorKind::IoError, "line " + std::to_string(line_no) + ": label must be a positive integer");
      lab.push_back(static_cast<int>(l));
    }
  }
  std::vector<double> x;
  x.reserve(k * z.size());
  for (auto& c : cols) x.insert(x.end(), c.begin(), c.end());
  return Dataset(k, std::move(x), std::move(z), std::move(lab));
}

Dataset read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open '" + path + "'");
  Dataset d = read_csv(in);
  d.provenance = "file:" + path;
  return d;
}

}  // namespace npmix
