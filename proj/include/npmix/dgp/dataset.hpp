#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace npmix {

// Label-free read-only view of (x, z) observations. Covariates are stored
// column-major so each coordinate is contiguous.
class ObservationView {
 public:
  ObservationView(std::span<const double> x_columns, std::span<const double> z, std::size_t k);

  std::size_t n() const { return z_.size(); }
  std::size_t k() const { return k_; }
  std::span<const double> column(std::size_t d) const { return x_.subspan(d * n(), n()); }
  std::span<const double> z() const { return z_; }
  double x(std::size_t row, std::size_t d) const { return x_[d * n() + row]; }

 private:
  std::span<const double> x_;
  std::span<const double> z_;
  std::size_t k_;
};

class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t k, std::vector<double> x_columns, std::vector<double> z, std::vector<int> labels = {});

  std::size_t n() const { return z_.size(); }
  std::size_t k() const { return k_; }
  ObservationView observations() const { return ObservationView(x_, z_, k_); }
  // Latent component labels (1-based); diagnostics only.
  const std::vector<int>& latent_labels() const { return labels_; }
  bool has_labels() const { return !labels_.empty(); }

  std::uint64_t seed = 0;
  std::string provenance;

 private:
  std::size_t k_ = 1;
  std::vector<double> x_;
  std::vector<double> z_;
  std::vector<int> labels_;
};

// Shortest round-trip decimal form.
std::string format_double(double v);

void write_csv(const Dataset& data, std::ostream& out, bool with_labels = true);
void write_csv(const Dataset& data, const std::string& path, bool with_labels = true);
// Reads `x1,...,xk,z[,label]`; throws IoError on malformed input.
Dataset read_csv(std::istream& in);
Dataset read_csv(const std::string& path);

}  // namespace npmix
