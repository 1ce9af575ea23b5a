#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mwgan {

// Dense row-major 2D grid of doubles.
class Plane {
 public:
  Plane() = default;
  Plane(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}
  Plane(int rows, int cols, std::vector<double> data);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  std::vector<double>& storage() noexcept { return data_; }
  const std::vector<double>& storage() const noexcept { return data_; }

  bool same_shape(const Plane& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

  double sum_squares() const noexcept;
  double max_abs_diff(const Plane& o) const;

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// One luma plane of a video frame plus sequence metadata.
struct Frame {
  Plane samples;
  std::string seq_id;
  int index = 0;
  std::optional<int> qp;

  int height() const noexcept { return samples.rows(); }
  int width() const noexcept { return samples.cols(); }
};

}  // namespace mwgan
