#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtmg {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Contiguous Eigen vector (or contiguous segment) as a read-only span.
template <typename V>
std::span<const double> as_span(const V& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

/// Invalid user input: unknown tags, out-of-range levels or degrees.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A structural defect detected while assembling (bad basis, bad mesh).
class AssemblyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Multigrid setup failed, e.g. the spectral-radius estimate did not settle.
class SetupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}

  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace rtmg
