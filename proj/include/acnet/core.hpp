#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace acnet {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

// Binary region x field or field x field matrix with entries in {0, 1}.
using Mask = Matrix<std::uint8_t>;

using Index = Eigen::Index;

// Base class for everything the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input or configuration; maps to CLI exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Numerical or algorithmic failure; maps to CLI exit code 2.
class ComputeError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public ComputeError {
 public:
  ConvergenceError(const std::string& what, int iterations, double residual)
      : ComputeError(what + " (iterations=" + std::to_string(iterations) +
                     ", residual=" + std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}

  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

// Ordered set of string labels with O(1) reverse lookup. Used for the
// region and field axes so that every matrix in a run shares one indexing.
class Labels {
 public:
  Labels() = default;
  explicit Labels(std::vector<std::string> names);

  Index size() const { return static_cast<Index>(names_.size()); }
  bool empty() const { return names_.empty(); }
  const std::string& operator[](Index i) const { return names_[static_cast<std::size_t>(i)]; }
  const std::vector<std::string>& names() const { return names_; }

  bool contains(const std::string& name) const { return lookup_.count(name) != 0; }
  // Throws ValidationError when the label is unknown.
  Index index_of(const std::string& name) const;

  bool operator==(const Labels& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Index> lookup_;
};

}  // namespace acnet
