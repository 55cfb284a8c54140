#ifndef LPEP_DATASET_HPP_
#define LPEP_DATASET_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "lpep/errors.hpp"

namespace lpep {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using BinaryVector = Eigen::Matrix<int, Eigen::Dynamic, 1>;

// Observed data: binary response y and full design matrix X whose first
// column is the intercept (all ones). p counts the non-intercept covariates.
struct Dataset {
  BinaryVector y;                        // length n, entries in {0,1}
  Matrix X;                              // n x (p+1), X.col(0) == 1
  std::vector<std::string> column_names; // length p+1, [0] = "(Intercept)"

  int n() const { return static_cast<int>(X.rows()); }
  int p() const { return static_cast<int>(X.cols()) - 1; }

  // Enforces the structural invariants; throws DataError on violation.
  void validate() const;

  // Content hash of (X, y); memo keys use it to tell datasets apart.
  std::uint64_t fingerprint() const;

 private:
  mutable std::uint64_t fingerprint_ = 0;
  mutable bool fingerprint_ready_ = false;
};

// Builds a Dataset from raw pieces, prepending the intercept column and
// running the full-rank and shape checks.
Dataset make_dataset(const BinaryVector& y, const Matrix& covariates,
                     std::vector<std::string> names = {});

// Inclusion vector over the p+1 design columns. The intercept bit is always
// set; only bits 1..p vary.
class ModelIndicator {
 public:
  ModelIndicator() = default;
  explicit ModelIndicator(int p) : gamma_(p + 1, 0) { gamma_[0] = 1; }

  static ModelIndicator null_model(int p) { return ModelIndicator(p); }
  static ModelIndicator full_model(int p) {
    ModelIndicator m(p);
    for (int j = 1; j <= p; ++j) m.gamma_[j] = 1;
    return m;
  }
  // bits[j] for covariates j = 1..p (intercept implied).
  static ModelIndicator from_bits(int p, const std::vector<int>& bits);

  int p() const { return static_cast<int>(gamma_.size()) - 1; }
  int p_gamma() const {
    int s = 0;
    for (std::size_t j = 1; j < gamma_.size(); ++j) s += gamma_[j];
    return s;
  }
  // Active design columns (intercept included): p_gamma()+1 of them.
  int dim() const { return p_gamma() + 1; }

  bool includes(int j) const { return gamma_[j] != 0; }
  void set(int j, bool on) {
    if (j == 0) throw ArgumentError("ModelIndicator: intercept bit is fixed");
    gamma_[j] = on ? 1 : 0;
  }
  void flip(int j) {
    if (j == 0) throw ArgumentError("ModelIndicator: intercept bit is fixed");
    gamma_[j] ^= 1;
  }

  // Indices of active columns in increasing order, starting with 0.
  std::vector<int> active_columns() const {
    std::vector<int> idx;
    idx.reserve(dim());
    for (int j = 0; j < static_cast<int>(gamma_.size()); ++j)
      if (gamma_[j]) idx.push_back(j);
    return idx;
  }

  // Covariate-bit mask over j = 1..p (intercept excluded), low bit = j=1.
  // Supports p up to 128.
  struct Key {
    std::uint64_t w0 = 0, w1 = 0;
    bool operator==(const Key& o) const { return w0 == o.w0 && w1 == o.w1; }
    bool operator<(const Key& o) const {
      return w1 != o.w1 ? w1 < o.w1 : w0 < o.w0;
    }
  };
  Key key() const {
    Key k;
    for (int j = 1; j < static_cast<int>(gamma_.size()); ++j) {
      if (!gamma_[j]) continue;
      int b = j - 1;
      if (b < 64) k.w0 |= (1ULL << b);
      else k.w1 |= (1ULL << (b - 64));
    }
    return k;
  }

  bool operator==(const ModelIndicator& o) const { return gamma_ == o.gamma_; }
  bool operator!=(const ModelIndicator& o) const { return gamma_ != o.gamma_; }

 private:
  std::vector<std::uint8_t> gamma_;
};

// Submatrix of X with the model's active columns.
Matrix design_submatrix(const Matrix& X, const ModelIndicator& model);

struct KeyHash {
  std::size_t operator()(const ModelIndicator::Key& k) const {
    std::uint64_t z = k.w0 * 0x9E3779B97F4A7C15ULL ^ (k.w1 + 0xD1342543DE82EF95ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    return static_cast<std::size_t>(z ^ (z >> 31));
  }
};

}  // namespace lpep

#endif  // LPEP_DATASET_HPP_
