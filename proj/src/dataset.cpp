#include "lpep/dataset.hpp"

#include <Eigen/QR>

namespace lpep {

void Dataset::validate() const {
  const int nn = n();
  const int pp = p();
  if (nn <= 0) throw DataError("dataset: empty");
  if (y.size() != nn) throw DataError("dataset: y length does not match X rows");
  for (int i = 0; i < nn; ++i) {
    if (y[i] != 0 && y[i] != 1)
      throw DataError("dataset: response must be 0/1, got " + std::to_string(y[i]) +
                      " at row " + std::to_string(i + 1));
  }
  if ((X.col(0).array() != 1.0).any())
    throw DataError("dataset: first design column must be the intercept (all ones)");
  if (!X.allFinite()) throw DataError("dataset: design matrix has non-finite entries");
  if (nn <= pp + 1)
    throw DataError("dataset: need n > p+1 (n=" + std::to_string(nn) +
                    ", p=" + std::to_string(pp) + ")");
  Eigen::ColPivHouseholderQR<Matrix> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < pp + 1)
    throw DataError("dataset: design matrix is rank deficient (rank " +
                    std::to_string(qr.rank()) + " < " + std::to_string(pp + 1) + ")");
  if (static_cast<int>(column_names.size()) != pp + 1)
    throw DataError("dataset: column_names length mismatch");
}

std::uint64_t Dataset::fingerprint() const {
  if (!fingerprint_ready_) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    auto mix_bytes = [&h](const void* ptr, std::size_t bytes) {
      const unsigned char* b = static_cast<const unsigned char*>(ptr);
      for (std::size_t i = 0; i < bytes; ++i) {
        h ^= b[i];
        h *= 0x100000001B3ULL;
      }
    };
    mix_bytes(X.data(), sizeof(double) * X.size());
    mix_bytes(y.data(), sizeof(int) * y.size());
    fingerprint_ = h;
    fingerprint_ready_ = true;
  }
  return fingerprint_;
}

Dataset make_dataset(const BinaryVector& y, const Matrix& covariates,
                     std::vector<std::string> names) {
  Dataset d;
  const int n = static_cast<int>(covariates.rows());
  const int p = static_cast<int>(covariates.cols());
  d.y = y;
  d.X.resize(n, p + 1);
  d.X.col(0).setOnes();
  d.X.rightCols(p) = covariates;
  if (names.empty()) {
    names.reserve(p);
    for (int j = 1; j <= p; ++j) names.push_back("x" + std::to_string(j));
  }
  if (static_cast<int>(names.size()) != p)
    throw DataError("make_dataset: expected " + std::to_string(p) + " covariate names");
  d.column_names.clear();
  d.column_names.reserve(p + 1);
  d.column_names.push_back("(Intercept)");
  d.column_names.insert(d.column_names.end(), names.begin(), names.end());
  d.validate();
  return d;
}

ModelIndicator ModelIndicator::from_bits(int p, const std::vector<int>& bits) {
  if (static_cast<int>(bits.size()) != p)
    throw ArgumentError("ModelIndicator::from_bits: expected p bits");
  ModelIndicator m(p);
  for (int j = 0; j < p; ++j)
    if (bits[j]) m.set(j + 1, true);
  return m;
}

Matrix design_submatrix(const Matrix& X, const ModelIndicator& model) {
  if (model.p() != static_cast<int>(X.cols()) - 1)
    throw ArgumentError("design_submatrix: model dimension does not match design");
  const auto cols = model.active_columns();
  Matrix Xg(X.rows(), cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k) Xg.col(k) = X.col(cols[k]);
  return Xg;
}

}  // namespace lpep
