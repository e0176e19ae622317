#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace axidewet {

class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(Eigen::Index row, const std::string& what)
      : std::runtime_error(what), row_(row) {}
  Eigen::Index row() const { return row_; }

 private:
  Eigen::Index row_;
};

/// Square band matrix with `lower` sub- and `upper` super-diagonals. Storage
/// leaves room for the `lower` extra super-diagonals created by row pivoting.
template <typename Scalar>
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(Eigen::Index n, Eigen::Index lower, Eigen::Index upper)
      : n_(n), kl_(lower), ku_(upper),
        band_(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Zero(
            n, 2 * lower + upper + 1)) {}

  Eigen::Index rows() const { return n_; }
  Eigen::Index lower() const { return kl_; }
  Eigen::Index upper() const { return ku_; }

  bool in_band(Eigen::Index i, Eigen::Index j) const {
    return j - i >= -kl_ && j - i <= ku_ && i >= 0 && j >= 0 && i < n_ && j < n_;
  }

  Scalar& coeffRef(Eigen::Index i, Eigen::Index j) {
    if (!in_band(i, j))
      throw std::out_of_range("band entry (" + std::to_string(i) + "," + std::to_string(j) +
                              ") outside the band");
    return band_(i, j - i + kl_);
  }

  Scalar operator()(Eigen::Index i, Eigen::Index j) const {
    return in_band(i, j) ? band_(i, j - i + kl_) : Scalar(0);
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> toDense() const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> d =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n_, n_);
    for (Eigen::Index i = 0; i < n_; ++i)
      for (Eigen::Index j = std::max<Eigen::Index>(0, i - kl_);
           j <= std::min<Eigen::Index>(n_ - 1, i + ku_); ++j)
        d(i, j) = (*this)(i, j);
    return d;
  }

  template <typename Derived>
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> operator*(const Eigen::MatrixBase<Derived>& x) const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n_);
    for (Eigen::Index i = 0; i < n_; ++i)
      for (Eigen::Index j = std::max<Eigen::Index>(0, i - kl_);
           j <= std::min<Eigen::Index>(n_ - 1, i + ku_); ++j)
        y(i) += (*this)(i, j) * x(j);
    return y;
  }

 private:
  template <typename>
  friend class BandedLU;

  Eigen::Index n_ = 0;
  Eigen::Index kl_ = 0;
  Eigen::Index ku_ = 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> band_;
};

/// LU factorisation with partial pivoting restricted to the band
/// (the dgbtrf/dgbtrs scheme).
template <typename Scalar>
class BandedLU {
 public:
  explicit BandedLU(BandedMatrix<Scalar> a) : a_(std::move(a)) { factorize(); }

  template <typename Derived>
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> solve(const Eigen::MatrixBase<Derived>& rhs) const {
    const Eigen::Index n = a_.n_, kl = a_.kl_, ku = a_.ku_;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x = rhs;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (pivots_[k] != k) std::swap(x(k), x(pivots_[k]));
      for (Eigen::Index i = k + 1; i <= std::min(n - 1, k + kl); ++i) x(i) -= at(i, k) * x(k);
    }
    for (Eigen::Index k = n - 1; k >= 0; --k) {
      for (Eigen::Index j = k + 1; j <= std::min(n - 1, k + kl + ku); ++j) x(k) -= at(k, j) * x(j);
      x(k) /= at(k, k);
    }
    return x;
  }

 private:
  Scalar& at(Eigen::Index i, Eigen::Index j) { return a_.band_(i, j - i + a_.kl_); }
  Scalar at(Eigen::Index i, Eigen::Index j) const { return a_.band_(i, j - i + a_.kl_); }

  void factorize() {
    using std::abs;
    const Eigen::Index n = a_.n_, kl = a_.kl_, ku = a_.ku_;
    pivots_.resize(static_cast<std::size_t>(n));
    const Scalar scale = a_.band_.cwiseAbs().maxCoeff();
    const Scalar tiny = scale * Scalar(n) * Eigen::NumTraits<Scalar>::epsilon() * Scalar(1e-3);
    for (Eigen::Index k = 0; k < n; ++k) {
      const Eigen::Index last = std::min(n - 1, k + kl);
      Eigen::Index p = k;
      for (Eigen::Index i = k + 1; i <= last; ++i)
        if (abs(at(i, k)) > abs(at(p, k))) p = i;
      pivots_[k] = p;
      if (!(abs(at(p, k)) > tiny))
        throw SingularMatrixError(k, "singular banded system: zero pivot in column " +
                                         std::to_string(k));
      const Eigen::Index right = std::min(n - 1, k + kl + ku);
      if (p != k)
        for (Eigen::Index j = k; j <= right; ++j) std::swap(at(k, j), at(p, j));
      for (Eigen::Index i = k + 1; i <= last; ++i) {
        const Scalar l = at(i, k) / at(k, k);
        at(i, k) = l;
        if (l == Scalar(0)) continue;
        for (Eigen::Index j = k + 1; j <= right; ++j) at(i, j) -= l * at(k, j);
      }
    }
  }

  BandedMatrix<Scalar> a_;
  std::vector<Eigen::Index> pivots_;
};

}  // namespace axidewet
