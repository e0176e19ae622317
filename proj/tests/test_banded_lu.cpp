#include "axidewet/banded_lu.hpp"

#include <doctest.h>

#include <Eigen/LU>

#include <random>

using namespace axidewet;

TEST_CASE("banded LU agrees with dense LU") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 10 + 7 * trial;
    const Eigen::Index kl = 1 + trial % 5, ku = 1 + (trial * 3) % 5;
    BandedMatrix<double> a(n, kl, ku);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = std::max<Eigen::Index>(0, i - kl); j <= std::min(n - 1, i + ku); ++j)
        a.coeffRef(i, j) = u(rng);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) b(i) = u(rng);
    const Eigen::MatrixXd dense = a.toDense();
    const Eigen::VectorXd expected = dense.partialPivLu().solve(b);
    const Eigen::VectorXd x = BandedLU<double>(a).solve(b);
    CHECK((x - expected).norm() <= 1e-9 * (1.0 + expected.norm()));
    CHECK((dense * x - b).norm() < 1e-10 * (1.0 + b.norm()));
    CHECK((a * x - dense * x).norm() < 1e-14 * (1.0 + x.norm()));
  }
}

TEST_CASE("pivoting handles a zero leading entry") {
  BandedMatrix<double> a(3, 1, 1);
  a.coeffRef(0, 1) = 1.0;
  a.coeffRef(1, 0) = 1.0;
  a.coeffRef(1, 2) = 1.0;
  a.coeffRef(2, 1) = 1.0;
  a.coeffRef(2, 2) = 1.0;
  const Eigen::Vector3d x = BandedLU<double>(a).solve(Eigen::Vector3d(2, 4, 5));
  CHECK((a.toDense() * x - Eigen::Vector3d(2, 4, 5)).norm() < 1e-14);
}

TEST_CASE("singular and out-of-band input") {
  BandedMatrix<double> a(3, 1, 1);
  a.coeffRef(0, 0) = 1.0;
  a.coeffRef(1, 1) = 1.0;
  CHECK_THROWS_AS(BandedLU<double>{a}, SingularMatrixError);
  CHECK_THROWS_AS(a.coeffRef(0, 2), std::out_of_range);
  CHECK(a(0, 2) == 0.0);
}
