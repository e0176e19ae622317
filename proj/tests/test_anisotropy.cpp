#include "axidewet/anisotropy.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

using namespace axidewet;
using std::numbers::pi;

namespace {

std::vector<AnisotropyModel> shipped_models() {
  return {AnisotropyModel::isotropic(),       AnisotropyModel::kfold(4, 0.05),
          AnisotropyModel::kfold(4, 0.3),     AnisotropyModel::kfold(3, 0.2),
          AnisotropyModel::kfold(5, 0.07),    AnisotropyModel::bgn(0.1),
          AnisotropyModel::series({1.0, 0.0, 0.05, 0.0, 0.02})};
}

}  // namespace

TEST_CASE("gamma values at sample angles") {
  const auto g4 = AnisotropyModel::kfold(4, 0.05).eval(0.0);
  CHECK(g4.value == doctest::Approx(1.05).epsilon(1e-15));
  CHECK(g4.d1 == doctest::Approx(0.0));
  CHECK(g4.d2 == doctest::Approx(-0.8).epsilon(1e-15));

  CHECK(AnisotropyModel::kfold(3, 0.2).eval(pi).value == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(AnisotropyModel::bgn(0.1).eval(0.0).value == doctest::Approx(1.1).epsilon(1e-14));
  CHECK(AnisotropyModel::isotropic().eval(1.3).value == 1.0);
}

TEST_CASE("derivatives agree with central differences") {
  const double h = 1e-5;
  for (const auto& m : shipped_models()) {
    CAPTURE(m.describe());
    for (int i = 0; i < 97; ++i) {
      const double t = -pi + 2 * pi * (i + 0.37) / 97;
      const auto g = m.eval(t);
      const auto gp = m.eval(t + h);
      const auto gm = m.eval(t - h);
      CHECK(std::abs((gp.value - gm.value) / (2 * h) - g.d1) < 1e-7);
      CHECK(std::abs((gp.d1 - gm.d1) / (2 * h) - g.d2) < 1e-7);
    }
  }
}

TEST_CASE("shipped densities are even") {
  for (const auto& m : shipped_models()) {
    for (int i = 0; i < 50; ++i) {
      const double t = 0.123 * i;
      CHECK(std::abs(m.eval(t).value - m.eval(-t).value) < 1e-14);
    }
  }
}

TEST_CASE("bgn matches the two-term closed form") {
  const double eps = 0.1;
  const auto m = AnisotropyModel::bgn(eps);
  for (int i = 0; i < 40; ++i) {
    const double t = 0.17 * i;
    const double s = std::sin(t), c = std::cos(t);
    const double expected =
        std::sqrt(s * s + eps * eps * c * c) + std::sqrt(eps * eps * s * s + c * c);
    CHECK(m.eval(t).value == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("invalid densities are rejected") {
  CHECK_THROWS_AS(AnisotropyModel::kfold(4, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(AnisotropyModel::kfold(0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(AnisotropyModel::series({}), std::invalid_argument);
  CHECK_THROWS_AS(AnisotropyModel::bgn(std::vector<Eigen::Matrix2d>{}), std::invalid_argument);
  Eigen::Matrix2d indefinite;
  indefinite << 1, 0, 0, -1;
  CHECK_THROWS_AS(AnisotropyModel::bgn({indefinite}), std::invalid_argument);
}

TEST_CASE("contact flux") {
  const auto iso = AnisotropyModel::isotropic();
  CHECK(contact_flux(iso, pi / 2, 0.3) == doctest::Approx(-0.3).epsilon(1e-15));
  CHECK(contact_flux(AnisotropyModel::kfold(4, 0.05), 0.0, -0.6) ==
        doctest::Approx(1.65).epsilon(1e-15));
  CHECK(std::abs(contact_flux(iso, 2 * pi / 3, -0.5)) < 1e-15);
}

TEST_CASE("contact parameters") {
  CHECK_NOTHROW(ContactParameters{0.6, 100}.validate());
  CHECK_THROWS_AS((ContactParameters{0.0, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ContactParameters{0.0, -1.0}.validate()), std::invalid_argument);
}

TEST_CASE("admissibility") {
  CHECK(check_admissibility(AnisotropyModel::kfold(4, 0.3), 0).admissible);
  const auto r3 = check_admissibility(AnisotropyModel::kfold(3, 0.2), 0);
  CHECK_FALSE(r3.admissible);
  CHECK(r3.offending_theta.has_value());
  const auto q1 = check_admissibility(AnisotropyModel::kfold(3, 0.2), 1);
  CHECK(q1.admissible);
  // min over theta of 3 gamma(t) - gamma(t + pi) = 2 + 0.8 cos 3t is 1.2
  CHECK(q1.worst == doctest::Approx(1.2).epsilon(1e-6));
  // 3 (1 + b cos) - (1 - b cos) = 2 + 4 b cos fails for b > 1/2, but gamma > 0
  // needs b < 1, so k = 3, b = 0.6 is a valid density that q = 1 rejects.
  CHECK_FALSE(check_admissibility(AnisotropyModel::kfold(3, 0.6), 1).admissible);
}
