#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lunasim/special.hpp"

using namespace lunasim;

// Reference values computed with scipy.stats / scipy.special and frozen.
TEST(NormalQuantile, MatchesReferenceValues) {
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-13);
  EXPECT_NEAR(normal_quantile(0.3), -0.5244005127080409, 1e-13);
  EXPECT_NEAR(normal_quantile(1e-10), -6.361340902404056, 1e-10);
  EXPECT_EQ(normal_quantile(0.5), 0.0);
}

TEST(NormalQuantile, InvertsTheCdf) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6);
  for (int i = 0; i < 1000; ++i) {
    const double p = u(gen);
    EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-12);
  }
}

TEST(RegularizedGamma, ClosedFormCases) {
  for (double x : {0.0, 0.1, 1.0, 2.5, 10.0, 40.0}) {
    EXPECT_NEAR(regularized_gamma_p(1.0, x), -std::expm1(-x), 1e-14);
    EXPECT_NEAR(regularized_gamma_p(0.5, x), std::erf(std::sqrt(x)), 1e-13);
  }
}

TEST(RegularizedGamma, ReferenceValues) {
  EXPECT_NEAR(regularized_gamma_p(2.5, 3.7), 0.8074495669206043, 1e-13);
  EXPECT_NEAR(regularized_gamma_p(10.0, 4.0), 0.008132242796933871, 1e-15);
}

TEST(ChiSquare, QuantilesMatchReference) {
  EXPECT_NEAR(chi_square_quantile(1.0, 0.9), 2.705543454095404, 1e-9);
  EXPECT_NEAR(chi_square_quantile(3.0, 0.95), 7.814727903251179, 1e-9);
  EXPECT_NEAR(chi_square_quantile(10.0, 0.5), 9.34181776559197, 1e-9);
}

TEST(ChiSquare, OneDegreeIsSquaredNormal) {
  const double z = normal_quantile(0.95);
  EXPECT_NEAR(chi_square_quantile(1.0, 0.9), z * z, 1e-9);
  for (double x : {0.1, 1.0, 3.0, 8.0}) EXPECT_NEAR(chi_square_cdf(1.0, x), 2.0 * normal_cdf(std::sqrt(x)) - 1.0, 1e-13);
}
