// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tal/core_math.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "tal/error.hpp"

namespace tal {
namespace {

// Reference values below were evaluated independently in closed form.
constexpr double kLog1pE2 = 2.1269280110429722;      // log(1 + e^2)
constexpr double kLog1pEm1 = 0.31326168751822286;    // log(1 + e^-1)
constexpr double kLog1pEm10 = 4.539889921686465e-05;  // log(1 + e^-10)

Vector random_logits(std::mt19937_64& rng, std::size_t c, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  Vector f(c);
  for (double& v : f) v = n(rng);
  return f;
}

TEST(Softmax, SymmetricPair) {
  const Vector p = softmax(Vector{0.0, 0.0});
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.5);
}

TEST(Softmax, LogTwo) {
  const Vector p = softmax(Vector{std::log(2.0), 0.0});
  EXPECT_NEAR(p[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(p[1], 1.0 / 3.0, 1e-15);
}

TEST(Softmax, LargeLogitsDoNotOverflow) {
  const Vector p = softmax(Vector{1000.0, 0.0});
  EXPECT_TRUE(std::isfinite(p[0]));
  EXPECT_NEAR(p[0], 1.0, 1e-15);
  EXPECT_GE(p[1], 0.0);
  EXPECT_LT(p[1], 1e-300);
}

TEST(Softmax, SumsToOne) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 500; ++i) {
    const Vector p = softmax(random_logits(rng, 2 + i % 9, i % 2 ? 1e3 : 3.0));
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    for (double v : p) EXPECT_GE(v, 0.0);
  }
}

TEST(Softmax, RejectsNonFinite) {
  EXPECT_THROW(softmax(Vector{1.0, NAN}), InvalidInputError);
  EXPECT_THROW(softmax(Vector{INFINITY, 0.0}), InvalidInputError);
  EXPECT_THROW(softmax(Vector{}), InvalidInputError);
}

TEST(LogSumExp, MatchesNaiveForModerateValues) {
  const Vector f{0.3, -1.2, 2.5};
  EXPECT_NEAR(log_sum_exp(f), std::log(std::exp(0.3) + std::exp(-1.2) + std::exp(2.5)), 1e-14);
  EXPECT_NEAR(log_sum_exp(Vector{1000.0, 1000.0}), 1000.0 + std::log(2.0), 1e-12);
}

TEST(CrossEntropy, UniformLogitsGiveLogC) {
  for (std::size_t c : {2u, 3u, 7u, 10u}) {
    const Vector f(c, 1.5);
    for (std::size_t y = 0; y < c; ++y) {
      EXPECT_NEAR(cross_entropy(f, y), std::log(static_cast<double>(c)), 1e-14);
    }
  }
}

TEST(CrossEntropy, SaturatedIsNearZero) {
  EXPECT_NEAR(cross_entropy(Vector{100.0, 0.0, 0.0}, 0), 0.0, 1e-40);
  EXPECT_GE(cross_entropy(Vector{100.0, 0.0, 0.0}, 0), 0.0);
}

TEST(CrossEntropy, ClosedForm) {
  EXPECT_NEAR(cross_entropy(Vector{2.0, 0.0}, 1), kLog1pE2, 1e-15);
}

TEST(CrossEntropy, NonNegative) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 500; ++i) {
    const Vector f = random_logits(rng, 5, 20.0);
    EXPECT_GE(cross_entropy(f, i % 5), 0.0);
  }
}

TEST(CrossEntropy, LabelOutOfRange) {
  EXPECT_THROW(cross_entropy(Vector{1.0, 2.0}, 2), IndexError);
}

TEST(Decompose, ThreeFourFive) {
  const LogitDecomposition d = decompose(Vector{3.0, 4.0});
  EXPECT_DOUBLE_EQ(d.magnitude, 5.0);
  EXPECT_DOUBLE_EQ(d.direction[0], 0.6);
  EXPECT_DOUBLE_EQ(d.direction[1], 0.8);
}

TEST(Decompose, NegativeAxis) {
  const LogitDecomposition d = decompose(Vector{0.0, -2.0});
  EXPECT_DOUBLE_EQ(d.magnitude, 2.0);
  EXPECT_DOUBLE_EQ(d.direction[0], 0.0);
  EXPECT_DOUBLE_EQ(d.direction[1], -1.0);
}

TEST(Decompose, ZeroVectorIsDegenerate) {
  EXPECT_THROW(decompose(Vector{0.0, 0.0}), DegenerateLogitsError);
}

TEST(Decompose, ReconstructRoundTrip) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    const Vector f = random_logits(rng, 2 + i % 9, std::pow(10.0, (i % 7) - 3));
    const Vector g = decompose(f).reconstruct();
    for (std::size_t k = 0; k < f.size(); ++k) EXPECT_NEAR(g[k], f[k], 1e-12 * std::abs(f[k]) + 1e-300);
  }
}

TEST(Decompose, TinyAndHugeNormsStayFinite) {
  EXPECT_DOUBLE_EQ(decompose(Vector{3e-200, 4e-200}).direction[1], 0.8);
  EXPECT_DOUBLE_EQ(decompose(Vector{3e200, 4e200}).direction[1], 0.8);
}

TEST(LogitNorm, ClosedForm) {
  EXPECT_NEAR(logitnorm_loss(Vector{2.0, 0.0}, 0, 1.0), kLog1pEm1, 1e-15);
}

TEST(LogitNorm, ScaleInvariant) {
  EXPECT_NEAR(logitnorm_loss(Vector{20.0, 0.0}, 0, 1.0), logitnorm_loss(Vector{2.0, 0.0}, 0, 1.0),
              1e-15);
}

TEST(LogitNorm, SymmetricDirectionGivesLogTwo) {
  for (double t : {0.1, 1.0, 10.0, 100.0}) {
    EXPECT_NEAR(logitnorm_loss(Vector{1.0, 1.0}, 0, t), std::log(2.0), 1e-15);
  }
}

TEST(LogitNorm, Errors) {
  EXPECT_THROW(logitnorm_loss(Vector{0.0, 0.0}, 0, 1.0), DegenerateLogitsError);
  EXPECT_THROW(logitnorm_loss(Vector{1.0, 0.0}, 0, 0.0), InvalidInputError);
  EXPECT_THROW(logitnorm_loss(Vector{1.0, 0.0}, 5, 1.0), IndexError);
}

TEST(DynamicMagnitude, Endpoints) {
  const MagnitudeSchedule s{10.0, 100.0};
  EXPECT_EQ(dynamic_magnitude(1.0, s), 10.0);
  EXPECT_EQ(dynamic_magnitude(0.0, s), 100.0);
  EXPECT_EQ(dynamic_magnitude(0.5, s), 55.0);
}

TEST(DynamicMagnitude, AffineMonotoneAndBounded) {
  const MagnitudeSchedule s{3.0, 42.0};
  double prev = INFINITY;
  for (int i = 0; i <= 1000; ++i) {
    const double tau = i / 1000.0;
    const double t = dynamic_magnitude(tau, s);
    EXPECT_GE(t, s.t_min);
    EXPECT_LE(t, s.t_max);
    EXPECT_LT(t, prev);
    EXPECT_NEAR(t, s.t_min + (1.0 - tau) * (s.t_max - s.t_min), 1e-12);
    prev = t;
  }
}

TEST(DynamicMagnitude, RejectsTauOutsideUnitInterval) {
  EXPECT_THROW(dynamic_magnitude(-0.01, {}), InvalidInputError);
  EXPECT_THROW(dynamic_magnitude(1.01, {}), InvalidInputError);
  EXPECT_THROW(dynamic_magnitude(NAN, {}), InvalidInputError);
}

TEST(MagnitudeSchedule, Validation) {
  EXPECT_NO_THROW((MagnitudeSchedule{10.0, 10.0}.validate()));
  EXPECT_THROW((MagnitudeSchedule{0.0, 10.0}.validate()), InvalidInputError);
  EXPECT_THROW((MagnitudeSchedule{20.0, 10.0}.validate()), InvalidInputError);
}

TEST(TalLoss, TypicalSampleUsesTMin) {
  EXPECT_NEAR(tal_loss(Vector{2.0, 0.0}, 0, 1.0, {10.0, 100.0}), kLog1pEm10, 1e-18);
}

TEST(TalLoss, EqualsLogitNormAtDynamicMagnitude) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Vector f = random_logits(rng, 6, 2.0);
    const double tau = u(rng);
    EXPECT_EQ(tal_loss(f, i % 6, tau, {}), logitnorm_loss(f, i % 6, dynamic_magnitude(tau, {})));
  }
}

TEST(TalLoss, SymmetricDirection) {
  for (double tau : {0.0, 0.3, 1.0}) EXPECT_NEAR(tal_loss(Vector{1.0, 1.0}, 0, tau, {}), std::log(2.0), 1e-15);
}

TEST(TalLoss, ScaleInvariance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> log_c(-8.0, 8.0);
  for (int i = 0; i < 1000; ++i) {
    const Vector f = random_logits(rng, 2 + i % 9, 3.0);
    const std::size_t y = i % f.size();
    const double tau = u(rng);
    const double c = std::exp(log_c(rng));
    Vector g = f;
    for (double& v : g) v *= c;
    EXPECT_NEAR(tal_loss(g, y, tau, {}), tal_loss(f, y, tau, {}), 1e-9);
  }
}

TEST(CombinedLoss, Boundaries) {
  const Vector f{1.3, -0.4, 2.2};
  const MagnitudeSchedule s;
  EXPECT_EQ(combined_loss(f, 1, 1.0, s), tal_loss(f, 1, 1.0, s));
  EXPECT_EQ(combined_loss(f, 1, 0.0, s), cross_entropy(f, 1));
  EXPECT_NEAR(combined_loss(f, 1, 0.5, s), 0.5 * (tal_loss(f, 1, 0.5, s) + cross_entropy(f, 1)),
              1e-14);
}

TEST(CombinedObjective, Weights) {
  const SampleObjective o = combined_objective(0.25, {10.0, 100.0});
  EXPECT_EQ(o.direction_weight, 0.25);
  EXPECT_EQ(o.ce_weight, 0.75);
  EXPECT_EQ(o.magnitude, 77.5);
}

TEST(ObjectiveLoss, CeOnlyObjectiveMatchesCrossEntropy) {
  const Vector f{0.5, 1.5};
  EXPECT_EQ(objective_loss(f, 0, SampleObjective{0.0, 1.0, 1.0}), cross_entropy(f, 0));
}

TEST(ObjectiveLoss, CeOnlyObjectiveAcceptsZeroLogits) {
  EXPECT_NEAR(objective_loss(Vector{0.0, 0.0}, 0, SampleObjective{0.0, 1.0, 1.0}), std::log(2.0),
              1e-15);
}

TEST(Gradients, CeAtUniformLogits) {
  const Vector g = grad_cross_entropy(Vector{0.0, 0.0}, 0);
  EXPECT_DOUBLE_EQ(g[0], -0.5);
  EXPECT_DOUBLE_EQ(g[1], 0.5);
}

TEST(Gradients, TalGradientIsOrthogonalToLogits) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const Vector f = random_logits(rng, 2 + i % 9, 4.0);
    const Vector g = grad_tal_loss(f, i % f.size(), u(rng), {});
    const double dot = std::inner_product(g.begin(), g.end(), f.begin(), 0.0);
    const double gn = std::sqrt(std::inner_product(g.begin(), g.end(), g.begin(), 0.0));
    const double fn = std::sqrt(std::inner_product(f.begin(), f.end(), f.begin(), 0.0));
    EXPECT_LE(std::abs(dot), 1e-9 * gn * fn + 1e-300);
  }
}

TEST(Gradients, MatchFiniteDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const MagnitudeSchedule s;
  for (int i = 0; i < 100; ++i) {
    const std::size_t c = 2 + i % 9;
    const Vector f = random_logits(rng, c, 2.0);
    const std::size_t y = i % c;
    const double tau = u(rng);
    const double t = 1.0 + 50.0 * u(rng);
    const double h = 1e-6 * std::max(1.0, decompose(f).magnitude);
    auto fd = [&](auto loss) {
      return oracle::numeric_gradient([&](std::span<const double> z) { return loss(z); }, f, h);
    };
    EXPECT_LE(oracle::relative_error(grad_cross_entropy(f, y),
                                     fd([&](auto z) { return cross_entropy(z, y); })),
              1e-6);
    EXPECT_LE(oracle::relative_error(grad_logitnorm_loss(f, y, t),
                                     fd([&](auto z) { return logitnorm_loss(z, y, t); })),
              1e-6);
    EXPECT_LE(oracle::relative_error(grad_tal_loss(f, y, tau, s),
                                     fd([&](auto z) { return tal_loss(z, y, tau, s); })),
              1e-6);
    EXPECT_LE(oracle::relative_error(grad_combined_loss(f, y, tau, s),
                                     fd([&](auto z) { return combined_loss(z, y, tau, s); })),
              1e-6);
  }
}

TEST(Gradients, FusedLossAndGradientAgree) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Vector f = random_logits(rng, 5, 3.0);
    const double tau = u(rng);
    const SampleObjective o = combined_objective(tau, {});
    Vector g(f.size());
    const double loss = objective_loss_and_grad(f, i % 5, o, g);
    EXPECT_NEAR(loss, combined_loss(f, i % 5, tau, {}), 1e-12);
    const Vector ref = grad_combined_loss(f, i % 5, tau, {});
    for (std::size_t k = 0; k < f.size(); ++k) EXPECT_NEAR(g[k], ref[k], 1e-12);
  }
}

TEST(Gradients, DegenerateLogits) {
  EXPECT_THROW(grad_combined_loss(Vector{0.0, 0.0, 0.0}, 0, 0.5, {}), DegenerateLogitsError);
}

TEST(Argmax, LowestIndexOnTies) {
  EXPECT_EQ(argmax(Vector{1.0, 3.0, 3.0, 2.0}), 1u);
  EXPECT_EQ(argmax(Vector{0.0, 0.0}), 0u);
}

}  // namespace
}  // namespace tal
