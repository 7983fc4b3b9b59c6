#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "kinevent/kinematics.hpp"

using namespace kinevent;

namespace {

// Textbook OLS on absolute sample times, via the normal equations of [1 t] * (b0, b1) = y.
double ols_oracle(std::span<const double> y, std::size_t t0, int w, double fps) {
  const int n = 2 * w + 1;
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd Y(n);
  for (int i = 0; i < n; ++i) {
    const std::size_t idx = t0 - static_cast<std::size_t>(w) + static_cast<std::size_t>(i);
    X(i, 0) = 1.0;
    X(i, 1) = static_cast<double>(idx) / fps;
    Y(i) = y[idx];
  }
  const Eigen::Vector2d beta = (X.transpose() * X).ldlt().solve(X.transpose() * Y);
  return beta(1);
}

}  // namespace

TEST(Polar, Examples) {
  const auto z = to_polar(Vec2::Zero());
  EXPECT_EQ(z.v_r, 0.0);
  EXPECT_EQ(z.v_theta_deg, 0.0);
  const auto a = to_polar(Vec2(1, 0));
  EXPECT_DOUBLE_EQ(a.v_r, 1.0);
  EXPECT_DOUBLE_EQ(a.v_theta_deg, 0.0);
  const auto b = to_polar(Vec2(0, 2));
  EXPECT_DOUBLE_EQ(b.v_r, 2.0);
  EXPECT_DOUBLE_EQ(b.v_theta_deg, 90.0);
  EXPECT_DOUBLE_EQ(to_polar(Vec2(-1, 0)).v_theta_deg, 180.0);
  EXPECT_DOUBLE_EQ(to_polar(Vec2(-1, -0.0)).v_theta_deg, 180.0);
}

TEST(Polar, RoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> c(-50, 50);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 v(c(rng), c(rng));
    const auto p = to_polar(v);
    EXPECT_GE(p.v_r, 0.0);
    EXPECT_GT(p.v_theta_deg, -180.0);
    EXPECT_LE(p.v_theta_deg, 180.0);
    const double t = p.v_theta_deg * std::numbers::pi / 180.0;
    EXPECT_LT((Vec2(p.v_r * std::cos(t), p.v_r * std::sin(t)) - v).norm(), 1e-12);
  }
}

TEST(Wrap, IntoHalfOpenInterval) {
  EXPECT_DOUBLE_EQ(wrap_degrees(180.0), 180.0);
  EXPECT_DOUBLE_EQ(wrap_degrees(-180.0), 180.0);
  EXPECT_DOUBLE_EQ(wrap_degrees(190.0), -170.0);
  EXPECT_DOUBLE_EQ(wrap_degrees(-190.0), 170.0);
  EXPECT_DOUBLE_EQ(wrap_degrees(720.0 + 45.0), 45.0);
  EXPECT_DOUBLE_EQ(wrap_degrees(0.0), 0.0);
}

TEST(Unwrap, SeamCrossing) {
  const std::vector<double> raw{170, -170};
  const std::vector<double> speed{5, 5};
  const auto out = unwrap_angles(raw, speed, 0.3);
  EXPECT_DOUBLE_EQ(out[0], 170.0);
  EXPECT_DOUBLE_EQ(out[1], 190.0);
}

TEST(Unwrap, ConstantSeriesUnchanged) {
  const std::vector<double> raw(20, -37.5);
  const std::vector<double> speed(20, 2.0);
  EXPECT_EQ(unwrap_angles(raw, speed, 0.3), raw);
}

TEST(Unwrap, RandomWalkProperty) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> step(-89.9, 89.9), start(-180, 180);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> raw(300), speed(300, 4.0);
    double a = start(rng);
    for (auto& r : raw) {
      a += step(rng);
      r = wrap_degrees(a);
    }
    const auto out = unwrap_angles(raw, speed, 0.3);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const double k = (out[i] - raw[i]) / 360.0;
      EXPECT_NEAR(k, std::round(k), 1e-9);
      if (i > 0) EXPECT_LE(std::abs(out[i] - out[i - 1]), 180.0);
    }
  }
}

TEST(Unwrap, SlowFramesHoldHeading) {
  const std::vector<double> raw{10, 95, 20, 30, -120, 40};
  const std::vector<double> speed{0.1, 0.2, 2.0, 2.0, 0.05, 2.0};
  const auto out = unwrap_angles(raw, speed, 0.3);
  // Leading slow frames take the first reliable heading; later slow frames repeat.
  const std::vector<double> expected{20, 20, 20, 30, 30, 40};
  EXPECT_EQ(out, expected);
  const std::vector<double> all_slow(4, 0.0);
  const auto stuck = unwrap_angles(std::span(raw).first(4), all_slow, 0.3);
  for (double v : stuck) EXPECT_EQ(v, 10.0);
}

TEST(WindowSlope, Examples) {
  const std::vector<double> lin{1, 2, 3, 4, 5};
  EXPECT_NEAR(*window_slope(lin, 2, 2, 1.0), 1.0, 1e-12);
  const std::vector<double> flat(9, 3.25);
  EXPECT_EQ(*window_slope(flat, 4, 3, 30.0), 0.0);
  const std::vector<double> sq{0, 1, 4, 9, 16};
  EXPECT_NEAR(*window_slope(sq, 2, 2, 1.0), 4.0, 1e-12);
  EXPECT_NEAR(ols_oracle(sq, 2, 2, 1.0), 4.0, 1e-12);
}

TEST(WindowSlope, WindowMustFit) {
  const std::vector<double> y(10, 1.0);
  EXPECT_FALSE(window_slope(y, 1, 2, 30.0));
  EXPECT_FALSE(window_slope(y, 8, 2, 30.0));
  EXPECT_TRUE(window_slope(y, 2, 2, 30.0));
  EXPECT_TRUE(window_slope(y, 7, 2, 30.0));
  EXPECT_FALSE(window_slope(y, 5, 0, 30.0));
  const auto all = window_slopes_serial(y, 5, 30.0);
  for (double s : all) EXPECT_EQ(s, 0.0);
}

TEST(WindowSlope, ExactOnAffineSeries) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> c(-20, 20);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = c(rng), b = c(rng), fps = 30.0;
    std::vector<double> y(61);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = a + b * static_cast<double>(i) / fps;
    for (std::size_t t0 = 15; t0 + 15 < y.size(); ++t0) {
      EXPECT_NEAR(*window_slope(y, t0, 15, fps), b, 1e-12 * std::max(1.0, std::abs(b)));
    }
  }
}

TEST(WindowSlope, MatchesIndependentOls) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0, 5);
  std::uniform_int_distribution<int> wd(1, 20);
  for (int trial = 0; trial < 300; ++trial) {
    const int w = wd(rng);
    std::vector<double> y(2 * w + 1 + 10);
    for (auto& v : y) v = g(rng);
    for (std::size_t t0 = w; t0 + w < y.size(); ++t0) {
      const double got = *window_slope(y, t0, w, 25.0);
      const double want = ols_oracle(y, t0, w, 25.0);
      EXPECT_LE(std::abs(got - want), 1e-9 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST(WindowSlope, InvariancesAndReversal) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0, 3);
  std::vector<double> y(31);
  for (auto& v : y) v = g(rng);
  const double base = *window_slope(y, 15, 15, 30.0);
  auto shifted = y;
  for (auto& v : shifted) v += 123.0;
  EXPECT_NEAR(*window_slope(shifted, 15, 15, 30.0), base, 1e-10);
  auto scaled = y;
  for (auto& v : scaled) v *= -2.5;
  EXPECT_NEAR(*window_slope(scaled, 15, 15, 30.0), -2.5 * base, 1e-10);
  std::vector<double> reversed(y.rbegin(), y.rend());
  EXPECT_NEAR(*window_slope(reversed, 15, 15, 30.0), -base, 1e-10);
}

TEST(WindowSlope, ParallelKernelMatchesSerialExactly) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0, 1);
  for (std::size_t n : {0u, 1u, 31u, 100u, 20000u}) {
    std::vector<double> y(n);
    for (auto& v : y) v = g(rng);
    EXPECT_EQ(window_slopes(y, 15, 30.0), window_slopes_serial(y, 15, 30.0)) << n;
  }
}

TEST(States, DefaultWindowIsHalfSecond) {
  EXPECT_EQ(default_window_half_width(30.0), 15);
  EXPECT_EQ(default_window_half_width(25.0), 13);
  EXPECT_EQ(default_window_half_width(1.0), 1);
  EXPECT_EQ(default_window_half_width(0.5), 1);
}

TEST(States, ConstantTurnRateAndAcceleration) {
  // Speed 5 + 1.5 t, heading 170 + 20 t degrees: crosses the seam.
  const double fps = 30.0;
  std::vector<GroundObservation> obs(90);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double t = static_cast<double>(i) / fps;
    const double speed = 5.0 + 1.5 * t;
    const double h = (170.0 + 20.0 * t) * std::numbers::pi / 180.0;
    obs[i].frame_index = static_cast<std::int64_t>(i);
    obs[i].time_s = t;
    obs[i].ground_velocity = speed * Vec2(std::cos(h), std::sin(h));
  }
  const auto st = estimate_states(obs, fps, {15, 0.3});
  ASSERT_EQ(st.size(), obs.size());
  for (std::size_t i = 0; i < st.size(); ++i) {
    EXPECT_EQ(st[i].window_valid, i >= 15 && i + 15 < st.size());
    EXPECT_GE(st[i].v_r, 0.0);
    if (i > 0) EXPECT_LE(std::abs(st[i].v_theta - st[i - 1].v_theta), 180.0);
    if (st[i].window_valid) {
      EXPECT_NEAR(st[i].a_r, 1.5, 1e-9);
      EXPECT_NEAR(st[i].a_theta, 20.0, 1e-9);
    } else {
      EXPECT_EQ(st[i].a_r, 0.0);
      EXPECT_EQ(st[i].a_theta, 0.0);
    }
  }
  EXPECT_NEAR(st.back().v_theta, 170.0 + 20.0 * 89.0 / fps, 1e-9);
}
