#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fsolink/error.hpp"
#include "fsolink/fft.hpp"
#include "fsolink/random.hpp"
#include "fsolink/spectrum.hpp"
#include "fsolink/synthesis.hpp"
#include "oracles.hpp"

namespace fsolink {
namespace {

using test::db;

TEST(Random, DerivedSeedsAreDistinctAndStable) {
  EXPECT_EQ(derive_seed(5, {1, 2}), derive_seed(5, {1, 2}));
  EXPECT_NE(derive_seed(5, {1, 2}), derive_seed(5, {2, 1}));
  EXPECT_NE(derive_seed(5, {1}), derive_seed(6, {1}));
  EXPECT_NE(derive_seed(5, {}), derive_seed(5, {0}));
}

TEST(Random, GaussianMoments) {
  Rng rng(42);
  const int n = 400000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    s1 += g;
    s2 += g * g;
  }
  EXPECT_NEAR(s1 / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
  Rng u(7);
  for (int i = 0; i < 100000; ++i) {
    const double x = u.uniform();
    ASSERT_GT(x, 0.0);
    ASSERT_LT(x, 1.0);
  }
}

TEST(Fft, NextFastLen) {
  EXPECT_EQ(next_fast_len(1), 1u);
  EXPECT_EQ(next_fast_len(11), 12u);
  EXPECT_EQ(next_fast_len(1024), 1024u);
  EXPECT_EQ(next_fast_len(1025), 1029u);  // 3 * 7^3
  EXPECT_EQ(next_fast_len(4194305), 4199040u);
}

TEST(Fft, ForwardMatchesDirectDft) {
  const std::size_t n = 30;
  RealFft fft(n);
  Rng rng(3);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.gaussian();
  std::copy(x.begin(), x.end(), fft.real().begin());
  fft.forward();
  const auto X = fft.spectrum();
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> ref{0.0, 0.0};
    for (std::size_t m = 0; m < n; ++m)
      ref += x[m] * std::polar(1.0, -2.0 * std::numbers::pi * double(k * m) / double(n));
    EXPECT_NEAR(std::abs(X[k] - ref), 0.0, 1e-12);
  }
  fft.inverse();
  for (std::size_t m = 0; m < n; ++m) EXPECT_NEAR(fft.real()[m] / double(n), x[m], 1e-13);
}

TEST(Synthesis, ZeroModelGivesZeros) {
  const auto s = synthesize_phase_noise(PsdModel::zero(PsdKind::phase, 1e-3, 1e3), 100.0, 1000, 1);
  EXPECT_TRUE(std::all_of(s.samples().begin(), s.samples().end(), [](double v) { return v == 0.0; }));
}

TEST(Synthesis, Deterministic) {
  const auto m = PsdModel::power_law(PsdKind::phase, 1e-3, 1.0, -2.0, 1e-4, 1e4);
  const auto a = synthesize_phase_noise(m, 1000.0, 5000, 99);
  const auto b = synthesize_phase_noise(m, 1000.0, 5000, 99);
  const auto c = synthesize_phase_noise(m, 1000.0, 5000, 100);
  ASSERT_EQ(a.size(), 5000u);
  EXPECT_TRUE(std::equal(a.samples().begin(), a.samples().end(), b.samples().begin()));
  EXPECT_FALSE(std::equal(a.samples().begin(), a.samples().end(), c.samples().begin()));
}

TEST(Synthesis, FlatVarianceIsHalfBandPower) {
  const double h0 = 2.5e-3, fs = 400.0;
  const auto s = synthesize_phase_noise(PsdModel::power_law(PsdKind::phase, h0, 1.0, 0.0, 1e-6, 1e6),
                                        fs, 1 << 18, 11);
  EXPECT_NEAR(test::variance(s.samples()) / (h0 * fs / 2.0), 1.0, 0.02);
}

TEST(Synthesis, Errors) {
  const auto m = PsdModel::power_law(PsdKind::phase, 1.0, 1.0, 0.0, 1e-3, 1e3);
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::io;
  };
  EXPECT_EQ(code([&] { synthesize_phase_noise(m, 100.0, 15, 1); }), Errc::too_short);
  EXPECT_EQ(code([&] { synthesize_phase_noise(m, 0.0, 100, 1); }), Errc::domain);
  const auto fm = PsdModel::power_law(PsdKind::frequency, 1.0, 1.0, 0.0, 1e-3, 1e3);
  EXPECT_EQ(code([&] { synthesize_phase_noise(fm, 100.0, 100, 1); }), Errc::kind_mismatch);
  EXPECT_NO_THROW(synthesize_phase_noise(m, 100.0, kMinSynthesisLength, 1));
}

class SynthesisFidelity : public ::testing::TestWithParam<double> {};

TEST_P(SynthesisFidelity, WelchWithinOneDbOverCentralDecades) {
  const double slope = GetParam();
  const double fs = 1000.0;
  const auto model = PsdModel::power_law(PsdKind::phase, 1e-4, 10.0, slope, 1e-6, 1e6);
  const auto x = synthesize_phase_noise(model, fs, std::size_t{1} << 20, 2024);
  const auto est = estimate_psd(x, 16384, 0.5, Window::hann);

  const double f_lo = est.bin_width, f_hi = fs / 2.0;
  const double centre = std::sqrt(f_lo * f_hi);
  std::size_t checked = 0, ok = 0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double f = est.freqs[i];
    if (f < centre / 10.0 || f > centre * 10.0) continue;
    ++checked;
    ok += std::abs(db(est.psd[i] / model(f))) <= 1.0 ? 1 : 0;
  }
  ASSERT_GT(checked, 800u);
  EXPECT_GE(double(ok) / double(checked), 0.95) << "slope " << slope;
}

INSTANTIATE_TEST_SUITE_P(Slopes, SynthesisFidelity, ::testing::Values(0.0, -1.0, -2.0, -8.0 / 3.0));

TEST(Estimator, DoublingAveragesShrinksSpreadBySqrtTwo) {
  const auto white = PsdModel::power_law(PsdKind::phase, 1.0, 0.1, 0.0, 1e-6, 10.0);
  const std::size_t seg = 256;
  auto spread = [&](std::size_t averages) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      const auto x = synthesize_phase_noise(white, 1.0, seg * averages, 1000 + seed);
      const auto est = estimate_psd(x, seg, 0.0, Window::hann);
      EXPECT_EQ(est.n_averages, averages);
      for (std::size_t i = 2; i + 2 < est.size(); ++i) {
        const double r = est.psd[i] / 1.0 - 1.0;
        acc += r * r;
        ++count;
      }
    }
    return std::sqrt(acc / double(count));
  };
  const double ratio = spread(16) / spread(32);
  EXPECT_NEAR(ratio / std::sqrt(2.0), 1.0, 0.2) << ratio;
}

}  // namespace
}  // namespace fsolink
