#include <cmath>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "fsolink/error.hpp"
#include "fsolink/psd_model.hpp"

namespace fsolink {
namespace {

template <typename F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return Errc::io;
}

TEST(PsdModel, AtmosphereAnchorAtReference) {
  const auto m = PsdModel::power_law(PsdKind::phase, 0.178, 10.0, -8.0 / 3.0, 1e-3, 1e6);
  EXPECT_DOUBLE_EQ(eval_psd(m, 10.0), 0.178);
  EXPECT_NEAR(eval_psd(m, 20.0), 0.178 * std::pow(2.0, -8.0 / 3.0), 1e-15);
}

TEST(PsdModel, FlatModelIsConstant) {
  const auto m = PsdModel::power_law(PsdKind::phase, 3.5e-4, 1.0, 0.0, 0.1, 1e4);
  for (double f : {0.1, 1.0, 37.0, 1e4}) EXPECT_DOUBLE_EQ(eval_psd(m, f), 3.5e-4);
}

TEST(PsdModel, ContinuousAcrossBreak) {
  const auto m = PsdModel::power_law(PsdKind::phase, 1.0, 1.0, -1.0, 1e-3, 1e6).with_break(50.0, -4.0);
  const double below = eval_psd(m, 50.0 * (1.0 - 1e-12));
  const double above = eval_psd(m, 50.0 * (1.0 + 1e-12));
  EXPECT_NEAR(below / above, 1.0, 1e-9);
  EXPECT_NEAR(eval_psd(m, 100.0) / eval_psd(m, 50.0), std::pow(2.0, -4.0), 1e-12);
}

TEST(PsdModel, ExplicitSegmentsMustBeContinuous) {
  std::vector<PsdSegment> segs{{0.0, 0.0, 1.0}, {10.0, -2.0, 1.0}};
  EXPECT_EQ(code_of([&] { PsdModel(PsdKind::phase, 1.0, segs, 1e-3, 1e3); }), Errc::invalid_model);
  segs[1].level = 100.0;  // 100 (f/1)^-2 equals 1 at f = 10
  EXPECT_NO_THROW(PsdModel(PsdKind::phase, 1.0, segs, 1e-3, 1e3));
}

TEST(PsdModel, Errors) {
  const auto m = PsdModel::power_law(PsdKind::phase, 1.0, 1.0, 0.0, 1.0, 100.0);
  EXPECT_EQ(code_of([&] { (void)eval_psd(m, 0.5); }), Errc::out_of_range);
  EXPECT_EQ(code_of([&] { (void)eval_psd(m, 101.0); }), Errc::out_of_range);
  EXPECT_EQ(code_of([] { PsdModel(PsdKind::phase, 1.0, {}, 1.0, 2.0); }), Errc::invalid_model);
  EXPECT_EQ(code_of([] {
              PsdModel(PsdKind::phase, 1.0, {{0.0, 0.0, 1.0}, {5.0, 0.0, 1.0}, {5.0, 0.0, 1.0}},
                       1.0, 10.0);
            }),
            Errc::invalid_model);
}

TEST(FreqToPhase, DividesByFSquared) {
  const auto sv = PsdModel::power_law(PsdKind::frequency, 100.0, 10.0, 0.0, 1e-3, 1e6);
  const auto sp = freq_noise_to_phase_noise(sv);
  EXPECT_EQ(sp.kind(), PsdKind::phase);
  EXPECT_NEAR(eval_psd(sp, 10.0), 1.0, 1e-14);

  const auto one = freq_noise_to_phase_noise(
      PsdModel::power_law(PsdKind::frequency, 1.0, 1.0, 0.0, 1e-3, 1e6));
  EXPECT_NEAR(eval_psd(one, 1.0), 1.0, 1e-14);
}

TEST(FreqToPhase, WhiteFrequencyGivesSlopeMinusTwo) {
  const auto sp = freq_noise_to_phase_noise(
      PsdModel::power_law(PsdKind::frequency, 7.0, 3.0, 0.0, 1e-3, 1e6));
  for (double f : {1e-2, 1.0, 30.0, 1e5})
    EXPECT_NEAR(std::log(eval_psd(sp, 2.0 * f) / eval_psd(sp, f)) / std::log(2.0), -2.0, 1e-12);
  for (const auto& seg : sp.segments()) EXPECT_DOUBLE_EQ(seg.exponent, -2.0);
}

TEST(FreqToPhase, MatchesPointwiseDivisionForBrokenModel) {
  const auto sv = PsdModel::power_law(PsdKind::frequency, 40.0, 10.0, -1.0, 1e-2, 1e5)
                      .with_break(1e3, 0.0)
                      .with_break(2e4, -1.5);
  const auto sp = freq_noise_to_phase_noise(sv);
  for (double f = 1e-2; f <= 1e5; f *= 1.37)
    EXPECT_NEAR(eval_psd(sp, f) / (eval_psd(sv, f) / (f * f)), 1.0, 1e-12) << f;
}

TEST(FreqToPhase, RejectsPhaseModel) {
  const auto m = PsdModel::power_law(PsdKind::phase, 1.0, 1.0, 0.0, 1.0, 10.0);
  EXPECT_EQ(code_of([&] { (void)freq_noise_to_phase_noise(m); }), Errc::kind_mismatch);
}

TEST(SsbPhaseNoise, Conventions) {
  EXPECT_DOUBLE_EQ(ssb_phase_noise(2.0), 0.0);
  EXPECT_NEAR(ssb_phase_noise(0.178), -10.5, 0.01);
  EXPECT_NEAR(ssb_phase_noise(2e-9), -90.0, 1e-12);
  EXPECT_NEAR(phase_psd_from_dbc(ssb_phase_noise(0.0123)), 0.0123, 1e-15);
}

TEST(SsbPhaseNoise, RejectsNonPositive) {
  EXPECT_EQ(code_of([] { (void)ssb_phase_noise(0.0); }), Errc::domain);
  EXPECT_EQ(code_of([] { (void)ssb_phase_noise(-1.0); }), Errc::domain);
}

TEST(SsbPhaseNoise, StrictlyMonotone) {
  double prev = ssb_phase_noise(1e-20);
  for (double s = 1.3e-20; s < 1e6; s *= 1.3) {
    const double v = ssb_phase_noise(s);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(PsdModelJson, RoundTrip) {
  const auto m = PsdModel::power_law(PsdKind::phase, 0.178, 10.0, -8.0 / 3.0, 1e-3, 1e6)
                     .with_break(50.0, -4.0);
  nlohmann::json j;
  to_json(j, m);
  const auto back = psd_model_from_json(j);
  for (double f : {1e-3, 0.5, 10.0, 50.0, 700.0, 1e6}) EXPECT_DOUBLE_EQ(eval_psd(back, f), eval_psd(m, f));
}

TEST(PsdModelJson, LevelDerivedFromContinuity) {
  const auto j = nlohmann::json::parse(R"({
    "kind": "phase", "ref_freq_hz": 1.0, "f_min_hz": 0.01, "f_max_hz": 1000.0,
    "segments": [{"f_break_hz": 0.0, "exponent": 0.0, "level": 2.0},
                 {"f_break_hz": 10.0, "exponent": -2.0}]})");
  const auto m = psd_model_from_json(j);
  EXPECT_NEAR(eval_psd(m, 100.0), 2.0 * 0.01, 1e-15);
}

TEST(PsdModelJson, RejectsUnknownKey) {
  auto j = nlohmann::json::parse(R"({
    "kind": "phase", "ref_freq_hz": 1.0, "f_min_hz": 0.01, "f_max_hz": 1000.0, "gain": 3,
    "segments": [{"f_break_hz": 0.0, "exponent": 0.0, "level": 2.0}]})");
  EXPECT_EQ(code_of([&] { (void)psd_model_from_json(j); }), Errc::invalid_model);
}

}  // namespace
}  // namespace fsolink
