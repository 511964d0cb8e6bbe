#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "mobrelay/config.hpp"
#include "mobrelay/errors.hpp"

namespace {

using namespace mobrelay;

ScenarioConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test");
}

TEST(ConfigFile, ReadsUnitsAndPoints) {
  const ScenarioConfig cfg = parse(
      "# reference run\n"
      "distance_D = 1500\n"
      "altitude_H = 80   # metres\n"
      "reference_snr_gamma0_db = 70\n"
      "avg_power_source_dbm = 20\n"
      "avg_power_relay = 0.5\n"
      "horizon_T = 60\n"
      "start_point = 100, -20\n"
      "end_point = 1400,-20\n");
  EXPECT_EQ(cfg.distance, 1500.0);
  EXPECT_EQ(cfg.altitude, 80.0);
  EXPECT_NEAR(cfg.gamma0, 1e7, 1e-6);
  EXPECT_NEAR(cfg.avg_power_source, 0.1, 1e-15);
  EXPECT_EQ(cfg.avg_power_relay, 0.5);
  EXPECT_EQ(cfg.slot_count, 60);
  ASSERT_TRUE(cfg.start_point && cfg.end_point);
  EXPECT_EQ(cfg.start_point->y, -20.0);
  EXPECT_EQ(cfg.end_point->x, 1400.0);
}

TEST(ConfigFile, DefaultsMatchReferenceSetup) {
  const ScenarioConfig cfg = parse("");
  const ScenarioConfig ref = reference_setup(100.0);
  EXPECT_EQ(cfg.distance, ref.distance);
  EXPECT_EQ(cfg.slot_count, ref.slot_count);
  EXPECT_NEAR(cfg.gamma0, ref.gamma0, 1e-6);
  EXPECT_FALSE(cfg.start_point);
}

TEST(ConfigFile, DiscretizationKeys) {
  EXPECT_EQ(parse("slot_length = 0.5\nhorizon_T = 20\n").slot_count, 40);
  const ScenarioConfig both = parse("horizon_T = 30\nslot_count_N = 60\n");
  EXPECT_EQ(both.slot_count, 60);
  EXPECT_DOUBLE_EQ(both.slot_length, 0.5);
  EXPECT_THROW(parse("horizon_T = 30\nslot_count_N = 60\nslot_length = 1\n"), ConfigError);
  EXPECT_THROW(parse("slot_count_N = 2.5\n"), ConfigError);
}

TEST(ConfigFile, ReferenceGainUsesNoise) {
  const ScenarioConfig cfg = parse("reference_gain_beta0_db = -60\nnoise_power_dbm = -110\n");
  EXPECT_NEAR(cfg.gamma0, 1e-6 / 1e-14, 1e-3);
}

TEST(ConfigFile, Errors) {
  EXPECT_THROW(parse("no equals sign\n"), ConfigError);
  EXPECT_THROW(parse("colour = blue\n"), ConfigError);
  EXPECT_THROW(parse("distance_D = far\n"), ConfigError);
  EXPECT_THROW(parse("start_point = 12\n"), ConfigError);
  EXPECT_THROW(parse("altitude_H = -1\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/dir/scenario.cfg"), IoError);
}

TEST(ConfigFile, ErrorsCarryLineNumbers) {
  try {
    parse("distance_D = 10\n\nbogus = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("test:3"), std::string::npos);
  }
}

TEST(ConfigFile, FormatRoundTrips) {
  ScenarioConfig cfg = reference_setup(250.0);
  cfg.start_point = Point2{10.0, 20.0};
  cfg.end_point = Point2{1990.0, 20.0};
  cfg.avg_power_relay = 0.02;
  const ScenarioConfig back = parse(format_config(cfg));
  EXPECT_EQ(back.slot_count, cfg.slot_count);
  EXPECT_EQ(back.avg_power_relay, cfg.avg_power_relay);
  EXPECT_EQ(back.gamma0, cfg.gamma0);
  EXPECT_EQ(back.end_point->x, 1990.0);
}

TEST(ConfigFile, SingleEntry) {
  ScenarioConfig cfg;
  apply_config_entry(cfg, "avg_power_dbm", "0");
  EXPECT_NEAR(cfg.avg_power_source, 1e-3, 1e-18);
  EXPECT_NEAR(cfg.avg_power_relay, 1e-3, 1e-18);
  apply_config_entry(cfg, "horizon_T", "12");
  EXPECT_EQ(cfg.slot_count, 12);
}

}  // namespace
