#include <gtest/gtest.h>

#include "proxy_loop.hpp"
#include "test_support.hpp"

namespace jscov {
namespace {

TEST(ProxyLoop, FiveCyclesThenElided) {
  testing::TempDir dir;
  testing::LoopOptions options;
  options.workdir = dir.path();
  const auto result = testing::run_proxy_loop(options);

  for (const auto& p : result.problems) ADD_FAILURE() << p;
  ASSERT_EQ(result.scripts.size(), 5u);
  EXPECT_EQ(result.beacons_accepted, 25);
  EXPECT_EQ(result.beacons_rejected, 0);
  EXPECT_EQ(result.page_origin_fetches, 1);
  std::size_t shrunk = 0;
  for (const auto& s : result.scripts) {
    SCOPED_TRACE(s.url);
    EXPECT_EQ(s.variants_seen, std::vector<std::string>(5, "instrumented"));
    EXPECT_EQ(s.final_variant, "elided");
    EXPECT_TRUE(s.final_parses);
    EXPECT_EQ(s.origin_fetches, 1);
    EXPECT_TRUE(s.sidecars_ok);
    EXPECT_EQ(s.sidecars_fetched, s.replaced_units);
    if (s.replaced_units > 0) {
      EXPECT_LT(s.final_bytes, s.original_bytes);
      ++shrunk;
    } else {
      EXPECT_EQ(s.final_bytes, s.original_bytes);
    }
    EXPECT_GT(s.executed_reported, 0u);
  }
  // tiny.js has nothing worth eliding; every other script shrinks.
  EXPECT_EQ(shrunk, 4u);
  EXPECT_EQ(result.restart_origin_fetches, 0);
  for (const auto& [url, variant] : result.restart_variants) EXPECT_EQ(variant, "elided") << url;
  EXPECT_LT(result.seconds, 30.0);
}

TEST(ProxyLoop, HigherThresholdKeepsLearning) {
  testing::TempDir dir;
  testing::LoopOptions options;
  options.workdir = dir.path();
  options.phase.min_beacons = 6;
  const auto result = testing::run_proxy_loop(options);
  for (const auto& p : result.problems) ADD_FAILURE() << p;
  for (const auto& s : result.scripts) EXPECT_EQ(s.final_variant, "instrumented") << s.url;
}

}  // namespace
}  // namespace jscov
