#include <gtest/gtest.h>

#include "jscov/errors.hpp"
#include "jscov/transformer.hpp"
#include "test_support.hpp"

namespace jscov {
namespace {

TEST(ElideCss, MatchesGoldens) {
  const auto goldens = testing::load_css_goldens();
  ASSERT_EQ(goldens.size(), 10u);
  for (const auto& g : goldens) {
    EXPECT_EQ(elide_css(g.input, g.ranges), g.expected) << g.name;
  }
}

TEST(ElideCss, EmptyAndFullRanges) {
  const std::string css = "a{color:red}b{color:blue}";
  EXPECT_EQ(elide_css(css, {}), "");
  const SourceSpan full[] = {{0, css.size()}};
  EXPECT_EQ(elide_css(css, full), css);
  EXPECT_EQ(elide_css("", {}), "");
}

TEST(ElideCss, RejectsBadRanges) {
  const std::string css = "a{}b{}c{}";
  const SourceSpan past_end[] = {{0, 10}};
  const SourceSpan inverted[] = {{4, 2}};
  const SourceSpan overlapping[] = {{0, 4}, {3, 6}};
  const SourceSpan unsorted[] = {{6, 9}, {0, 3}};
  EXPECT_THROW(elide_css(css, past_end), RangeError);
  EXPECT_THROW(elide_css(css, inverted), RangeError);
  EXPECT_THROW(elide_css(css, overlapping), RangeError);
  EXPECT_THROW(elide_css(css, unsorted), RangeError);
  const SourceSpan touching[] = {{0, 3}, {3, 6}};
  EXPECT_EQ(elide_css(css, touching), "a{}b{}");
}

}  // namespace
}  // namespace jscov
