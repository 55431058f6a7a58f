#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "repstat/urn.hpp"

using namespace repstat;

namespace {

RepeatStatistics abcab_stats() {
  std::vector<Symbol> x{0, 1, 2, 0, 1};
  return compute_statistics(CircularCorpus(x, 26), 3);
}

SampleResult replay(std::size_t overlap, const std::vector<int>& cards, std::size_t count = 100) {
  std::size_t next = 0;
  return assemble_figures(overlap, count, [&]() -> std::optional<int> {
    if (next == cards.size()) return std::nullopt;
    return cards[next++];
  });
}

}  // namespace

TEST(UrnModel, Invariants) {
  EXPECT_NO_THROW(UrnModel({0.25, 0.125}, 0.625, 4));
  EXPECT_THROW(UrnModel({0.25, 0.125}, 0.6, 4), ModelError);   // does not sum to 1
  EXPECT_THROW(UrnModel({-0.1}, 1.1, 4), ModelError);          // negative alpha
  EXPECT_THROW(UrnModel({1.0}, 0.0, 4), ModelError);           // A must be positive
  const UrnModel trimmed({0.5, 0.0, 0.0}, 0.5, 2);
  EXPECT_EQ(trimmed.r_max(), 1);
  EXPECT_EQ(trimmed.alpha(7), 0.0);
}

TEST(UrnFromStats, Examples) {
  const auto urn = urn_from_stats(abcab_stats());
  EXPECT_EQ(urn.alpha(1), 0.0);
  EXPECT_DOUBLE_EQ(urn.alpha(2), 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(urn.no_repeat(), 7.0 / 8.0);
  EXPECT_EQ(urn.r_max(), 2);

  const RepeatStatistics blank{100, 26, 3, {0, 0, 0}, {0}, 4950};
  const auto pure = urn_from_stats(blank);
  EXPECT_DOUBLE_EQ(pure.no_repeat(), 1.0);
  EXPECT_TRUE(pure.alphas().empty());

  const RepeatStatistics empty{5, 26, 4, {0, 0, 0, 0}, {4, 3}, 0};
  EXPECT_THROW(urn_from_stats(empty), DataError);
}

TEST(HattedUrn, Examples) {
  const auto h26 = hatted_urn(26);
  EXPECT_EQ(h26.r_max(), 25);
  EXPECT_NEAR(h26.alpha(1), 0.036982248520710059, 1e-17);
  EXPECT_NEAR(h26.alpha(2), 0.0014223941738734638, 1e-18);
  EXPECT_NEAR(h26.no_repeat(), 25.0 / 26.0, 1e-12);

  const auto h2 = hatted_urn(2, 3);
  EXPECT_DOUBLE_EQ(h2.alpha(1), 0.25);
  EXPECT_DOUBLE_EQ(h2.alpha(2), 0.125);
  EXPECT_DOUBLE_EQ(h2.alpha(3), 0.0625);
  EXPECT_DOUBLE_EQ(h2.no_repeat(), 9.0 / 16.0);

  EXPECT_THROW(hatted_urn(1), ModelError);
}

TEST(HattedUrn, ProportionsSumToOne) {
  for (int c = 2; c <= 30; ++c) {
    const auto h = hatted_urn(c);
    EXPECT_NEAR(h.sum_alpha() + h.no_repeat(), 1.0, 1e-12);
    EXPECT_NEAR(h.no_repeat(), (c - 1.0) / c, 1e-15) << c;
  }
}

TEST(HattedApparent, Examples) {
  EXPECT_DOUBLE_EQ(hatted_apparent(26, 1, 26), 12.5);
  EXPECT_DOUBLE_EQ(hatted_apparent(26, 0, 26), 325.0);
}

TEST(HattedApparent, MatchesRandomCircles) {
  // M_3 on uniform circles N=10^4, c=4: replicate mean within 3 standard errors.
  const int replicates = 40;
  std::vector<double> m3;
  for (int i = 0; i < replicates; ++i) {
    const auto x = oracle::random_letters(10000, 4, 1000 + static_cast<std::uint64_t>(i));
    m3.push_back(static_cast<double>(apparent_counts(CircularCorpus(x, 4), 3)[2]));
  }
  double mean = 0.0, var = 0.0;
  for (double v : m3) mean += v / replicates;
  for (double v : m3) var += (v - mean) * (v - mean) / (replicates - 1);
  const double expected = hatted_apparent(4, 3, 10000);
  EXPECT_LT(std::abs(mean - expected), 3.0 * std::sqrt(var / replicates));
  // A single circle sits within 3 standard deviations as well.
  EXPECT_LT(std::abs(m3.front() - expected), 3.0 * std::sqrt(var));
}

TEST(AcceptanceProportion, Examples) {
  EXPECT_NEAR(acceptance_proportion(hatted_urn(26)), 25.0 / 26.0, 1e-12);
  EXPECT_DOUBLE_EQ(acceptance_proportion(UrnModel({}, 1.0, 26)), 1.0);
  EXPECT_DOUBLE_EQ(acceptance_proportion(UrnModel({0.5}, 0.5, 2)), 2.0 / 3.0);
}

TEST(ExactCompletion, SmallLengths) {
  const auto h = hatted_urn(26);
  EXPECT_DOUBLE_EQ(exact_completion_probability(h, 0), 1.0);
  EXPECT_DOUBLE_EQ(exact_completion_probability(h, 1), h.no_repeat());
  EXPECT_DOUBLE_EQ(exact_completion_probability(h, 2), h.no_repeat() * h.no_repeat() + h.alpha(1));
}

TEST(ExactCompletion, ConvergesToAcceptanceProportion) {
  const auto h = hatted_urn(26);
  EXPECT_LT(std::abs(exact_completion_probability(h, 500) * (1.0 + h.sum_r_alpha()) - 1.0), 1e-6);
  const UrnModel half({0.5}, 0.5, 2);
  EXPECT_NEAR(exact_completion_probability(half, 200), 2.0 / 3.0, 1e-12);
}

TEST(ExactCompletion, EqualsSumOverEnumeratedFigures) {
  const std::vector<UrnModel> urns{UrnModel({0.2, 0.1, 0.05}, 0.65, 4), UrnModel({0.4}, 0.6, 2),
                                   UrnModel({0.0, 0.3}, 0.7, 3), hatted_urn(3, 3)};
  for (const auto& urn : urns) {
    for (int len = 1; len <= 8; ++len) {
      double total = 0.0;
      for (const auto& fig : oracle::all_figures(len))
        if (fig.back() == 'O') total += oracle::card_product(fig, urn.no_repeat(), urn.alphas());
      EXPECT_NEAR(total, exact_completion_probability(urn, static_cast<std::size_t>(len)), 1e-12);
    }
  }
}

TEST(SampleFigures, WorkedExampleReplay) {
  std::vector<int> cards{4, 0, 0, 0, 2, 0, 3, 13};
  cards.insert(cards.end(), 13, 0);
  const auto result = replay(12, cards);
  ASSERT_EQ(result.figures.size(), 2u);
  EXPECT_EQ(result.figures[0].str(), "XXXXOOOOXXOO");
  EXPECT_EQ(result.figures[1].str(), "OOOOOOOOOOOO");
  EXPECT_EQ(result.scrapped, 1u);
}

TEST(SampleFigures, GenuineFigureDropsTrailingO) {
  std::size_t next = 0;
  const std::vector<int> cards{4, 0, 0, 0, 2, 0};
  const auto result = assemble_figures(
      12, 1, [&]() -> std::optional<int> { return next < cards.size() ? std::optional<int>(cards[next++]) : std::nullopt; },
      false);
  ASSERT_EQ(result.figures.size(), 1u);
  EXPECT_EQ(result.figures[0].str(), "XXXXOOOOXXO");
}

TEST(SampleFigures, NoRepeatUrn) {
  const auto result = sample_figures(UrnModel({}, 1.0, 26), 5, 2, 42);
  ASSERT_EQ(result.figures.size(), 2u);
  EXPECT_EQ(result.figures[0].str(), "OOOOO");
  EXPECT_EQ(result.figures[1].str(), "OOOOO");
  EXPECT_EQ(result.scrapped, 0u);
}

TEST(SampleFigures, Deterministic) {
  const auto h = hatted_urn(4);
  const auto a = sample_figures(h, 30, 500, 7);
  const auto b = sample_figures(h, 30, 500, 7);
  const auto c = sample_figures(h, 30, 500, 8);
  EXPECT_EQ(a.figures, b.figures);
  EXPECT_EQ(a.scrapped, b.scrapped);
  EXPECT_NE(a.figures, c.figures);
  for (const auto& f : a.figures) {
    EXPECT_EQ(f.length(), 30u);
    EXPECT_FALSE(f.repeat_at(29));
  }
}

TEST(SampleFigures, CompletionRateMatchesDynamicProgram) {
  const UrnModel urn({0.2, 0.1, 0.05}, 0.65, 4);
  for (std::size_t len : {5u, 12u, 50u}) {
    const auto result = sample_figures(urn, len, 100000, 31 + len);
    const double n = static_cast<double>(result.sessions());
    const double rate = static_cast<double>(result.figures.size()) / n;
    const double p = exact_completion_probability(urn, len);
    EXPECT_LT(std::abs(rate - p), 3.0 * std::sqrt(p * (1.0 - p) / n)) << "L=" << len;
  }
}

TEST(CardDrawer, EmpiricalProportionsMatchUrn) {
  const auto h = hatted_urn(4);
  const CardDrawer draw(h);
  Rng rng(2024);
  const int n = 1000000;
  std::vector<int> counts(static_cast<std::size_t>(draw.kinds()), 0);
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(draw(rng))];
  for (int r = 1; r <= 6; ++r) {
    const double p = h.alpha(r);
    const double freq = counts[static_cast<std::size_t>(r)] / static_cast<double>(n);
    EXPECT_LT(std::abs(freq - p), 3.0 * std::sqrt(p * (1.0 - p) / n)) << "r=" << r;
  }
}
