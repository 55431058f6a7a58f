#pragma once

// The urn of cards that generates repetition figures.
//
// A no-repeat card writes "O"; an r-gramme card writes r X's followed by "O".
// Cards are drawn with replacement until the figure reaches the overlap
// exactly; a figure that jumps past the overlap is scrapped.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "repstat/corpus.hpp"
#include "repstat/error.hpp"
#include "repstat/random.hpp"
#include "repstat/repfig.hpp"

namespace repstat {

inline constexpr double kUrnSumTolerance = 1e-12;

/// Card proportions: alpha_r for r-gramme cards and A for no-repeat cards.
class UrnModel {
 public:
  /// alpha[r-1] is the proportion of r-gramme cards. Trailing zeros are trimmed.
  UrnModel(std::vector<double> alpha, double no_repeat, int alphabet_size)
      : alpha_(std::move(alpha)), A_(no_repeat), c_(alphabet_size) {
    while (!alpha_.empty() && alpha_.back() == 0.0) alpha_.pop_back();
    if (c_ < 1) throw ModelError("urn alphabet size must be positive");
    if (!(A_ > 0.0) || !std::isfinite(A_)) throw ModelError("no-repeat proportion A must be positive, got " + std::to_string(A_));
    double sum = A_;
    for (std::size_t i = 0; i < alpha_.size(); ++i) {
      if (!(alpha_[i] >= 0.0) || !std::isfinite(alpha_[i])) {
        throw ModelError("alpha_" + std::to_string(i + 1) + " must be a nonnegative proportion");
      }
      sum += alpha_[i];
    }
    if (std::abs(sum - 1.0) > kUrnSumTolerance) {
      throw ModelError("card proportions sum to " + std::to_string(sum) + ", not 1");
    }
  }

  /// alpha_r, zero beyond r_max.
  double alpha(int r) const {
    return r >= 1 && static_cast<std::size_t>(r) <= alpha_.size() ? alpha_[static_cast<std::size_t>(r - 1)] : 0.0;
  }
  const std::vector<double>& alphas() const noexcept { return alpha_; }
  double no_repeat() const noexcept { return A_; }
  int alphabet_size() const noexcept { return c_; }
  /// Largest r with alpha_r > 0 (0 for an urn of no-repeat cards only).
  int r_max() const noexcept { return static_cast<int>(alpha_.size()); }

  double sum_alpha() const {
    double s = 0.0;
    for (double a : alpha_) s += a;
    return s;
  }

  /// sum r alpha_r, the mean number of X's written per card.
  double sum_r_alpha() const {
    double s = 0.0;
    for (std::size_t i = 0; i < alpha_.size(); ++i) s += static_cast<double>(i + 1) * alpha_[i];
    return s;
  }

 private:
  std::vector<double> alpha_;
  double A_;
  int c_;
};

/// alpha_r = N_r / total_cards, A = no-repeat cards / total_cards.
inline UrnModel urn_from_stats(const RepeatStatistics& stats) {
  const CardCounts cards = card_counts(stats);
  if (cards.no_repeat <= 0) throw DataError("statistics leave no no-repeat cards; the urn would have A = 0");
  const auto total = static_cast<double>(cards.total);
  std::vector<double> alpha;
  alpha.reserve(cards.repeat.size());
  for (Count n : cards.repeat) alpha.push_back(static_cast<double>(n) / total);
  return UrnModel(std::move(alpha), static_cast<double>(cards.no_repeat) / total, stats.c);
}

/// Default truncation for hatted urns: at least 25, and deep enough that the
/// dropped tail c^-r_max is below double precision.
inline int default_hatted_rmax(int c) {
  if (c < 2) throw ModelError("hatted urn needs alphabet size >= 2");
  const int precision = static_cast<int>(std::ceil(53.0 / std::log2(static_cast<double>(c))));
  return std::max(25, precision);
}

/// The urn of uniformly random ("hatted") material: alpha_r = (c-1)/c^(r+1), A = 1 - sum alpha_r.
inline UrnModel hatted_urn(int c, std::optional<int> rmax = std::nullopt) {
  if (c < 2) throw ModelError("hatted urn needs alphabet size >= 2, got " + std::to_string(c));
  const int depth = rmax.value_or(default_hatted_rmax(c));
  if (depth < 0) throw ModelError("hatted urn r_max must be >= 0");
  std::vector<double> alpha;
  alpha.reserve(static_cast<std::size_t>(depth));
  const double cd = c;
  double sum = 0.0;
  for (int r = 1; r <= depth; ++r) {
    alpha.push_back((cd - 1.0) / std::pow(cd, r + 1));
    sum += alpha.back();
  }
  return UrnModel(std::move(alpha), 1.0 - sum, c);
}

/// Expected apparent r-gramme count on a random circle of N letters: (N(N-1)/2) c^-r.
inline double hatted_apparent(int c, int r, Count n) {
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return pairs * std::pow(static_cast<double>(c), -r);
}

/// Limiting fraction of drawing sessions that land exactly on the overlap: 1 / (1 + sum r alpha_r).
inline double acceptance_proportion(const UrnModel& urn) { return 1.0 / (1.0 + urn.sum_r_alpha()); }

/// f(0..L) with f(0) = 1 and f(n) = A f(n-1) + sum_r alpha_r f(n-r-1).
inline std::vector<double> completion_probabilities(const UrnModel& urn, std::size_t overlap) {
  std::vector<double> f(overlap + 1, 0.0);
  f[0] = 1.0;
  for (std::size_t n = 1; n <= overlap; ++n) {
    double v = urn.no_repeat() * f[n - 1];
    for (int r = 1; r <= urn.r_max() && static_cast<std::size_t>(r) + 1 <= n; ++r) {
      v += urn.alpha(r) * f[n - static_cast<std::size_t>(r) - 1];
    }
    f[n] = v;
  }
  return f;
}

/// Exact probability that one drawing session completes at length L.
inline double exact_completion_probability(const UrnModel& urn, std::size_t overlap) {
  return completion_probabilities(urn, overlap).back();
}

/// Draws card kinds (0 = no repeat, r = r-gramme) by inverse CDF over one uniform.
class CardDrawer {
 public:
  explicit CardDrawer(const UrnModel& urn) {
    double acc = urn.no_repeat();
    cumulative_.push_back(acc);
    for (double a : urn.alphas()) {
      acc += a;
      cumulative_.push_back(acc);
    }
  }

  template <class URBG>
  int operator()(URBG& rng) const {
    const double u = uniform01(rng) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<int>(it - cumulative_.begin());
  }

  int kinds() const { return static_cast<int>(cumulative_.size()); }

 private:
  std::vector<double> cumulative_;
};

struct SampleResult {
  std::vector<RepetitionFigure> figures;
  std::uint64_t scrapped = 0;
  std::uint64_t draws = 0;

  std::uint64_t sessions() const { return figures.size() + scrapped; }
  double scrap_rate() const {
    return sessions() == 0 ? 0.0 : static_cast<double>(scrapped) / static_cast<double>(sessions());
  }
};

/// Runs drawing sessions from any card source until `count` figures complete
/// or the source runs dry (returns nullopt). A session left unfinished when the
/// source runs dry is neither completed nor scrapped.
///
/// Completed figures end in the closing O unless `keep_trailing_o` is false,
/// in which case that O is crossed off.
template <class CardSource>
SampleResult assemble_figures(std::size_t overlap, std::size_t count, CardSource&& next_card,
                              bool keep_trailing_o = true) {
  if (overlap < 1) throw DataError("overlap must be >= 1");
  SampleResult result;
  std::string cells;
  while (result.figures.size() < count) {
    std::optional<int> card = next_card();
    if (!card) break;
    ++result.draws;
    const int r = *card;
    if (cells.size() + static_cast<std::size_t>(r) + 1 > overlap) {
      ++result.scrapped;
      cells.clear();
      continue;
    }
    cells.append(static_cast<std::size_t>(r), kRepeat);
    cells.push_back(kNoRepeat);
    if (cells.size() == overlap) {
      if (!keep_trailing_o) cells.pop_back();
      result.figures.push_back(parse_figure(cells));
      cells.clear();
    }
  }
  return result;
}

/// Samples `count` completed figures of the given overlap. Deterministic in `seed`.
inline SampleResult sample_figures(const UrnModel& urn, std::size_t overlap, std::size_t count, Seed seed,
                                   bool keep_trailing_o = true) {
  if (count < 1) throw DataError("count must be >= 1");
  Rng rng(seed);
  const CardDrawer draw(urn);
  return assemble_figures(
      overlap, count, [&]() -> std::optional<int> { return draw(rng); }, keep_trailing_o);
}

}  // namespace repstat
