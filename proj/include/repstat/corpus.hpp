#pragma once

// Repeat statistics of a plaintext corpus laid round a circle.
//
// Every rotation of the circle against itself is one comparison; the apparent
// count M_r is the number of pairs of equal circular r-grammes and the actual
// count N_r the number of maximal (flanked) r-gramme repeats over all of those
// comparisons.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "repstat/error.hpp"

namespace repstat {

using Symbol = std::uint8_t;
using Count = std::int64_t;

inline constexpr int kDefaultStatsRmax = 9;

/// The concatenated decodes, read circularly. Immutable after construction.
class CircularCorpus {
 public:
  CircularCorpus(std::vector<Symbol> letters, int alphabet_size)
      : letters_(std::move(letters)), c_(alphabet_size) {
    if (c_ < 1 || c_ > 256) throw DataError("alphabet size must be in [1, 256], got " + std::to_string(c_));
    for (std::size_t i = 0; i < letters_.size(); ++i) {
      if (letters_[i] >= c_) {
        throw ParseError("symbol " + std::to_string(letters_[i]) + " outside alphabet of size " + std::to_string(c_), i);
      }
    }
  }

  std::size_t size() const noexcept { return letters_.size(); }
  int alphabet_size() const noexcept { return c_; }
  std::span<const Symbol> letters() const noexcept { return letters_; }
  Symbol at(std::size_t i) const { return letters_[i % letters_.size()]; }

  /// N(N-1)/2, the total overlap of all distinct rotation comparisons.
  Count total_overlap() const {
    const auto n = static_cast<Count>(letters_.size());
    return n * (n - 1) / 2;
  }

 private:
  std::vector<Symbol> letters_;
  int c_;
};

/// Concatenates decodes in order onto one circle.
inline CircularCorpus build_corpus(const std::vector<std::vector<Symbol>>& texts, int alphabet_size) {
  if (texts.empty()) throw DataError("corpus needs at least one text");
  std::vector<Symbol> letters;
  for (std::size_t t = 0; t < texts.size(); ++t) {
    if (texts[t].empty()) throw DataError("text " + std::to_string(t) + " is empty");
    for (std::size_t i = 0; i < texts[t].size(); ++i) {
      if (texts[t][i] >= alphabet_size) {
        throw ParseError("text " + std::to_string(t) + ": symbol " + std::to_string(texts[t][i]) +
                             " outside alphabet of size " + std::to_string(alphabet_size),
                         i);
      }
    }
    letters.insert(letters.end(), texts[t].begin(), texts[t].end());
  }
  return CircularCorpus(std::move(letters), alphabet_size);
}

namespace detail {

// Longest common prefix (capped at rmax) of adjacent entries after sorting all
// N circular rmax-grammes. lcp[0] is unused.
inline std::vector<int> sorted_gram_lcps(const CircularCorpus& corpus, int rmax) {
  const std::size_t n = corpus.size();
  const auto letters = corpus.letters();
  const int bits = std::max(1, static_cast<int>(std::bit_width(static_cast<unsigned>(corpus.alphabet_size() - 1))));
  std::vector<int> lcp(n, 0);

  if (bits * rmax <= 64) {
    // Pack each rmax-gramme into one integer, first letter most significant.
    const int width = bits * rmax;
    const std::uint64_t mask = width == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
    std::vector<std::uint64_t> keys(n);
    std::uint64_t key = 0;
    for (int k = 0; k < rmax; ++k) key = (key << bits) | letters[static_cast<std::size_t>(k) % n];
    for (std::size_t i = 0; i < n; ++i) {
      keys[i] = key & mask;
      key = ((key << bits) | letters[(i + static_cast<std::size_t>(rmax)) % n]) & mask;
    }
    std::sort(keys.begin(), keys.end());
    for (std::size_t i = 1; i < n; ++i) {
      const std::uint64_t diff = keys[i] ^ keys[i - 1];
      lcp[i] = diff == 0 ? rmax : (std::countl_zero(diff) - (64 - width)) / bits;
    }
    return lcp;
  }

  std::vector<std::size_t> starts(n);
  std::iota(starts.begin(), starts.end(), std::size_t{0});
  auto common = [&](std::size_t a, std::size_t b) {
    int k = 0;
    while (k < rmax && letters[(a + k) % n] == letters[(b + k) % n]) ++k;
    return k;
  };
  std::sort(starts.begin(), starts.end(), [&](std::size_t a, std::size_t b) {
    const int k = common(a, b);
    return k < rmax && letters[(a + k) % n] < letters[(b + k) % n];
  });
  for (std::size_t i = 1; i < n; ++i) lcp[i] = common(starts[i - 1], starts[i]);
  return lcp;
}

}  // namespace detail

/// M_1..M_rmax: for each r, sum over distinct circular r-grammes t of n_t(n_t-1)/2.
///
/// All N circular rmax-grammes are sorted once; the group sizes for every
/// shorter r follow from the common prefixes of neighbours in that order.
inline std::vector<Count> apparent_counts(const CircularCorpus& corpus, int rmax) {
  if (rmax < 1) throw DataError("r_max must be >= 1");
  if (static_cast<std::size_t>(rmax) >= corpus.size()) {
    throw DataError("r_max (" + std::to_string(rmax) + ") must be smaller than the corpus length (" +
                    std::to_string(corpus.size()) + ")");
  }
  const std::vector<int> lcp = detail::sorted_gram_lcps(corpus, rmax);
  std::vector<Count> apparent(static_cast<std::size_t>(rmax), 0);
  std::vector<Count> group(static_cast<std::size_t>(rmax), 1);
  auto close = [&](std::size_t r_index) {
    const Count g = group[r_index];
    apparent[r_index] += g * (g - 1) / 2;
    group[r_index] = 1;
  };
  for (std::size_t i = 1; i < lcp.size(); ++i) {
    for (int r = 1; r <= rmax; ++r) {
      const auto ri = static_cast<std::size_t>(r - 1);
      if (lcp[i] >= r) {
        ++group[ri];
      } else {
        close(ri);
      }
    }
  }
  for (std::size_t ri = 0; ri < apparent.size(); ++ri) close(ri);
  return apparent;
}

/// N_r = M_r - 2 M_{r+1} + M_{r+2} for every r with both successors available.
///
/// Throws DataError if any N_r comes out negative: the apparent counts cannot
/// have come from a real set of comparisons.
inline std::vector<Count> actual_counts(std::span<const Count> apparent) {
  std::vector<Count> actual;
  if (apparent.size() < 3) return actual;
  actual.reserve(apparent.size() - 2);
  for (std::size_t i = 0; i + 2 < apparent.size(); ++i) {
    const Count n = apparent[i] - 2 * apparent[i + 1] + apparent[i + 2];
    if (n < 0) {
      throw DataError("negative actual count N_" + std::to_string(i + 1) + " = " + std::to_string(n) +
                      "; apparent counts violate M_r = N_r + 2N_{r+1} + 3N_{r+2} + ...");
    }
    actual.push_back(n);
  }
  return actual;
}

/// Corpus-level repeat spectra plus the card total derived from them.
struct RepeatStatistics {
  Count N = 0;             // letters on the circle
  int c = 0;               // alphabet size
  int r_max = 0;           // highest r with an apparent count
  std::vector<Count> M;    // M[r-1] = M_r
  std::vector<Count> Nr;   // Nr[r-1] = N_r
  Count total_cards = 0;

  Count total_overlap() const { return N * (N - 1) / 2; }

  /// N(N-1)/2 - sum r N_r.
  Count derived_total_cards() const {
    Count total = total_overlap();
    for (std::size_t i = 0; i < Nr.size(); ++i) total -= static_cast<Count>(i + 1) * Nr[i];
    return total;
  }

  friend bool operator==(const RepeatStatistics&, const RepeatStatistics&) = default;
};

/// Apparent and actual spectra of a corpus.
///
/// Actual counts normally stop at r_max - 2. When M_{r_max} is zero, every
/// longer apparent count is zero too, so N_{r_max-1} is known exactly and is
/// included.
inline RepeatStatistics compute_statistics(const CircularCorpus& corpus, int rmax = kDefaultStatsRmax) {
  RepeatStatistics stats;
  stats.N = static_cast<Count>(corpus.size());
  stats.c = corpus.alphabet_size();
  stats.r_max = rmax;
  stats.M = apparent_counts(corpus, rmax);
  std::vector<Count> extended = stats.M;
  if (extended.back() == 0) extended.push_back(0);
  stats.Nr = actual_counts(extended);
  stats.total_cards = stats.derived_total_cards();
  return stats;
}

/// The urn's card inventory implied by a set of statistics.
struct CardCounts {
  Count total = 0;
  Count no_repeat = 0;
  std::vector<Count> repeat;  // repeat[r-1] = cards of kind r = N_r
};

/// total = N(N-1)/2 - sum r N_r; one r-gramme card per actual r-gramme repeat; the rest are no-repeat cards.
inline CardCounts card_counts(const RepeatStatistics& stats) {
  CardCounts cards;
  cards.total = stats.derived_total_cards();
  if (stats.total_cards != cards.total) {
    throw DataError("stats total_cards " + std::to_string(stats.total_cards) + " disagrees with N(N-1)/2 - sum r N_r = " +
                    std::to_string(cards.total));
  }
  if (cards.total <= 0) {
    throw DataError("degenerate corpus: total card count " + std::to_string(cards.total) + " is not positive");
  }
  cards.repeat = stats.Nr;
  Count repeats = 0;
  for (Count n : stats.Nr) {
    if (n < 0) throw DataError("negative actual count in statistics");
    repeats += n;
  }
  cards.no_repeat = cards.total - repeats;
  if (cards.no_repeat < 0) {
    throw DataError("inconsistent statistics: negative no-repeat card count " + std::to_string(cards.no_repeat));
  }
  return cards;
}

}  // namespace repstat
