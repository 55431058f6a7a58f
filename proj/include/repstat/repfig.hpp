#pragma once

// Repetition figures: the X/O coincidence pattern of two aligned messages,
// and the run spectrum {k_r} that the scoring model depends on.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <ranges>
#include <string>
#include <string_view>

#include "repstat/error.hpp"

namespace repstat {

inline constexpr char kRepeat = 'X';
inline constexpr char kNoRepeat = 'O';

/// Counts of maximal X-runs keyed by run length. Only nonzero counts are stored.
class RunSpectrum {
 public:
  using map_type = std::map<int, std::int64_t>;

  RunSpectrum() = default;
  explicit RunSpectrum(map_type counts) {
    for (auto [r, k] : counts) {
      if (r < 1) throw DataError("run length must be >= 1, got " + std::to_string(r));
      if (k < 0) throw DataError("negative run count for r=" + std::to_string(r));
      if (k > 0) counts_.emplace(r, k);
    }
  }
  RunSpectrum(std::initializer_list<map_type::value_type> counts) : RunSpectrum(map_type(counts)) {}

  /// k_r; zero for run lengths never seen.
  std::int64_t count(int r) const {
    auto it = counts_.find(r);
    return it == counts_.end() ? 0 : it->second;
  }

  void add(int r, std::int64_t k = 1) {
    if (k != 0) counts_[r] += k;
  }

  /// R = sum r * k_r, the number of repeated letters.
  std::int64_t repeated_letters() const {
    std::int64_t total = 0;
    for (auto [r, k] : counts_) total += r * k;
    return total;
  }

  /// sum (r + 1) * k_r: letters consumed by the repeat cards including their closing O.
  std::int64_t block_letters() const {
    std::int64_t total = 0;
    for (auto [r, k] : counts_) total += (r + 1) * k;
    return total;
  }

  std::int64_t runs() const {
    std::int64_t total = 0;
    for (auto [r, k] : counts_) total += k;
    return total;
  }

  int longest() const { return counts_.empty() ? 0 : counts_.rbegin()->first; }
  bool empty() const { return counts_.empty(); }

  /// True when the runs can be laid out in an overlap of L letters (one virtual trailing O allowed).
  bool fits(std::int64_t overlap) const { return block_letters() <= overlap + 1; }

  const map_type& counts() const { return counts_; }
  auto begin() const { return counts_.begin(); }
  auto end() const { return counts_.end(); }

  friend bool operator==(const RunSpectrum&, const RunSpectrum&) = default;

 private:
  map_type counts_;
};

/// An immutable X/O pattern over an overlap of L aligned positions.
class RepetitionFigure {
 public:
  RepetitionFigure() = default;

  /// Builds a figure from per-position coincidence flags.
  template <std::ranges::input_range Flags>
  static RepetitionFigure from_flags(const Flags& flags) {
    RepetitionFigure fig;
    for (bool x : flags) fig.cells_.push_back(x ? kRepeat : kNoRepeat);
    return fig;
  }

  std::size_t length() const noexcept { return cells_.size(); }
  bool empty() const noexcept { return cells_.empty(); }
  bool repeat_at(std::size_t i) const { return cells_.at(i) == kRepeat; }

  std::size_t repeated_letters() const {
    return static_cast<std::size_t>(std::ranges::count(cells_, kRepeat));
  }

  /// The plain X/O serialization.
  const std::string& str() const noexcept { return cells_; }

  friend bool operator==(const RepetitionFigure&, const RepetitionFigure&) = default;

 private:
  friend RepetitionFigure parse_figure(std::string_view text);
  std::string cells_;
};

/// Parses a figure from its X/O serialization.
inline RepetitionFigure parse_figure(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != kRepeat && text[i] != kNoRepeat) {
      throw ParseError(std::string("invalid figure character '") + text[i] + "', expected X or O", i);
    }
  }
  RepetitionFigure fig;
  fig.cells_.assign(text);
  return fig;
}

/// k_r for every maximal X-run. Runs touching either end of the figure count at their visible length.
inline RunSpectrum run_spectrum(const RepetitionFigure& figure) {
  RunSpectrum spectrum;
  int run = 0;
  for (char cell : figure.str()) {
    if (cell == kRepeat) {
      ++run;
    } else if (run > 0) {
      spectrum.add(run);
      run = 0;
    }
  }
  if (run > 0) spectrum.add(run);
  return spectrum;
}

/// Cards drawn from the urn to produce this figure: L - R, plus one for the crossed-off final O.
inline std::size_t draws_needed(const RepetitionFigure& figure) {
  return figure.length() - figure.repeated_letters() + 1;
}

/// A relative placement of message B against message A.
///
/// Position i of A faces position i - shift of B.
struct Alignment {
  std::int64_t shift = 0;
  std::size_t overlap = 0;

  static Alignment of(std::size_t len_a, std::size_t len_b, std::int64_t shift) {
    const auto a = static_cast<std::int64_t>(len_a);
    const auto b = static_cast<std::int64_t>(len_b);
    const std::int64_t lo = std::max<std::int64_t>(0, shift);
    const std::int64_t hi = std::min(a, b + shift);
    return {shift, static_cast<std::size_t>(std::max<std::int64_t>(0, hi - lo))};
  }

  /// First index of A inside the overlap.
  std::size_t first_a() const { return static_cast<std::size_t>(std::max<std::int64_t>(0, shift)); }
};

/// Compares two letter sequences at a shift, marking X wherever the aligned letters are equal.
///
/// Cells are ordered by ascending index into `a`. Throws DataError when the sequences do not overlap.
template <std::ranges::random_access_range A, std::ranges::random_access_range B>
RepetitionFigure figure_from_comparison(const A& a, const B& b, std::int64_t shift) {
  const auto na = static_cast<std::size_t>(std::ranges::size(a));
  const auto nb = static_cast<std::size_t>(std::ranges::size(b));
  const Alignment al = Alignment::of(na, nb, shift);
  if (al.overlap == 0) {
    throw DataError("shift " + std::to_string(shift) + " leaves no overlap between messages of length " +
                    std::to_string(na) + " and " + std::to_string(nb));
  }
  std::string cells;
  cells.reserve(al.overlap);
  const std::size_t start = al.first_a();
  auto ia = std::ranges::begin(a);
  auto ib = std::ranges::begin(b);
  for (std::size_t i = start; i < start + al.overlap; ++i) {
    const auto j = static_cast<std::ptrdiff_t>(static_cast<std::int64_t>(i) - shift);
    cells.push_back(ia[static_cast<std::ptrdiff_t>(i)] == ib[j] ? kRepeat : kNoRepeat);
  }
  return parse_figure(cells);
}

}  // namespace repstat
