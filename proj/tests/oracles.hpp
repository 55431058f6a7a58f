#pragma once

// Brute-force reference computations used only by the tests. None of these
// call into the code paths they check.

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "repstat/random.hpp"

namespace oracle {

using Letters = std::vector<std::uint8_t>;

inline std::uint8_t at(const Letters& x, std::int64_t i) {
  const auto n = static_cast<std::int64_t>(x.size());
  return x[static_cast<std::size_t>(((i % n) + n) % n)];
}

inline bool grams_equal(const Letters& x, std::int64_t i, std::int64_t j, int r) {
  for (int k = 0; k < r; ++k)
    if (at(x, i + k) != at(x, j + k)) return false;
  return true;
}

/// M_r by comparing every unordered pair of circle positions.
inline std::vector<std::int64_t> apparent_pairs(const Letters& x, int rmax) {
  const auto n = static_cast<std::int64_t>(x.size());
  std::vector<std::int64_t> m(static_cast<std::size_t>(rmax), 0);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = i + 1; j < n; ++j)
      for (int r = 1; r <= rmax; ++r)
        if (grams_equal(x, i, j, r)) ++m[static_cast<std::size_t>(r - 1)];
  return m;
}

/// N_r by counting pairs whose r-grammes agree and whose neighbours on both sides differ.
inline std::vector<std::int64_t> flanked_pairs(const Letters& x, int rmax) {
  const auto n = static_cast<std::int64_t>(x.size());
  std::vector<std::int64_t> out(static_cast<std::size_t>(rmax), 0);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = i + 1; j < n; ++j)
      for (int r = 1; r <= rmax; ++r)
        if (grams_equal(x, i, j, r) && at(x, i - 1) != at(x, j - 1) && at(x, i + r) != at(x, j + r))
          ++out[static_cast<std::size_t>(r - 1)];
  return out;
}

/// The X/O cells of every distinct rotation comparison: shifts 1..N/2, the
/// half-turn (even N) taking only N/2 positions.
inline std::vector<std::string> rotation_comparisons(const Letters& x) {
  const auto n = static_cast<std::int64_t>(x.size());
  std::vector<std::string> out;
  for (std::int64_t d = 1; 2 * d <= n; ++d) {
    const std::int64_t len = (2 * d == n) ? n / 2 : n;
    std::string cells;
    for (std::int64_t i = 0; i < len; ++i) cells.push_back(at(x, i) == at(x, i + d) ? 'X' : 'O');
    out.push_back(cells);
  }
  return out;
}

/// k_r by walking the string with an explicit state machine, no helper calls.
inline std::map<int, std::int64_t> naive_runs(const std::string& cells) {
  std::map<int, std::int64_t> k;
  std::size_t i = 0;
  while (i < cells.size()) {
    if (cells[i] != 'X') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cells.size() && cells[j] == 'X') ++j;
    k[static_cast<int>(j - i)] += 1;
    i = j;
  }
  return k;
}

/// Every X/O string of length L.
inline std::vector<std::string> all_figures(int length) {
  std::vector<std::string> out;
  for (std::uint32_t bits = 0; bits < (1u << length); ++bits) {
    std::string s;
    for (int i = 0; i < length; ++i) s.push_back((bits >> i) & 1u ? 'X' : 'O');
    out.push_back(s);
  }
  return out;
}

/// Urn probability of a figure that ends in O: split into cards, multiply their proportions.
/// alpha[r-1] = alpha_r; runs longer than alpha.size() have probability zero.
inline double card_product(const std::string& fig, double no_repeat, const std::vector<double>& alpha) {
  double p = 1.0;
  int run = 0;
  for (char ch : fig) {
    if (ch == 'X') {
      ++run;
      continue;
    }
    if (run == 0) {
      p *= no_repeat;
    } else {
      p *= run <= static_cast<int>(alpha.size()) ? alpha[static_cast<std::size_t>(run - 1)] : 0.0;
    }
    run = 0;
  }
  return p;
}

/// Number of X/O strings of length L whose maximal runs have exactly the counts k:
/// C(L - R + 1, m) slots for m runs among the O's, times m! / prod k_r!.
inline double arrangements(const std::map<int, std::int64_t>& k, std::int64_t length) {
  std::int64_t repeats = 0, runs = 0;
  for (auto [r, n] : k) {
    repeats += r * n;
    runs += n;
  }
  const std::int64_t slots = length - repeats + 1;
  if (runs > slots || repeats > length) return 0.0;
  double log_count = std::lgamma(slots + 1.0) - std::lgamma(runs + 1.0) - std::lgamma(slots - runs + 1.0);
  log_count += std::lgamma(runs + 1.0);
  for (auto [r, n] : k) log_count -= std::lgamma(n + 1.0);
  return std::round(std::exp(log_count));
}

inline Letters random_letters(std::size_t n, int c, std::uint64_t seed) {
  repstat::Rng rng(seed);
  Letters x(n);
  for (auto& v : x) v = static_cast<std::uint8_t>(rng() % static_cast<std::uint64_t>(c));
  return x;
}

}  // namespace oracle
