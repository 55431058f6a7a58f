#pragma once

// Evidence weights and Bayesian odds for a fit.
//
// With k_r r-gramme repeats in an overlap of L letters:
//
//   log q = log lambda + sum_r mu_r k_r - nu L + log[(1 - sum alpha_r)(1 + sum r alpha_r)]
//
// where the weights compare the language urn against the hatted urn of the
// same alphabet size. Natural log is canonical; decibans are a display unit.

#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <string>

#include "repstat/error.hpp"
#include "repstat/repfig.hpp"
#include "repstat/urn.hpp"

namespace repstat {

enum class LogUnit { nat, deciban };

/// Multiplier taking natural-log odds into the unit.
inline constexpr double unit_scale(LogUnit unit) {
  return unit == LogUnit::deciban ? 10.0 / std::numbers::ln10 : 1.0;
}

inline std::string to_string(LogUnit unit) { return unit == LogUnit::deciban ? "db" : "nat"; }

inline LogUnit parse_log_unit(const std::string& s) {
  if (s == "nat") return LogUnit::nat;
  if (s == "db") return LogUnit::deciban;
  throw DataError("unknown log unit '" + s + "', expected nat or db");
}

struct ScoreWeights {
  int c = 26;
  LogUnit unit = LogUnit::nat;
  std::map<int, double> mu;  // only r with alpha_r > 0 (or floored)
  double nu = 0.0;
  double correction = 0.0;
  std::optional<double> floor;  // smoothing floor on alpha_r for unseen r

  /// mu_r in the weights' unit. Throws ModelError when r never occurred in the urn and no floor is set.
  double weight(int r) const {
    if (auto it = mu.find(r); it != mu.end()) return it->second;
    if (floor) return floored_weight(r, *floor);
    throw ModelError("no evidence weight for " + std::to_string(r) +
                     "-gramme repeats: the urn has alpha_" + std::to_string(r) +
                     " = 0 (configure a smoothing floor to score it)");
  }

  double floored_weight(int r, double alpha) const {
    const double scale = unit_scale(unit);
    const double cd = c;
    return scale * (std::log(alpha) + (r + 1) * std::log(cd) - std::log(cd - 1.0)) + (r + 1) * nu;
  }
};

/// mu_r = log(alpha_r c^(r+1)/(c-1)) - (r+1) log(cA/(c-1)),  nu = log((c-1)/(cA)),
/// correction = log[(1 - sum alpha_r)(1 + sum r alpha_r)].
inline ScoreWeights weights(const UrnModel& urn, LogUnit unit = LogUnit::nat,
                            std::optional<double> floor = std::nullopt) {
  const int c = urn.alphabet_size();
  if (c < 2) throw ModelError("scoring needs an alphabet of at least 2 symbols");
  if (floor && !(*floor > 0.0 && *floor < 1.0)) throw ModelError("smoothing floor must lie in (0, 1)");
  const double scale = unit_scale(unit);
  const double cd = c;
  const double log_ratio_a = std::log(cd * urn.no_repeat() / (cd - 1.0));

  ScoreWeights w;
  w.c = c;
  w.unit = unit;
  w.floor = floor;
  w.nu = -scale * log_ratio_a;
  w.correction = scale * (std::log(urn.no_repeat()) + std::log1p(urn.sum_r_alpha()));
  for (int r = 1; r <= urn.r_max(); ++r) {
    double a = urn.alpha(r);
    if (floor) a = std::max(a, *floor);
    if (a <= 0.0) continue;
    w.mu[r] = scale * (std::log(a) + (r + 1) * std::log(cd) - std::log(cd - 1.0) - (r + 1) * log_ratio_a);
  }
  return w;
}

namespace detail {
inline void require_fits(const RunSpectrum& k, std::size_t overlap) {
  if (!k.fits(static_cast<std::int64_t>(overlap))) {
    throw DataError("spectrum needs " + std::to_string(k.block_letters()) + " letters but the overlap is only " +
                    std::to_string(overlap));
  }
}
}  // namespace detail

/// Natural log of (1 + sum r alpha_r) A^(L+1-sum(r+1)k_r) prod alpha_r^k_r.
inline double log_right_relevant_proportion(const UrnModel& urn, const RunSpectrum& k, std::size_t overlap) {
  detail::require_fits(k, overlap);
  const auto free_cards = static_cast<double>(static_cast<std::int64_t>(overlap) + 1 - k.block_letters());
  double v = std::log1p(urn.sum_r_alpha()) + free_cards * std::log(urn.no_repeat());
  for (auto [r, kr] : k) v += static_cast<double>(kr) * std::log(urn.alpha(r));
  return v;
}

/// Proportion of right comparisons of overlap L whose figure has spectrum k (large-L approximation).
inline double right_relevant_proportion(const UrnModel& urn, const RunSpectrum& k, std::size_t overlap) {
  return std::exp(log_right_relevant_proportion(urn, k, overlap));
}

/// The same proportion for wrong comparisons, i.e. under the hatted urn in closed form.
inline double log_wrong_relevant_proportion(int c, const RunSpectrum& k, std::size_t overlap) {
  if (c < 2) throw ModelError("alphabet size must be >= 2");
  detail::require_fits(k, overlap);
  const double cd = c;
  const auto free_cards = static_cast<double>(static_cast<std::int64_t>(overlap) + 1 - k.block_letters());
  double v = std::log(cd / (cd - 1.0)) + free_cards * std::log((cd - 1.0) / cd);
  for (auto [r, kr] : k) v += static_cast<double>(kr) * (std::log(cd - 1.0) - (r + 1) * std::log(cd));
  return v;
}

inline double wrong_relevant_proportion(int c, const RunSpectrum& k, std::size_t overlap) {
  return std::exp(log_wrong_relevant_proportion(c, k, overlap));
}

/// Probability that R given positions of a wrong comparison coincide and the other L - R do not:
/// (1/c)^R ((c-1)/c)^(L-R).
inline double wrong_relevance_ratio(std::size_t overlap, std::size_t repeats, int c) {
  if (repeats > overlap) {
    throw DataError("repeated letters (" + std::to_string(repeats) + ") exceed the overlap (" +
                    std::to_string(overlap) + ")");
  }
  if (c < 2) throw ModelError("alphabet size must be >= 2");
  const double cd = c;
  return std::pow(1.0 / cd, static_cast<double>(repeats)) *
         std::pow((cd - 1.0) / cd, static_cast<double>(overlap - repeats));
}

struct FitScore {
  LogUnit unit = LogUnit::nat;
  double prior_log_odds = 0.0;
  double evidence = 0.0;  // sum mu_r k_r - nu L
  double correction = 0.0;
  double log_odds = 0.0;
  double posterior = 0.5;
};

/// q / (1 + q) from log q in the given unit, without overflow.
inline double posterior_from_log_odds(double log_odds, LogUnit unit = LogUnit::nat) {
  const double x = log_odds / unit_scale(unit);
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// Log-odds and posterior that a comparison with spectrum k over overlap L is a right fit.
inline FitScore odds_of_fit(const ScoreWeights& w, const RunSpectrum& k, std::size_t overlap,
                            double prior_log_odds = 0.0) {
  if (!std::isfinite(prior_log_odds)) throw ModelError("prior log-odds must be finite");
  detail::require_fits(k, overlap);
  FitScore s;
  s.unit = w.unit;
  s.prior_log_odds = prior_log_odds;
  for (auto [r, kr] : k) s.evidence += w.weight(r) * static_cast<double>(kr);
  s.evidence -= w.nu * static_cast<double>(overlap);
  s.correction = w.correction;
  s.log_odds = s.prior_log_odds + s.evidence + s.correction;
  s.posterior = posterior_from_log_odds(s.log_odds, w.unit);
  return s;
}

inline FitScore odds_of_fit(const ScoreWeights& w, const RepetitionFigure& figure, double prior_log_odds = 0.0) {
  return odds_of_fit(w, run_spectrum(figure), figure.length(), prior_log_odds);
}

inline FitScore odds_of_fit(const UrnModel& urn, const RunSpectrum& k, std::size_t overlap,
                            double prior_log_odds = 0.0) {
  return odds_of_fit(weights(urn), k, overlap, prior_log_odds);
}

}  // namespace repstat
