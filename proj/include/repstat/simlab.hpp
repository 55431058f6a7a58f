#pragma once

// Monte Carlo laboratory: synthetic plaintext, traffic in depth, and a
// calibration check that predicted posteriors match the labelled truth.
//
// Right pairs share one uniform key stream over the machine positions they
// occupy, so a ciphertext coincidence happens exactly where the plaintexts
// coincide. Wrong pairs use independent key streams.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "repstat/corpus.hpp"
#include "repstat/error.hpp"
#include "repstat/random.hpp"
#include "repstat/repfig.hpp"
#include "repstat/scorer.hpp"
#include "repstat/urn.hpp"

namespace repstat {

inline constexpr double kProbabilityTolerance = 1e-12;

/// Generator of synthetic plaintext.
class LanguageModel {
 public:
  enum class Kind { uniform, iid, markov1 };

  static LanguageModel uniform(int c) {
    if (c < 2 || c > 256) throw DataError("uniform language needs 2 <= c <= 256");
    return LanguageModel(Kind::uniform, c, std::vector<double>(static_cast<std::size_t>(c), 1.0 / c), {});
  }

  static LanguageModel iid(std::vector<double> probs) {
    const int c = static_cast<int>(probs.size());
    check_row(probs, "letter probabilities");
    return LanguageModel(Kind::iid, c, std::move(probs), {});
  }

  /// First-order Markov chain; `initial` starts every decode.
  static LanguageModel markov1(std::vector<double> initial, std::vector<std::vector<double>> transition) {
    const int c = static_cast<int>(initial.size());
    check_row(initial, "initial distribution");
    if (transition.size() != initial.size()) throw DataError("transition matrix must be c x c");
    for (std::size_t i = 0; i < transition.size(); ++i) {
      if (transition[i].size() != initial.size()) throw DataError("transition matrix must be c x c");
      check_row(transition[i], "transition row " + std::to_string(i));
    }
    return LanguageModel(Kind::markov1, c, std::move(initial), std::move(transition));
  }

  Kind kind() const noexcept { return kind_; }
  int alphabet_size() const noexcept { return c_; }
  /// Letter probabilities (iid, uniform) or the initial distribution (markov1).
  const std::vector<double>& probs() const noexcept { return probs_; }
  const std::vector<std::vector<double>>& transition() const noexcept { return transition_; }

  template <class URBG>
  std::vector<Symbol> generate(std::size_t n, URBG& rng) const {
    std::vector<Symbol> out;
    out.reserve(n);
    if (kind_ == Kind::uniform) {
      for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<Symbol>(uniform_below(rng, static_cast<std::uint64_t>(c_))));
      return out;
    }
    std::size_t prev = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& cdf = (kind_ == Kind::markov1 && i > 0) ? row_cdf_[prev] : cdf_;
      prev = pick(cdf, uniform01(rng));
      out.push_back(static_cast<Symbol>(prev));
    }
    return out;
  }

  /// Probability that two independent letters coincide: sum p_i^2 (iid and uniform only).
  double coincidence_rate() const {
    if (kind_ == Kind::markov1) throw ModelError("coincidence rate is not closed-form for a Markov language");
    double s = 0.0;
    for (double p : probs_) s += p * p;
    return s;
  }

 private:
  LanguageModel(Kind kind, int c, std::vector<double> probs, std::vector<std::vector<double>> transition)
      : kind_(kind), c_(c), probs_(std::move(probs)), transition_(std::move(transition)) {
    cdf_ = cumulative(probs_);
    for (const auto& row : transition_) row_cdf_.push_back(cumulative(row));
  }

  static void check_row(const std::vector<double>& row, const std::string& what) {
    if (row.size() < 2 || row.size() > 256) throw DataError(what + ": alphabet size must be in [2, 256]");
    double s = 0.0;
    for (double p : row) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw DataError(what + ": probabilities must be nonnegative");
      s += p;
    }
    if (std::abs(s - 1.0) > kProbabilityTolerance) throw DataError(what + " sum to " + std::to_string(s) + ", not 1");
  }

  static std::vector<double> cumulative(const std::vector<double>& p) {
    std::vector<double> cdf(p.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) cdf[i] = acc += p[i];
    return cdf;
  }

  static std::size_t pick(const std::vector<double>& cdf, double u) {
    const double x = u * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
    return it == cdf.end() ? cdf.size() - 1 : static_cast<std::size_t>(it - cdf.begin());
  }

  Kind kind_;
  int c_;
  std::vector<double> probs_;
  std::vector<std::vector<double>> transition_;
  std::vector<double> cdf_;
  std::vector<std::vector<double>> row_cdf_;
};

/// The urn implied exactly by an independent-letter language: alpha_r = p^r (1 - p) with p = sum p_i^2.
/// A uniform language yields the hatted urn itself.
inline UrnModel model_urn(const LanguageModel& lm) {
  if (lm.kind() == LanguageModel::Kind::uniform) return hatted_urn(lm.alphabet_size());
  const double p = lm.coincidence_rate();
  if (!(p < 1.0)) throw ModelError("degenerate language: letters always coincide");
  std::vector<double> alpha;
  double sum = 0.0;
  for (double pr = p; pr > 1e-18 && alpha.size() < 4096; pr *= p) {
    alpha.push_back(pr * (1.0 - p));
    sum += alpha.back();
  }
  return UrnModel(std::move(alpha), 1.0 - sum, lm.alphabet_size());
}

struct TrafficConfig {
  std::size_t n_pairs = 1000;
  std::size_t msg_len = 50;
  std::size_t overlap = 50;
  double fraction_right = 0.5;
  Seed seed = 1;

  /// B's first letter faces A's letter at this index.
  std::int64_t shift() const { return static_cast<std::int64_t>(msg_len - overlap); }
  double prior_odds() const { return fraction_right / (1.0 - fraction_right); }

  void validate() const {
    if (overlap < 1 || overlap > msg_len) throw DataError("overlap must satisfy 1 <= overlap <= msg_len");
    if (!(fraction_right > 0.0 && fraction_right < 1.0)) throw DataError("fraction_right must lie in (0, 1)");
    if (n_pairs < 1) throw DataError("n_pairs must be >= 1");
  }
};

struct LabeledComparison {
  bool right = false;
  std::int64_t shift = 0;
  std::vector<Symbol> plain_a, plain_b;
  std::vector<Symbol> cipher_a, cipher_b;
};

namespace detail {
inline constexpr std::uint64_t kCorpusStream = 1;
inline constexpr std::uint64_t kTrafficStream = 2;

template <class URBG>
std::vector<Symbol> key_stream(std::size_t n, int c, URBG& rng) {
  std::vector<Symbol> k(n);
  for (auto& s : k) s = static_cast<Symbol>(uniform_below(rng, static_cast<std::uint64_t>(c)));
  return k;
}

inline std::vector<Symbol> encipher(const std::vector<Symbol>& plain, const std::vector<Symbol>& key,
                                    std::size_t offset, int c) {
  std::vector<Symbol> out(plain.size());
  for (std::size_t i = 0; i < plain.size(); ++i) out[i] = static_cast<Symbol>((plain[i] + key[i + offset]) % c);
  return out;
}
}  // namespace detail

/// Pair `index` of the traffic; depends only on (seed, index), never on generation order.
inline LabeledComparison generate_pair(const LanguageModel& lm, const TrafficConfig& cfg, std::size_t index) {
  Rng rng(derive_seed(cfg.seed, detail::kTrafficStream, index));
  const int c = lm.alphabet_size();
  const auto shift = static_cast<std::size_t>(cfg.shift());
  LabeledComparison pair;
  pair.right = uniform01(rng) < cfg.fraction_right;
  pair.shift = cfg.shift();
  pair.plain_a = lm.generate(cfg.msg_len, rng);
  pair.plain_b = lm.generate(cfg.msg_len, rng);
  const std::size_t positions = cfg.msg_len + shift;
  const std::vector<Symbol> key_a = detail::key_stream(positions, c, rng);
  const std::vector<Symbol> key_b = pair.right ? key_a : detail::key_stream(positions, c, rng);
  pair.cipher_a = detail::encipher(pair.plain_a, key_a, 0, c);
  pair.cipher_b = detail::encipher(pair.plain_b, key_b, shift, c);
  return pair;
}

inline std::vector<LabeledComparison> generate_traffic(const LanguageModel& lm, const TrafficConfig& cfg) {
  cfg.validate();
  std::vector<LabeledComparison> traffic;
  traffic.reserve(cfg.n_pairs);
  for (std::size_t i = 0; i < cfg.n_pairs; ++i) traffic.push_back(generate_pair(lm, cfg, i));
  return traffic;
}

/// Decodes for the statistics corpus: `n_decodes` texts totalling `corpus_size` letters.
inline CircularCorpus generate_corpus(const LanguageModel& lm, std::size_t corpus_size, std::size_t n_decodes,
                                      Seed seed) {
  if (n_decodes < 1 || corpus_size < n_decodes) throw DataError("corpus_size must be >= n_decodes >= 1");
  Rng rng(derive_seed(seed, detail::kCorpusStream));
  std::vector<std::vector<Symbol>> texts;
  for (std::size_t d = 0; d < n_decodes; ++d) {
    const std::size_t len = corpus_size / n_decodes + (d < corpus_size % n_decodes ? 1 : 0);
    texts.push_back(lm.generate(len, rng));
  }
  return build_corpus(texts, lm.alphabet_size());
}

enum class UrnSource { corpus, model };

struct ExperimentConfig {
  LanguageModel language = LanguageModel::uniform(26);
  std::size_t corpus_size = 100000;
  std::size_t n_decodes = 50;
  int r_max = kDefaultStatsRmax;
  TrafficConfig traffic;
  double bin_width = 1.0;  // natural-log units
  UrnSource urn_source = UrnSource::corpus;
  std::optional<double> smoothing_floor;
  unsigned workers = 1;
};

struct CalibrationBin {
  double lo = 0.0;  // log-odds interval [lo, hi), natural log
  double hi = 0.0;
  std::size_t n_total = 0;
  std::size_t n_right = 0;
  double mean_posterior = 0.0;
  double empirical = 0.0;
  double std_error = 0.0;  // binomial SE at the mean predicted posterior
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<CalibrationBin> bins;
  std::size_t n_pairs = 0;
  std::size_t n_right = 0;
  double prior_log_odds = 0.0;
  double mean_log_odds_right = 0.0;
  double mean_log_odds_wrong = 0.0;
  double gap_std_error = 0.0;
  double urn_sum_alpha = 0.0;
  double urn_no_repeat = 0.0;
  int urn_r_max = 0;
};

/// Builds the urn, scores every generated pair with the true prior, and bins by predicted log-odds.
inline ExperimentReport calibration_experiment(const ExperimentConfig& cfg) {
  cfg.traffic.validate();
  if (!(cfg.bin_width > 0.0)) throw DataError("bin_width must be positive");
  const LanguageModel& lm = cfg.language;

  const UrnModel urn = [&] {
    if (cfg.urn_source == UrnSource::model) return model_urn(lm);
    const CircularCorpus corpus = generate_corpus(lm, cfg.corpus_size, cfg.n_decodes, cfg.traffic.seed);
    return urn_from_stats(compute_statistics(corpus, cfg.r_max));
  }();
  const ScoreWeights w = weights(urn, LogUnit::nat, cfg.smoothing_floor);
  const double prior = std::log(cfg.traffic.prior_odds());

  struct Scored {
    double log_odds;
    double posterior;
    bool right;
  };
  const std::size_t n = cfg.traffic.n_pairs;
  std::vector<Scored> scored(n);
  auto score_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const LabeledComparison pair = generate_pair(lm, cfg.traffic, i);
      const RepetitionFigure fig = figure_from_comparison(pair.cipher_a, pair.cipher_b, pair.shift);
      const FitScore s = odds_of_fit(w, fig, prior);
      scored[i] = {s.log_odds, s.posterior, pair.right};
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(n)));
  if (workers == 1) {
    score_range(0, n);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) {
      const std::size_t begin = n * t / workers, end = n * (t + 1) / workers;
      pool.emplace_back([&, t, begin, end] {
        try {
          score_range(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  // Aggregate in pair order so the report does not depend on the worker count.
  struct Acc {
    std::size_t n = 0, right = 0;
    double posterior_sum = 0.0;
  };
  std::map<std::int64_t, Acc> acc;
  double sum_r = 0.0, sum_w = 0.0, sq_r = 0.0, sq_w = 0.0;
  std::size_t n_right = 0;
  for (const Scored& s : scored) {
    auto& a = acc[static_cast<std::int64_t>(std::floor(s.log_odds / cfg.bin_width + 0.5))];
    ++a.n;
    a.posterior_sum += s.posterior;
    if (s.right) {
      ++a.right;
      ++n_right;
      sum_r += s.log_odds;
      sq_r += s.log_odds * s.log_odds;
    } else {
      sum_w += s.log_odds;
      sq_w += s.log_odds * s.log_odds;
    }
  }

  ExperimentReport report;
  report.config = cfg;
  report.n_pairs = n;
  report.n_right = n_right;
  report.prior_log_odds = prior;
  report.urn_sum_alpha = urn.sum_alpha();
  report.urn_no_repeat = urn.no_repeat();
  report.urn_r_max = urn.r_max();
  for (const auto& [index, a] : acc) {
    CalibrationBin b;
    b.lo = (static_cast<double>(index) - 0.5) * cfg.bin_width;
    b.hi = (static_cast<double>(index) + 0.5) * cfg.bin_width;
    b.n_total = a.n;
    b.n_right = a.right;
    b.mean_posterior = a.posterior_sum / static_cast<double>(a.n);
    b.empirical = static_cast<double>(a.right) / static_cast<double>(a.n);
    b.std_error = std::sqrt(b.mean_posterior * (1.0 - b.mean_posterior) / static_cast<double>(a.n));
    report.bins.push_back(b);
  }
  const std::size_t n_wrong = n - n_right;
  auto variance = [](double sum, double sq, std::size_t m) {
    if (m < 2) return 0.0;
    const double mean = sum / static_cast<double>(m);
    return std::max(0.0, (sq - static_cast<double>(m) * mean * mean) / static_cast<double>(m - 1));
  };
  if (n_right > 0) report.mean_log_odds_right = sum_r / static_cast<double>(n_right);
  if (n_wrong > 0) report.mean_log_odds_wrong = sum_w / static_cast<double>(n_wrong);
  if (n_right > 0 && n_wrong > 0) {
    report.gap_std_error = std::sqrt(variance(sum_r, sq_r, n_right) / static_cast<double>(n_right) +
                                     variance(sum_w, sq_w, n_wrong) / static_cast<double>(n_wrong));
  }
  return report;
}

struct BinVerdict {
  CalibrationBin bin;
  bool assessed = false;  // n_total >= min_count
  double allowed = 0.0;
  bool pass = true;
};

struct CalibrationVerdict {
  std::vector<BinVerdict> bins;
  std::size_t assessed = 0;
  bool pass = true;
};

/// Checks |empirical - mean predicted| <= max(abs_tol, n_sigma * SE) in every bin holding at least `min_count` pairs.
inline CalibrationVerdict assess_calibration(const ExperimentReport& report, std::size_t min_count = 2000,
                                             double abs_tol = 0.05, double n_sigma = 3.0) {
  CalibrationVerdict v;
  for (const auto& b : report.bins) {
    BinVerdict bv{b};
    if (b.n_total >= min_count) {
      bv.assessed = true;
      bv.allowed = std::max(abs_tol, n_sigma * b.std_error);
      bv.pass = std::abs(b.empirical - b.mean_posterior) <= bv.allowed;
      ++v.assessed;
      v.pass = v.pass && bv.pass;
    }
    v.bins.push_back(bv);
  }
  return v;
}

}  // namespace repstat
