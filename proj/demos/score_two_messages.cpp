// Slides one short message against another and scores every alignment with
// at least 12 overlapping letters. The right alignment should stand out.

#include <cmath>
#include <cstdio>
#include <string>

#include "repstat/repstat.hpp"

int main() {
  using namespace repstat;

  const Normalizer norm{NormalizationPolicy{}};
  const auto a = norm.sequence("ATTACKATDAWNONTHEEASTERNRIDGE");
  const auto b = norm.sequence("HOLDTHEEASTERNRIDGEUNTILDAWN");

  // A made-up language urn: repeats a little more common than hatted material.
  const UrnModel urn({0.045, 0.012, 0.004, 0.0015, 0.0006}, 1.0 - 0.0631, 26);
  const auto w = weights(urn, LogUnit::deciban, 1e-9);  // floor for repeats longer than 5
  const double prior = 10.0 * std::log10(1.0 / 40.0);   // one alignment in ~40 is right

  const auto la = static_cast<long long>(a.size()), lb = static_cast<long long>(b.size());
  for (long long shift = -(lb - 12); shift <= la - 12; ++shift) {
    const auto fig = figure_from_comparison(a, b, shift);
    const auto s = odds_of_fit(w, fig, prior);
    std::printf("%+4lld  %-29s  %+8.1f db  p=%.4f\n", shift, fig.str().c_str(), s.log_odds, s.posterior);
  }
}
