#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "press/errors.hpp"
#include "press/trajectory.hpp"

namespace press {

struct BtcConfig {
  double tsnd = 0.0;  // network-distance tolerance at any shared time
  double nstd = 0.0;  // time tolerance at any shared network distance
};

// Slope as a rational num/den with den > 0; den == 0 encodes +/-inf by the
// sign of num. Comparisons cross-multiply, so membership tests are exact.
struct Slope {
  double num = 0.0;
  double den = 0.0;

  static Slope finite(double num, double den) { return {den < 0 ? -num : num, std::abs(den)}; }
  static Slope pos_inf() { return {1.0, 0.0}; }
  static Slope neg_inf() { return {-1.0, 0.0}; }
};

inline bool slope_less(const Slope& a, const Slope& b) {
  if (a.den == 0.0 || b.den == 0.0) {
    if (a.den == 0.0 && b.den == 0.0) return a.num < b.num;
    return a.den == 0.0 ? a.num < 0.0 : b.num > 0.0;
  }
  return a.num * b.den < b.num * a.den;
}

// Closed interval of slopes through an anchor point.
struct AngularRange {
  Slope lo = Slope::neg_inf();
  Slope hi = Slope::pos_inf();

  bool empty() const { return slope_less(hi, lo); }

  bool contains(const Slope& s) const { return !slope_less(s, lo) && !slope_less(hi, s); }
};

inline AngularRange intersect(const AngularRange& a, const AngularRange& b) {
  AngularRange r = a;
  if (slope_less(r.lo, b.lo)) r.lo = b.lo;
  if (slope_less(b.hi, r.hi)) r.hi = b.hi;
  return r;
}

// Slopes through `anchor` whose line stays within both error bounds at `p`:
// distance offset +/-tsnd at time p.t, and time offset +/-nstd at distance
// p.d. The time bound degenerates to an unbounded top when the elapsed time
// does not exceed nstd.
inline AngularRange angular_range(const TemporalTuple& anchor, const TemporalTuple& p,
                                  const BtcConfig& cfg) {
  const double elapsed = p.t - anchor.t;
  const double gained = p.d - anchor.d;
  AngularRange dist_band{Slope::finite(gained - cfg.tsnd, elapsed),
                         Slope::finite(gained + cfg.tsnd, elapsed)};
  AngularRange time_band{Slope::finite(gained, elapsed + cfg.nstd),
                         elapsed <= cfg.nstd ? Slope::pos_inf()
                                             : Slope::finite(gained, elapsed - cfg.nstd)};
  return intersect(dist_band, time_band);
}

inline Slope direct_slope(const TemporalTuple& anchor, const TemporalTuple& p) {
  return Slope::finite(p.d - anchor.d, p.t - anchor.t);
}

// Drops tuples whose removal keeps every reading reconstructible within the
// bounds: a window of candidate slopes from the last kept tuple shrinks as
// points are skipped, and the point before the first violation is kept. The
// opening window from a fresh anchor always admits its first point, so the
// running range never starts empty.
inline TemporalSequence btc_compress(const TemporalSequence& seq, const BtcConfig& cfg) {
  if (seq.empty()) throw DataError("btc_compress on empty sequence");
  if (cfg.tsnd < 0.0 || cfg.nstd < 0.0) throw DataError("btc_compress: negative bound");
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (!(seq[i].t > seq[i - 1].t)) throw DataError("btc_compress: time must strictly increase");
    if (seq[i].d < seq[i - 1].d) throw DataError("btc_compress: distance must not decrease");
  }
  if (seq.size() <= 2) return seq;
  TemporalSequence out;
  out.push_back(seq.front());
  std::size_t anchor = 0;
  AngularRange window = angular_range(seq[anchor], seq[1], cfg);
  std::size_t i = 2;
  while (i < seq.size()) {
    const AngularRange next = intersect(window, angular_range(seq[anchor], seq[i], cfg));
    if (next.empty() || !next.contains(direct_slope(seq[anchor], seq[i]))) {
      out.push_back(seq[i - 1]);
      anchor = i - 1;
      window = angular_range(seq[anchor], seq[i], cfg);
    } else {
      window = next;
    }
    ++i;
  }
  out.push_back(seq.back());
  return out;
}

}  // namespace press
