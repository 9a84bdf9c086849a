#pragma once

#include <string>
#include <string_view>
#include <variant>

namespace odf {

/// Closed/open interval test on an empirical pass rate.
struct FilterPolicy {
  double t_low = 0.0;
  double t_high = 1.0;
  bool low_inclusive = true;
  bool high_inclusive = true;

  /// Validates 0 <= low <= high <= 1.
  static FilterPolicy make(double low, double high, bool low_inclusive, bool high_inclusive);
  /// [0, 1]: accepts everything.
  static FilterPolicy plain() { return {}; }

  bool accept(double pass_rate) const noexcept {
    const bool above = low_inclusive ? pass_rate >= t_low : pass_rate > t_low;
    const bool below = high_inclusive ? pass_rate <= t_high : pass_rate < t_high;
    return above && below;
  }

  /// Interval notation, e.g. "(0.3, 0.7)" or "[0, 0.6)".
  std::string describe() const;

  bool operator==(const FilterPolicy&) const = default;
};

namespace strategy {

struct Plain {
  bool operator==(const Plain&) const = default;
};
/// Both thresholds strict.
struct Balanced {
  double low;
  double high;
  bool operator==(const Balanced&) const = default;
};
/// Exactly one nontrivial bound; the trivial bound (0 or 1) is inclusive.
struct Skewed {
  double low;
  double high;
  bool operator==(const Skewed&) const = default;
};
/// Filter once before training with a fixed proxy policy, then train plain.
struct OfflineCuration {
  double low;
  double high;
  double proxy_ability;
  bool operator==(const OfflineCuration&) const = default;
};
/// Order the pool easy to hard under a proxy policy and consume it in order.
struct OfflineSchedule {
  double proxy_ability;
  bool operator==(const OfflineSchedule&) const = default;
};

}  // namespace strategy

using StrategyKind = std::variant<strategy::Plain, strategy::Balanced, strategy::Skewed,
                                  strategy::OfflineCuration, strategy::OfflineSchedule>;

/// Grammar: plain | balanced:<low>:<high> | skewed:<low>:<high> |
/// curate:<low>:<high>:<proxy-ability> | schedule:<proxy-ability>.
/// Throws std::invalid_argument on malformed specs or invalid thresholds.
StrategyKind parse_strategy(std::string_view spec);

/// Inverse of parse_strategy; numbers use the shortest round-trip form.
std::string format_strategy(const StrategyKind& kind);

/// Online filter a strategy trains with. Offline strategies train plain.
FilterPolicy online_filter(const StrategyKind& kind);

/// Filter an offline curation strategy applies once before training. Interior
/// thresholds are strict; a bound at 0 or 1 is inclusive.
FilterPolicy curation_filter(const strategy::OfflineCuration& kind);

/// Shortest decimal that parses back to the same double; locale independent.
std::string format_double(double value);
/// Locale-independent strict parse of a whole string.
double parse_double(std::string_view text);

}  // namespace odf
