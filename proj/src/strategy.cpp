#include "odf/strategy.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>
#include <vector>

namespace odf {
namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

void check_probability(double v, std::string_view what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " threshold must lie in [0, 1]");
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw std::invalid_argument("not a finite number: '" + std::string(text) + "'");
  }
  return value;
}

FilterPolicy FilterPolicy::make(double low, double high, bool low_inclusive, bool high_inclusive) {
  check_probability(low, "low");
  check_probability(high, "high");
  if (low > high) throw std::invalid_argument("filter: low threshold exceeds high threshold");
  return {low, high, low_inclusive, high_inclusive};
}

std::string FilterPolicy::describe() const {
  return std::string(low_inclusive ? "[" : "(") + format_double(t_low) + ", " +
         format_double(t_high) + (high_inclusive ? "]" : ")");
}

StrategyKind parse_strategy(std::string_view spec) {
  const auto parts = split(spec, ':');
  const std::string_view name = parts.front();
  auto expect = [&](std::size_t n) {
    if (parts.size() != n + 1) {
      throw std::invalid_argument("strategy '" + std::string(spec) + "': expected " +
                                  std::to_string(n) + " parameter(s)");
    }
  };
  if (name == "plain") {
    expect(0);
    return strategy::Plain{};
  }
  if (name == "balanced") {
    expect(2);
    const double lo = parse_double(parts[1]), hi = parse_double(parts[2]);
    FilterPolicy::make(lo, hi, false, false);
    return strategy::Balanced{lo, hi};
  }
  if (name == "skewed") {
    expect(2);
    const double lo = parse_double(parts[1]), hi = parse_double(parts[2]);
    FilterPolicy::make(lo, hi, false, false);
    if ((lo == 0.0) == (hi == 1.0)) {
      throw std::invalid_argument("strategy '" + std::string(spec) +
                                  "': skewed needs exactly one nontrivial bound");
    }
    return strategy::Skewed{lo, hi};
  }
  if (name == "curate") {
    expect(3);
    const double lo = parse_double(parts[1]), hi = parse_double(parts[2]);
    FilterPolicy::make(lo, hi, false, false);
    return strategy::OfflineCuration{lo, hi, parse_double(parts[3])};
  }
  if (name == "schedule") {
    expect(1);
    return strategy::OfflineSchedule{parse_double(parts[1])};
  }
  throw std::invalid_argument("unknown strategy '" + std::string(spec) + "'");
}

std::string format_strategy(const StrategyKind& kind) {
  struct Formatter {
    std::string operator()(const strategy::Plain&) const { return "plain"; }
    std::string operator()(const strategy::Balanced& s) const {
      return "balanced:" + format_double(s.low) + ":" + format_double(s.high);
    }
    std::string operator()(const strategy::Skewed& s) const {
      return "skewed:" + format_double(s.low) + ":" + format_double(s.high);
    }
    std::string operator()(const strategy::OfflineCuration& s) const {
      return "curate:" + format_double(s.low) + ":" + format_double(s.high) + ":" +
             format_double(s.proxy_ability);
    }
    std::string operator()(const strategy::OfflineSchedule& s) const {
      return "schedule:" + format_double(s.proxy_ability);
    }
  };
  return std::visit(Formatter{}, kind);
}

FilterPolicy online_filter(const StrategyKind& kind) {
  if (const auto* b = std::get_if<strategy::Balanced>(&kind)) {
    return FilterPolicy::make(b->low, b->high, false, false);
  }
  if (const auto* s = std::get_if<strategy::Skewed>(&kind)) {
    return FilterPolicy::make(s->low, s->high, s->low == 0.0, s->high == 1.0);
  }
  return FilterPolicy::plain();
}

FilterPolicy curation_filter(const strategy::OfflineCuration& kind) {
  return FilterPolicy::make(kind.low, kind.high, kind.low == 0.0, kind.high == 1.0);
}

}  // namespace odf
