#pragma once

// Node ordering keys for the searches. Values are exact fractions compared by
// cross-multiplication in 128-bit arithmetic.

#include <compare>
#include <string>

#include "glasscut/core.hpp"
#include "glasscut/node.hpp"

namespace glasscut {

enum class GuideKind {
  Waste,                            // "w"
  WastePercentage,                  // "p"
  WastePercentageOverMeanItemArea,  // "a"
};

inline const char* guide_name(GuideKind g) {
  switch (g) {
    case GuideKind::Waste: return "w";
    case GuideKind::WastePercentage: return "p";
    case GuideKind::WastePercentageOverMeanItemArea: return "a";
  }
  return "?";
}

inline GuideKind parse_guide(const std::string& s) {
  if (s == "w") return GuideKind::Waste;
  if (s == "p") return GuideKind::WastePercentage;
  if (s == "a") return GuideKind::WastePercentageOverMeanItemArea;
  throw Error(ErrorCode::InvalidParams, "unknown guide '" + s + "'");
}

/// Non-negative fraction num/den with den > 0.
struct Ratio {
  __int128 num = 0;
  __int128 den = 1;

  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
    const __int128 l = a.num * b.den;
    const __int128 r = b.num * a.den;
    if (l < r) return std::strong_ordering::less;
    if (l > r) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  friend bool operator==(const Ratio& a, const Ratio& b) { return (a <=> b) == 0; }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline Ratio guide_value(Area w, Area a, Area item_area, int items, GuideKind kind) {
  switch (kind) {
    case GuideKind::Waste:
      return {w, 1};
    case GuideKind::WastePercentage:
      if (a == 0) return {0, 1};
      return {w, a};
    case GuideKind::WastePercentageOverMeanItemArea:
      // (w / a) / (item_area / items) = w * items / (a * item_area)
      if (a == 0 || items == 0 || item_area == 0) return {0, 1};
      return {static_cast<__int128>(w) * items, static_cast<__int128>(a) * item_area};
  }
  return {0, 1};
}

inline Ratio guide_value(const Node& node, GuideKind kind) {
  return guide_value(waste(node), node.current_area, node.item_area, node.items_packed, kind);
}

}  // namespace glasscut
