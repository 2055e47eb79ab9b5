#pragma once

// Partial solutions of the branching scheme and their area/waste accounting.

#include <cstdint>
#include <memory>
#include <vector>

#include "glasscut/core.hpp"

namespace glasscut {

/// Content of an inserted third-level sub-plate.
enum class InsertionKind : std::uint8_t {
  OneItem,            // item fills the sub-plate
  OneItemWasteAbove,  // item at the bottom, waste above it
  OneItemWasteBelow,  // waste at the bottom, item above it
  TwoItems,           // two stacked items, no waste
  WasteOnly,          // no item at all
};

/// Whether the top of the current second-level sub-plate may still move.
enum class YFlex : std::uint8_t {
  Free,   // every third-level sub-plate has waste above: any growth is fine
  Tight,  // some content touches the top: growth must be at least min_waste
  Fixed,  // some content must keep its exact height: no growth
};

struct PlacedItem {
  ItemId id = kNoItem;
  bool rotated = false;
  Length width = 0;
  Length height = 0;

  bool empty() const { return id == kNoItem; }
};

/// One child-generating move with every coordinate it produces.
struct Insertion {
  InsertionKind kind = InsertionKind::WasteOnly;
  int depth = 0;
  PlacedItem first;   // bottom item
  PlacedItem second;  // top item (TwoItems only)
  bool new_bin = false;

  // Placed third-level sub-plate [x_left, x_right] starting at y_bottom.
  // For WasteOnly at depth 1/0 the sub-plate is the whole new first-level
  // sub-plate; at depth 2 the whole new second-level sub-plate.
  Length x_left = 0;
  Length x_right = 0;
  Length y_bottom = 0;
  Length item_y = 0;  // bottom of `first`

  // Final positions of sub-plates closed by this insertion.
  Length closed_x1 = 0;  // right edge of the previous first-level sub-plate (depth <= 1)
  Length closed_y2 = 0;  // top of the previous second-level sub-plate (depth <= 2)

  // Resulting cursor.
  int bin = 0;
  Length x1_prev = 0;
  Length x1_curr = 0;
  Length y2_prev = 0;
  Length y2_curr = 0;
  Length x3_prev = 0;
  Length x3_curr = 0;
  bool x1_tight = false;
  YFlex y2_flex = YFlex::Free;
  bool sls_waste = false;
  bool fls_waste = false;

  // Set when this insertion packs the last item; the cursor above then holds
  // the geometry after closing every open sub-plate.
  bool completes = false;

  int item_count() const { return first.empty() ? 0 : (second.empty() ? 1 : 2); }

  /// Top of the item content inside the sub-plate, or y_bottom for waste.
  Length content_top() const {
    if (first.empty()) return y_bottom;
    return item_y + first.height + (second.empty() ? 0 : second.height);
  }
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodePtr parent;
  Insertion insertion;  // meaningless on the root

  std::vector<std::uint64_t> packed;  // bitset over item ids
  int items_packed = 0;
  bool complete = false;

  Front front;  // also carries the current bin index
  Length x3_prev = 0;
  bool x1_tight = false;
  YFlex y2_flex = YFlex::Free;
  bool sls_waste = false;
  bool fls_waste = false;

  Area item_area = 0;
  Area prior_bins_area = 0;
  Area current_area = 0;

  int last_depth = -1;  // -1 on the root
  bool last_waste = false;
  bool last_two = false;

  // Symmetry keys: minimum item id of the current/previous second-level
  // sub-plate and of the last third-level sub-plate (kNoItem = none).
  ItemId sls_min = kNoItem;
  ItemId prev_sls_min = kNoItem;
  ItemId tls_min = kNoItem;

  std::uint64_t serial = 0;  // creation order, for deterministic ties

  bool is_root() const { return parent == nullptr; }
  int bin() const { return front.bin_index; }

  bool has_item(ItemId id) const {
    const auto word = static_cast<std::size_t>(id) / 64;
    return word < packed.size() && ((packed[word] >> (static_cast<unsigned>(id) % 64)) & 1U);
  }
};

/// area(S): prior bins plus the region left of the front, or the whole prefix
/// up to the last 1-cut once every item is packed.
inline Area area(const Node& node, Length plate_height) {
  const auto& f = node.front;
  if (node.complete) return node.prior_bins_area + f.x1_curr * plate_height;
  return node.prior_bins_area + f.x1_prev * plate_height + (f.x1_curr - f.x1_prev) * f.y2_prev +
         (f.x3_curr - f.x1_prev) * (f.y2_curr - f.y2_prev);
}

inline Area waste(const Node& node) { return node.current_area - node.item_area; }

inline Area waste(const Node& node, Length plate_height) {
  return area(node, plate_height) - node.item_area;
}

/// Pseudo-dominance: same items, same bin, and a front that is nowhere to the right.
inline bool dominates(const Node& a, const Node& b) {
  if (a.items_packed != b.items_packed || a.packed != b.packed) return false;
  if (a.front.bin_index != b.front.bin_index) return false;
  return front_leq(a.front, b.front);
}

}  // namespace glasscut
