#pragma once

// Domain types for the glass cutting problem: parameters, items, defects,
// instances and the step-function front of a partial solution.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace glasscut {

using Length = std::int64_t;
using Area = std::int64_t;
using ItemId = std::int32_t;
using ChainId = std::int32_t;

inline constexpr ItemId kNoItem = -1;

enum class ErrorCode {
  Parse,
  NoncontiguousIds,
  DuplicateSequence,
  OutOfPlate,
  DefectOverlap,
  Io,
  OrphanNode,
  DuplicateId,
  Incomplete,
  BinMismatch,
  ChainCount,
  Memory,
  Infeasible,
  NoItems,
  InvalidParams,
  Internal,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return "PARSE";
    case ErrorCode::NoncontiguousIds: return "NONCONTIGUOUS_IDS";
    case ErrorCode::DuplicateSequence: return "DUPLICATE_SEQUENCE";
    case ErrorCode::OutOfPlate: return "OUT_OF_PLATE";
    case ErrorCode::DefectOverlap: return "DEFECT_OVERLAP";
    case ErrorCode::Io: return "IO";
    case ErrorCode::OrphanNode: return "ORPHAN_NODE";
    case ErrorCode::DuplicateId: return "DUPLICATE_ID";
    case ErrorCode::Incomplete: return "INCOMPLETE";
    case ErrorCode::BinMismatch: return "BIN_MISMATCH";
    case ErrorCode::ChainCount: return "CHAIN_COUNT";
    case ErrorCode::Memory: return "MEMORY";
    case ErrorCode::Infeasible: return "INFEASIBLE";
    case ErrorCode::NoItems: return "NO_ITEMS";
    case ErrorCode::InvalidParams: return "INVALID_PARAMS";
    case ErrorCode::Internal: return "INTERNAL";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct Params {
  Length plate_width = 6000;
  Length plate_height = 3210;
  int plate_count = 100;
  Length min1 = 100;
  Length max1 = 3500;
  Length min2 = 100;
  Length min_waste = 20;

  void check() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidParams, msg); };
    if (plate_width <= 0 || plate_height <= 0) fail("plate dimensions must be positive");
    if (plate_count <= 0) fail("plate count must be positive");
    if (min1 <= 0 || min1 > max1 || max1 > plate_width) fail("need 0 < min1 <= max1 <= W");
    if (min2 <= 0 || min2 > plate_height) fail("need 0 < min2 <= H");
    if (min_waste <= 0 || min_waste > std::min(min1, min2))
      fail("need 0 < min_waste <= min(min1, min2)");
  }

  Area plate_area() const { return plate_width * plate_height; }
};

/// Axis-aligned rectangle with integer millimeter coordinates.
struct Rect {
  Length x = 0;
  Length y = 0;
  Length width = 0;
  Length height = 0;

  Length right() const { return x + width; }
  Length top() const { return y + height; }
  Area area() const { return width * height; }

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// True iff the open interiors of `a` and `b` intersect. Touching is fine.
inline bool interiors_overlap(const Rect& a, const Rect& b) {
  return a.x < b.right() && b.x < a.right() && a.y < b.top() && b.y < a.top();
}

struct Item {
  ItemId id = 0;
  Length width = 0;
  Length height = 0;
  ChainId chain_id = 0;
  int chain_rank = 0;
  int sequence = 0;  // raw SEQUENCE value from the batch file

  Area area() const { return width * height; }
};

struct Defect {
  int plate_index = 0;
  Length x = 0;
  Length y = 0;
  Length width = 0;
  Length height = 0;

  Rect rect() const { return {x, y, width, height}; }
  Length right() const { return x + width; }
  Length top() const { return y + height; }
};

// Cut/defect predicates. A cut crosses a defect when its open segment meets
// the defect's open interior.

/// Vertical cut at `x` spanning (y0, y1).
inline bool vertical_cut_crosses(std::span<const Defect> defects, Length x, Length y0, Length y1) {
  for (const auto& d : defects)
    if (d.x < x && x < d.right() && d.y < y1 && d.top() > y0) return true;
  return false;
}

/// Horizontal cut at `y` spanning (x0, x1).
inline bool horizontal_cut_crosses(std::span<const Defect> defects, Length y, Length x0, Length x1) {
  for (const auto& d : defects)
    if (d.y < y && y < d.top() && d.x < x1 && d.right() > x0) return true;
  return false;
}

inline bool rect_hits_defect(std::span<const Defect> defects, const Rect& r) {
  for (const auto& d : defects)
    if (interiors_overlap(d.rect(), r)) return true;
  return false;
}

class Instance {
 public:
  Instance() = default;

  /// Builds chains from (chain_id, sequence) and validates everything.
  /// `defects` may hold any plate index in [0, plate_count).
  Instance(Params params, std::vector<Item> items, std::vector<Defect> defects)
      : params_(params), items_(std::move(items)) {
    params_.check();
    for (std::size_t i = 0; i < items_.size(); ++i) {
      if (items_[i].id != static_cast<ItemId>(i))
        throw Error(ErrorCode::NoncontiguousIds, "item ids must be 0..N-1 in order");
      const auto& it = items_[i];
      const Length w = it.width, h = it.height;
      if (w < params_.min_waste || h < params_.min_waste)
        throw Error(ErrorCode::InvalidParams,
                    "item " + std::to_string(i) + " is smaller than the minimum waste size");
      const bool fits = (w <= params_.plate_width && h <= params_.plate_height) ||
                        (h <= params_.plate_width && w <= params_.plate_height);
      if (!fits)
        throw Error(ErrorCode::InvalidParams, "item " + std::to_string(i) + " does not fit in a plate");
    }
    build_chains();
    defects_.assign(static_cast<std::size_t>(params_.plate_count), {});
    for (const auto& d : defects) {
      if (d.plate_index < 0 || d.plate_index >= params_.plate_count || d.x < 0 || d.y < 0 ||
          d.width <= 0 || d.height <= 0 || d.right() > params_.plate_width ||
          d.top() > params_.plate_height)
        throw Error(ErrorCode::OutOfPlate, "defect outside of plate " + std::to_string(d.plate_index));
      defects_[static_cast<std::size_t>(d.plate_index)].push_back(d);
    }
    for (auto& plate : defects_)
      std::sort(plate.begin(), plate.end(), [](const Defect& a, const Defect& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
      });
    if (items_.size() >= 700)
      std::cerr << "warning: instance has " << items_.size() << " items (expected < 700)\n";
  }

  const Params& params() const { return params_; }
  const std::vector<Item>& items() const { return items_; }
  const Item& item(ItemId id) const { return items_[static_cast<std::size_t>(id)]; }
  std::size_t item_count() const { return items_.size(); }
  const std::vector<std::vector<ItemId>>& chains() const { return chains_; }
  std::size_t chain_count() const { return chains_.size(); }

  std::span<const Defect> defects(int plate) const {
    if (plate < 0 || plate >= static_cast<int>(defects_.size())) return {};
    return defects_[static_cast<std::size_t>(plate)];
  }

  Area total_item_area() const {
    return std::accumulate(items_.begin(), items_.end(), Area{0},
                           [](Area acc, const Item& it) { return acc + it.area(); });
  }

 private:
  void build_chains() {
    std::vector<ChainId> raw_ids;
    for (const auto& it : items_) raw_ids.push_back(it.chain_id);
    std::sort(raw_ids.begin(), raw_ids.end());
    raw_ids.erase(std::unique(raw_ids.begin(), raw_ids.end()), raw_ids.end());
    chains_.assign(raw_ids.size(), {});
    for (auto& it : items_) {
      auto pos = std::lower_bound(raw_ids.begin(), raw_ids.end(), it.chain_id) - raw_ids.begin();
      it.chain_id = static_cast<ChainId>(pos);
      chains_[static_cast<std::size_t>(pos)].push_back(it.id);
    }
    for (auto& chain : chains_) {
      std::sort(chain.begin(), chain.end(), [this](ItemId a, ItemId b) {
        return item(a).sequence < item(b).sequence;
      });
      for (std::size_t r = 0; r < chain.size(); ++r) {
        if (r > 0 && item(chain[r]).sequence == item(chain[r - 1]).sequence)
          throw Error(ErrorCode::DuplicateSequence,
                      "duplicate sequence " + std::to_string(item(chain[r]).sequence) + " in a stack");
        items_[static_cast<std::size_t>(chain[r])].chain_rank = static_cast<int>(r);
      }
    }
  }

  Params params_;
  std::vector<Item> items_;
  std::vector<std::vector<ItemId>> chains_;
  std::vector<std::vector<Defect>> defects_;
};

/// Boundary between the committed and the free region of the last bin:
///   X(y) = x1_curr on [0, y2_prev), x3_curr on [y2_prev, y2_curr), x1_prev on [y2_curr, H].
struct Front {
  int bin_index = -1;
  Length x1_prev = 0;
  Length x1_curr = 0;
  Length x3_curr = 0;
  Length y2_prev = 0;
  Length y2_curr = 0;

  Length at(Length y) const {
    if (y < y2_prev) return x1_curr;
    if (y < y2_curr) return x3_curr;
    return x1_prev;
  }

  friend bool operator==(const Front&, const Front&) = default;
};

/// Pointwise X1(y) <= X2(y) over [0, H]. Both fronts must be in the same bin.
inline bool front_leq(const Front& f1, const Front& f2) {
  if (f1.bin_index != f2.bin_index)
    throw Error(ErrorCode::BinMismatch, "fronts belong to different bins");
  // X is right-continuous and piecewise constant, so checking every breakpoint
  // of either function (plus 0) covers all of [0, H].
  const Length points[] = {0, f1.y2_prev, f1.y2_curr, f2.y2_prev, f2.y2_curr};
  for (Length y : points)
    if (f1.at(y) > f2.at(y)) return false;
  return true;
}

}  // namespace glasscut
