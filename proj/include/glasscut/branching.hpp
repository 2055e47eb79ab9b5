#pragma once

// Item-based branching scheme: each move packs the next third-level sub-plate
// (one item, one item with waste above or below, two stacked items, or a
// waste-only sub-plate covering a defect) at depth 0 (new bin), 1 (new
// first-level sub-plate), 2 (new second-level sub-plate) or 3 (current
// second-level sub-plate).
//
// Geometry is tracked on a cursor describing the last bin. The right edge of
// the current first-level sub-plate (x1_curr) and the top of the current
// second-level sub-plate (y2_curr) stay movable until their sub-plate is
// closed; `x1_tight` and `y2_flex` record how far they may still move without
// creating a waste strip thinner than min_waste.

#include <algorithm>
#include <atomic>
#include <map>
#include <optional>
#include <vector>

#include "glasscut/core.hpp"
#include "glasscut/node.hpp"

namespace glasscut {

struct BranchingOptions {
  bool symmetry = true;
  bool dominance = true;
};

class BranchingScheme {
 public:
  explicit BranchingScheme(const Instance& instance, BranchingOptions options = {})
      : inst_(instance), opts_(options), words_((instance.item_count() + 63) / 64) {
    if (instance.item_count() == 0) throw Error(ErrorCode::NoItems, "instance has no items");
  }

  const Instance& instance() const { return inst_; }
  const BranchingOptions& options() const { return opts_; }

  NodePtr root() const {
    auto node = std::make_shared<Node>();
    node->packed.assign(words_, 0);
    node->serial = serial_.fetch_add(1, std::memory_order_relaxed);
    return node;
  }

  /// Next unconsumed item of every chain, sorted by id.
  std::vector<ItemId> candidate_items(const Node& node) const {
    std::vector<ItemId> out;
    for (const auto& chain : inst_.chains())
      for (ItemId id : chain)
        if (!node.has_item(id)) {
          out.push_back(id);
          break;
        }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Feasible insertions after the depth-restriction and new-sub-plate pruning
  /// rules, in deterministic order: item id, depth descending, configuration,
  /// orientation; waste-only insertions last.
  std::vector<Insertion> enumerate_insertions(const NodePtr& node_ptr) const {
    const Node& node = *node_ptr;
    std::vector<Insertion> result;
    if (node.complete) return result;

    const auto candidates = candidate_items(node);
    if (candidates.empty()) return result;

    bool allowed[4] = {false, false, false, false};
    if (node.is_root()) {
      allowed[0] = true;
    } else if (node.last_waste) {
      allowed[node.last_depth == 0 ? 1 : node.last_depth] = true;
    } else if (node.last_two && node.last_depth != 3) {
      allowed[3] = true;
    } else {
      allowed[0] = allowed[1] = allowed[2] = allowed[3] = true;
    }
    if (node.fls_waste) allowed[2] = allowed[3] = false;
    if (node.sls_waste) allowed[3] = false;
    if (node.bin() + 1 >= inst_.params().plate_count) allowed[0] = false;

    const Cursor here = cursor_of(node);
    std::optional<Cursor> closed[3];  // closing state for depths 0, 1, 2
    std::optional<Cursor> base[4];
    if (allowed[3]) base[3] = here;
    if (allowed[2] && (closed[2] = close(node, here, 2))) {
      Cursor c = *closed[2];
      c.y2_prev = c.y2_curr;
      c.x3_prev = c.x3_curr = c.x1_prev;
      c.y2_flex = YFlex::Free;
      c.sls_waste = false;
      base[2] = c;
    }
    if (allowed[1] && (closed[1] = close(node, here, 1))) {
      Cursor c = *closed[1];
      c.x1_prev = c.x1_curr;
      c.y2_prev = c.y2_curr = 0;
      c.x3_prev = c.x3_curr = c.x1_prev;
      c.x1_tight = false;
      c.y2_flex = YFlex::Free;
      c.sls_waste = c.fls_waste = false;
      base[1] = c;
    }
    if (allowed[0] && (node.is_root() || (closed[0] = close(node, here, 0)))) {
      Cursor c;
      c.bin = node.bin() + 1;
      base[0] = c;
    }

    std::vector<std::vector<PlacedItem>> orientations(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      orientations[i] = orientations_of(candidates[i]);
    }

    std::vector<std::vector<Insertion>> per_item(candidates.size());
    bool item_fits_current_bin = false;

    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
      const ItemId j = candidates[ci];
      auto partners = partners_of(node, j, candidates);
      bool no_y2_growth = false;
      bool no_x1_growth = false;
      for (int d = 3; d >= 1; --d) {
        if (!base[d]) continue;
        if (d == 1 && no_x1_growth) continue;
        // Depth-2 insertions made useless by a depth-3 one still tell
        // whether the first-level sub-plate can take the item as is.
        const bool suppressed = d == 2 && no_y2_growth;
        const Cursor& groups = d == 2 ? *closed[2] : here;
        std::vector<Insertion> found;
        add_item_insertions(node_ptr, d, *base[d], groups, closed_for(closed, d), orientations[ci],
                            partners, found);
        if (!found.empty()) item_fits_current_bin = true;
        for (const auto& ins : found) {
          if (ins.first.id != j) continue;
          if (d == 3 && ins.y2_curr == here.y2_curr) no_y2_growth = true;
          if (d >= 2 && ins.x1_curr == here.x1_curr) no_x1_growth = true;
        }
        if (!suppressed)
          for (auto& ins : found) per_item[ci].push_back(std::move(ins));
      }
    }
    if (base[0] && !item_fits_current_bin) {
      for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        auto partners = partners_of(node, candidates[ci], candidates);
        add_item_insertions(node_ptr, 0, *base[0], here, closed_for(closed, 0), orientations[ci],
                            partners, per_item[ci]);
      }
    }
    for (auto& bucket : per_item)
      for (auto& ins : bucket) result.push_back(std::move(ins));

    for (int d = 3; d >= 0; --d) {
      if (!base[d]) continue;
      if (d == 0 && item_fits_current_bin) continue;
      const Cursor& groups = d == 2 ? *closed[2] : here;
      if (auto ins = try_waste(node, d, *base[d], groups, closed_for(closed, d)))
        result.push_back(*ins);
    }
    return result;
  }

  /// Builds the child node for an insertion produced by enumerate_insertions.
  NodePtr apply_insertion(const NodePtr& parent, const Insertion& ins) const {
    auto child = std::make_shared<Node>();
    fill_child(*child, parent, ins);
    return child;
  }

  /// False when the insertion creates a k-level sub-plate (k = 2, 3) whose
  /// smallest item id is below its previous sibling's, while both are
  /// defect-free and swapping them keeps every chain in order.
  bool symmetry_allows(const Node& node, const Insertion& ins) const {
    if (node.is_root()) return true;
    // k = 3: the new third-level sub-plate against the previous one.
    if (ins.depth == 3 && ins.kind != InsertionKind::WasteOnly && node.tls_min != kNoItem &&
        node.insertion.kind != InsertionKind::WasteOnly) {
      const ItemId new_min = min_item(ins);
      if (new_min < node.tls_min) {
        const auto defects = inst_.defects(ins.bin);
        const Length ys = ins.y2_prev;
        const Rect prev{node.insertion.x_left, ys, node.insertion.x_right - node.insertion.x_left,
                        ins.y2_curr - ys};
        const Rect next{ins.x_left, ys, ins.x_right - ins.x_left, ins.y2_curr - ys};
        std::vector<ItemId> a = items_of(node.insertion), b = items_of(ins);
        if (!rect_hits_defect(defects, prev) && !rect_hits_defect(defects, next) &&
            !share_chain(a, b))
          return false;
      }
    }
    // k = 2: checked once a second-level sub-plate is closed, against the one below it.
    if (ins.depth <= 2 && !node.sls_waste && !node.fls_waste) {
      const Length x1_end = ins.depth == 2 ? ins.x1_curr : ins.closed_x1;
      if (!sls_pair_allowed(node, {}, node.sls_min, node.prev_sls_min, /*include_current=*/true,
                            ins.closed_y2, x1_end))
        return false;
    }
    if (ins.completes && ins.kind != InsertionKind::WasteOnly) {
      const auto new_items = items_of(ins);
      if (ins.depth == 3) {
        const ItemId m = std::min(node.sls_min == kNoItem ? min_item(ins) : node.sls_min,
                                  min_item(ins));
        if (!sls_pair_allowed(node, new_items, m, node.prev_sls_min, true, ins.y2_curr,
                              ins.x1_curr))
          return false;
      } else if (ins.depth == 2 && !node.sls_waste) {
        if (!final_sls_over_closed(node, ins, new_items)) return false;
      }
    }
    return true;
  }

  /// Drops every child dominated by a sibling with the same items and bin;
  /// the earliest child wins ties. Complete children are never filtered.
  static std::vector<NodePtr> filter_dominated_children(std::vector<NodePtr> children) {
    const std::size_t n = children.size();
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n; ++i)
      if (!children[i]->complete) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& na = *children[a];
      const auto& nb = *children[b];
      if (na.front.bin_index != nb.front.bin_index) return na.front.bin_index < nb.front.bin_index;
      return na.packed < nb.packed;
    });
    std::vector<bool> removed(n, false);
    for (std::size_t lo = 0; lo < order.size();) {
      std::size_t hi = lo + 1;
      while (hi < order.size() &&
             children[order[hi]]->front.bin_index == children[order[lo]]->front.bin_index &&
             children[order[hi]]->packed == children[order[lo]]->packed)
        ++hi;
      for (std::size_t a = lo; a < hi; ++a) {
        const std::size_t i = order[a];
        for (std::size_t b = lo; b < hi && !removed[i]; ++b) {
          const std::size_t k = order[b];
          if (k == i || removed[k]) continue;
          const bool k_dom_i = front_leq(children[k]->front, children[i]->front);
          if (!k_dom_i) continue;
          const bool i_dom_k = front_leq(children[i]->front, children[k]->front);
          if (!i_dom_k || k < i) removed[i] = true;
        }
      }
      lo = hi;
    }
    std::vector<NodePtr> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      if (!removed[i]) out.push_back(std::move(children[i]));
    return out;
  }

  std::vector<NodePtr> children(const NodePtr& node) const {
    std::vector<NodePtr> out;
    for (const auto& ins : enumerate_insertions(node)) {
      if (opts_.symmetry && !symmetry_allows(*node, ins)) continue;
      out.push_back(apply_insertion(node, ins));
    }
    if (opts_.dominance) out = filter_dominated_children(std::move(out));
    return out;
  }

 private:
  struct Cursor {
    int bin = -1;
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
  };

  struct SlsInfo {
    Length bottom = 0;
    Length top = 0;
    Length end = 0;
    bool waste = false;
  };

  static Cursor cursor_of(const Node& n) {
    Cursor c;
    c.bin = n.front.bin_index;
    c.x1_prev = n.front.x1_prev;
    c.x1_curr = n.front.x1_curr;
    c.y2_prev = n.front.y2_prev;
    c.y2_curr = n.front.y2_curr;
    c.x3_prev = n.x3_prev;
    c.x3_curr = n.front.x3_curr;
    c.x1_tight = n.x1_tight;
    c.y2_flex = n.y2_flex;
    c.sls_waste = n.sls_waste;
    c.fls_waste = n.fls_waste;
    return c;
  }

  static const Cursor* closed_for(const std::optional<Cursor> (&closed)[3], int d) {
    if (d > 2 || !closed[d]) return nullptr;
    return &*closed[d];
  }

  static bool same_fls(const Node& n, int bin, Length x1_prev) {
    return !n.is_root() && n.front.bin_index == bin && n.front.x1_prev == x1_prev;
  }

  static ItemId min_item(const Insertion& ins) {
    if (ins.first.empty()) return kNoItem;
    if (ins.second.empty()) return ins.first.id;
    return std::min(ins.first.id, ins.second.id);
  }

  static std::vector<ItemId> items_of(const Insertion& ins) {
    std::vector<ItemId> out;
    if (!ins.first.empty()) out.push_back(ins.first.id);
    if (!ins.second.empty()) out.push_back(ins.second.id);
    return out;
  }

  bool share_chain(const std::vector<ItemId>& a, const std::vector<ItemId>& b) const {
    for (ItemId x : a)
      for (ItemId y : b)
        if (inst_.item(x).chain_id == inst_.item(y).chain_id) return true;
    return false;
  }

  std::vector<PlacedItem> orientations_of(ItemId id) const {
    const auto& it = inst_.item(id);
    std::vector<PlacedItem> out;
    out.push_back({id, false, it.width, it.height});
    if (it.width != it.height) out.push_back({id, true, it.height, it.width});
    return out;
  }

  /// Items that may sit on top of `j` in a two-item sub-plate: other chain
  /// heads and the successor of `j` in its own chain.
  std::vector<ItemId> partners_of(const Node&, ItemId j, const std::vector<ItemId>& candidates) const {
    std::vector<ItemId> out;
    for (ItemId k : candidates)
      if (k != j) out.push_back(k);
    const auto& item = inst_.item(j);
    const auto& chain = inst_.chains()[static_cast<std::size_t>(item.chain_id)];
    const auto next_rank = static_cast<std::size_t>(item.chain_rank) + 1;
    if (next_rank < chain.size()) out.push_back(chain[next_rank]);
    std::sort(out.begin(), out.end());
    return out;
  }

  // Second-level sub-plates of node's first-level sub-plate, newest first.
  // The newest takes its top/end from `cur`.
  std::vector<SlsInfo> collect_sls(const Node& node, const Cursor& cur) const {
    std::vector<SlsInfo> out;
    const Node* n = &node;
    while (n && same_fls(*n, cur.bin, cur.x1_prev)) {
      SlsInfo info;
      info.bottom = n->front.y2_prev;
      if (out.empty()) {
        info.top = cur.y2_curr;
        info.end = cur.x3_curr;
      } else {
        info.top = out.back().bottom;
        info.end = n->front.x3_curr;
      }
      const Node* first = n;
      while (n && same_fls(*n, cur.bin, cur.x1_prev) && n->front.y2_prev == info.bottom) {
        first = n;
        n = n->parent.get();
      }
      info.waste = first->insertion.kind == InsertionKind::WasteOnly && first->insertion.depth <= 2;
      if (out.empty()) info.waste = info.waste || cur.sls_waste;
      out.push_back(info);
    }
    return out;
  }

  /// Moves x1_curr right to the first valid position >= target.
  bool raise_x1(const Node& node, const Cursor& group_cursor, bool skip_newest, bool new_fls,
                Cursor& c, Length target) const {
    if (target <= c.x1_curr && !new_fls) return true;
    const auto& p = inst_.params();
    const auto defects = inst_.defects(c.bin);
    const Length from = c.x1_curr;
    Length x = std::max(target, c.x1_curr);
    for (int guard = 0; guard < 64; ++guard) {
      const Length before = x;
      if (c.x1_tight && x > from && x < from + p.min_waste) x = from + p.min_waste;
      for (const auto& d : defects)
        if (d.x < x && x < d.right()) x = d.right();
      if (x == before) break;
    }
    if (x > p.plate_width) return false;
    if (!c.fls_waste && x - c.x1_prev > p.max1) return false;
    if (!new_fls && x > from) {
      bool near = false;
      for (const auto& d : defects)
        if (d.x < x && d.right() > from) near = true;
      if (near) {
        const auto groups = collect_sls(node, group_cursor);
        for (std::size_t g = 0; g < groups.size(); ++g) {
          if (g == 0 && skip_newest) continue;
          const auto& s = groups[g];
          if (s.top < p.plate_height && horizontal_cut_crosses(defects, s.top, from, x)) return false;
          if (!s.waste && s.end == from && vertical_cut_crosses(defects, from, s.bottom, s.top))
            return false;
        }
      }
    }
    if (x != c.x1_curr) c.x1_tight = false;
    c.x1_curr = x;
    return true;
  }

  /// Checks the cuts that appear when the current second-level sub-plate of
  /// `node` grows from `from` to `to`: 3-cuts get longer and tight items get
  /// a 4-cut on top.
  bool sls_growth_ok(const Node& node, const Cursor& c, Length from, Length to) const {
    if (to <= from) return true;
    const auto defects = inst_.defects(c.bin);
    bool near = false;
    for (const auto& d : defects)
      if (d.x < c.x3_curr && d.right() > c.x1_prev && d.top() > from && d.y < to) near = true;
    if (!near) return true;
    for (const Node* n = &node; n && same_fls(*n, c.bin, c.x1_prev) && n->front.y2_prev == c.y2_prev;
         n = n->parent.get()) {
      const auto& ins = n->insertion;
      if (ins.x_right < c.x1_curr && vertical_cut_crosses(defects, ins.x_right, from, to)) return false;
      if (ins.kind != InsertionKind::WasteOnly && ins.content_top() == from &&
          horizontal_cut_crosses(defects, from, ins.x_left, ins.x_right))
        return false;
    }
    return true;
  }

  /// Raises the top of node's current second-level sub-plate (no new content).
  bool raise_y2(const Node& node, Cursor& c, Length target) const {
    if (target <= c.y2_curr) return true;
    const auto& p = inst_.params();
    const auto defects = inst_.defects(c.bin);
    const Length from = c.y2_curr;
    Length y = target;
    for (int guard = 0; guard < 64; ++guard) {
      const Length before = y;
      if (c.y2_flex == YFlex::Fixed) return false;
      if (c.y2_flex == YFlex::Tight && y < from + p.min_waste) y = from + p.min_waste;
      if (y < p.plate_height)
        for (const auto& d : defects)
          if (d.y < y && y < d.top() && d.x < c.x1_curr && d.right() > c.x1_prev) y = std::max(y, d.top());
      if (y == before) break;
    }
    if (y > p.plate_height) return false;
    if (!sls_growth_ok(node, c, from, y)) return false;
    c.y2_curr = y;
    c.y2_flex = YFlex::Free;
    return true;
  }

  /// Closes the open sub-plates of `node` down to `level` (2: second-level,
  /// 1: first-level, 0: bin). Returns the cursor with final positions.
  std::optional<Cursor> close(const Node& node, Cursor c, int level) const {
    if (node.is_root()) return c;
    const auto& p = inst_.params();
    if (!c.sls_waste && c.y2_curr - c.y2_prev < p.min2) {
      if (!raise_y2(node, c, c.y2_prev + p.min2)) return std::nullopt;
    }
    if (level <= 1 && !c.fls_waste) {
      const Length gap = p.plate_height - c.y2_curr;
      if (gap > 0 && gap < p.min_waste) {
        if (!raise_y2(node, c, p.plate_height) || c.y2_curr != p.plate_height) return std::nullopt;
      }
    }
    if (!c.sls_waste) {
      const Length gap = c.x1_curr - c.x3_curr;
      if (gap == 0) {
        c.x1_tight = true;
      } else if (gap < p.min_waste) {
        const Cursor groups = c;
        if (!raise_x1(node, groups, false, false, c, c.x3_curr + p.min_waste)) return std::nullopt;
      }
    }
    if (level <= 1 && !c.fls_waste && c.x1_curr - c.x1_prev < p.min1) {
      const Cursor groups = c;
      if (!raise_x1(node, groups, false, false, c, c.x1_prev + p.min1)) return std::nullopt;
    }
    if (level == 0) {
      const Length gap = p.plate_width - c.x1_curr;
      if (gap > 0 && gap < p.min_waste) {
        const Cursor groups = c;
        if (!raise_x1(node, groups, false, false, c, p.plate_width) || c.x1_curr != p.plate_width)
          return std::nullopt;
      }
    }
    return c;
  }

  /// Smallest valid top for a second-level sub-plate receiving a third-level
  /// sub-plate whose content ends at `content_top`.
  std::optional<Length> solve_y2(bool existing, const Cursor& c, Length content_top, bool exact) const {
    const auto& p = inst_.params();
    const auto defects = inst_.defects(c.bin);
    const Length T = c.y2_curr;
    Length y = existing ? std::max(T, content_top) : content_top;
    for (int guard = 0; guard < 64; ++guard) {
      const Length before = y;
      if (existing && y > T) {
        if (c.y2_flex == YFlex::Fixed) return std::nullopt;
        if (c.y2_flex == YFlex::Tight && y < T + p.min_waste) y = T + p.min_waste;
      }
      if (exact) {
        if (y != content_top) return std::nullopt;
      } else if (y > content_top && y < content_top + p.min_waste) {
        y = content_top + p.min_waste;
      }
      if (y < p.plate_height)
        for (const auto& d : defects)
          if (d.y < y && y < d.top() && d.x < c.x1_curr && d.right() > c.x1_prev) y = std::max(y, d.top());
      if (y == before) break;
    }
    if (y > p.plate_height) return std::nullopt;
    return y;
  }

  void add_item_insertions(const NodePtr& node_ptr, int depth, const Cursor& base,
                           const Cursor& groups, const Cursor* closed,
                           const std::vector<PlacedItem>& orients,
                           const std::vector<ItemId>& partners, std::vector<Insertion>& out) const {
    for (const auto& a : orients)
      if (auto ins = try_tls(*node_ptr, depth, base, groups, closed, a, PlacedItem{}))
        push_checked(node_ptr, std::move(*ins), out);
    for (const auto& a : orients) {
      for (ItemId k : partners) {
        for (const auto& b : orientations_of(k)) {
          if (b.width != a.width) continue;
          if (auto ins = try_tls(*node_ptr, depth, base, groups, closed, a, b))
            push_checked(node_ptr, std::move(*ins), out);
        }
      }
    }
  }

  /// Finalizes an insertion that packs the last item; drops it if the
  /// solution cannot be closed.
  void push_checked(const NodePtr& node_ptr, Insertion ins, std::vector<Insertion>& out) const {
    const int packed_after = node_ptr->items_packed + ins.item_count();
    if (packed_after == static_cast<int>(inst_.item_count())) {
      auto tentative = std::make_shared<Node>();
      fill_child(*tentative, node_ptr, ins);
      auto done = close(*tentative, cursor_of(*tentative), 0);
      if (!done) return;
      ins.x1_curr = done->x1_curr;
      ins.y2_curr = done->y2_curr;
      ins.x1_tight = done->x1_tight;
      ins.y2_flex = done->y2_flex;
      ins.completes = true;
    }
    out.push_back(std::move(ins));
  }

  std::optional<Insertion> try_tls(const Node& node, int d, const Cursor& base,
                                   const Cursor& groups, const Cursor* closed, const PlacedItem& a,
                                   const PlacedItem& b) const {
    const auto& p = inst_.params();
    const auto defects = inst_.defects(base.bin);
    Cursor c = base;
    const Length xa = c.x3_curr;
    const Length xr = xa + a.width;
    const Length ys = c.y2_prev;
    if (xr > p.plate_width) return std::nullopt;
    if (xr > c.x1_curr || d <= 1) {
      if (!raise_x1(node, groups, d == 3, d <= 1, c, xr)) return std::nullopt;
    }
    const bool existing = d == 3;
    const Length h_total = a.height + (b.empty() ? 0 : b.height);
    Length yi = ys;
    for (int attempt = 0; attempt < 32; ++attempt) {
      if (yi > ys && yi - ys < p.min_waste) yi = ys + p.min_waste;
      if (yi + h_total > p.plate_height) return std::nullopt;
      // Items must be defect-free.
      Length blocked_top = -1;
      const Rect ra{xa, yi, a.width, a.height};
      for (const auto& def : defects)
        if (interiors_overlap(def.rect(), ra)) blocked_top = std::max(blocked_top, def.top());
      if (!b.empty()) {
        const Rect rb{xa, yi + a.height, b.width, b.height};
        if (blocked_top >= 0 || rect_hits_defect(defects, rb)) return std::nullopt;
      }
      if (blocked_top >= 0) {
        yi = blocked_top;
        continue;
      }
      const Length content_top = yi + h_total;
      const bool exact = yi > ys || !b.empty();
      const auto y2 = solve_y2(existing, c, content_top, exact);
      if (!y2) return std::nullopt;
      // 4-cut inside the sub-plate.
      Length cut4 = -1;
      if (!b.empty()) cut4 = yi + a.height;
      else if (yi > ys) cut4 = yi;
      else if (*y2 > content_top) cut4 = content_top;
      if (cut4 >= 0 && horizontal_cut_crosses(defects, cut4, xa, xr)) {
        if (b.empty() && yi == ys) {
          Length top = yi;
          for (const auto& def : defects)
            if (def.y < cut4 && cut4 < def.top() && def.x < xr && def.right() > xa)
              top = std::max(top, def.top());
          yi = top;
          continue;
        }
        return std::nullopt;
      }
      // 3-cuts bounding the new sub-plate.
      if (d == 3 && xa > c.x1_prev && vertical_cut_crosses(defects, xa, ys, *y2)) return std::nullopt;
      if (xr < c.x1_curr && vertical_cut_crosses(defects, xr, ys, *y2)) return std::nullopt;
      if (existing && *y2 > base.y2_curr && !sls_growth_ok(node, groups, base.y2_curr, *y2))
        return std::nullopt;

      YFlex contrib = exact ? YFlex::Fixed : (*y2 == content_top ? YFlex::Tight : YFlex::Free);
      YFlex prior = YFlex::Free;
      if (existing && *y2 == base.y2_curr) prior = base.y2_flex;
      c.y2_flex = std::max(prior, contrib);
      c.y2_curr = *y2;
      c.x3_prev = xa;
      c.x3_curr = xr;

      Insertion ins;
      ins.depth = d;
      ins.first = a;
      ins.second = b;
      if (!b.empty()) ins.kind = InsertionKind::TwoItems;
      else if (yi > ys) ins.kind = InsertionKind::OneItemWasteBelow;
      else if (*y2 > content_top) ins.kind = InsertionKind::OneItemWasteAbove;
      else ins.kind = InsertionKind::OneItem;
      ins.x_left = xa;
      ins.x_right = xr;
      ins.y_bottom = ys;
      ins.item_y = yi;
      set_cursor(ins, c, d, closed);
      return ins;
    }
    return std::nullopt;
  }

  std::optional<Insertion> try_waste(const Node& node, int d, const Cursor& base,
                                     const Cursor& groups, const Cursor* closed) const {
    const auto& p = inst_.params();
    const auto defects = inst_.defects(base.bin);
    Cursor c = base;
    Insertion ins;
    ins.kind = InsertionKind::WasteOnly;
    ins.depth = d;
    if (d == 3) {
      const Length ys = c.y2_prev, T = c.y2_curr, xs = c.x3_curr;
      const Defect* target = nullptr;
      for (const auto& def : defects)
        if (def.right() > xs && def.y < T && def.top() > ys && def.x < c.x1_prev + p.max1 &&
            (!target || def.x < target->x))
          target = &def;
      if (!target) return std::nullopt;
      Length xe = std::max(target->right(), xs + p.min_waste);
      for (int guard = 0; guard < 64; ++guard) {
        const Length before = xe;
        for (const auto& def : defects)
          if (def.x < xe && xe < def.right() && def.y < T && def.top() > ys) xe = def.right();
        if (xe == before) break;
      }
      if (xe > p.plate_width) return std::nullopt;
      if (xe > c.x1_curr && !raise_x1(node, groups, true, false, c, xe)) return std::nullopt;
      c.x3_prev = xs;
      c.x3_curr = xe;
      ins.x_left = xs;
      ins.x_right = xe;
      ins.y_bottom = ins.item_y = ys;
    } else if (d == 2) {
      const Length ys = c.y2_prev;
      const Defect* target = nullptr;
      for (const auto& def : defects)
        if (def.x < c.x1_curr && def.right() > c.x1_prev && def.top() > ys &&
            (!target || def.y < target->y))
          target = &def;
      if (!target) return std::nullopt;
      Length ye = std::max(target->top(), ys + p.min_waste);
      for (int guard = 0; guard < 64; ++guard) {
        const Length before = ye;
        if (ye < p.plate_height)
          for (const auto& def : defects)
            if (def.y < ye && ye < def.top() && def.x < c.x1_curr && def.right() > c.x1_prev)
              ye = def.top();
        if (ye < p.plate_height && p.plate_height - ye < p.min_waste) ye = p.plate_height;
        if (ye == before) break;
      }
      if (ye > p.plate_height) return std::nullopt;
      c.y2_curr = ye;
      c.x3_prev = c.x1_prev;
      c.x3_curr = c.x1_curr;
      c.sls_waste = true;
      c.y2_flex = YFlex::Free;
      ins.x_left = c.x1_prev;
      ins.x_right = c.x1_curr;
      ins.y_bottom = ins.item_y = ys;
    } else {
      const Length xs = c.x1_prev;
      const Defect* target = nullptr;
      for (const auto& def : defects)
        if (def.right() > xs && def.x < xs + p.max1 && (!target || def.x < target->x)) target = &def;
      if (!target) return std::nullopt;
      Length xe = std::max(target->right(), xs + p.min_waste);
      for (int guard = 0; guard < 64; ++guard) {
        const Length before = xe;
        for (const auto& def : defects)
          if (def.x < xe && xe < def.right()) xe = def.right();
        if (xe < p.plate_width && p.plate_width - xe < p.min_waste) xe = p.plate_width;
        if (xe == before) break;
      }
      if (xe > p.plate_width) return std::nullopt;
      c.x1_curr = xe;
      c.y2_prev = 0;
      c.y2_curr = p.plate_height;
      c.x3_prev = xs;
      c.x3_curr = xe;
      c.x1_tight = false;
      c.fls_waste = c.sls_waste = true;
      ins.x_left = xs;
      ins.x_right = xe;
      ins.y_bottom = ins.item_y = 0;
    }
    set_cursor(ins, c, d, closed);
    if (node.items_packed == static_cast<int>(inst_.item_count())) return std::nullopt;
    return ins;
  }

  static void set_cursor(Insertion& ins, const Cursor& c, int d, const Cursor* closed) {
    ins.bin = c.bin;
    ins.new_bin = d == 0;
    ins.x1_prev = c.x1_prev;
    ins.x1_curr = c.x1_curr;
    ins.y2_prev = c.y2_prev;
    ins.y2_curr = c.y2_curr;
    ins.x3_prev = c.x3_prev;
    ins.x3_curr = c.x3_curr;
    ins.x1_tight = c.x1_tight;
    ins.y2_flex = c.y2_flex;
    ins.sls_waste = c.sls_waste;
    ins.fls_waste = c.fls_waste;
    if (closed) {
      ins.closed_x1 = closed->x1_curr;
      ins.closed_y2 = closed->y2_curr;
    }
  }

  void fill_child(Node& child, const NodePtr& parent, const Insertion& ins) const {
    const auto& p = inst_.params();
    child.parent = parent;
    child.insertion = ins;
    child.packed = parent->packed;
    child.items_packed = parent->items_packed;
    child.item_area = parent->item_area;
    for (const auto* it : {&ins.first, &ins.second}) {
      if (it->empty()) continue;
      child.packed[static_cast<std::size_t>(it->id) / 64] |= std::uint64_t{1} << (static_cast<unsigned>(it->id) % 64);
      ++child.items_packed;
      child.item_area += inst_.item(it->id).area();
    }
    child.complete = ins.completes;
    child.front = Front{ins.bin, ins.x1_prev, ins.x1_curr, ins.x3_curr, ins.y2_prev, ins.y2_curr};
    child.x3_prev = ins.x3_prev;
    child.x1_tight = ins.x1_tight;
    child.y2_flex = ins.y2_flex;
    child.sls_waste = ins.sls_waste;
    child.fls_waste = ins.fls_waste;
    child.prior_bins_area = static_cast<Area>(ins.bin) * p.plate_area();
    child.current_area = area(child, p.plate_height);
    child.last_depth = ins.depth;
    child.last_waste = ins.kind == InsertionKind::WasteOnly;
    child.last_two = ins.kind == InsertionKind::TwoItems;
    child.tls_min = min_item(ins);
    if (ins.depth <= 1) {
      child.sls_min = child.tls_min;
      child.prev_sls_min = kNoItem;
    } else if (ins.depth == 2) {
      child.prev_sls_min = parent->sls_min;
      child.sls_min = child.tls_min;
    } else {
      child.prev_sls_min = parent->prev_sls_min;
      child.sls_min = parent->sls_min == kNoItem
                          ? child.tls_min
                          : (child.tls_min == kNoItem ? parent->sls_min
                                                      : std::min(parent->sls_min, child.tls_min));
    }
    child.serial = serial_.fetch_add(1, std::memory_order_relaxed);
  }

  // Items and bottom of each second-level sub-plate of node's first-level
  // sub-plate, newest first.
  struct SlsItems {
    Length bottom = 0;
    std::vector<ItemId> items;
  };

  std::vector<SlsItems> sls_items(const Node& node) const {
    std::vector<SlsItems> out;
    const int bin = node.front.bin_index;
    const Length x1p = node.front.x1_prev;
    for (const Node* n = &node; n && same_fls(*n, bin, x1p); n = n->parent.get()) {
      if (out.empty() || out.back().bottom != n->front.y2_prev) out.push_back({n->front.y2_prev, {}});
      for (ItemId id : items_of(n->insertion)) out.back().items.push_back(id);
    }
    return out;
  }

  bool pair_forbidden(const std::vector<ItemId>& upper, const std::vector<ItemId>& lower,
                      const Rect& upper_rect, const Rect& lower_rect, int bin) const {
    const auto defects = inst_.defects(bin);
    if (rect_hits_defect(defects, upper_rect) || rect_hits_defect(defects, lower_rect)) return false;
    return !share_chain(upper, lower);
  }

  /// k = 2 rule for node's current second-level sub-plate (plus `extra`
  /// items) against the one right below it.
  bool sls_pair_allowed(const Node& node, const std::vector<ItemId>& extra, ItemId upper_min,
                        ItemId lower_min, bool, Length upper_top, Length x1_end) const {
    if (upper_min == kNoItem || lower_min == kNoItem || upper_min >= lower_min) return true;
    const auto groups = sls_items(node);
    if (groups.size() < 2) return true;
    std::vector<ItemId> upper = groups[0].items;
    upper.insert(upper.end(), extra.begin(), extra.end());
    const Length x1p = node.front.x1_prev;
    const Rect upper_rect{x1p, groups[0].bottom, x1_end - x1p, upper_top - groups[0].bottom};
    const Rect lower_rect{x1p, groups[1].bottom, x1_end - x1p, groups[0].bottom - groups[1].bottom};
    return !pair_forbidden(upper, groups[1].items, upper_rect, lower_rect, node.bin());
  }

  /// k = 2 rule when the last insertion opens (and completes) a new
  /// second-level sub-plate above node's current one.
  bool final_sls_over_closed(const Node& node, const Insertion& ins,
                             const std::vector<ItemId>& new_items) const {
    const ItemId upper_min = min_item(ins);
    if (node.sls_min == kNoItem || upper_min >= node.sls_min) return true;
    const auto groups = sls_items(node);
    if (groups.empty()) return true;
    const Length x1p = node.front.x1_prev;
    const Length bottom = ins.y2_prev;
    const Rect upper_rect{x1p, bottom, ins.x1_curr - x1p, ins.y2_curr - bottom};
    const Rect lower_rect{x1p, groups[0].bottom, ins.x1_curr - x1p, bottom - groups[0].bottom};
    return !pair_forbidden(new_items, groups[0].items, upper_rect, lower_rect, node.bin());
  }

  const Instance& inst_;
  BranchingOptions opts_;
  std::size_t words_;
  mutable std::atomic<std::uint64_t> serial_{0};
};

}  // namespace glasscut
