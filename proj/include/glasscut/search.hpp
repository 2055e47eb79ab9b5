#pragma once

// Best-first tree searches over the branching scheme: A*, memory bounded A*
// (MBA*) and its restarting variant, iterative beam search, and DPA* for
// instances with at most two chains.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "glasscut/branching.hpp"
#include "glasscut/guide.hpp"
#include "glasscut/min_max_heap.hpp"

namespace glasscut {

using Clock = std::chrono::steady_clock;

/// Best complete solution shared by every worker.
class Incumbent {
 public:
  explicit Incumbent(Clock::time_point start = Clock::now()) : start_(start) {}

  Area waste() const { return waste_.load(std::memory_order_acquire); }
  bool has_solution() const { return waste() != kNone; }

  /// Publishes `leaf` if strictly better. Returns true on improvement.
  bool update(const NodePtr& leaf) {
    const Area w = glasscut::waste(*leaf);
    if (w >= waste()) return false;
    std::lock_guard lock(mutex_);
    if (w >= waste_.load(std::memory_order_relaxed)) return false;
    best_ = leaf;
    time_to_best_ = std::chrono::duration<double>(Clock::now() - start_).count();
    history_.emplace_back(time_to_best_, w);
    waste_.store(w, std::memory_order_release);
    return true;
  }

  NodePtr best() const {
    std::lock_guard lock(mutex_);
    return best_;
  }
  double time_to_best() const {
    std::lock_guard lock(mutex_);
    return time_to_best_;
  }
  std::vector<std::pair<double, Area>> history() const {
    std::lock_guard lock(mutex_);
    return history_;
  }

  static constexpr Area kNone = std::numeric_limits<Area>::max();

 private:
  Clock::time_point start_;
  mutable std::mutex mutex_;
  std::atomic<Area> waste_{kNone};
  NodePtr best_;
  double time_to_best_ = 0.0;
  std::vector<std::pair<double, Area>> history_;
};

enum class SearchStatus { Exhausted, Timeout, Memory };

inline const char* to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::Exhausted: return "exhausted";
    case SearchStatus::Timeout: return "timeout";
    case SearchStatus::Memory: return "memory";
  }
  return "?";
}

struct SearchOptions {
  GuideKind guide = GuideKind::WastePercentage;
  Clock::time_point deadline = Clock::time_point::max();
  bool bound_pruning = true;
  std::size_t memory_cap = 0;  // fringe node budget, 0 = derived from available memory
  const std::atomic<bool>* stop = nullptr;
  std::function<void(const Node&)> on_expand;  // called before each expansion
};

struct SearchOutcome {
  SearchStatus status = SearchStatus::Exhausted;
  bool discarded = false;  // some node was dropped by the fringe size limit
  std::uint64_t expanded = 0;
};

/// Fringe budget from MemAvailable, assuming a few hundred bytes per node
/// plus the packed-item bitset.
inline std::size_t default_memory_cap(std::size_t item_count) {
  std::ifstream in("/proc/meminfo");
  std::string key;
  std::uint64_t kb = 0;
  std::string unit;
  std::uint64_t available = 4ull << 30;
  while (in >> key >> kb >> unit)
    if (key == "MemAvailable:") {
      available = kb * 1024;
      break;
    }
  const std::uint64_t per_node = 600 + 2 * 8 * ((item_count + 63) / 64);
  return static_cast<std::size_t>(std::max<std::uint64_t>(1000, available / 2 / per_node));
}

inline Clock::time_point deadline_after(double seconds) {
  if (seconds >= 1e9) return Clock::time_point::max();
  return Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(seconds));
}

namespace detail {

struct FringeEntry {
  Ratio key;
  int items = 0;
  std::uint64_t counter = 0;
  NodePtr node;
};

// Smaller guide first, then more items, then older.
struct FringeLess {
  bool operator()(const FringeEntry& a, const FringeEntry& b) const {
    const auto c = a.key <=> b.key;
    if (c != 0) return c < 0;
    if (a.items != b.items) return a.items > b.items;
    return a.counter < b.counter;
  }
};

inline bool out_of_time(const SearchOptions& opts) {
  if (opts.stop && opts.stop->load(std::memory_order_relaxed)) return true;
  return Clock::now() >= opts.deadline;
}

}  // namespace detail

using Fringe = MinMaxHeap<detail::FringeEntry, detail::FringeLess>;

/// MBA*: best-first search that drops the worst nodes whenever the fringe
/// holds more than `max_fringe` of them. max_fringe = SIZE_MAX gives A*.
inline SearchOutcome mba_star(const BranchingScheme& scheme, std::size_t max_fringe, const SearchOptions& opts,
                              Incumbent& incumbent) {
  SearchOutcome out;
  if (detail::out_of_time(opts)) {
    out.status = SearchStatus::Timeout;
    return out;
  }
  const std::size_t cap = opts.memory_cap ? opts.memory_cap : default_memory_cap(scheme.instance().item_count());
  std::uint64_t counter = 0;
  Fringe fringe;
  auto root = scheme.root();
  fringe.push({guide_value(*root, opts.guide), 0, counter++, root});
  while (!fringe.empty()) {
    if (detail::out_of_time(opts)) {
      out.status = SearchStatus::Timeout;
      return out;
    }
    auto entry = fringe.pop_min();
    const NodePtr node = std::move(entry.node);
    if (opts.bound_pruning && waste(*node) >= incumbent.waste()) continue;
    if (opts.on_expand) opts.on_expand(*node);
    ++out.expanded;
    for (auto& child : scheme.children(node)) {
      if (child->complete) {
        incumbent.update(child);
        continue;
      }
      if (opts.bound_pruning && waste(*child) >= incumbent.waste()) continue;
      fringe.push({guide_value(*child, opts.guide), child->items_packed, counter++, std::move(child)});
    }
    while (fringe.size() > max_fringe) {
      fringe.pop_max();
      out.discarded = true;
    }
    if (fringe.size() > cap) {
      out.status = SearchStatus::Memory;
      return out;
    }
  }
  out.status = SearchStatus::Exhausted;
  return out;
}

inline SearchOutcome astar(const BranchingScheme& scheme, const SearchOptions& opts, Incumbent& incumbent) {
  return mba_star(scheme, std::numeric_limits<std::size_t>::max(), opts, incumbent);
}

/// Growth factor kept as an exact fraction.
struct Growth {
  std::int64_t num = 3;
  std::int64_t den = 2;

  std::size_t next(std::size_t d) const {
    const auto scaled = (static_cast<unsigned __int128>(d) * static_cast<std::uint64_t>(num) +
                         static_cast<std::uint64_t>(den) - 1) /
                        static_cast<std::uint64_t>(den);
    const auto capped = std::min<unsigned __int128>(scaled, std::numeric_limits<std::size_t>::max() / 4);
    return std::max(d + 1, static_cast<std::size_t>(capped));
  }

  std::string str() const {
    std::ostringstream os;
    os << static_cast<double>(num) / static_cast<double>(den);
    return os.str();
  }

  /// Parses a decimal such as "1.33" exactly.
  static Growth parse(const std::string& text) {
    std::int64_t num = 0, den = 1;
    bool dot = false, digits = false;
    for (char ch : text) {
      if (ch == '.' && !dot) {
        dot = true;
      } else if (ch >= '0' && ch <= '9' && den < 1'000'000'000) {
        num = num * 10 + (ch - '0');
        if (dot) den *= 10;
        digits = true;
      } else {
        throw Error(ErrorCode::InvalidParams, "invalid growth factor '" + text + "'");
      }
    }
    if (!digits || num <= den) throw Error(ErrorCode::InvalidParams, "growth factor must be > 1");
    return {num, den};
  }
};

/// The sequence of fringe sizes used by restarting MBA*.
inline std::vector<std::size_t> fringe_schedule(std::size_t first, Growth g, std::size_t count) {
  std::vector<std::size_t> out;
  std::size_t d = first;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(d);
    d = g.next(d);
  }
  return out;
}

struct RestartOutcome {
  SearchStatus status = SearchStatus::Timeout;
  bool proved = false;  // last iteration explored everything without discarding
  std::vector<std::size_t> sizes;
};

inline RestartOutcome restarting_mba_star(const BranchingScheme& scheme, Growth growth, std::size_t first_size,
                                          const SearchOptions& opts, Incumbent& incumbent) {
  RestartOutcome out;
  std::size_t d = std::max<std::size_t>(1, first_size);
  for (;;) {
    out.sizes.push_back(d);
    const auto r = mba_star(scheme, d, opts, incumbent);
    if (r.status == SearchStatus::Exhausted && !r.discarded) {
      out.status = SearchStatus::Exhausted;
      out.proved = true;
      return out;
    }
    if (r.status != SearchStatus::Exhausted) {
      out.status = r.status;
      return out;
    }
    d = growth.next(d);
  }
}

struct BeamOutcome {
  SearchStatus status = SearchStatus::Timeout;
  bool proved = false;
  std::vector<std::size_t> widths;
};

/// One beam pass of width `width`. Returns true iff no node was cut.
inline bool beam_pass(const BranchingScheme& scheme, std::size_t width, const SearchOptions& opts,
                      Incumbent& incumbent, bool& timed_out) {
  timed_out = false;
  bool truncated = false;
  std::uint64_t counter = 0;
  std::vector<detail::FringeEntry> level;
  auto root = scheme.root();
  level.push_back({guide_value(*root, opts.guide), 0, counter++, root});
  while (!level.empty()) {
    std::vector<detail::FringeEntry> next;
    for (auto& entry : level) {
      if (detail::out_of_time(opts)) {
        timed_out = true;
        return false;
      }
      if (opts.bound_pruning && waste(*entry.node) >= incumbent.waste()) continue;
      if (opts.on_expand) opts.on_expand(*entry.node);
      for (auto& child : scheme.children(entry.node)) {
        if (child->complete) {
          incumbent.update(child);
          continue;
        }
        if (opts.bound_pruning && waste(*child) >= incumbent.waste()) continue;
        next.push_back({guide_value(*child, opts.guide), child->items_packed, counter++, std::move(child)});
      }
    }
    if (next.size() > width) {
      std::nth_element(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(width), next.end(),
                       detail::FringeLess{});
      next.resize(width);
      truncated = true;
    }
    std::sort(next.begin(), next.end(), detail::FringeLess{});
    level = std::move(next);
  }
  return !truncated;
}

/// Beam search restarted with doubled width until time runs out or a pass
/// keeps every node.
inline BeamOutcome iterative_beam_search(const BranchingScheme& scheme, std::size_t first_width,
                                         const SearchOptions& opts, Incumbent& incumbent) {
  BeamOutcome out;
  std::size_t width = std::max<std::size_t>(1, first_width);
  for (;;) {
    out.widths.push_back(width);
    bool timed_out = false;
    const bool complete = beam_pass(scheme, width, opts, incumbent, timed_out);
    if (timed_out) {
      out.status = SearchStatus::Timeout;
      return out;
    }
    if (complete) {
      out.status = SearchStatus::Exhausted;
      out.proved = true;
      return out;
    }
    width *= 2;
  }
}

/// Non-dominated (bin, front) pairs per number of items taken from each chain.
class DominanceStore {
 public:
  /// Inserts the state unless a stored one dominates it; evicts the stored
  /// states it dominates. Returns false when the state is dominated.
  bool insert(std::pair<int, int> key, const Front& front) {
    auto& list = entries_[key];
    for (const auto& f : list)
      if (f.bin_index == front.bin_index && front_leq(f, front)) return false;
    std::erase_if(list, [&](const Front& f) { return f.bin_index == front.bin_index && front_leq(front, f); });
    list.push_back(front);
    return true;
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [k, v] : entries_) n += v.size();
    return n;
  }

  const std::vector<Front>* find(std::pair<int, int> key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

 private:
  std::map<std::pair<int, int>, std::vector<Front>> entries_;
};

/// Items consumed from chain 0 and chain 1.
inline std::pair<int, int> chain_counts(const Instance& instance, const Node& node) {
  int k[2] = {0, 0};
  const auto& chains = instance.chains();
  for (std::size_t c = 0; c < chains.size() && c < 2; ++c)
    for (ItemId id : chains[c]) {
      if (!node.has_item(id)) break;
      ++k[c];
    }
  return {k[0], k[1]};
}

/// A* guided by waste with memoized non-dominated fronts.
inline SearchOutcome dpa_star(const BranchingScheme& scheme, const SearchOptions& base_opts, Incumbent& incumbent) {
  const auto& instance = scheme.instance();
  if (instance.chain_count() > 2)
    throw Error(ErrorCode::ChainCount, "DPA* needs at most two chains, instance has " +
                                           std::to_string(instance.chain_count()));
  SearchOptions opts = base_opts;
  opts.guide = GuideKind::Waste;
  SearchOutcome out;
  if (detail::out_of_time(opts)) {
    out.status = SearchStatus::Timeout;
    return out;
  }
  const std::size_t cap = opts.memory_cap ? opts.memory_cap : default_memory_cap(instance.item_count());
  DominanceStore store;
  std::uint64_t counter = 0;
  Fringe fringe;
  auto root = scheme.root();
  fringe.push({guide_value(*root, opts.guide), 0, counter++, root});
  while (!fringe.empty()) {
    if (detail::out_of_time(opts)) {
      out.status = SearchStatus::Timeout;
      return out;
    }
    auto entry = fringe.pop_min();
    const NodePtr node = std::move(entry.node);
    if (opts.bound_pruning && waste(*node) >= incumbent.waste()) continue;
    // A node whose state was superseded after it was queued is skipped.
    if (!node->is_root()) {
      const auto* list = store.find(chain_counts(instance, *node));
      bool current = false;
      if (list)
        for (const auto& f : *list)
          if (f == node->front) current = true;
      if (!current) continue;
    }
    if (opts.on_expand) opts.on_expand(*node);
    ++out.expanded;
    for (auto& child : scheme.children(node)) {
      if (child->complete) {
        incumbent.update(child);
        continue;
      }
      if (opts.bound_pruning && waste(*child) >= incumbent.waste()) continue;
      if (!store.insert(chain_counts(instance, *child), child->front)) continue;
      fringe.push({guide_value(*child, opts.guide), child->items_packed, counter++, std::move(child)});
    }
    if (fringe.size() > cap || store.size() > cap) {
      out.status = SearchStatus::Memory;
      return out;
    }
  }
  out.status = SearchStatus::Exhausted;
  return out;
}

}  // namespace glasscut
