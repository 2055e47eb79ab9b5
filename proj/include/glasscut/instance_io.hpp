#pragma once

// Challenge CSV formats: batch (items), defects, and solution cut trees.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "glasscut/core.hpp"
#include "glasscut/node.hpp"

namespace glasscut {

namespace node_type {
inline constexpr int kWaste = -1;
inline constexpr int kBranch = -2;
inline constexpr int kResidual = -3;
}  // namespace node_type

struct TreeNode {
  int node_id = 0;
  int plate_id = 0;
  Length x = 0;
  Length y = 0;
  Length width = 0;
  Length height = 0;
  int type = node_type::kBranch;  // item id, or one of node_type
  int cut = 0;
  std::optional<int> parent;

  Rect rect() const { return {x, y, width, height}; }
  Length right() const { return x + width; }
  Length top() const { return y + height; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Flat cut tree, parents listed before their children.
struct SolutionTree {
  std::vector<TreeNode> nodes;

  friend bool operator==(const SolutionTree&, const SolutionTree&) = default;
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(';', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline long long to_int(std::string_view s, const std::string& where) {
  s = trim(s);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw Error(ErrorCode::Parse, where + ": expected an integer, got '" + std::string(s) + "'");
  return v;
}

inline double to_double(std::string_view s, const std::string& where) {
  s = trim(s);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw Error(ErrorCode::Parse, where + ": expected a number, got '" + std::string(s) + "'");
  return v;
}

inline bool header_matches(std::string_view field, std::string_view expected) {
  // `expected` may list accepted spellings separated by '|'.
  for (;;) {
    const auto bar = expected.find('|');
    if (field == expected.substr(0, bar)) return true;
    if (bar == std::string_view::npos) return false;
    expected.remove_prefix(bar + 1);
  }
}

// Rows of a `;`-separated file after checking its header.
inline std::vector<std::vector<std::string_view>> read_rows(std::istream& in, std::vector<std::string>& storage,
                                                            const std::vector<std::string>& header,
                                                            const std::string& what) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Parse, what + ": missing header");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto fields = split_fields(trim(line));
  if (fields.size() != header.size())
    throw Error(ErrorCode::Parse, what + ": unexpected header '" + line + "'");
  for (std::size_t i = 0; i < header.size(); ++i)
    if (!header_matches(trim(fields[i]), header[i])) throw Error(ErrorCode::Parse, what + ": unexpected header '" + line + "'");
  storage.clear();
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    storage.push_back(line);
  }
  std::vector<std::vector<std::string_view>> rows;
  for (std::size_t r = 0; r < storage.size(); ++r) {
    auto row = split_fields(trim(storage[r]));
    if (row.size() != header.size())
      throw Error(ErrorCode::Parse, what + " line " + std::to_string(r + 2) + ": expected " +
                                        std::to_string(header.size()) + " fields");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

/// Items with raw STACK ids and SEQUENCE values; Instance derives chains.
inline std::vector<Item> parse_batch(std::istream& in) {
  std::vector<std::string> storage;
  const auto rows = detail::read_rows(in, storage, {"ITEM_ID", "LENGTH|LENGTH_ITEM", "WIDTH|WIDTH_ITEM", "STACK", "SEQUENCE"}, "batch");
  std::vector<Item> items;
  std::map<std::pair<long long, long long>, long long> seen;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string where = "batch line " + std::to_string(r + 2);
    Item it;
    const auto id = detail::to_int(rows[r][0], where);
    if (id != static_cast<long long>(r))
      throw Error(ErrorCode::NoncontiguousIds, where + ": item ids must be 0..N-1 in order");
    it.id = static_cast<ItemId>(id);
    it.height = detail::to_int(rows[r][1], where);
    it.width = detail::to_int(rows[r][2], where);
    it.chain_id = static_cast<ChainId>(detail::to_int(rows[r][3], where));
    it.sequence = static_cast<int>(detail::to_int(rows[r][4], where));
    if (it.width <= 0 || it.height <= 0) throw Error(ErrorCode::Parse, where + ": non-positive item size");
    if (!seen.emplace(std::pair{it.chain_id, it.sequence}, id).second)
      throw Error(ErrorCode::DuplicateSequence, where + ": duplicate sequence in stack");
    items.push_back(it);
  }
  return items;
}

inline std::vector<Item> parse_batch(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return parse_batch(in);
}

/// Defects rounded outward to integer rectangles. Overlaps are checked on the
/// raw values.
inline std::vector<Defect> parse_defects(std::istream& in, const Params& params) {
  std::vector<std::string> storage;
  const auto rows =
      detail::read_rows(in, storage, {"DEFECT_ID", "PLATE_ID", "X", "Y", "WIDTH", "HEIGHT"}, "defects");
  struct Raw {
    int plate;
    double x, y, w, h;
  };
  std::vector<Raw> raw;
  std::vector<Defect> out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string where = "defects line " + std::to_string(r + 2);
    detail::to_int(rows[r][0], where);
    Raw d{static_cast<int>(detail::to_int(rows[r][1], where)), detail::to_double(rows[r][2], where),
          detail::to_double(rows[r][3], where), detail::to_double(rows[r][4], where),
          detail::to_double(rows[r][5], where)};
    if (d.w <= 0 || d.h <= 0) throw Error(ErrorCode::Parse, where + ": non-positive defect size");
    Defect def;
    def.plate_index = d.plate;
    def.x = static_cast<Length>(std::floor(d.x));
    def.y = static_cast<Length>(std::floor(d.y));
    def.width = static_cast<Length>(std::ceil(d.x + d.w)) - def.x;
    def.height = static_cast<Length>(std::ceil(d.y + d.h)) - def.y;
    if (d.plate < 0 || d.plate >= params.plate_count || def.x < 0 || def.y < 0 ||
        def.right() > params.plate_width || def.top() > params.plate_height)
      throw Error(ErrorCode::OutOfPlate, where + ": defect outside of its plate");
    for (const auto& o : raw)
      if (o.plate == d.plate && o.x < d.x + d.w && d.x < o.x + o.w && o.y < d.y + d.h && d.y < o.y + o.h)
        throw Error(ErrorCode::DefectOverlap, where + ": defect overlaps another one on plate " +
                                                  std::to_string(d.plate));
    raw.push_back(d);
    out.push_back(def);
  }
  return out;
}

inline std::vector<Defect> parse_defects(const std::filesystem::path& path, const Params& params) {
  if (!std::filesystem::exists(path)) return {};
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return parse_defects(in, params);
}

/// Loads `<prefix>_batch.csv` and, when present, `<prefix>_defects.csv`.
inline Instance load_instance(const std::string& prefix, const Params& params = {}) {
  auto items = parse_batch(std::filesystem::path(prefix + "_batch.csv"));
  if (items.empty()) throw Error(ErrorCode::NoItems, prefix + ": batch has no items");
  auto defects = parse_defects(std::filesystem::path(prefix + "_defects.csv"), params);
  return Instance(params, std::move(items), std::move(defects));
}

inline void write_solution(const SolutionTree& tree, std::ostream& out) {
  out << "PLATE_ID;NODE_ID;X;Y;WIDTH;HEIGHT;TYPE;CUT;PARENT\n";
  for (const auto& n : tree.nodes) {
    out << n.plate_id << ';' << n.node_id << ';' << n.x << ';' << n.y << ';' << n.width << ';' << n.height
        << ';' << n.type << ';' << n.cut << ';';
    if (n.parent) out << *n.parent;
    out << '\n';
  }
}

inline void write_solution(const SolutionTree& tree, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_solution(tree, out);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

inline SolutionTree read_solution(std::istream& in) {
  std::vector<std::string> storage;
  const auto rows = detail::read_rows(
      in, storage, {"PLATE_ID", "NODE_ID", "X", "Y", "WIDTH", "HEIGHT", "TYPE", "CUT", "PARENT"}, "solution");
  SolutionTree tree;
  std::map<int, bool> ids;  // node id -> seen
  std::map<int, int> all_ids;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string where = "solution line " + std::to_string(r + 2);
    const int id = static_cast<int>(detail::to_int(rows[r][1], where));
    if (!all_ids.emplace(id, static_cast<int>(r)).second)
      throw Error(ErrorCode::DuplicateId, where + ": duplicate node id " + std::to_string(id));
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string where = "solution line " + std::to_string(r + 2);
    const auto& f = rows[r];
    TreeNode n;
    n.plate_id = static_cast<int>(detail::to_int(f[0], where));
    n.node_id = static_cast<int>(detail::to_int(f[1], where));
    n.x = detail::to_int(f[2], where);
    n.y = detail::to_int(f[3], where);
    n.width = detail::to_int(f[4], where);
    n.height = detail::to_int(f[5], where);
    n.type = static_cast<int>(detail::to_int(f[6], where));
    n.cut = static_cast<int>(detail::to_int(f[7], where));
    if (!detail::trim(f[8]).empty()) {
      const int parent = static_cast<int>(detail::to_int(f[8], where));
      const auto it = all_ids.find(parent);
      if (it == all_ids.end())
        throw Error(ErrorCode::OrphanNode, where + ": parent " + std::to_string(parent) + " does not exist");
      if (it->second >= static_cast<int>(r))
        throw Error(ErrorCode::Parse, where + ": parent " + std::to_string(parent) + " listed after its child");
      n.parent = parent;
    }
    tree.nodes.push_back(n);
  }
  return tree;
}

inline SolutionTree read_solution(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_solution(in);
}

namespace detail {

struct Box {
  Rect r;
  int type = node_type::kBranch;
  std::vector<Box> kids;
};

inline Box leaf(Rect r, int type) { return Box{r, type, {}}; }

// A node whose only child is a leaf covering it becomes that leaf.
inline void collapse(Box& b) {
  for (auto& k : b.kids) collapse(k);
  if (b.kids.size() == 1 && b.kids[0].kids.empty() && b.kids[0].r == b.r) {
    b.type = b.kids[0].type;
    b.kids.clear();
  }
}

inline void flatten(const Box& b, int plate, int cut, std::optional<int> parent, SolutionTree& out) {
  TreeNode n;
  n.node_id = static_cast<int>(out.nodes.size());
  n.plate_id = plate;
  n.x = b.r.x;
  n.y = b.r.y;
  n.width = b.r.width;
  n.height = b.r.height;
  n.type = b.kids.empty() ? b.type : node_type::kBranch;
  n.cut = cut;
  n.parent = parent;
  out.nodes.push_back(n);
  const int id = n.node_id;
  for (const auto& k : b.kids) flatten(k, plate, cut + 1, id, out);
}

}  // namespace detail

/// Replays the insertions from the root to `leaf` into a full cut tree.
inline SolutionTree build_solution_tree(const Node& leaf, const Instance& instance) {
  if (!leaf.complete || leaf.items_packed != static_cast<int>(instance.item_count()))
    throw Error(ErrorCode::Incomplete, "node does not pack every item");
  const auto& p = instance.params();
  const Length W = p.plate_width, H = p.plate_height;

  std::vector<const Insertion*> seq;
  for (const Node* n = &leaf; !n->is_root(); n = n->parent.get()) seq.push_back(&n->insertion);
  std::reverse(seq.begin(), seq.end());
  const Insertion& last = *seq.back();

  // Final right edge of each first-level sub-plate and top of each
  // second-level sub-plate, indexed by the insertion that opened them.
  const std::size_t m = seq.size();
  std::vector<Length> fls_right(m, 0), sls_top(m, 0);
  {
    std::size_t fls_open = 0, sls_open = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& ins = *seq[i];
      if (i > 0 && ins.depth <= 1) fls_right[fls_open] = ins.closed_x1;
      if (i > 0 && ins.depth <= 2) sls_top[sls_open] = ins.closed_y2;
      if (ins.depth <= 1) fls_open = i;
      if (ins.depth <= 2) sls_open = i;
    }
    fls_right[fls_open] = last.x1_curr;
    sls_top[sls_open] = last.y2_curr;
  }

  std::vector<detail::Box> plates;
  detail::Box* plate = nullptr;
  detail::Box* fls = nullptr;
  detail::Box* sls = nullptr;
  Length sls_bottom = 0;
  Length fls_left = 0;
  Length fls_end = 0;
  Length sls_end = 0;

  auto finish_sls = [&]() {
    if (!sls || sls->type == node_type::kWaste) return;
    const Length end = sls->r.right();
    if (!sls->kids.empty() && sls->kids.back().r.right() < end) {
      const Length x = sls->kids.back().r.right();
      sls->kids.push_back(detail::leaf({x, sls->r.y, end - x, sls->r.height}, node_type::kWaste));
    }
  };
  auto finish_fls = [&]() {
    finish_sls();
    if (!fls || fls->type == node_type::kWaste) return;
    const Length top = fls->kids.empty() ? 0 : fls->kids.back().r.top();
    if (top < H) fls->kids.push_back(detail::leaf({fls->r.x, top, fls->r.width, H - top}, node_type::kWaste));
  };
  auto finish_plate = [&](bool last_plate) {
    finish_fls();
    if (!plate) return;
    const Length right = plate->kids.empty() ? 0 : plate->kids.back().r.right();
    if (right < W)
      plate->kids.push_back(
          detail::leaf({right, 0, W - right, H}, last_plate ? node_type::kResidual : node_type::kWaste));
  };

  plates.reserve(static_cast<std::size_t>(last.bin) + 1);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& ins = *seq[i];
    if (ins.depth == 0) {
      finish_plate(false);
      plates.push_back(detail::Box{{0, 0, W, H}, node_type::kBranch, {}});
      plate = &plates.back();
      fls = sls = nullptr;
    }
    if (ins.depth <= 1) {
      if (ins.depth == 1) finish_fls();
      fls_left = ins.x1_prev;
      fls_end = fls_right[i];
      plate->kids.push_back(detail::Box{{fls_left, 0, fls_end - fls_left, H}, node_type::kBranch, {}});
      fls = &plate->kids.back();
      sls = nullptr;
      if (ins.kind == InsertionKind::WasteOnly) {
        fls->type = node_type::kWaste;
        continue;
      }
    }
    if (ins.depth <= 2) {
      if (ins.depth == 2) finish_sls();
      sls_bottom = ins.y2_prev;
      sls_end = sls_top[i];
      fls->kids.push_back(
          detail::Box{{fls_left, sls_bottom, fls_end - fls_left, sls_end - sls_bottom}, node_type::kBranch, {}});
      sls = &fls->kids.back();
      if (ins.kind == InsertionKind::WasteOnly) {
        sls->type = node_type::kWaste;
        continue;
      }
    }
    const Rect tls_rect{ins.x_left, sls_bottom, ins.x_right - ins.x_left, sls_end - sls_bottom};
    detail::Box tls{tls_rect, node_type::kBranch, {}};
    if (ins.kind == InsertionKind::WasteOnly) {
      tls.type = node_type::kWaste;
    } else {
      const Length w = tls_rect.width;
      if (ins.item_y > sls_bottom)
        tls.kids.push_back(detail::leaf({tls_rect.x, sls_bottom, w, ins.item_y - sls_bottom}, node_type::kWaste));
      tls.kids.push_back(detail::leaf({tls_rect.x, ins.item_y, w, ins.first.height}, ins.first.id));
      Length top = ins.item_y + ins.first.height;
      if (!ins.second.empty()) {
        tls.kids.push_back(detail::leaf({tls_rect.x, top, w, ins.second.height}, ins.second.id));
        top += ins.second.height;
      }
      if (top < tls_rect.top())
        tls.kids.push_back(detail::leaf({tls_rect.x, top, w, tls_rect.top() - top}, node_type::kWaste));
    }
    sls->kids.push_back(std::move(tls));
  }
  finish_plate(true);

  SolutionTree out;
  for (std::size_t b = 0; b < plates.size(); ++b) {
    auto& root = plates[b];
    for (auto& k : root.kids) detail::collapse(k);
    detail::flatten(root, static_cast<int>(b), 0, std::nullopt, out);
  }
  return out;
}

}  // namespace glasscut
