#pragma once

// Independent feasibility check of a cut tree against an instance, plus the
// objective (total waste with the residual of the last plate for free).

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "glasscut/core.hpp"
#include "glasscut/instance_io.hpp"

namespace glasscut {

struct Violation {
  int node_id = -1;  // -1 when not tied to a node
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(const std::string& text) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.message.find(text) != std::string::npos; });
  }
};

inline ValidationReport validate(const Instance& instance, const SolutionTree& tree) {
  ValidationReport report;
  auto fail = [&](int id, std::string msg) { report.violations.push_back({id, std::move(msg)}); };
  const auto& p = instance.params();
  const auto& nodes = tree.nodes;

  std::map<int, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (!index.emplace(nodes[i].node_id, i).second) fail(nodes[i].node_id, "duplicate node id");

  std::vector<std::vector<std::size_t>> kids(nodes.size());
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (!n.parent) {
      roots.push_back(i);
      continue;
    }
    const auto it = index.find(*n.parent);
    if (it == index.end() || it->second >= i) {
      fail(n.node_id, "parent missing or listed after child");
      continue;
    }
    kids[it->second].push_back(i);
  }

  // Plates: one root each, ids 0..n-1 in order.
  for (std::size_t r = 0; r < roots.size(); ++r) {
    const auto& n = nodes[roots[r]];
    if (n.plate_id != static_cast<int>(r)) fail(n.node_id, "plates out of order or skipped");
    if (n.cut != 0) fail(n.node_id, "plate root must have cut level 0");
    if (n.x != 0 || n.y != 0 || n.width != p.plate_width || n.height != p.plate_height)
      fail(n.node_id, "plate root does not cover the plate");
  }
  if (roots.empty()) fail(-1, "no plate used");
  if (static_cast<int>(roots.size()) > p.plate_count) fail(-1, "more plates than available");

  std::vector<int> item_seen(instance.item_count(), 0);
  std::vector<int> order;  // extraction order of items
  int residuals = 0;

  // Depth-first in tree order (children sorted by position) for precedence.
  std::vector<std::size_t> stack;
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) stack.push_back(*it);
  std::vector<bool> visited(nodes.size(), false);
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    if (visited[i]) continue;
    visited[i] = true;
    const auto& n = nodes[i];
    const auto defects = instance.defects(n.plate_id);
    if (n.cut > 4) fail(n.node_id, "stage > 4");
    if (n.width <= 0 || n.height <= 0) fail(n.node_id, "non-positive size");

    auto& ch = kids[i];
    const bool split_x = n.cut % 2 == 0;
    std::sort(ch.begin(), ch.end(), [&](std::size_t a, std::size_t b) {
      return split_x ? nodes[a].x < nodes[b].x : nodes[a].y < nodes[b].y;
    });

    if (!ch.empty()) {
      if (n.type != node_type::kBranch) fail(n.node_id, "leaf node has children");
      if (n.cut == 3 && ch.size() > 2) fail(n.node_id, "multiple 4-cuts");
      Length pos = split_x ? n.x : n.y;
      for (std::size_t k = 0; k < ch.size(); ++k) {
        const auto& c = nodes[ch[k]];
        if (c.plate_id != n.plate_id) fail(c.node_id, "plate id differs from parent");
        if (c.cut != n.cut + 1) fail(c.node_id, "cut level must be parent's plus one");
        const bool aligned = split_x ? (c.x == pos && c.y == n.y && c.height == n.height)
                                     : (c.y == pos && c.x == n.x && c.width == n.width);
        if (!aligned) fail(c.node_id, "children do not tile their parent");
        if (k > 0) {
          const bool crosses = split_x ? vertical_cut_crosses(defects, c.x, n.y, n.top())
                                       : horizontal_cut_crosses(defects, c.y, n.x, n.right());
          if (crosses) fail(c.node_id, "cut crosses a defect");
        }
        pos = split_x ? c.x + c.width : c.y + c.height;
      }
      if (pos != (split_x ? n.x + n.width : n.y + n.height)) fail(n.node_id, "children do not tile their parent");
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    } else if (n.type == node_type::kBranch) {
      fail(n.node_id, "branch node without children");
    }

    const bool is_waste = n.type == node_type::kWaste;
    const bool is_residual = n.type == node_type::kResidual;
    if (n.cut == 1 && !is_waste && !is_residual && (n.width < p.min1 || n.width > p.max1))
      fail(n.node_id, "first-level width out of bounds");
    if (n.cut == 2 && !is_waste && n.height < p.min2) fail(n.node_id, "second-level height below minimum");
    if (is_waste && (n.width < p.min_waste || n.height < p.min_waste)) fail(n.node_id, "minimum waste");
    if (is_residual) {
      ++residuals;
      const bool last_plate = !roots.empty() && n.plate_id == nodes[roots.back()].plate_id;
      const bool last_child =
          n.parent && index.count(*n.parent) && !nodes[index.at(*n.parent)].parent &&
          n.right() == p.plate_width && n.y == 0 && n.height == p.plate_height;
      if (!last_plate || !last_child || n.cut != 1) fail(n.node_id, "residual not last/rightmost");
      if (n.width < p.min_waste) fail(n.node_id, "residual narrower than minimum waste");
    }
    if (n.type >= 0) {
      if (static_cast<std::size_t>(n.type) >= instance.item_count()) {
        fail(n.node_id, "unknown item id");
      } else {
        const auto& it = instance.item(n.type);
        ++item_seen[static_cast<std::size_t>(n.type)];
        order.push_back(n.type);
        const bool dims = (n.width == it.width && n.height == it.height) ||
                          (n.width == it.height && n.height == it.width);
        if (!dims) fail(n.node_id, "wrong item dimensions");
        if (rect_hits_defect(defects, n.rect())) fail(n.node_id, "item overlaps a defect");
      }
    } else if (n.type < node_type::kResidual) {
      fail(n.node_id, "unknown node type");
    }
  }
  if (residuals > 1) fail(-1, "more than one residual");

  for (std::size_t i = 0; i < item_seen.size(); ++i) {
    if (item_seen[i] == 0) fail(-1, "missing item " + std::to_string(i));
    if (item_seen[i] > 1) fail(-1, "duplicated item " + std::to_string(i));
  }
  std::vector<int> next_rank(instance.chain_count(), 0);
  for (int id : order) {
    const auto& it = instance.item(id);
    auto& expected = next_rank[static_cast<std::size_t>(it.chain_id)];
    if (it.chain_rank < expected) continue;  // duplicate, reported above
    if (it.chain_rank != expected) {
      fail(-1, "precedence order violated at item " + std::to_string(id));
      expected = it.chain_rank + 1;
    } else {
      ++expected;
    }
  }
  return report;
}

/// Sum of waste-leaf areas; equals the objective on feasible trees.
inline Area waste_leaf_area(const SolutionTree& tree) {
  Area total = 0;
  for (const auto& n : tree.nodes)
    if (n.type == node_type::kWaste) total += n.rect().area();
  return total;
}

/// n*H*W - H*(W - w) - sum of item areas, w being the left edge of the
/// residual of the last plate (W if none).
inline Area objective_of(const Instance& instance, const SolutionTree& tree) {
  const auto report = validate(instance, tree);
  if (!report.ok()) throw Error(ErrorCode::Infeasible, report.violations.front().message);
  const auto& p = instance.params();
  int plates = 0;
  Length residual = 0;
  for (const auto& n : tree.nodes) {
    if (!n.parent) ++plates;
    if (n.type == node_type::kResidual) residual = n.width;
  }
  return static_cast<Area>(plates) * p.plate_area() - p.plate_height * residual - instance.total_item_area();
}

}  // namespace glasscut
