#pragma once

// Top-level solve: DPA* for instances with at most two chains, otherwise a
// portfolio of restarting MBA* workers sharing one incumbent.

#include <algorithm>
#include <atomic>
#include <string>
#include <thread>
#include <vector>

#include "glasscut/branching.hpp"
#include "glasscut/search.hpp"

namespace glasscut {

enum class Algorithm { Auto, MbaStar, AStar, Ibs, DpaStar };

inline Algorithm parse_algorithm(const std::string& s) {
  if (s == "auto") return Algorithm::Auto;
  if (s == "mbastar") return Algorithm::MbaStar;
  if (s == "astar") return Algorithm::AStar;
  if (s == "ibs") return Algorithm::Ibs;
  if (s == "dpastar") return Algorithm::DpaStar;
  throw Error(ErrorCode::InvalidParams, "unknown algorithm '" + s + "'");
}

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Auto: return "auto";
    case Algorithm::MbaStar: return "mbastar";
    case Algorithm::AStar: return "astar";
    case Algorithm::Ibs: return "ibs";
    case Algorithm::DpaStar: return "dpastar";
  }
  return "?";
}

struct Worker {
  GuideKind guide;
  Growth growth;
};

/// The four workers of the default portfolio.
inline std::vector<Worker> default_portfolio() {
  return {{GuideKind::WastePercentage, {133, 100}},
          {GuideKind::WastePercentage, {3, 2}},
          {GuideKind::WastePercentageOverMeanItemArea, {133, 100}},
          {GuideKind::WastePercentageOverMeanItemArea, {3, 2}}};
}

struct SolveConfig {
  double time_limit = 180.0;
  int threads = 4;
  GuideKind guide = GuideKind::WastePercentage;  // single-worker runs
  Growth growth{3, 2};                           // single-worker runs
  std::size_t queue_size_init = 2;
  bool symmetry = true;
  Algorithm algorithm = Algorithm::Auto;
  std::size_t memory_cap = 0;
};

struct SolveResult {
  NodePtr best;  // null when nothing was found
  Area waste = 0;
  double time_to_best = 0.0;
  std::string algorithm;  // what actually produced the result
  bool proved = false;
};

namespace detail {

inline void run_worker(const BranchingScheme& scheme, Algorithm algo, const Worker& w, const SolveConfig& cfg,
                       const SearchOptions& base, Incumbent& incumbent, bool& proved) {
  SearchOptions opts = base;
  opts.guide = w.guide;
  switch (algo) {
    case Algorithm::AStar:
      proved = astar(scheme, opts, incumbent).status == SearchStatus::Exhausted;
      break;
    case Algorithm::Ibs:
      proved = iterative_beam_search(scheme, cfg.queue_size_init, opts, incumbent).proved;
      break;
    default:
      proved = restarting_mba_star(scheme, w.growth, cfg.queue_size_init, opts, incumbent).proved;
      break;
  }
}

}  // namespace detail

inline SolveResult solve(const Instance& instance, const SolveConfig& cfg) {
  const auto start = Clock::now();
  const auto deadline = deadline_after(cfg.time_limit);
  Incumbent incumbent(start);
  BranchingScheme scheme(instance, BranchingOptions{cfg.symmetry, true});
  SearchOptions base;
  base.deadline = deadline;
  base.memory_cap = cfg.memory_cap;

  SolveResult result;
  Algorithm algo = cfg.algorithm;
  if (algo == Algorithm::Auto) algo = instance.chain_count() <= 2 ? Algorithm::DpaStar : Algorithm::MbaStar;

  if (algo == Algorithm::DpaStar) {
    try {
      const auto r = dpa_star(scheme, base, incumbent);
      result.algorithm = "dpastar";
      if (r.status == SearchStatus::Exhausted) result.proved = true;
      if (r.status != SearchStatus::Memory) algo = Algorithm::DpaStar;
      else algo = Algorithm::MbaStar;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ChainCount || cfg.algorithm == Algorithm::DpaStar) throw;
      algo = Algorithm::MbaStar;
    }
  }

  if (algo != Algorithm::DpaStar) {
    result.algorithm = algorithm_name(algo);
    std::vector<Worker> workers;
    if (cfg.threads <= 1) {
      workers.push_back({cfg.guide, cfg.growth});
    } else {
      const auto all = default_portfolio();
      for (int i = 0; i < cfg.threads; ++i) workers.push_back(all[static_cast<std::size_t>(i) % all.size()]);
    }
    if (workers.size() == 1) {
      bool proved = false;
      detail::run_worker(scheme, algo, workers[0], cfg, base, incumbent, proved);
      result.proved = proved;
    } else {
      std::atomic<bool> stop{false};
      SearchOptions opts = base;
      opts.stop = &stop;
      std::vector<char> proved(workers.size(), 0);
      std::vector<std::thread> pool;
      for (std::size_t i = 0; i < workers.size(); ++i)
        pool.emplace_back([&, i] {
          bool p = false;
          detail::run_worker(scheme, algo, workers[i], cfg, opts, incumbent, p);
          proved[i] = p;
          // A complete exploration settles the question for everyone.
          if (p) stop.store(true);
        });
      for (auto& t : pool) t.join();
      result.proved = std::any_of(proved.begin(), proved.end(), [](char c) { return c != 0; });
    }
  }

  result.best = incumbent.best();
  if (result.best) {
    result.waste = waste(*result.best);
    result.time_to_best = incumbent.time_to_best();
  }
  return result;
}

}  // namespace glasscut
