// glasscut: solve / validate / bench for glass cutting instances.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "glasscut/instance_io.hpp"
#include "glasscut/orchestrator.hpp"
#include "glasscut/validator.hpp"

namespace fs = std::filesystem;
using namespace glasscut;

namespace {

std::string instance_name(const std::string& prefix) { return fs::path(prefix).filename().string(); }

int run_solve(const std::string& prefix, const std::string& output, const SolveConfig& cfg) {
  const Instance instance = load_instance(prefix);
  const auto result = solve(instance, cfg);
  if (!result.best) {
    std::cerr << "no feasible solution found\n";
    return 1;
  }
  const auto tree = build_solution_tree(*result.best, instance);
  if (!output.empty()) write_solution(tree, fs::path(output));
  std::cout << instance_name(prefix) << ',' << result.waste << ',' << result.time_to_best << '\n';
  return 0;
}

int run_validate(const std::string& prefix, const std::string& solution) {
  const Instance instance = load_instance(prefix);
  const auto tree = read_solution(fs::path(solution));
  const auto report = validate(instance, tree);
  for (const auto& v : report.violations) {
    if (v.node_id >= 0) std::cout << "node " << v.node_id << ": ";
    std::cout << v.message << '\n';
  }
  if (!report.ok()) {
    std::cout << "infeasible (" << report.violations.size() << " violations)\n";
    return 1;
  }
  std::cout << "objective " << objective_of(instance, tree) << '\n';
  return 0;
}

int run_bench(const std::string& dir, const std::string& results, SolveConfig cfg,
              const std::vector<std::string>& algos) {
  std::set<std::string> prefixes;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    const std::string suffix = "_batch.csv";
    if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
      prefixes.insert((entry.path().parent_path() / name.substr(0, name.size() - suffix.size())).string());
  }
  std::ofstream csv;
  if (!results.empty()) {
    const bool fresh = !fs::exists(results);
    csv.open(results, std::ios::app);
    if (!csv) throw Error(ErrorCode::Io, "cannot write " + results);
    if (fresh) csv << "instance,algorithm,guide,growth,waste,time_to_best\n";
  }
  int status = 0;
  for (const auto& prefix : prefixes) {
    const Instance instance = load_instance(prefix);
    for (const auto& a : algos) {
      SolveConfig run = cfg;
      run.algorithm = parse_algorithm(a);
      const auto result = solve(instance, run);
      const bool single = run.threads <= 1;
      std::ostringstream row;
      row << instance_name(prefix) << ',' << result.algorithm << ',' << (single ? guide_name(run.guide) : "portfolio")
          << ',' << (single ? run.growth.str() : "portfolio") << ',';
      if (result.best) {
        const auto tree = build_solution_tree(*result.best, instance);
        if (!validate(instance, tree).ok()) status = 1;
        row << result.waste << ',' << result.time_to_best;
      } else {
        row << "NA,NA";
        status = 1;
      }
      std::cout << row.str() << '\n';
      if (csv) csv << row.str() << '\n' << std::flush;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Glass cutting solver"};
  app.require_subcommand(1);

  SolveConfig cfg;
  std::string prefix, output, guide = "p", growth = "1.5", algorithm = "auto";
  bool no_symmetry = false;
  long seed = 0;
  auto* solve_cmd = app.add_subcommand("solve", "Solve an instance");
  solve_cmd->add_option("-p,--prefix", prefix, "Instance prefix (<prefix>_batch.csv)")->required();
  solve_cmd->add_option("-t,--time-limit", cfg.time_limit, "Time limit in seconds");
  solve_cmd->add_option("-o,--output", output, "Solution CSV to write");
  solve_cmd->add_option("--threads", cfg.threads, "Worker count");
  solve_cmd->add_option("--guide", guide, "Guide for single-worker runs")->check(CLI::IsMember({"w", "p", "a"}));
  solve_cmd->add_option("--growth", growth, "Fringe growth factor for single-worker runs");
  solve_cmd->add_option("--queue-size-init", cfg.queue_size_init, "Initial fringe size / beam width");
  solve_cmd->add_flag("--no-symmetry", no_symmetry, "Disable symmetry breaking");
  solve_cmd->add_option("--algorithm", algorithm, "auto|mbastar|astar|ibs|dpastar")
      ->check(CLI::IsMember({"auto", "mbastar", "astar", "ibs", "dpastar"}));
  solve_cmd->add_option("--seed", seed, "Ignored");

  std::string solution;
  auto* validate_cmd = app.add_subcommand("validate", "Check a solution file");
  validate_cmd->add_option("-p,--prefix", prefix, "Instance prefix")->required();
  validate_cmd->add_option("-s,--solution", solution, "Solution CSV")->required();

  std::string dir, results;
  std::vector<std::string> algos{"auto"};
  auto* bench_cmd = app.add_subcommand("bench", "Solve every instance of a directory");
  bench_cmd->add_option("--dir", dir, "Directory with <name>_batch.csv files")->required();
  bench_cmd->add_option("-t,--time-limit", cfg.time_limit, "Time limit per run in seconds");
  bench_cmd->add_option("--algos", algos, "Algorithms to run");
  bench_cmd->add_option("--results", results, "Results CSV to append to");
  bench_cmd->add_option("--threads", cfg.threads, "Worker count");
  bench_cmd->add_option("--guide", guide, "Guide for single-worker runs")->check(CLI::IsMember({"w", "p", "a"}));
  bench_cmd->add_option("--growth", growth, "Fringe growth factor for single-worker runs");
  bench_cmd->add_flag("--no-symmetry", no_symmetry, "Disable symmetry breaking");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    cfg.guide = parse_guide(guide);
    cfg.growth = Growth::parse(growth);
    cfg.symmetry = !no_symmetry;
    cfg.algorithm = parse_algorithm(algorithm);
    if (*solve_cmd) return run_solve(prefix, output, cfg);
    if (*validate_cmd) return run_validate(prefix, solution);
    if (*bench_cmd) return run_bench(dir, results, cfg, algos);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::InvalidParams ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
