#include <atomic>
#include <csignal>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "seatplan/error.hpp"
#include "seatplan/harness.hpp"
#include "seatplan/protocol.hpp"
#include "serve.hpp"

#ifndef SEATPLAN_DATA_DIR
#define SEATPLAN_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace seatplan;

namespace {

std::atomic<bool> g_stop{false};

Config read_config(const std::string& path) { return path.empty() ? Config{} : load_config(path); }

int run(int argc, char** argv);

// Reruns the command recorded in a run manifest.
int replay(const fs::path& manifest_path) {
  const auto m = run_manifest_from_json(read_json_file(manifest_path));
  std::vector<std::string> args = {"seatplan"};
  args.insert(args.end(), m.argv.begin(), m.argv.end());
  std::vector<char*> ptrs;
  for (auto& a : args) ptrs.push_back(a.data());
  return run(static_cast<int>(ptrs.size()), ptrs.data());
}

int run(int argc, char** argv) {
  CLI::App app{"Seating-puzzle generator, evaluator and solver suite"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());
  std::vector<std::string> recorded(argv + 1, argv + argc);

  std::string config_path;
  std::string world_path = std::string(SEATPLAN_DATA_DIR) + "/world.json";

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a dataset");
  std::string levels = "1..70";
  int per_level = 1;
  std::uint64_t seed = 0;
  std::string out_dir;
  gen->add_option("--levels", levels, "Level spec such as 1..70 or 1,5,9..12")->capture_default_str();
  gen->add_option("--per-level", per_level, "Instances per level")->capture_default_str();
  gen->add_option("--seed", seed, "Base seed")->capture_default_str();
  gen->add_option("--out", out_dir, "Output directory")->required();
  gen->add_option("--world", world_path, "World file")->capture_default_str();
  gen->add_option("--config", config_path, "Config file");

  // eval
  auto* eval = app.add_subcommand("eval", "Score an answer file");
  std::string instance, answer, report_out, csv_out, category_mode = "coarse";
  eval->add_option("instance", instance, "Instance file")->required();
  eval->add_option("answer", answer, "Answer or ground-truth file")->required();
  eval->add_option("--report", report_out, "Write the score report here");
  eval->add_option("--csv", csv_out, "Write a CSV header and row here");
  eval->add_option("--category-mode", category_mode, "coarse or fine")->capture_default_str();
  eval->add_option("--config", config_path, "Config file");

  // solve
  auto* solve = app.add_subcommand("solve", "Solve an instance");
  std::string solver = "exact", mode = "gt";
  int max_iters = 10;
  solve->add_option("instance", instance, "Instance file")->required();
  solve->add_option("--solver", solver, "exact, greedy, greedy-blind, anneal, reflect, oracle or repair")
      ->capture_default_str();
  solve->add_option("--seed", seed, "Seed")->capture_default_str();
  solve->add_option("--max-iters", max_iters, "Reflection iterations")->capture_default_str();
  solve->add_option("--mode", mode, "Perception mode for agents: observed or gt")->capture_default_str();
  solve->add_option("--out", out_dir, "Output directory")->required();
  solve->add_option("--config", config_path, "Config file");

  // stats
  auto* stats = app.add_subcommand("stats", "Frequency tables of a dataset");
  std::string dataset, compare;
  stats->add_option("dataset", dataset, "Dataset directory")->required();
  stats->add_option("--out", out_dir, "Output directory")->required();
  stats->add_option("--compare", compare, "Second dataset for a TV distance");

  // render
  auto* render = app.add_subcommand("render", "Render an instance to SVG");
  std::string svg_out;
  render->add_option("instance", instance, "Instance file")->required();
  render->add_option("--answer", answer, "Answer file to draw in");
  render->add_option("--out", svg_out, "SVG file")->required();
  render->add_option("--config", config_path, "Config file");

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP API and console");
  int port = 8080;
  std::string data_dir, static_dir;
  bool strict_human = false;
  serve->add_option("--port", port, "Port")->capture_default_str();
  serve->add_option("--data", data_dir, "Dataset directory")->required();
  serve->add_option("--static", static_dir, "Console assets directory");
  serve->add_flag("--strict-human", strict_human, "Withhold reflection feedback");
  serve->add_option("--config", config_path, "Config file");

  // protocol
  auto* proto = app.add_subcommand("protocol", "Agent protocol over stdio or a Unix socket");
  std::string socket_path, journal_dir;
  proto->add_option("--data", data_dir, "Dataset directory")->required();
  proto->add_option("--socket", socket_path, "Listen on this Unix socket instead of stdio");
  proto->add_option("--journal", journal_dir, "Journal directory for session resume");
  proto->add_option("--config", config_path, "Config file");

  // replay
  auto* rerun = app.add_subcommand("replay", "Rerun the command of a run manifest");
  std::string manifest_path;
  rerun->add_option("manifest", manifest_path, "run_manifest.json")->required();

  // validate-world
  auto* vworld = app.add_subcommand("validate-world", "Check a world file");
  vworld->add_option("world", world_path, "World file")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (*gen) {
    GenOptions o{parse_level_spec(levels), per_level, seed, out_dir, world_path, read_config(config_path)};
    auto m = cmd_gen(o);
    // The recorded argv reruns into the same directory.
    m.argv = recorded;
    write_json_file(fs::path(out_dir) / "run_manifest.json", run_manifest_to_json(m));
    std::printf("generated %zu instances in %s (%.0f ms)\n", (m.outputs.size() - 2) / 2, out_dir.c_str(), m.wall_ms);
  } else if (*eval) {
    EvalOptions o{instance, answer, {}, {}, category_mode_from_string(category_mode), read_config(config_path)};
    if (!report_out.empty()) o.report_out = report_out;
    if (!csv_out.empty()) o.csv_out = csv_out;
    const auto r = cmd_eval(o);
    std::printf("%s scaled_score %.6f fully_satisfied %s\n", r.instance_id.c_str(), r.scaled_score,
                r.fully_satisfied ? "true" : "false");
  } else if (*solve) {
    SolveOptions o{instance, solver, seed, max_iters, perception_mode_from_string(mode), out_dir,
                   read_config(config_path)};
    auto r = cmd_solve(o);
    r.manifest.argv = recorded;
    write_json_file(fs::path(out_dir) / "run_manifest.json", run_manifest_to_json(r.manifest));
    std::printf("wrote %s and %s\n", r.answer_path.c_str(), r.trace_path.c_str());
  } else if (*stats) {
    StatsOptions o{dataset, out_dir, {}};
    if (!compare.empty()) o.compare = compare;
    const auto r = cmd_stats(o);
    std::printf("%zu kinds, %ld constraints\n", r.kind_counts.size(), r.total_constraints);
    if (r.tv) std::printf("tv_distance %.6f\n", *r.tv);
  } else if (*render) {
    std::optional<fs::path> a;
    if (!answer.empty()) a = answer;
    cmd_render(instance, a, svg_out, read_config(config_path));
  } else if (*serve) {
    ServeOptions o{data_dir, {}, read_config(config_path), strict_human};
    if (!static_dir.empty()) o.static_dir = static_dir;
    std::fprintf(stderr, "serving on http://127.0.0.1:%d\n", port);
    run_http_server(o, port);
  } else if (*proto) {
    auto catalog = std::make_shared<InstanceCatalog>();
    catalog->load_dir(data_dir);
    ServerOptions so{read_config(config_path).spatial, {}};
    if (!journal_dir.empty()) so.journal_dir = journal_dir;
    Server server(catalog, so);
    if (socket_path.empty()) {
      serve_stream(server, std::cin, std::cout);
    } else {
      std::signal(SIGINT, [](int) { g_stop = true; });
      std::signal(SIGTERM, [](int) { g_stop = true; });
      serve_unix_socket(server, socket_path, g_stop);
    }
  } else if (*rerun) {
    return replay(manifest_path);
  } else if (*vworld) {
    const auto report = validate_world(world_from_json(read_json_file(world_path)));
    for (const auto& v : report.violations) std::printf("%s: %s\n", v.rule.c_str(), v.message.c_str());
    if (!report.ok()) return 1;
    std::printf("ok\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "seatplan: %s\n", e.what());
    return 1;
  }
}
