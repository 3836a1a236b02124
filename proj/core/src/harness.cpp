#include "seatplan/harness.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "seatplan/error.hpp"
#include "seatplan/protocol.hpp"
#include "seatplan/solvers.hpp"
#include "seatplan/svg.hpp"

#ifndef SEATPLAN_VERSION
#define SEATPLAN_VERSION "0.0.0"
#endif

namespace seatplan {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

int parse_level(std::string_view s, std::string_view spec) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError("level spec '" + std::string(spec) + "': '" + std::string(s) + "' is not a number");
  if (v < 1 || v > kLevelCount)
    throw ParseError("level spec '" + std::string(spec) + "': level " + std::to_string(v) + " outside 1..70");
  return v;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string csv_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::vector<int> parse_level_spec(std::string_view spec) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    std::size_t end = spec.find(',', start);
    if (end == std::string_view::npos) end = spec.size();
    std::string_view part = spec.substr(start, end - start);
    if (part.empty()) throw ParseError("level spec '" + std::string(spec) + "' has an empty item");
    if (auto dots = part.find(".."); dots != std::string_view::npos) {
      const int lo = parse_level(part.substr(0, dots), spec);
      const int hi = parse_level(part.substr(dots + 2), spec);
      if (lo > hi) throw ParseError("level spec '" + std::string(spec) + "': empty range");
      for (int l = lo; l <= hi; ++l) out.push_back(l);
    } else {
      out.push_back(parse_level(part, spec));
    }
    start = end + 1;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string tool_version() { return SEATPLAN_VERSION; }

std::string config_digest(const Config& cfg) {
  const std::string s = config_to_json(cfg).dump();
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(s.data(), s.size())));
  return buf;
}

nlohmann::json run_manifest_to_json(const RunManifest& m) {
  return {{"schema_version", 1},      {"command", m.command},   {"argv", m.argv},
          {"config_digest", m.config_digest}, {"seeds", m.seeds}, {"inputs", m.inputs},
          {"outputs", m.outputs},     {"tool_version", m.tool_version}, {"wall_ms", m.wall_ms}};
}

RunManifest run_manifest_from_json(const nlohmann::json& j) {
  try {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.config_digest = j.at("config_digest").get<std::string>();
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    m.inputs = j.at("inputs").get<std::vector<std::string>>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.wall_ms = j.at("wall_ms").get<double>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("run manifest: ") + e.what());
  }
}

RunManifest cmd_gen(const GenOptions& opt) {
  const auto t0 = Clock::now();
  if (opt.levels.empty()) throw std::invalid_argument("no levels requested");
  if (opt.per_level < 1) throw std::invalid_argument("per-level count must be positive");
  const World world = load_world(opt.world_path);
  fs::create_directories(opt.out_dir / "instances");
  fs::create_directories(opt.out_dir / "ground_truth");

  RunManifest run;
  run.command = "gen";
  run.config_digest = config_digest(opt.config);
  run.seeds = {opt.seed};
  run.inputs = {opt.world_path.string()};
  run.tool_version = tool_version();
  const auto manifest = generate_dataset(opt.levels, opt.per_level, world, opt.seed, opt.config, [&](const Generated& g) {
    const auto inst_rel = "instances/" + g.instance.id + ".json";
    const auto gt_rel = "ground_truth/" + g.instance.id + ".json";
    write_json_file(opt.out_dir / inst_rel, instance_to_json(g.instance));
    write_json_file(opt.out_dir / gt_rel, ground_truth_to_json(g.truth));
    run.outputs.push_back(inst_rel);
    run.outputs.push_back(gt_rel);
  });
  write_json_file(opt.out_dir / "manifest.json", manifest_to_json(manifest));
  run.outputs.push_back("manifest.json");
  run.outputs.push_back("run_manifest.json");
  run.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  write_json_file(opt.out_dir / "run_manifest.json", run_manifest_to_json(run));
  return run;
}

ScoreReport cmd_eval(const EvalOptions& opt) {
  const ScenarioInstance inst = load_instance(opt.instance);
  const Assignment asg = load_answer(opt.answer);
  const ScoreReport report = score_instance(inst, asg, opt.mode, opt.config.spatial);
  if (opt.report_out) write_json_file(*opt.report_out, score_report_to_json(report));
  if (opt.csv_out) write_text(*opt.csv_out, score_csv_header() + "\n" + score_csv_row(report) + "\n");
  return report;
}

SolveOutput cmd_solve(const SolveOptions& opt) {
  const auto t0 = Clock::now();
  const ScenarioInstance inst = load_instance(opt.instance);
  const Config& cfg = opt.config;
  SolveOutput out;
  SolverTrace trace;
  Rng rng(opt.seed);

  if (opt.solver == "exact") {
    auto r = solve_exact(SeatingModel::ground_truth(inst, cfg.spatial), cfg.solver.exact_node_budget);
    out.assignment = r.assignment;
    trace = r.trace;
  } else if (opt.solver == "greedy" || opt.solver == "greedy-blind") {
    const auto model = SeatingModel::ground_truth(inst, cfg.spatial);
    out.assignment = solve_greedy(model, rng, opt.solver == "greedy");
    trace.solver = opt.solver;
    const double s = model.score(model.from_assignment(out.assignment));
    trace.steps.push_back({0, assignment_digest(out.assignment), s, s, 0});
  } else if (opt.solver == "anneal") {
    auto r = solve_local_search(SeatingModel::ground_truth(inst, cfg.spatial), cfg.solver.anneal, rng);
    out.assignment = r.assignment;
    trace = r.trace;
  } else if (opt.solver == "reflect") {
    RepairAgent agent(SeatingModel::ground_truth(inst, cfg.spatial));
    trace = reflect_loop(agent, evaluator_judge(inst, cfg.spatial), opt.max_iters, &out.assignment);
    if (trace.steps.empty()) throw AssignmentError("reflect loop produced no valid proposal");
  } else if (opt.solver == "oracle" || opt.solver == "repair") {
    Config c = cfg;
    c.solver.reflect_max_iters = opt.max_iters;
    auto run = opt.solver == "oracle" ? run_oracle_agent(inst, opt.mode, c) : run_repair_agent(inst, opt.mode, c);
    out.assignment = run.assignment;
    trace = run.trace;
  } else {
    throw std::invalid_argument("unknown solver '" + opt.solver +
                                "' (expected exact, greedy, greedy-blind, anneal, reflect, oracle or repair)");
  }

  fs::create_directories(opt.out_dir);
  out.answer_path = opt.out_dir / (inst.id + ".answer.json");
  out.trace_path = opt.out_dir / (inst.id + "." + opt.solver + ".trace.json");
  write_json_file(out.answer_path, answer_to_json(inst.id, out.assignment));
  auto tj = trace_to_json(trace);
  tj["wall_ms"] = 0.0;  // keeps trace files reproducible; timing goes to the run manifest
  write_json_file(out.trace_path, tj);

  out.manifest.command = "solve";
  out.manifest.config_digest = config_digest(cfg);
  out.manifest.seeds = {opt.seed};
  out.manifest.inputs = {opt.instance.string()};
  out.manifest.outputs = {out.answer_path.string(), out.trace_path.string()};
  out.manifest.tool_version = tool_version();
  out.manifest.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  return out;
}

DatasetManifest load_dataset_manifest(const fs::path& dir) {
  if (fs::is_regular_file(dir / "manifest.json")) return manifest_from_json(read_json_file(dir / "manifest.json"));
  DatasetManifest m;
  const fs::path root = dir / "instances";
  if (!fs::is_directory(root)) return m;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(root))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::set<int> levels;
  for (const auto& f : files) {
    const auto inst = load_instance(f);
    ManifestEntry e;
    e.id = inst.id;
    e.level = inst.level;
    e.seed = inst.seed;
    e.template_id = inst.scene.template_id;
    e.npc_count = static_cast<int>(inst.party.size());
    e.preference_count = static_cast<int>(inst.preferences.size());
    e.conflict_count = static_cast<int>(inst.conflicts.size());
    e.profile = instance_profile(inst);
    m.generator_version = inst.generator_version;
    levels.insert(inst.level);
    m.entries.push_back(std::move(e));
  }
  m.levels.assign(levels.begin(), levels.end());
  return m;
}

StatsOutput cmd_stats(const StatsOptions& opt) {
  const DatasetManifest m = load_dataset_manifest(opt.dataset);
  StatsOutput out;
  out.kind_counts = m.kind_counts();
  for (const auto& [_, n] : out.kind_counts) out.total_constraints += n;

  std::string kinds = "kind,count\n";
  for (const auto& [k, n] : out.kind_counts) kinds += k + "," + std::to_string(n) + "\n";

  std::map<int, std::array<long, 4>> per_level;  // instances, npcs, preferences, conflicts
  for (const auto& e : m.entries) {
    auto& row = per_level[e.level];
    ++row[0];
    row[1] += e.npc_count;
    row[2] += e.preference_count;
    row[3] += e.conflict_count;
  }
  std::string levels = "level,instances,npcs,preferences,conflicts\n";
  for (const auto& [l, r] : per_level)
    levels += std::to_string(l) + "," + std::to_string(r[0]) + "," + std::to_string(r[1]) + "," +
              std::to_string(r[2]) + "," + std::to_string(r[3]) + "\n";

  std::string joint = "kind,template,count\n";
  for (const auto& [key, n] : m.joint_profile()) {
    const auto bar = key.find('|');
    joint += key.substr(0, bar) + "," + key.substr(bar + 1) + "," + std::to_string(n) + "\n";
  }

  fs::create_directories(opt.out_dir);
  for (const auto& [name, text] : {std::pair{"kind_counts.csv", &kinds}, std::pair{"level_histogram.csv", &levels},
                                   std::pair{"joint_profile.csv", &joint}}) {
    write_text(opt.out_dir / name, *text);
    out.files.push_back(opt.out_dir / name);
  }
  if (opt.compare) {
    const DatasetManifest other = load_dataset_manifest(*opt.compare);
    out.tv = tv_distance(m.joint_profile(), other.joint_profile());
    write_text(opt.out_dir / "tv_distance.txt", csv_double(*out.tv) + "\n");
    out.files.push_back(opt.out_dir / "tv_distance.txt");
  }
  return out;
}

void cmd_render(const fs::path& instance, const std::optional<fs::path>& answer, const fs::path& out,
                const Config& cfg) {
  const ScenarioInstance inst = load_instance(instance);
  std::optional<Assignment> asg;
  if (answer) {
    asg = load_answer(*answer);
    validate_assignment(inst, *asg);
  }
  write_text(out, render_svg(inst, asg ? &*asg : nullptr, cfg.spatial));
}

}  // namespace seatplan
