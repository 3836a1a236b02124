#include "seatplan/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "seatplan/error.hpp"

namespace seatplan {

namespace {
std::string ref(char prefix, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%03zu", prefix, i + 1);
  return buf;
}
}  // namespace

std::string ScenarioInstance::preference_ref(std::size_t i) { return ref('P', i); }
std::string ScenarioInstance::conflict_ref(std::size_t i) { return ref('C', i); }

std::vector<Constraint> ScenarioInstance::slots_of(const ResidentId& npc) const {
  std::vector<Constraint> out;
  for (const auto& p : preferences)
    if (p.owner == npc) out.emplace_back(p);
  for (const auto& c : conflicts)
    if (c.a == npc || c.b == npc) out.emplace_back(c);
  return out;
}

void validate_assignment(const ScenarioInstance& inst, const Assignment& asg) {
  std::set<std::string> party(inst.party.begin(), inst.party.end());
  for (const auto& npc : inst.party)
    if (!asg.count(npc)) throw AssignmentError("resident " + npc + " is not assigned a seat");
  std::map<std::string, std::string> taken;
  for (const auto& [npc, seat] : asg) {
    if (!party.count(npc)) throw AssignmentError("resident " + npc + " is not in the party");
    if (!inst.scene.seat_index(seat)) throw AssignmentError("resident " + npc + " is assigned unknown seat " + seat);
    auto [it, fresh] = taken.emplace(seat, npc);
    if (!fresh) throw AssignmentError("seat " + seat + " is assigned twice (" + it->second + " and " + npc + ")");
  }
}

nlohmann::json instance_to_json(const ScenarioInstance& inst) {
  nlohmann::json prefs = nlohmann::json::array(), conflicts = nlohmann::json::array();
  for (std::size_t i = 0; i < inst.preferences.size(); ++i) {
    auto j = preference_to_json(inst.preferences[i]);
    j["ref"] = ScenarioInstance::preference_ref(i);
    prefs.push_back(std::move(j));
  }
  for (std::size_t i = 0; i < inst.conflicts.size(); ++i) {
    auto j = conflict_to_json(inst.conflicts[i]);
    j["ref"] = ScenarioInstance::conflict_ref(i);
    conflicts.push_back(std::move(j));
  }
  return {{"schema_version", kInstanceSchemaVersion},
          {"id", inst.id},
          {"level", inst.level},
          {"seed", inst.seed},
          {"generator_version", inst.generator_version},
          {"scene", scene_to_json(inst.scene)},
          {"party", inst.party},
          {"cast", world_to_json(inst.cast)},
          {"preferences", prefs},
          {"conflicts", conflicts}};
}

ScenarioInstance instance_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != kInstanceSchemaVersion)
      throw ParseError("unsupported instance schema_version");
    ScenarioInstance inst;
    inst.id = j.at("id").get<std::string>();
    inst.level = j.at("level").get<int>();
    inst.seed = j.at("seed").get<std::uint64_t>();
    inst.generator_version = j.value("generator_version", "");
    inst.scene = scene_from_json(j.at("scene"));
    inst.party = j.at("party").get<std::vector<std::string>>();
    inst.cast = world_from_json(j.at("cast"));
    for (const auto& p : j.at("preferences")) inst.preferences.push_back(preference_from_json(p));
    for (const auto& c : j.at("conflicts")) inst.conflicts.push_back(conflict_from_json(c));
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("instance: ") + e.what());
  }
}

nlohmann::json ground_truth_to_json(const GroundTruth& gt) {
  return {{"schema_version", kInstanceSchemaVersion},
          {"instance_id", gt.instance_id},
          {"ground_truth", assignment_to_json(gt.assignment)}};
}

GroundTruth ground_truth_from_json(const nlohmann::json& j) {
  try {
    return {j.at("instance_id").get<std::string>(), assignment_from_json(j.at("ground_truth"))};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("ground truth: ") + e.what());
  }
}

nlohmann::json answer_to_json(const std::string& instance_id, const Assignment& asg) {
  return {{"schema_version", kInstanceSchemaVersion}, {"instance_id", instance_id}, {"assignment", assignment_to_json(asg)}};
}

Assignment answer_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("answer file must hold a JSON object");
  if (j.contains("assignment")) return assignment_from_json(j.at("assignment"));
  if (j.contains("ground_truth")) return assignment_from_json(j.at("ground_truth"));
  throw ParseError("answer file needs an \"assignment\" object");
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

ScenarioInstance load_instance(const std::filesystem::path& path) { return instance_from_json(read_json_file(path)); }
GroundTruth load_ground_truth(const std::filesystem::path& path) { return ground_truth_from_json(read_json_file(path)); }
Assignment load_answer(const std::filesystem::path& path) { return answer_from_json(read_json_file(path)); }

}  // namespace seatplan
