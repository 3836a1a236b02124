#pragma once

// Template-based NPC utterances: rendering constraints as sentences and
// parsing them back.

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "seatplan/constraints.hpp"
#include "seatplan/rng.hpp"
#include "seatplan/world.hpp"

namespace seatplan {

/// Sentence templates per constraint kind. Slots: {adv} strength adverb,
/// {hand} left/right, {other} the other party of a conflict, {names} the
/// party members holding the wanted relation (informative only).
struct UtterancePack {
  std::string locale = "en";
  std::array<std::string, 3> adverbs;
  std::string sentinel;
  std::map<std::string, std::vector<std::string>> templates;
};

/// The pack compiled in from data/utterances.json.
const UtterancePack& builtin_utterance_pack();
UtterancePack utterance_pack_from_json(const nlohmann::json& j);
UtterancePack load_utterance_pack(const std::filesystem::path& path);

/// `speaker` is the preference owner, or one party of the conflict. `cast`
/// supplies names. Deterministic given the RNG state.
std::string render_utterance(const Constraint& c, const ResidentId& speaker, const World& cast, Rng& rng,
                             const UtterancePack& pack = builtin_utterance_pack());

/// Inverse of render_utterance. Preferences come back owned by `speaker`;
/// conflicts come back canonical with `speaker` as one party. Throws
/// UtteranceParseError carrying the longest matched prefix.
Constraint parse_utterance(std::string_view text, const ResidentId& speaker, const World& cast,
                           const UtterancePack& pack = builtin_utterance_pack());

bool is_sentinel(std::string_view text, const UtterancePack& pack = builtin_utterance_pack());

}  // namespace seatplan
