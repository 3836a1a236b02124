#include "seatplan/dialogue.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "seatplan/error.hpp"

namespace seatplan {

namespace detail {
extern const std::string_view kBuiltinUtterancePack;
}

namespace {

struct Piece {
  bool slot = false;
  std::string text;
};

std::vector<Piece> compile(const std::string& tpl) {
  std::vector<Piece> out;
  std::size_t pos = 0;
  while (pos < tpl.size()) {
    const auto open = tpl.find('{', pos);
    if (open == std::string::npos) {
      out.push_back({false, tpl.substr(pos)});
      break;
    }
    if (open > pos) out.push_back({false, tpl.substr(pos, open - pos)});
    const auto close = tpl.find('}', open);
    if (close == std::string::npos) throw ParseError("utterance template has an unclosed slot: " + tpl);
    out.push_back({true, tpl.substr(open + 1, close - open - 1)});
    pos = close + 1;
  }
  return out;
}

std::string kind_key(const Constraint& c) {
  if (const auto* p = std::get_if<Preference>(&c)) return std::string(to_string(p->kind));
  return std::string(to_string(std::get<Conflict>(c).kind));
}

int strength_of(const Constraint& c) {
  if (const auto* p = std::get_if<Preference>(&c)) return p->strength;
  return std::get<Conflict>(c).strength;
}

std::string join_names(const std::vector<std::string>& names) {
  if (names.empty()) return "anyone";
  std::string out = names[0];
  for (std::size_t i = 1; i < names.size(); ++i) out += (i + 1 == names.size() ? " or " : ", ") + names[i];
  return out;
}

struct Captures {
  int adverb = -1;
  std::optional<Hand> hand;
  std::string other;
};

class Matcher {
 public:
  Matcher(std::string_view text, const std::vector<Piece>& pieces, const UtterancePack& pack,
          const std::vector<std::pair<std::string, ResidentId>>& names)
      : text_(text), pieces_(pieces), pack_(pack), names_(names) {}

  bool run(Captures& out) {
    Captures c;
    if (!step(0, 0, c)) return false;
    out = c;
    return true;
  }

  std::size_t longest() const { return longest_; }

 private:
  void reach(std::size_t pos) { longest_ = std::max(longest_, pos); }

  bool step(std::size_t i, std::size_t pos, Captures& c) {
    if (i == pieces_.size()) return pos == text_.size();
    const Piece& p = pieces_[i];
    if (!p.slot) {
      const std::string_view rest = text_.substr(pos);
      std::size_t common = 0;
      while (common < p.text.size() && common < rest.size() && rest[common] == p.text[common]) ++common;
      reach(pos + common);
      if (common != p.text.size()) return false;
      return step(i + 1, pos + common, c);
    }
    auto try_word = [&](std::string_view w, auto&& bind) {
      if (text_.substr(pos, w.size()) != w) return false;
      Captures saved = c;
      if (!bind()) return false;
      reach(pos + w.size());
      if (step(i + 1, pos + w.size(), c)) return true;
      c = saved;
      return false;
    };
    if (p.text == "adv") {
      for (int k = 0; k < 3; ++k)
        if (try_word(pack_.adverbs[k], [&] {
              if (c.adverb >= 0 && c.adverb != k) return false;
              c.adverb = k;
              return true;
            }))
          return true;
      return false;
    }
    if (p.text == "hand") {
      for (Hand h : {Hand::left, Hand::right})
        if (try_word(to_string(h), [&] {
              if (c.hand && *c.hand != h) return false;
              c.hand = h;
              return true;
            }))
          return true;
      return false;
    }
    if (p.text == "other") {
      for (const auto& [name, id] : names_)
        if (try_word(name, [&, id = id] {
              if (!c.other.empty() && c.other != id) return false;
              c.other = id;
              return true;
            }))
          return true;
      return false;
    }
    if (p.text == "names") {
      for (std::size_t end = pos + 1; end <= text_.size(); ++end) {
        reach(end);
        if (step(i + 1, end, c)) return true;
      }
      return false;
    }
    throw ParseError("unknown utterance slot {" + p.text + "}");
  }

  std::string_view text_;
  const std::vector<Piece>& pieces_;
  const UtterancePack& pack_;
  const std::vector<std::pair<std::string, ResidentId>>& names_;
  std::size_t longest_ = 0;
};

}  // namespace

UtterancePack utterance_pack_from_json(const nlohmann::json& j) {
  UtterancePack p;
  try {
    p.locale = j.value("locale", "en");
    const auto adv = j.at("adverbs").get<std::vector<std::string>>();
    if (adv.size() != 3) throw ValidationError("utterance pack needs exactly three adverbs");
    std::copy(adv.begin(), adv.end(), p.adverbs.begin());
    p.sentinel = j.at("sentinel").get<std::string>();
    p.templates = j.at("templates").get<std::map<std::string, std::vector<std::string>>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("utterance pack: ") + e.what());
  }
  for (std::size_t k = 0; k < kPreferenceKindCount; ++k) {
    auto it = p.templates.find(std::string(to_string(static_cast<PreferenceKind>(k))));
    if (it == p.templates.end() || it->second.empty())
      throw ValidationError("utterance pack lacks templates for " + std::string(to_string(static_cast<PreferenceKind>(k))));
  }
  for (std::size_t k = 0; k < kConflictKindCount; ++k) {
    auto it = p.templates.find(std::string(to_string(static_cast<ConflictKind>(k))));
    if (it == p.templates.end() || it->second.empty())
      throw ValidationError("utterance pack lacks templates for " + std::string(to_string(static_cast<ConflictKind>(k))));
  }
  for (const auto& [kind, list] : p.templates)
    for (const auto& t : list) compile(t);
  return p;
}

const UtterancePack& builtin_utterance_pack() {
  static const UtterancePack pack = utterance_pack_from_json(nlohmann::json::parse(detail::kBuiltinUtterancePack));
  return pack;
}

UtterancePack load_utterance_pack(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open utterance pack " + path.string());
  try {
    return utterance_pack_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("utterance pack " + path.string() + ": " + e.what());
  }
}

std::string render_utterance(const Constraint& c, const ResidentId& speaker, const World& cast, Rng& rng,
                             const UtterancePack& pack) {
  const auto& list = pack.templates.at(kind_key(c));
  const std::string& tpl = list[rng.below(list.size())];
  const int strength = strength_of(c);
  if (strength < 1 || strength > 3) throw ValidationError("strength must be 1, 2 or 3");

  std::string out;
  for (const auto& piece : compile(tpl)) {
    if (!piece.slot) {
      out += piece.text;
    } else if (piece.text == "adv") {
      out += pack.adverbs[strength - 1];
    } else if (piece.text == "hand") {
      const auto* p = std::get_if<Preference>(&c);
      out += to_string(p && p->hand ? *p->hand : Hand::right);
    } else if (piece.text == "other") {
      const auto& k = std::get<Conflict>(c);
      if (speaker != k.a && speaker != k.b) throw std::invalid_argument("speaker is not a party to the conflict");
      out += cast.resident(speaker == k.a ? k.b : k.a).name;
    } else if (piece.text == "names") {
      const auto& p = std::get<Preference>(c);
      std::vector<std::string> names;
      const auto& views = relation_views_of(p.kind);
      for (const auto& r : cast.residents()) {
        if (r.id == speaker) continue;
        const auto rel = cast.relation_between(speaker, r.id);
        if (std::any_of(views.begin(), views.end(), [&](RelationView v) { return rel.count(v) > 0; }))
          names.push_back(r.name);
      }
      out += join_names(names);
    } else {
      throw ParseError("unknown utterance slot {" + piece.text + "}");
    }
  }
  return out;
}

Constraint parse_utterance(std::string_view text, const ResidentId& speaker, const World& cast,
                           const UtterancePack& pack) {
  std::vector<std::pair<std::string, ResidentId>> names;
  for (const auto& r : cast.residents()) names.emplace_back(r.name, r.id);
  // Longest names first so that a name never shadows a longer one.
  std::sort(names.begin(), names.end(),
            [](const auto& a, const auto& b) { return a.first.size() != b.first.size() ? a.first.size() > b.first.size()
                                                                                      : a.first < b.first; });
  std::size_t longest = 0;
  for (const auto& [kind, list] : pack.templates) {
    for (const auto& tpl : list) {
      const auto pieces = compile(tpl);
      Matcher m(text, pieces, pack, names);
      Captures cap;
      const bool ok = m.run(cap);
      longest = std::max(longest, m.longest());
      if (!ok || cap.adverb < 0) continue;
      const int strength = cap.adverb + 1;
      if (cap.other.empty()) {
        Preference p;
        p.owner = speaker;
        p.kind = preference_kind_from_string(kind);
        p.strength = strength;
        if (p.kind == PreferenceKind::dominant_hand_clearance) p.hand = cap.hand.value_or(Hand::right);
        return p;
      }
      Conflict c;
      c.a = speaker;
      c.b = cap.other;
      c.kind = conflict_kind_from_string(kind);
      c.strength = strength;
      return canonical(c);
    }
  }
  const std::string prefix(text.substr(0, longest));
  throw UtteranceParseError("utterance does not match any template (matched " + std::to_string(longest) + " of " +
                                std::to_string(text.size()) + " characters)",
                            prefix);
}

bool is_sentinel(std::string_view text, const UtterancePack& pack) { return text == pack.sentinel; }

}  // namespace seatplan
