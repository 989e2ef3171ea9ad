#include "tempabd/sentence.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "json.hpp"

namespace tempabd {

namespace {

using json = nlohmann::json;

const std::set<std::string> kForms = {"past_participle", "present_tense", "past_tense", "infinitive"};

std::string get_string(const json& j, const char* key, const char* where) {
  if (!j.contains(key) || !j[key].is_string())
    throw SentenceError(std::string(where) + ": missing string field \"" + key + "\"");
  return j[key].get<std::string>();
}

std::vector<std::string> string_or_list(const json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  const json& v = j[key];
  if (v.is_string()) {
    out.push_back(v.get<std::string>());
    return out;
  }
  if (!v.is_array()) throw SentenceError(std::string("\"") + key + "\" must be a string or an array");
  for (const json& e : v) {
    if (!e.is_string()) throw SentenceError(std::string("\"") + key + "\" entries must be strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(s[0] >= 'a' && s[0] <= 'z')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  });
}

Rule fact(std::string_view pred, std::vector<Term> args) {
  return Rule{Formula::atom(Symbol(pred), std::move(args)), Formula::truth(), SourcePos{"<sentence>", 0, 0}};
}

Term con(const std::string& s) { return Term::constant(s); }

}  // namespace

SentenceDescription parse_sentence(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SentenceError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SentenceError("sentence description must be a JSON object");

  SentenceDescription d;
  d.clause = get_string(j, "clause", "sentence");
  if (j.contains("verbs")) {
    if (!j["verbs"].is_array()) throw SentenceError("\"verbs\" must be an array");
    for (const json& v : j["verbs"]) {
      if (!v.is_object()) throw SentenceError("verb entries must be objects");
      d.verbs.push_back({get_string(v, "token", "verb"), get_string(v, "word", "verb"),
                         get_string(v, "form", "verb")});
    }
  }
  d.main_verbs = string_or_list(j, "main_verb");
  if (j.contains("aux_verbs")) {
    if (!j["aux_verbs"].is_array()) throw SentenceError("\"aux_verbs\" must be an array");
    for (const json& e : j["aux_verbs"]) {
      if (!e.is_object()) throw SentenceError("aux_verbs entries must be objects");
      d.aux_verbs.emplace_back(get_string(e, "aux", "aux_verbs"), get_string(e, "complement", "aux_verbs"));
    }
  }
  if (j.contains("adjuncts")) {
    if (!j["adjuncts"].is_array()) throw SentenceError("\"adjuncts\" must be an array");
    for (const json& a : j["adjuncts"]) {
      if (!a.is_object()) throw SentenceError("adjunct entries must be objects");
      std::string token = get_string(a, "token", "adjunct");
      std::string word = get_string(a, "word", "adjunct");
      VarId next = 0;
      Term t;
      try {
        t = parse_term(word, next);
      } catch (const std::exception& e) {
        throw SentenceError("adjunct " + token + ": bad word \"" + word + "\": " + e.what());
      }
      d.adjuncts.push_back({token, t});
    }
  }
  d.clause_adjuncts = string_or_list(j, "s_adjuncts");
  return d;
}

void validate(const SentenceDescription& d) {
  if (!is_identifier(d.clause)) throw SentenceError("bad clause id \"" + d.clause + "\"");

  std::set<std::string> tokens;
  std::set<std::string> verb_tokens;
  for (const VerbToken& v : d.verbs) {
    if (!is_identifier(v.token)) throw SentenceError("bad verb token \"" + v.token + "\"");
    if (!is_identifier(v.word)) throw SentenceError("verb " + v.token + ": bad word \"" + v.word + "\"");
    if (!kForms.contains(v.form)) throw SentenceError("verb " + v.token + ": unknown form \"" + v.form + "\"");
    if (!tokens.insert(v.token).second) throw SentenceError("duplicate token " + v.token);
    verb_tokens.insert(v.token);
  }
  std::set<std::string> adjunct_tokens;
  for (const AdjunctToken& a : d.adjuncts) {
    if (!is_identifier(a.token)) throw SentenceError("bad adjunct token \"" + a.token + "\"");
    if (!a.word.ground() || !a.word.is_compound())
      throw SentenceError("adjunct " + a.token + ": word must be a ground term");
    if (!tokens.insert(a.token).second) throw SentenceError("duplicate token " + a.token);
    adjunct_tokens.insert(a.token);
  }

  if (d.main_verbs.size() != 1)
    throw SentenceError("clause " + d.clause + " has " + std::to_string(d.main_verbs.size()) +
                        " main verbs, expected one");
  const std::string& main = d.main_verbs.front();
  if (!verb_tokens.contains(main)) throw SentenceError("main verb " + main + " is not a verb token");

  // Auxiliary edges: each token heads at most one edge and is the complement
  // of at most one; following them downwards from any auxiliary must reach
  // the main verb.
  std::map<std::string, std::string> complement_of;
  std::set<std::string> complements;
  for (const auto& [aux, comp] : d.aux_verbs) {
    if (!verb_tokens.contains(aux) || !verb_tokens.contains(comp))
      throw SentenceError("aux_verb edge " + aux + " -> " + comp + " names an unknown verb token");
    if (!complement_of.emplace(aux, comp).second) throw SentenceError("auxiliary " + aux + " has two complements");
    if (!complements.insert(comp).second) throw SentenceError("verb " + comp + " has two auxiliaries");
  }
  if (complement_of.contains(main)) throw SentenceError("main verb " + main + " cannot be an auxiliary");
  for (const auto& [aux, comp] : complement_of) {
    std::string at = aux;
    std::size_t steps = 0;
    while (at != main) {
      auto it = complement_of.find(at);
      if (it == complement_of.end() || ++steps > complement_of.size())
        throw SentenceError("auxiliary chain from " + aux + " does not end at the main verb " + main);
      at = it->second;
    }
  }
  for (const std::string& v : verb_tokens) {
    if (v != main && !complement_of.contains(v))
      throw SentenceError("verb " + v + " is neither the main verb nor an auxiliary");
  }

  // Adjuncts: attached directly, or as the complement of an attached na(..).
  std::set<std::string> attached;
  for (const std::string& a : d.clause_adjuncts) {
    if (!adjunct_tokens.contains(a)) throw SentenceError("s_adjunct names unknown adjunct " + a);
    if (!attached.insert(a).second) throw SentenceError("adjunct " + a + " attached twice");
  }
  bool grew = true;
  while (grew) {
    grew = false;
    for (const AdjunctToken& a : d.adjuncts) {
      if (!attached.contains(a.token)) continue;
      if (a.word.functor().str() == "na" && a.word.arity() == 1 && a.word.arg(0).is_constant()) {
        const std::string& inner = a.word.arg(0).functor().str();
        if (!adjunct_tokens.contains(inner))
          throw SentenceError("adjunct " + a.token + " refers to unknown adjunct " + inner);
        grew |= attached.insert(inner).second;
      }
    }
  }
  for (const std::string& a : adjunct_tokens) {
    if (!attached.contains(a)) throw SentenceError("adjunct " + a + " is not attached to clause " + d.clause);
  }
}

std::vector<Rule> encode_sentence(const SentenceDescription& d) {
  validate(d);
  std::vector<Rule> out;
  out.push_back(fact("clause", {con(d.clause)}));
  out.push_back(fact("main_verb", {con(d.clause), con(d.main_verbs.front())}));
  for (const auto& [aux, comp] : d.aux_verbs) out.push_back(fact("aux_verb", {con(aux), con(comp)}));
  for (const VerbToken& v : d.verbs) out.push_back(fact("verbt_word", {con(v.token), con(v.word)}));
  for (const VerbToken& v : d.verbs) out.push_back(fact("vform", {con(v.token), con(v.form)}));
  for (const AdjunctToken& a : d.adjuncts) out.push_back(fact("adjt_word", {con(a.token), a.word}));
  for (const std::string& a : d.clause_adjuncts) out.push_back(fact("s_adjunct", {con(d.clause), con(a)}));
  return out;
}

std::string facts_text(std::span<const Rule> facts) {
  std::string out;
  for (const Rule& r : facts) out += r.head.to_string() + " <- true.\n";
  return out;
}

std::vector<std::string> default_kb_paths() {
  const std::string dir = TEMPABD_KB_DIR;
  std::vector<std::string> out;
  for (const char* f : {"lexicon", "time", "tense", "aspect", "adjuncts"}) out.push_back(dir + "/" + f);
  return out;
}

Theory load_kb(std::span<const std::string> paths) {
  if (paths.empty()) {
    std::vector<std::string> defaults = default_kb_paths();
    return load_theory_files(defaults);
  }
  return load_theory_files(paths);
}

}  // namespace tempabd
