#include "tempabd/render.hpp"

#include <stdexcept>

#include "json.hpp"

namespace tempabd {

namespace {

using json = nlohmann::ordered_json;

bool is_ground_ts(const Term& t) {
  if (!t.is_compound() || t.functor().str() != "ts" || t.arity() != 4) return false;
  for (const Term& a : t.args())
    if (!a.is_int()) return false;
  return true;
}

json arg_json(const Term& t);

json atom_json(const Term& t) {
  json args = json::array();
  for (const Term& a : t.args()) args.push_back(arg_json(a));
  json o = json::object();
  o["functor"] = t.functor().str();
  o["args"] = std::move(args);
  return o;
}

json arg_json(const Term& t) {
  if (t.is_var()) throw std::invalid_argument("cannot render non-ground term " + t.to_string());
  if (t.is_int()) return t.int_value();
  if (t.is_constant()) return t.functor().str();
  if (is_ground_ts(t)) {
    json o = json::object();
    o["year"] = t.arg(0).int_value();
    o["month"] = t.arg(1).int_value();
    o["day"] = t.arg(2).int_value();
    o["hour"] = t.arg(3).int_value();
    return o;
  }
  return atom_json(t);
}

Term arg_term(const json& j);

Term atom_term(const json& j) {
  if (!j.is_object() || !j.contains("functor") || !j["functor"].is_string() || !j.contains("args") ||
      !j["args"].is_array())
    throw std::invalid_argument("expected {\"functor\", \"args\"} object, got " + j.dump());
  std::vector<Term> args;
  for (const json& a : j["args"]) args.push_back(arg_term(a));
  return Term::compound(Symbol(j["functor"].get<std::string>()), std::move(args));
}

Term arg_term(const json& j) {
  if (j.is_number_integer()) return Term::integer(j.get<std::int64_t>());
  if (j.is_string()) return Term::constant(j.get<std::string>());
  if (j.is_object() && j.contains("year")) {
    std::vector<Term> args;
    for (const char* k : {"year", "month", "day", "hour"}) {
      if (!j.contains(k) || !j[k].is_number_integer())
        throw std::invalid_argument(std::string("time point without integer \"") + k + "\"");
      args.push_back(Term::integer(j[k].get<std::int64_t>()));
    }
    return Term::compound(Symbol("ts"), std::move(args));
  }
  return atom_term(j);
}

}  // namespace

std::vector<Term> display_order(const std::vector<Term>& atoms) {
  return std::vector<Term>(atoms.rbegin(), atoms.rend());
}

std::string render_text(const AbductiveModel& m) {
  std::string out;
  for (const auto& [pred, atoms] : m.abduced) {
    if (atoms.empty()) continue;
    out += pred.str() + ": [";
    bool first = true;
    for (const Term& a : display_order(atoms)) {
      if (!first) out += ",";
      first = false;
      out += a.to_string();
    }
    out += "]\n";
  }
  return out;
}

std::string render_json(const AbductiveModel& m, int indent) {
  json o = json::object();
  for (const auto& [pred, atoms] : m.abduced) {
    if (atoms.empty()) continue;
    json arr = json::array();
    for (const Term& a : display_order(atoms)) arr.push_back(atom_json(a));
    o[pred.str()] = std::move(arr);
  }
  return o.dump(indent);
}

AbductiveModel parse_json_model(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("model must be a JSON object");
  AbductiveModel m;
  for (const auto& [name, arr] : j.items()) {
    if (!arr.is_array()) throw std::invalid_argument("predicate " + name + " must map to an array");
    std::vector<Term> atoms;
    for (const json& a : arr) {
      Term t = atom_term(a);
      if (t.functor().str() != name)
        throw std::invalid_argument("atom " + t.to_string() + " listed under " + name);
      atoms.push_back(t);
    }
    m.abduced[Symbol(name)] = display_order(atoms);
  }
  return m;
}

bool same_atoms(const AbductiveModel& a, const AbductiveModel& b) {
  auto nonempty = [](const AbductiveModel& m) {
    AtomSet s;
    for (const auto& [p, atoms] : m.abduced)
      if (!atoms.empty()) s[p] = atoms;
    return s;
  };
  return nonempty(a) == nonempty(b);
}

}  // namespace tempabd
