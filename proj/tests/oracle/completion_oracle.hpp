#pragma once
// Random non-recursive definitions of p over constants {a,b,c}, with one open
// predicate q/1. The completion produced by the library is evaluated by a
// small interpreter here and its models are compared with a direct reading
// of the rules: p(t) holds iff some rule body holds for t.

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tempabd/theory.hpp"

namespace oracle {

using tempabd::Formula;
using tempabd::FormulaKind;
using tempabd::Term;

inline const std::vector<std::string> kConsts = {"a", "b", "c"};

// A term in a rule: a head variable X<i>, the local variable Y, or a constant.
struct RTerm {
  enum Kind { Head, Local, Const } kind;
  int index;  // head position or constant index
};

struct RLit {
  enum Kind { Q, NotQ, Eq, Neq, True, False } kind;
  RTerm a{RTerm::Const, 0}, b{RTerm::Const, 0};
};

struct RRule {
  std::vector<RTerm> head;  // args of p; Head terms refer to positions
  bool local = false;       // body is under exists(Y)
  std::vector<RLit> body;
};

struct RDef {
  int arity = 1;
  std::vector<RRule> rules;
};

inline std::string show(const RTerm& t, const RRule& r) {
  (void)r;
  switch (t.kind) {
    case RTerm::Head: return "X" + std::to_string(t.index);
    case RTerm::Local: return "Y";
    case RTerm::Const: return kConsts[static_cast<std::size_t>(t.index)];
  }
  return "?";
}

inline std::string show(const RLit& l, const RRule& r) {
  switch (l.kind) {
    case RLit::Q: return "q(" + show(l.a, r) + ")";
    case RLit::NotQ: return "not q(" + show(l.a, r) + ")";
    case RLit::Eq: return show(l.a, r) + "=" + show(l.b, r);
    case RLit::Neq: return "not " + show(l.a, r) + "=" + show(l.b, r);
    case RLit::True: return "true";
    case RLit::False: return "false";
  }
  return "?";
}

inline std::string show(const RDef& d) {
  std::string out;
  for (const RRule& r : d.rules) {
    out += "p(";
    for (std::size_t i = 0; i < r.head.size(); ++i) out += (i ? "," : "") + show(r.head[i], r);
    out += ") <- ";
    std::string body;
    for (std::size_t i = 0; i < r.body.size(); ++i) body += (i ? " & " : "") + show(r.body[i], r);
    out += r.local ? "exists(Y)$ (" + body + ")" : body;
    out += ".\n";
  }
  return out;
}

inline RDef random_def(std::mt19937& rng) {
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
  RDef d;
  d.arity = 1 + pick(2);
  int nrules = 1 + pick(3);
  for (int k = 0; k < nrules; ++k) {
    RRule r;
    // Head: each position a fresh variable or a constant.
    std::vector<int> head_vars;
    for (int i = 0; i < d.arity; ++i) {
      if (pick(3) == 0) {
        r.head.push_back({RTerm::Const, pick(3)});
      } else {
        r.head.push_back({RTerm::Head, i});
        head_vars.push_back(i);
      }
    }
    r.local = pick(3) == 0;
    auto random_term = [&]() -> RTerm {
      int choice = pick(4);
      if (choice == 0 && r.local) return {RTerm::Local, 0};
      if (choice <= 1 && !head_vars.empty()) return {RTerm::Head, head_vars[static_cast<std::size_t>(pick(static_cast<int>(head_vars.size())))]};
      return {RTerm::Const, pick(3)};
    };
    int nlits = 1 + pick(3);
    for (int i = 0; i < nlits; ++i) {
      RLit l;
      int kind = pick(12);
      l.kind = kind < 4 ? RLit::Q : kind < 6 ? RLit::NotQ : kind < 8 ? RLit::Eq : kind < 10 ? RLit::Neq
               : kind < 11 ? RLit::True : RLit::False;
      l.a = random_term();
      l.b = random_term();
      r.body.push_back(l);
    }
    d.rules.push_back(r);
  }
  return d;
}

// Interpretations: bit i of q is q(kConsts[i]); p is a set of tuples.
using Tuple = std::vector<int>;

inline bool eval_rule_body(const RRule& r, const std::vector<int>& head_vals, int local, unsigned q) {
  auto val = [&](const RTerm& t) {
    if (t.kind == RTerm::Head) return head_vals[static_cast<std::size_t>(t.index)];
    if (t.kind == RTerm::Local) return local;
    return t.index;
  };
  for (const RLit& l : r.body) {
    bool ok = true;
    switch (l.kind) {
      case RLit::Q: ok = (q >> val(l.a)) & 1u; break;
      case RLit::NotQ: ok = !((q >> val(l.a)) & 1u); break;
      case RLit::Eq: ok = val(l.a) == val(l.b); break;
      case RLit::Neq: ok = val(l.a) != val(l.b); break;
      case RLit::True: ok = true; break;
      case RLit::False: ok = false; break;
    }
    if (!ok) return false;
  }
  return true;
}

// The set of p-tuples the rules derive from q.
inline std::set<Tuple> derive(const RDef& d, unsigned q) {
  std::set<Tuple> out;
  for (const RRule& r : d.rules) {
    // Enumerate values of head variables (positions that are variables).
    int n = d.arity;
    int combos = 1;
    for (int i = 0; i < n; ++i) combos *= 3;
    for (int c = 0; c < combos; ++c) {
      std::vector<int> vals(static_cast<std::size_t>(n));
      int x = c;
      for (int i = 0; i < n; ++i) {
        vals[static_cast<std::size_t>(i)] = x % 3;
        x /= 3;
      }
      Tuple t;
      bool skip = false;
      for (int i = 0; i < n; ++i) {
        const RTerm& h = r.head[static_cast<std::size_t>(i)];
        if (h.kind == RTerm::Const) {
          // Only the first value of an unused variable slot is needed.
          if (vals[static_cast<std::size_t>(i)] != 0) skip = true;
          t.push_back(h.index);
        } else {
          t.push_back(vals[static_cast<std::size_t>(i)]);
        }
      }
      if (skip) continue;
      bool holds = false;
      if (r.local) {
        for (int y = 0; y < 3 && !holds; ++y) holds = eval_rule_body(r, vals, y, q);
      } else {
        holds = eval_rule_body(r, vals, 0, q);
      }
      if (holds) out.insert(t);
    }
  }
  return out;
}

// Evaluates a library formula over the domain {a,b,c}.
struct FormulaEval {
  unsigned q;
  const std::set<Tuple>* p;
  std::map<tempabd::VarId, int> env;

  int value(const Term& t) const {
    if (t.is_var()) return env.at(t.var_id());
    for (std::size_t i = 0; i < kConsts.size(); ++i)
      if (t.is_constant() && t.functor().str() == kConsts[i]) return static_cast<int>(i);
    throw std::logic_error("unexpected term " + t.to_string());
  }

  bool quant(const Formula& f, std::size_t i, bool universal) {
    if (i == f.vars().size()) return eval(f.body());
    tempabd::VarId v = f.vars()[i].var_id();
    for (int c = 0; c < 3; ++c) {
      env[v] = c;
      bool r = quant(f, i + 1, universal);
      if (universal && !r) return false;
      if (!universal && r) return true;
    }
    return universal;
  }

  bool eval(const Formula& f) {
    switch (f.kind()) {
      case FormulaKind::Truth: return true;
      case FormulaKind::Falsity: return false;
      case FormulaKind::Atom: {
        Tuple t;
        for (const Term& a : f.args()) t.push_back(value(a));
        if (f.predicate().str() == "q") return (q >> t[0]) & 1u;
        return p->contains(t);
      }
      case FormulaKind::Equality: return value(f.lhs()) == value(f.rhs());
      case FormulaKind::Not: return !eval(f.child(0));
      case FormulaKind::And:
        for (const Formula& c : f.children())
          if (!eval(c)) return false;
        return true;
      case FormulaKind::Or:
        for (const Formula& c : f.children())
          if (eval(c)) return true;
        return false;
      case FormulaKind::Implies: return !eval(f.child(0)) || eval(f.child(1));
      case FormulaKind::Iff: return eval(f.child(0)) == eval(f.child(1));
      case FormulaKind::Exists: return quant(f, 0, false);
      case FormulaKind::Forall: return quant(f, 0, true);
    }
    return false;
  }
};

// Number of (q, p) interpretations on which the completion and the rules
// disagree, for one definition.
inline std::size_t completion_disagreements(const RDef& d) {
  tempabd::Theory th = tempabd::parse_theory(show(d), "<random>");
  th.validate();
  tempabd::VarId next = th.var_limit();
  tempabd::Symbol p("p");
  Formula comp = tempabd::complete(th.rules_for(p), p, static_cast<std::size_t>(d.arity), next);

  std::vector<Tuple> all;
  for (int i = 0; i < 3; ++i) {
    if (d.arity == 1) {
      all.push_back({i});
    } else {
      for (int j = 0; j < 3; ++j) all.push_back({i, j});
    }
  }
  std::size_t bad = 0;
  for (unsigned q = 0; q < 8; ++q) {
    std::set<Tuple> derived = derive(d, q);
    for (std::uint32_t mask = 0; mask < (1u << all.size()); ++mask) {
      std::set<Tuple> pset;
      for (std::size_t k = 0; k < all.size(); ++k)
        if ((mask >> k) & 1u) pset.insert(all[k]);
      FormulaEval ev{q, &pset, {}};
      bool model = ev.eval(comp);
      if (model != (pset == derived)) ++bad;
    }
  }
  return bad;
}

// Total disagreements over `trials` random definitions.
inline std::size_t completion_suite(int trials, unsigned seed, std::string* first_failure = nullptr) {
  std::mt19937 rng(seed);
  std::size_t bad = 0;
  for (int i = 0; i < trials; ++i) {
    RDef d = random_def(rng);
    std::size_t b = completion_disagreements(d);
    if (b && first_failure && first_failure->empty()) *first_failure = show(d);
    bad += b;
  }
  return bad;
}

}  // namespace oracle
