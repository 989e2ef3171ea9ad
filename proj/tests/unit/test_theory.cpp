#include <doctest.h>

#include "../oracle/completion_oracle.hpp"
#include <map>
#include <set>

#include "tempabd/theory.hpp"

using namespace tempabd;

TEST_CASE("completion agrees with the rules on random definitions") {
  std::string failure;
  std::size_t bad = oracle::completion_suite(150, 31, &failure);
  INFO(failure);
  CHECK(bad == 0);
}

TEST_CASE("completion of a single fact") {
  Theory th = parse_theory("p(a) <- true.\n");
  VarId next = th.var_limit();
  Formula f = complete(th.rules_for(Symbol("p")), Symbol("p"), 1, next);
  CHECK(f.kind() == FormulaKind::Forall);
  CHECK(f.body().kind() == FormulaKind::Iff);
}

TEST_CASE("parser rejects malformed and recursive theories") {
  CHECK_THROWS_AS(parse_theory("p(X) <- q(X)"), TheoryError);
  CHECK_THROWS_AS(parse_theory("p(X) <- q(X) & .\n"), TheoryError);
  CHECK_THROWS_AS(parse_theory("p(X) <- q(X) & p(X).\n"), TheoryError);
  CHECK_THROWS_AS(parse_theory("p(X) <- r(X).\nr(X) <- p(X).\n"), TheoryError);
}

TEST_CASE("arity is fixed per namespace") {
  CHECK_THROWS_AS(parse_theory("p(a) <- true.\np(a,b) <- true.\n"), TheoryError);
  // The same name as a predicate and as a functor with another arity is fine.
  CHECK_NOTHROW(parse_theory("p(f) <- true.\nf(X) <- p(g(X,X)).\n"));
}

TEST_CASE("errors carry source positions") {
  try {
    parse_theory("p(a) <- true.\nq(X) <- \n  r(X) &&.\n", "t.kb");
    FAIL("expected an error");
  } catch (const TheoryError& e) {
    CHECK(e.pos().file == "t.kb");
    CHECK(e.pos().line >= 2);
  }
}

TEST_CASE("open function declaration expands to three axioms") {
  Theory th = parse_theory("of f:: d(_) -> r(_).\nd(a) <- true.\nr(b) <- true.\n");
  REQUIRE(th.open_functions().size() == 1);
  VarId next = th.var_limit();
  auto fs = expand_open_function(th.open_functions()[0], next);
  REQUIRE(fs.size() == 3);
  CHECK(th.is_open(Symbol("f")));
}

TEST_CASE("printed formulas parse back alpha-equivalent") {
  const char* src =
      "fol forall(A,B)$ p(A,B) & not q(B) => (exists(C)$ r(C,A) ; A=B).\n"
      "fol forall(X)$ s(X) <=> (t(X) , u(X)).\n";
  Theory th = parse_theory(src);
  for (const Axiom& ax : th.axioms()) {
    VarId next = th.var_limit();
    Formula back = parse_query(ax.formula.to_string(), th, next);
    CHECK(alpha_equivalent(ax.formula, back));
  }
}

namespace {

// Ground atoms as strings, domain {a,b,c}.
struct SetEval {
  const std::set<std::string>* atoms;
  std::map<VarId, std::string> env;

  std::string val(const Term& t) const { return t.is_var() ? env.at(t.var_id()) : t.to_string(); }

  bool quant(const Formula& f, std::size_t i, bool all) {
    if (i == f.vars().size()) return eval(f.body());
    for (const char* c : {"a", "b", "c"}) {
      env[f.vars()[i].var_id()] = c;
      bool r = quant(f, i + 1, all);
      if (r != all) return r;
    }
    return all;
  }

  bool eval(const Formula& f) {
    switch (f.kind()) {
      case FormulaKind::Truth: return true;
      case FormulaKind::Falsity: return false;
      case FormulaKind::Atom: {
        std::string s = f.predicate().str() + "(";
        for (std::size_t i = 0; i < f.args().size(); ++i) s += (i ? "," : "") + val(f.args()[i]);
        return atoms->contains(s + ")");
      }
      case FormulaKind::Equality: return val(f.lhs()) == val(f.rhs());
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

}  // namespace

TEST_CASE("open function axioms force a total function on the domain") {
  Theory th = parse_theory("of f:: d(_) -> r(_).\n");
  VarId next = th.var_limit();
  auto fs = expand_open_function(th.open_functions()[0], next);
  const char* cs[] = {"a", "b", "c"};
  std::size_t models = 0;
  for (unsigned dmask = 0; dmask < 8; ++dmask)
    for (unsigned rmask = 0; rmask < 8; ++rmask)
      for (unsigned fmask = 0; fmask < 512; ++fmask) {
        std::set<std::string> atoms;
        for (int i = 0; i < 3; ++i) {
          if ((dmask >> i) & 1u) atoms.insert(std::string("d(") + cs[i] + ")");
          if ((rmask >> i) & 1u) atoms.insert(std::string("r(") + cs[i] + ")");
        }
        for (int i = 0; i < 9; ++i)
          if ((fmask >> i) & 1u) atoms.insert(std::string("f(") + cs[i / 3] + "," + cs[i % 3] + ")");
        SetEval ev{&atoms, {}};
        bool all = true;
        for (const Formula& f : fs) all = all && ev.eval(f);
        // Graph of a total function from d into r.
        bool graph = true;
        for (int x = 0; x < 3; ++x) {
          int images = 0, in_range = 0;
          for (int y = 0; y < 3; ++y)
            if ((fmask >> (x * 3 + y)) & 1u) {
              ++images;
              in_range += (rmask >> y) & 1u;
            }
          bool in_dom = (dmask >> x) & 1u;
          graph = graph && (in_dom ? images == 1 && in_range == 1 : images == 0);
        }
        CHECK(all == graph);
        if (all) {
          ++models;
          CHECK(static_cast<std::size_t>(__builtin_popcount(fmask)) == static_cast<std::size_t>(__builtin_popcount(dmask)));
        }
      }
  CHECK(models > 0);
}
