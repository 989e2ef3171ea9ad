#include "tempabd/theory.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_set>

namespace tempabd {

std::string SourcePos::to_string() const {
  std::ostringstream os;
  os << (file.empty() ? "<input>" : file) << ':' << line << ':' << column;
  return os.str();
}

TheoryError::TheoryError(const SourcePos& pos, const std::string& what)
    : std::runtime_error(pos.to_string() + ": " + what), pos_(pos) {}

namespace {

const std::unordered_map<Symbol, std::size_t>& builtins() {
  static const std::unordered_map<Symbol, std::size_t> table = {
      {Symbol("before"), 2}, {Symbol("after"), 2},   {Symbol("meets"), 2},
      {Symbol("within"), 2}, {Symbol("overlap"), 2}, {Symbol("not_before"), 2},
      {Symbol("day_a"), 1},  {Symbol("hour"), 1},    {Symbol("bounded"), 1},
      {Symbol("point"), 1},  {Symbol("int"), 1},
  };
  return table;
}

// Functors whose arity is fixed by the temporal domain.
const std::unordered_map<Symbol, std::size_t>& reserved_functors() {
  static const std::unordered_map<Symbol, std::size_t> table = {
      {Symbol("ts"), 4}, {Symbol("int"), 2}, {Symbol("minf"), 0}, {Symbol("pinf"), 0}};
  return table;
}

void collect_body_predicates(const Formula& f, std::vector<Symbol>& out) {
  if (f.kind() == FormulaKind::Atom) {
    out.push_back(f.predicate());
    return;
  }
  for (const Formula& k : f.children()) collect_body_predicates(k, out);
}

void check_rule_body(const Formula& f, const SourcePos& pos) {
  switch (f.kind()) {
    case FormulaKind::Implies:
    case FormulaKind::Iff:
    case FormulaKind::Forall:
      throw TheoryError(pos, "rule bodies may not contain '=>', '<=>' or 'forall'");
    default:
      for (const Formula& k : f.children()) check_rule_body(k, pos);
  }
}

}  // namespace

bool is_builtin_predicate(Symbol p) { return builtins().contains(p); }

std::optional<std::size_t> builtin_arity(Symbol p) {
  auto it = builtins().find(p);
  if (it == builtins().end()) return std::nullopt;
  return it->second;
}

Theory::Theory() {
  for (const auto& [s, n] : builtins()) predicate_arity_[s] = n;
  for (const auto& [s, n] : reserved_functors()) functor_arity_[s] = n;
}

void Theory::register_predicate(Symbol p, std::size_t arity, const SourcePos& pos) {
  auto [it, inserted] = predicate_arity_.emplace(p, arity);
  if (!inserted && it->second != arity)
    throw TheoryError(pos, "predicate " + p.str() + " used with arity " + std::to_string(arity) +
                               " but previously with arity " + std::to_string(it->second));
  if (std::find(used_order_.begin(), used_order_.end(), p) == used_order_.end())
    used_order_.push_back(p);
}

void Theory::register_term(const Term& t, const SourcePos& pos) {
  if (!t.is_compound()) return;
  auto [it, inserted] = functor_arity_.emplace(t.functor(), t.arity());
  if (!inserted && it->second != t.arity())
    throw TheoryError(pos, "functor " + t.functor().str() + " used with arity " +
                               std::to_string(t.arity()) + " but previously with arity " +
                               std::to_string(it->second));
  for (const Term& a : t.args()) register_term(a, pos);
}

void Theory::register_formula(const Formula& f, const SourcePos& pos) {
  switch (f.kind()) {
    case FormulaKind::Atom:
      register_predicate(f.predicate(), f.args().size(), pos);
      for (const Term& a : f.args()) register_term(a, pos);
      break;
    case FormulaKind::Equality:
      register_term(f.lhs(), pos);
      register_term(f.rhs(), pos);
      break;
    default:
      for (const Formula& k : f.children()) register_formula(k, pos);
  }
}

void Theory::check_arities(const Formula& f, const SourcePos& pos) const {
  Theory probe = *this;
  probe.register_formula(f, pos);
}

void Theory::add(Statement st) {
  if (auto* r = std::get_if<Rule>(&st)) {
    if (r->head.kind() != FormulaKind::Atom) throw TheoryError(r->pos, "rule head must be an atom");
    if (is_builtin_predicate(r->head.predicate()))
      throw TheoryError(r->pos, "builtin predicate " + r->head.predicate().str() + " cannot be defined");
    check_rule_body(r->body, r->pos);
    register_formula(r->head, r->pos);
    register_formula(r->body, r->pos);
    Symbol p = r->head.predicate();
    if (!definitions_.contains(p)) defined_order_.push_back(p);
    definitions_[p].push_back(*r);
  } else if (auto* a = std::get_if<Axiom>(&st)) {
    register_formula(a->formula, a->pos);
    axioms_.push_back(*a);
  } else {
    auto& d = std::get<OpenFunctionDecl>(st);
    register_predicate(d.name, d.arity(), d.pos);
    for (Symbol t : d.domain_types) register_predicate(t, 1, d.pos);
    register_predicate(d.range_type, 1, d.pos);
    for (const auto& o : open_functions_)
      if (o.name == d.name) throw TheoryError(d.pos, "open function " + d.name.str() + " declared twice");
    open_functions_.push_back(d);
  }
  statements_.push_back(std::move(st));
}

void Theory::merge(const Theory& other) {
  for (const Statement& st : other.statements_) add(st);
  note_var_limit(other.var_limit_);
}

void Theory::validate() const {
  for (const auto& d : open_functions_) {
    if (is_defined(d.name))
      throw TheoryError(d.pos, d.name.str() + " is both defined and declared as an open function");
    if (is_builtin_predicate(d.name))
      throw TheoryError(d.pos, "builtin predicate " + d.name.str() + " cannot be an open function");
  }
  // Depth-first cycle search over defined predicates.
  enum class Mark { None, Active, Done };
  std::unordered_map<Symbol, Mark> mark;
  std::function<void(Symbol)> visit = [&](Symbol p) {
    mark[p] = Mark::Active;
    for (const Rule& r : definitions_.at(p)) {
      std::vector<Symbol> deps;
      collect_body_predicates(r.body, deps);
      for (Symbol q : deps) {
        if (!is_defined(q)) continue;
        if (mark[q] == Mark::Active)
          throw TheoryError(r.pos, "recursive definition through " + q.str() +
                                       " (only non-recursive definitions are supported)");
        if (mark[q] == Mark::None) visit(q);
      }
    }
    mark[p] = Mark::Done;
  };
  for (Symbol p : defined_order_)
    if (mark[p] == Mark::None) visit(p);
}

std::span<const Rule> Theory::rules_for(Symbol p) const {
  auto it = definitions_.find(p);
  if (it == definitions_.end()) return {};
  return it->second;
}

const OpenFunctionDecl* Theory::open_function(Symbol p) const {
  for (const auto& d : open_functions_)
    if (d.name == p) return &d;
  return nullptr;
}

bool Theory::is_open(Symbol p) const {
  return predicate_arity_.contains(p) && !is_defined(p) && !is_builtin_predicate(p) &&
         std::find(used_order_.begin(), used_order_.end(), p) != used_order_.end();
}

std::vector<Symbol> Theory::open_predicates() const {
  std::vector<Symbol> out;
  for (Symbol p : used_order_)
    if (!is_defined(p) && !is_builtin_predicate(p)) out.push_back(p);
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::size_t> Theory::predicate_arity(Symbol p) const {
  auto it = predicate_arity_.find(p);
  if (it == predicate_arity_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Theory::functor_arity(Symbol f) const {
  auto it = functor_arity_.find(f);
  if (it == functor_arity_.end()) return std::nullopt;
  return it->second;
}

std::string Theory::to_string() const {
  std::string out;
  for (const Statement& st : statements_) {
    if (const auto* r = std::get_if<Rule>(&st)) {
      out += r->head.to_string() + " <- " + r->body.to_string() + ".\n";
    } else if (const auto* a = std::get_if<Axiom>(&st)) {
      out += "fol " + a->formula.to_string() + ".\n";
    } else {
      const auto& d = std::get<OpenFunctionDecl>(st);
      out += "of " + d.name.str() + "::";
      for (std::size_t i = 0; i < d.domain_types.size(); ++i)
        out += (i ? ", " : " ") + d.domain_types[i].str() + "(_)";
      out += " -> " + d.range_type.str() + "(_).\n";
    }
  }
  return out;
}

Theory load_theory_files(std::span<const std::string> paths) {
  Theory merged;
  for (const std::string& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TheoryError(SourcePos{path, 0, 0}, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    merged.merge(parse_theory(buf.str(), path, merged.var_limit()));
  }
  merged.validate();
  return merged;
}

namespace {

Term fresh(VarId& next, const std::string& name) { return Term::variable(next++, Symbol(name)); }

}  // namespace

Formula complete(std::span<const Rule> rules, Symbol pred, std::size_t arity, VarId& next_var) {
  std::vector<Term> params;
  for (std::size_t i = 0; i < arity; ++i) params.push_back(fresh(next_var, "Z" + std::to_string(i + 1)));

  std::vector<Formula> cases;
  for (const Rule& r : rules) {
    if (r.head.kind() != FormulaKind::Atom || r.head.predicate() != pred ||
        r.head.args().size() != arity)
      throw std::invalid_argument("complete: rule for " + r.head.to_string() + " does not define " +
                                  pred.str() + "/" + std::to_string(arity));
    std::vector<Term> locals = free_vars(r.head);
    r.body.collect_free_vars(locals);

    std::vector<Formula> conj;
    for (std::size_t i = 0; i < arity; ++i) conj.push_back(Formula::equality(params[i], r.head.args()[i]));
    if (r.body.kind() == FormulaKind::And) {
      for (const Formula& k : r.body.children()) conj.push_back(k);
    } else if (r.body.kind() != FormulaKind::Truth) {
      conj.push_back(r.body);
    }
    Formula c = conj.empty() ? Formula::truth()
                : conj.size() == 1 ? conj.front()
                                   : Formula::conjunction(std::move(conj));
    cases.push_back(Formula::exists(std::move(locals), std::move(c)));
  }
  Formula rhs = cases.empty() ? Formula::falsity()
                : cases.size() == 1 ? cases.front()
                                    : Formula::disjunction(std::move(cases));
  return Formula::forall(params, Formula::equivalence(Formula::atom(pred, params), rhs));
}

std::vector<Formula> expand_open_function(const OpenFunctionDecl& decl, VarId& next_var) {
  const std::size_t n = decl.domain_types.size();
  auto args_vars = [&] {
    std::vector<Term> xs;
    for (std::size_t i = 0; i < n; ++i) xs.push_back(fresh(next_var, "X" + std::to_string(i + 1)));
    return xs;
  };
  auto typing = [&](const std::vector<Term>& xs) {
    std::vector<Formula> conj;
    for (std::size_t i = 0; i < n; ++i) conj.push_back(Formula::atom(decl.domain_types[i], {xs[i]}));
    if (conj.empty()) return Formula::truth();
    if (conj.size() == 1) return conj.front();
    return Formula::conjunction(std::move(conj));
  };
  auto with = [](std::vector<Term> xs, const Term& r) {
    xs.push_back(r);
    return xs;
  };

  std::vector<Formula> out;
  {
    auto xs = args_vars();
    Term r = fresh(next_var, "R");
    Formula result = Formula::exists(
        {r}, Formula::conjunction({Formula::atom(decl.range_type, {r}), Formula::atom(decl.name, with(xs, r))}));
    out.push_back(n == 0 ? result : Formula::forall(xs, Formula::implication(typing(xs), result)));
  }
  {
    auto xs = args_vars();
    Term r1 = fresh(next_var, "R1");
    Term r2 = fresh(next_var, "R2");
    Formula body = Formula::implication(
        Formula::conjunction({Formula::atom(decl.name, with(xs, r1)), Formula::atom(decl.name, with(xs, r2))}),
        Formula::equality(r1, r2));
    out.push_back(Formula::forall(with(with(xs, r1), r2), body));
  }
  {
    auto xs = args_vars();
    Term r = fresh(next_var, "R");
    out.push_back(Formula::forall(with(xs, r), Formula::implication(Formula::atom(decl.name, with(xs, r)), typing(xs))));
  }
  return out;
}

}  // namespace tempabd
