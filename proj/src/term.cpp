#include "tempabd/term.hpp"

#include <mutex>
#include <stdexcept>
#include <unordered_set>

namespace tempabd {

namespace {

struct SymbolTable {
  std::mutex mu;
  std::unordered_set<std::string> names;
};

SymbolTable& symbol_table() {
  static SymbolTable table;
  return table;
}

const std::string& empty_name() {
  static const std::string e;
  return e;
}

}  // namespace

Symbol::Symbol(std::string_view name) {
  auto& t = symbol_table();
  std::lock_guard lock(t.mu);
  name_ = &*t.names.emplace(name).first;
}

const std::string& Symbol::str() const { return name_ ? *name_ : empty_name(); }

struct Term::Node {
  TermKind kind;
  bool ground;
  VarId id = 0;
  std::int64_t value = 0;
  Symbol sym;
  std::vector<Term> args;
};

Term Term::variable(VarId id, Symbol name) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Variable;
  n->ground = false;
  n->id = id;
  n->sym = name;
  return Term(std::move(n));
}

Term Term::integer(std::int64_t value) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Integer;
  n->ground = true;
  n->value = value;
  return Term(std::move(n));
}

Term Term::compound(Symbol functor, std::vector<Term> args) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Compound;
  n->sym = functor;
  n->ground = true;
  for (const Term& a : args) {
    if (a.null()) throw std::invalid_argument("null term argument");
    n->ground = n->ground && a.ground();
  }
  n->args = std::move(args);
  return Term(std::move(n));
}

TermKind Term::kind() const { return node_->kind; }
VarId Term::var_id() const { return node_->id; }
Symbol Term::var_name() const { return node_->sym; }
std::int64_t Term::int_value() const { return node_->value; }
Symbol Term::functor() const { return node_->sym; }
std::span<const Term> Term::args() const {
  if (node_->kind != TermKind::Compound) return {};
  return node_->args;
}
bool Term::ground() const { return node_->ground; }

bool Term::contains_var(VarId id) const {
  switch (kind()) {
    case TermKind::Variable: return var_id() == id;
    case TermKind::Integer: return false;
    case TermKind::Compound:
      if (ground()) return false;
      for (const Term& a : args())
        if (a.contains_var(id)) return true;
      return false;
  }
  return false;
}

void Term::collect_vars(std::vector<VarId>& out) const {
  if (is_var()) {
    for (VarId v : out)
      if (v == var_id()) return;
    out.push_back(var_id());
  } else if (is_compound() && !ground()) {
    for (const Term& a : args()) a.collect_vars(out);
  }
}

std::string Term::to_string() const {
  switch (kind()) {
    case TermKind::Variable:
      if (!var_name().empty()) return var_name().str();
      return "_G" + std::to_string(var_id());
    case TermKind::Integer: return std::to_string(int_value());
    case TermKind::Compound: {
      std::string s = functor().str();
      if (arity() == 0) return s;
      s += '(';
      for (std::size_t i = 0; i < arity(); ++i) {
        if (i) s += ',';
        s += arg(i).to_string();
      }
      s += ')';
      return s;
    }
  }
  return {};
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.null() || b.null()) return false;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TermKind::Variable: return a.var_id() == b.var_id();
    case TermKind::Integer: return a.int_value() == b.int_value();
    case TermKind::Compound:
      if (a.functor() != b.functor() || a.arity() != b.arity()) return false;
      for (std::size_t i = 0; i < a.arity(); ++i)
        if (!(a.arg(i) == b.arg(i))) return false;
      return true;
  }
  return false;
}

// Variables < integers < compounds; compounds by arity, functor, then args.
std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.kind() != b.kind()) return a.kind() <=> b.kind();
  switch (a.kind()) {
    case TermKind::Variable: return a.var_id() <=> b.var_id();
    case TermKind::Integer: return a.int_value() <=> b.int_value();
    case TermKind::Compound: {
      if (auto c = a.functor() <=> b.functor(); c != 0) return c;
      if (auto c = a.arity() <=> b.arity(); c != 0) return c;
      for (std::size_t i = 0; i < a.arity(); ++i)
        if (auto c = a.arg(i) <=> b.arg(i); c != 0) return c;
      return std::strong_ordering::equal;
    }
  }
  return std::strong_ordering::equal;
}

void Substitution::bind(VarId id, Term value) {
  if (id >= slots_.size()) slots_.resize(id + 1);
  if (slots_[id].null()) ++count_;
  slots_[id] = std::move(value);
}

Term Substitution::deref(const Term& t) const {
  Term cur = t;
  while (cur.is_var() && bound(cur.var_id())) cur = slots_[cur.var_id()];
  return cur;
}

Term Substitution::apply(const Term& t) const {
  Term d = deref(t);
  if (!d.is_compound() || d.ground()) return d;
  std::vector<Term> args;
  args.reserve(d.arity());
  bool changed = false;
  for (const Term& a : d.args()) {
    args.push_back(apply(a));
    changed = changed || !(args.back() == a);
  }
  if (!changed) return d;
  return Term::compound(d.functor(), std::move(args));
}

std::vector<VarId> Substitution::domain() const {
  std::vector<VarId> out;
  for (VarId i = 0; i < slots_.size(); ++i)
    if (!slots_[i].null()) out.push_back(i);
  return out;
}

std::optional<Substitution> unify(const Term& t1, const Term& t2, const Substitution& s) {
  Substitution out = s;
  if (!unify_into(out, t1, t2)) return std::nullopt;
  return out;
}

Term apply(const Substitution& s, const Term& t) { return s.apply(t); }

}  // namespace tempabd
