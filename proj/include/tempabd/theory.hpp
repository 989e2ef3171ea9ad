#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "tempabd/formula.hpp"

namespace tempabd {

struct SourcePos {
  std::string file;
  int line = 0;
  int column = 0;

  std::string to_string() const;
};

/// Syntax or validation error in theory text, with its source position.
class TheoryError : public std::runtime_error {
 public:
  TheoryError(const SourcePos& pos, const std::string& what);
  const SourcePos& pos() const { return pos_; }

 private:
  SourcePos pos_;
};

struct Rule {
  Formula head;  // always an Atom
  Formula body;
  SourcePos pos;
};

struct Axiom {
  Formula formula;  // closed
  SourcePos pos;
};

/// `of name:: d1(_), ..., dn(_) -> r(_).`
struct OpenFunctionDecl {
  Symbol name;
  std::vector<Symbol> domain_types;
  Symbol range_type;
  SourcePos pos;

  std::size_t arity() const { return domain_types.size() + 1; }
};

using Statement = std::variant<Rule, Axiom, OpenFunctionDecl>;

/// Interval relations and properties evaluated by the temporal domain rather
/// than by definitions or abduction.
bool is_builtin_predicate(Symbol p);
std::optional<std::size_t> builtin_arity(Symbol p);

/// Definitions, axioms and open-function declarations.
///
/// Predicate and function symbols live in separate namespaces; within each,
/// a symbol's arity is fixed by its first use.
class Theory {
 public:
  Theory();

  /// Appends a statement, enforcing arities. Throws TheoryError.
  void add(Statement st);
  void merge(const Theory& other);

  /// Checks the cross-statement invariants: no predicate is both defined and
  /// an open function, builtins are never defined, and the definition graph
  /// is acyclic. Throws TheoryError.
  void validate() const;

  const std::vector<Statement>& statements() const { return statements_; }

  bool is_defined(Symbol p) const { return definitions_.contains(p); }
  std::span<const Rule> rules_for(Symbol p) const;
  /// Defined predicates in order of first definition.
  const std::vector<Symbol>& defined_predicates() const { return defined_order_; }

  const std::vector<OpenFunctionDecl>& open_functions() const { return open_functions_; }
  const OpenFunctionDecl* open_function(Symbol p) const;

  const std::vector<Axiom>& axioms() const { return axioms_; }

  /// Predicates used somewhere but neither defined nor builtin, sorted.
  std::vector<Symbol> open_predicates() const;
  bool is_open(Symbol p) const;

  std::optional<std::size_t> predicate_arity(Symbol p) const;
  std::optional<std::size_t> functor_arity(Symbol f) const;

  /// Checks every predicate and functor arity in `f` against the theory.
  void check_arities(const Formula& f, const SourcePos& pos) const;

  /// Exclusive upper bound of variable ids used by the statements.
  VarId var_limit() const { return var_limit_; }
  void note_var_limit(VarId limit) { var_limit_ = std::max(var_limit_, limit); }

  std::string to_string() const;

 private:
  void register_formula(const Formula& f, const SourcePos& pos);
  void register_term(const Term& t, const SourcePos& pos);
  void register_predicate(Symbol p, std::size_t arity, const SourcePos& pos);

  std::vector<Statement> statements_;
  std::unordered_map<Symbol, std::vector<Rule>> definitions_;
  std::vector<Symbol> defined_order_;
  std::vector<Axiom> axioms_;
  std::vector<OpenFunctionDecl> open_functions_;
  std::unordered_map<Symbol, std::size_t> predicate_arity_;
  std::unordered_map<Symbol, std::size_t> functor_arity_;
  std::vector<Symbol> used_order_;
  VarId var_limit_ = 0;
};

/// Parses theory text. `first_var` is the first variable id handed out.
Theory parse_theory(std::string_view source, std::string_view file = "<input>",
                    VarId first_var = 0);

/// Reads and merges theory files, then validates the result.
Theory load_theory_files(std::span<const std::string> paths);

/// Parses a query formula against `theory`'s arity map. Free variables stay
/// free; ids start at `next_var`, which is advanced past the ids used.
Formula parse_query(std::string_view source, const Theory& theory, VarId& next_var);

Term parse_term(std::string_view source, VarId& next_var);

/// Clark completion of the rules defining `pred`/`arity`:
///   forall(Z1..Zn)$ pred(Z1..Zn) <=> (exists(x1)$ Z=t1 & F1) ; ... .
/// Fresh ids for the Zi are taken from `next_var`. Throws std::invalid_argument
/// if a rule's head is not `pred`/`arity`.
Formula complete(std::span<const Rule> rules, Symbol pred, std::size_t arity, VarId& next_var);

/// The totality, functionality and domain-typing axioms an open-function
/// declaration abbreviates, in that order.
std::vector<Formula> expand_open_function(const OpenFunctionDecl& decl, VarId& next_var);

}  // namespace tempabd
