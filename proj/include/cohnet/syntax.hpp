#pragma once

// Coherent signatures, terms, formulas, sequents and theories, with finite
// connectives only. Variables are de Bruijn positions into a typed context;
// an existential binds position 0 of its body's context.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cohnet/error.hpp"

namespace cohnet {

struct OpDecl {
  std::string name;
  std::vector<std::string> args;
  std::string result;

  bool is_constant() const { return args.empty(); }
  friend bool operator==(const OpDecl&, const OpDecl&) = default;
};

struct PredDecl {
  std::string name;
  std::vector<std::string> args;

  friend bool operator==(const PredDecl&, const PredDecl&) = default;
};

enum class SymbolKind { sort, op, pred };

class Signature {
public:
  void add_sort(const std::string& name);
  void add_op(const std::string& name, std::vector<std::string> args, const std::string& result);
  void add_constant(const std::string& name, const std::string& sort) { add_op(name, {}, sort); }
  void add_pred(const std::string& name, std::vector<std::string> args);

  const std::vector<std::string>& sorts() const { return sorts_; }
  const std::vector<OpDecl>& ops() const { return ops_; }
  const std::vector<PredDecl>& preds() const { return preds_; }

  std::optional<std::size_t> sort_index(std::string_view name) const;
  std::optional<std::size_t> op_index(std::string_view name) const;
  std::optional<std::size_t> pred_index(std::string_view name) const;
  std::optional<SymbolKind> kind_of(std::string_view name) const;
  std::size_t require_sort(std::string_view name) const;
  const OpDecl& require_op(std::string_view name) const;
  const PredDecl& require_pred(std::string_view name) const;

  friend bool operator==(const Signature& a, const Signature& b) {
    return a.sorts_ == b.sorts_ && a.ops_ == b.ops_ && a.preds_ == b.preds_;
  }

private:
  void claim(const std::string& name, SymbolKind kind, std::size_t index);

  std::vector<std::string> sorts_;
  std::vector<OpDecl> ops_;
  std::vector<PredDecl> preds_;
  std::map<std::string, std::pair<SymbolKind, std::size_t>, std::less<>> names_;
};

struct Term {
  enum class Kind { var, app };

  Kind kind = Kind::var;
  std::size_t var = 0;
  std::string op;
  std::vector<Term> args;

  static Term variable(std::size_t index) { return Term{Kind::var, index, {}, {}}; }
  static Term apply(std::string op, std::vector<Term> args = {}) {
    return Term{Kind::app, 0, std::move(op), std::move(args)};
  }
  bool is_var() const { return kind == Kind::var; }

  friend bool operator==(const Term&, const Term&) = default;
};

struct Formula {
  enum class Kind { top, bottom, pred, eq, conj, disj, exists };

  Kind kind = Kind::top;
  std::string name;            // predicate name, or the bound sort of an existential
  std::vector<Term> terms;     // pred arguments, or the two sides of an equation
  std::vector<Formula> parts;  // conjuncts/disjuncts, or the single existential body

  static Formula truth() { return {Kind::top, {}, {}, {}}; }
  static Formula falsity() { return {Kind::bottom, {}, {}, {}}; }
  static Formula predicate(std::string p, std::vector<Term> args) {
    return {Kind::pred, std::move(p), std::move(args), {}};
  }
  static Formula equals(Term l, Term r) { return {Kind::eq, {}, {std::move(l), std::move(r)}, {}}; }
  static Formula all_of(std::vector<Formula> fs) { return {Kind::conj, {}, {}, std::move(fs)}; }
  static Formula any_of(std::vector<Formula> fs) { return {Kind::disj, {}, {}, std::move(fs)}; }
  static Formula exists(std::string sort, Formula body) {
    return {Kind::exists, std::move(sort), {}, {std::move(body)}};
  }

  friend bool operator==(const Formula&, const Formula&) = default;
};

using Context = std::vector<std::string>;

struct Sequent {
  Context context;
  std::vector<Formula> lhs;
  std::vector<Formula> rhs;

  friend bool operator==(const Sequent&, const Sequent&) = default;
};

// Compact encodings of regular sequent families; `expand` gives their meaning.
struct DistinctConstants {
  std::string sort;
  std::vector<std::string> constants;
  friend bool operator==(const DistinctConstants&, const DistinctConstants&) = default;
};

struct CoverByConstants {
  std::string sort;
  std::vector<std::string> constants;
  friend bool operator==(const CoverByConstants&, const CoverByConstants&) = default;
};

struct GraphRow {
  std::vector<std::string> inputs;
  std::string output;
  friend bool operator==(const GraphRow&, const GraphRow&) = default;
};

struct OpGraph {
  std::string op;
  std::vector<GraphRow> rows;
  friend bool operator==(const OpGraph&, const OpGraph&) = default;
};

using SchemaAxiom = std::variant<DistinctConstants, CoverByConstants, OpGraph>;
using Axiom = std::variant<Sequent, SchemaAxiom>;

struct Theory {
  Signature signature;
  std::vector<Axiom> axioms;

  friend bool operator==(const Theory&, const Theory&) = default;
};

// Sort checking ---------------------------------------------------------

class SortError : public Error {
public:
  SortError(std::optional<std::size_t> axiom, const std::string& what)
      : Error(axiom ? "axiom " + std::to_string(*axiom) + ": " + what : what), axiom_(axiom) {}
  std::optional<std::size_t> axiom() const { return axiom_; }

private:
  std::optional<std::size_t> axiom_;
};

/// The sort of `t` in `ctx`; throws SortError.
std::string sort_of(const Signature& sig, const Context& ctx, const Term& t);
void sort_check(const Signature& sig, const Context& ctx, const Formula& f);
void sort_check(const Signature& sig, const Sequent& s);
void sort_check(const Signature& sig, const SchemaAxiom& ax);
/// Throws SortError naming the first offending axiom.
void sort_check(const Theory& thy);

std::vector<Sequent> expand(const SchemaAxiom& ax);
/// Number of sequents `expand` would produce, without building them.
std::size_t expanded_size(const SchemaAxiom& ax);

// Substitution ------------------------------------------------------------

/// Adds `by` to every variable index ≥ `cutoff`.
Term shift(const Term& t, std::size_t by, std::size_t cutoff = 0);
/// Replaces Var(i) with `values[i]`.
Term substitute(const Term& t, const std::vector<Term>& values);
/// Capture-avoiding: under binders, values are shifted past the bound slots.
Formula substitute(const Formula& f, const std::vector<Term>& values);

// Text form ---------------------------------------------------------------
//   sort R;  op add : R,R -> R;  const c : R;  pred P : R,R;
//   axiom [x:R, y:R] P(x,y), x = y |- or(P(y,x), exists [z:R] P(x,z));
//   schema distinct R { c0 c1 };  schema cover R { c0 c1 };
//   schema graph add { (c0,c1) -> c1; };

Theory parse_theory(std::string_view text);
std::string print_theory(const Theory& thy);
std::string print_term(const Signature& sig, const Term& t, const std::vector<std::string>& names);
std::string print_formula(const Signature& sig, const Formula& f, std::vector<std::string> names);
std::string print_axiom(const Signature& sig, const Axiom& ax);

namespace detail {
class TokenStream;
Term parse_term(TokenStream& ts, const Signature& sig, const std::vector<std::string>& scope);
Formula parse_formula(TokenStream& ts, const Signature& sig, std::vector<std::string> scope);
/// Parses `[x:S, y:T]`, appending names and sorts.
void parse_context(TokenStream& ts, const Signature& sig, std::vector<std::string>& names,
                   Context& sorts);
std::vector<std::string> variable_names(const Signature& sig, std::size_t count,
                                        std::string_view stem = "x");
std::string print_context(const Context& ctx, const std::vector<std::string>& names);
} // namespace detail

} // namespace cohnet
