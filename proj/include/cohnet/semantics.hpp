#pragma once

// Interpretation of coherent formulas in finite sets: structures, validity
// of sequents, model checking and model morphisms.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cohnet/finset.hpp"
#include "cohnet/syntax.hpp"

namespace cohnet {

/// Sorts, operations and predicates interpreted index-aligned with the
/// signature's declaration order.
struct SetStructure {
  Signature signature;
  std::vector<FinSet> sorts;
  std::vector<FinFunction> ops;   // dom = product of argument sets
  std::vector<Subobject> preds;   // ⊆ product of argument sets

  /// Throws unless every shape matches the signature.
  void validate() const;

  const FinSet& sort(std::string_view name) const;
  const FinFunction& op(std::string_view name) const;
  const Subobject& pred(std::string_view name) const;
  ProductSet context_set(const Context& ctx) const;
  ProductSet arg_set(const std::vector<std::string>& args) const { return context_set(args); }
  Algebra algebra() const;

  friend bool operator==(const SetStructure&, const SetStructure&) = default;
};

/// Identifies an axiom of a theory; `part` indexes the expansion of a schema
/// axiom (always 0 for plain sequents).
struct AxiomId {
  std::size_t axiom = 0;
  std::size_t part = 0;

  friend bool operator==(const AxiomId&, const AxiomId&) = default;
};

struct Witness {
  AxiomId axiom;
  std::size_t tuple = 0;            // index into the product of the sequent's context
  std::vector<Element> elements;    // the same tuple, decoded
};

struct ValidityReport {
  std::optional<Witness> witness;   // present iff invalid

  bool valid() const { return !witness.has_value(); }
  explicit operator bool() const { return valid(); }
};

FinFunction eval_term(const SetStructure& m, const Context& ctx, const Term& t);
Subobject eval_formula(const SetStructure& m, const Context& ctx, const Formula& f);

/// Valid iff meet(lhs) ⊆ join(rhs); the witness is the least failing tuple.
ValidityReport check_sequent(const SetStructure& m, const Sequent& s, AxiomId id = {});
/// Checks one axiom; schema axioms are decided directly with the same
/// verdict and witness as checking their expansion in order.
ValidityReport check_axiom(const SetStructure& m, const Axiom& ax, std::size_t index = 0);
/// First failing axiom in declaration order. With jobs > 1, axioms are
/// checked concurrently; the reported witness is the same.
ValidityReport check_model(const SetStructure& m, const Theory& thy, unsigned jobs = 1);
/// Reference path: expands every schema axiom and checks sequents one by one.
ValidityReport check_model_expanded(const SetStructure& m, const Theory& thy);

struct MorphismFailure {
  SymbolKind kind = SymbolKind::op;
  std::string symbol;
  std::size_t tuple = 0;
};

/// α: per-sort functions M(s) -> M'(s), indexed like the signature's sorts.
std::optional<MorphismFailure> check_model_morphism(const SetStructure& m,
                                                    const SetStructure& m2,
                                                    const SortFamily& alpha);

/// Natural isomorphism of structures: bijections commuting with every
/// operation and carrying each predicate onto the other's.
std::optional<SortFamily> find_structure_iso(const SetStructure& a, const SetStructure& b);

/// Relabels every sort of `m` along the bijections `alpha`.
SetStructure transport(const SetStructure& m, const SortFamily& alpha);

// Text form:  sort V = 3;  op f = [0 2 1];  pred P = {0 4};
SetStructure parse_structure(std::string_view text, const Signature& sig);
std::string print_structure(const SetStructure& m);
std::string describe(const Theory& thy, const Witness& w);

} // namespace cohnet
