#pragma once

// Building theories from schemas and instances, gluing presentations, and
// moving models along interpretations.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cohnet/schema.hpp"
#include "cohnet/semantics.hpp"
#include "cohnet/syntax.hpp"

namespace cohnet {

/// Sorts go to target contexts, operations to term tuples over the flattened
/// argument context (one term per factor of the result's context), predicates
/// to formulas over the flattened argument context.
struct Interpretation {
  Theory source;
  Theory target;
  std::map<std::string, Context, std::less<>> sort_map;
  std::map<std::string, std::vector<Term>, std::less<>> op_map;
  std::map<std::string, Formula, std::less<>> pred_map;

  /// Throws SortError unless every source symbol is mapped with matching shape.
  void validate() const;
  const Context& sort_image(std::string_view sort) const;
  /// Concatenation of the images of the sorts in `ctx`.
  Context flatten(const Context& ctx) const;
  /// True when sorts go to single sorts and symbols to symbols of the same shape.
  bool is_renaming() const;

  friend bool operator==(const Interpretation&, const Interpretation&) = default;
};

Interpretation identity_interpretation(const Theory& thy);
/// first : A -> B, second : B -> C, giving A -> C.
Interpretation compose(const Interpretation& first, const Interpretation& second);

/// `ctx` is a source context; results live over flatten(ctx).
std::vector<Term> translate_term(const Interpretation& iota, const Context& ctx, const Term& t);
Formula translate_formula(const Interpretation& iota, const Context& ctx, const Formula& f);
Sequent translate_sequent(const Interpretation& iota, const Sequent& s);
/// Schema axioms survive a renaming; otherwise they are expanded first.
std::vector<Axiom> translate_axiom(const Interpretation& iota, const Axiom& ax);

class PrecomposeError : public Error {
public:
  enum class Kind { target_invalid, source_axiom_invalid };
  PrecomposeError(Kind kind, Witness w, const std::string& what)
      : Error(what), kind_(kind), witness_(std::move(w)) {}
  Kind kind() const { return kind_; }
  /// For source_axiom_invalid, `axiom` is the source axiom index and `part`
  /// indexes its translation.
  const Witness& witness() const { return witness_; }

private:
  Kind kind_;
  Witness witness_;
};

struct PrecomposeOptions {
  bool check_target = true;
  bool check_translation = true;
  unsigned jobs = 1;
};

SetStructure precompose(const Interpretation& iota, const SetStructure& m,
                        const PrecomposeOptions& opts = {});

// Schemas -------------------------------------------------------------------

Theory schema_to_theory(const CategoryPresentation& d);
SetStructure instance_to_structure(const Instance& inst);
Instance structure_to_instance(const SetStructure& m, const CategoryPresentation& d);
/// Name of the constant standing for element `x` of `object`.
std::string element_constant(std::string_view object, Element x);
/// Models are exactly the structures isomorphic to instance_to_structure(inst)
/// extended by the element constants.
Theory hard_code(const Instance& inst);
/// instance_to_structure(inst) with every element constant interpreted.
SetStructure hard_code_model(const Instance& inst);

// Gluing ----------------------------------------------------------------------

struct SymbolPair {
  std::string left;
  std::string right;
};

struct PushoutNaming {
  std::string left_prefix = "left.";
  std::string right_prefix = "right.";
};

struct TheoryPushout {
  Theory left;
  Theory right;
  Theory apex;
  Interpretation left_leg;
  Interpretation right_leg;
};

/// Identified symbols keep the left name; the rest are prefixed. Axioms are
/// the union of both sides, structural duplicates dropped.
TheoryPushout pushout(const Theory& left, const Theory& right,
                      const std::vector<SymbolPair>& shared, const PushoutNaming& naming = {});

// Text form:
//   interpretation;
//   sort N -> [V, V];
//   op f.0 [x0:V, x1:V] -> (x0);
//   pred P [x0:V] -> exists [y:V] x0 = y;
Interpretation parse_interpretation(std::string_view text, const Theory& source,
                                    const Theory& target);
std::string print_interpretation(const Interpretation& iota);

} // namespace cohnet
