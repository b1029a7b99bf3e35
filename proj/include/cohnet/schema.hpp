#pragma once

// Functorial database schemas as finite category presentations, and their
// instances as functors into finite sets.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cohnet/finset.hpp"

namespace cohnet {

struct Generator {
  std::string name;
  std::string source;
  std::string target;

  friend bool operator==(const Generator&, const Generator&) = default;
};

/// A composable sequence of generators in diagrammatic order (first applied
/// first). The empty path at `start` is the identity on `start`.
struct Path {
  std::string start;
  std::vector<std::string> generators;

  friend bool operator==(const Path&, const Path&) = default;
};

struct PathEquation {
  Path lhs;
  Path rhs;

  friend bool operator==(const PathEquation&, const PathEquation&) = default;
};

class CategoryPresentation {
public:
  CategoryPresentation() = default;

  void add_object(const std::string& name);
  void add_generator(const std::string& name, const std::string& source, const std::string& target);
  /// Both paths must share source and target.
  void add_equation(Path lhs, Path rhs);

  const std::vector<std::string>& objects() const { return objects_; }
  const std::vector<Generator>& generators() const { return generators_; }
  const std::vector<PathEquation>& equations() const { return equations_; }

  std::optional<std::size_t> object_index(std::string_view name) const;
  std::optional<std::size_t> generator_index(std::string_view name) const;
  std::size_t require_object(std::string_view name) const;
  std::size_t require_generator(std::string_view name) const;
  /// Validates the path and returns its target object.
  std::string path_target(const Path& p) const;

  friend bool operator==(const CategoryPresentation&, const CategoryPresentation&) = default;

private:
  std::vector<std::string> objects_;
  std::vector<Generator> generators_;
  std::vector<PathEquation> equations_;
};

/// A functor from a presentation into finite sets, stored index-aligned with
/// the schema's objects and generators.
struct Instance {
  CategoryPresentation schema;
  std::vector<FinSet> sets;
  std::vector<FinFunction> maps;

  /// Throws unless every generator's function has the right endpoints.
  void validate() const;
  const FinSet& set(std::string_view object) const;
  const FinFunction& map(std::string_view generator) const;
  /// Composite of the generator functions along `p`.
  FinFunction along(const Path& p) const;
  Algebra algebra() const;
};

struct NatTransformCandidate {
  Instance source;
  Instance target;
  std::vector<FinFunction> components; // indexed by object
};

struct EquationViolation {
  std::size_t equation;
  Element witness;
  std::string message;
};

struct NaturalityFailure {
  std::size_t generator;
  Element witness;
  std::string message;
};

/// nullopt when every path equation holds pointwise.
std::optional<EquationViolation> check_functorial(const Instance& inst);

/// nullopt when α_dst ∘ F(g) = G(g) ∘ α_src for every generator g.
std::optional<NaturalityFailure> check_natural(const NatTransformCandidate& cand);

/// Componentwise composite second ∘ first.
NatTransformCandidate compose(const NatTransformCandidate& first, const NatTransformCandidate& second);

enum class BuiltinSchema { sort, oper, span, pol, shop };

CategoryPresentation builtin(BuiltinSchema which);
CategoryPresentation builtin(std::string_view name);

// Text formats:
//   object X;  arrow f : X -> Y;  equation X : f g = h;  (`id` is the empty path)
//   set X = 3;  map f = [0 1 1];
CategoryPresentation parse_schema(std::string_view text);
std::string print_schema(const CategoryPresentation& schema);
Instance parse_instance(std::string_view text, const CategoryPresentation& schema);
std::string print_instance(const Instance& inst);

} // namespace cohnet
