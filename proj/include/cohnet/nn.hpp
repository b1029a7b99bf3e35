#pragma once

// Dense networks over a finite float format as coherent theories: the float
// theory, one theory per layer, span datasets, and inference by precomposing
// a parameter model along the span interpretation.

#include <string>
#include <string_view>
#include <vector>

#include "cohnet/constructions.hpp"
#include "cohnet/minifloat.hpp"

namespace cohnet {

struct Architecture {
  std::vector<std::string> activations; // one per layer
  std::vector<std::size_t> widths;      // layers + 1 entries

  std::size_t layers() const { return activations.size(); }
  std::size_t input_width() const { return widths.front(); }
  std::size_t output_width() const { return widths.back(); }
  void validate() const;

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

/// `<a0>-<s1>-<a1>-...-<sn>-<an>`, e.g. 2-relu-2-id-1.
Architecture parse_architecture(std::string_view text);
std::string print_architecture(const Architecture& arch);
/// `first` feeds `second`.
Architecture compose(const Architecture& first, const Architecture& second);

using ParamAssignment = std::vector<LayerParams>;

void check_shape(const Architecture& arch, const ParamAssignment& params, const FloatTables& tables);
/// {"layers":[{"w":[["0x3","0x0"],...],"b":["0x0",...]}, ...]}
ParamAssignment parse_params(std::string_view json);
std::string print_params(const ParamAssignment& params);

struct ParamRef {
  enum class Kind { weight, bias };
  Kind kind = Kind::weight;
  std::size_t layer = 1; // 1-based
  std::size_t row = 0;
  std::size_t col = 0;   // weights only

  friend bool operator==(const ParamRef&, const ParamRef&) = default;
};

/// w.<layer>.<row>.<col> or b.<layer>.<row>
std::string param_constant(const ParamRef& p);
Element param_value(const ParamAssignment& params, const ParamRef& p);

struct TieConstraint {
  enum class Kind { tie, fix };
  Kind kind = Kind::tie;
  ParamRef lhs;
  ParamRef rhs;      // tie
  Element value = 0; // fix

  friend bool operator==(const TieConstraint&, const TieConstraint&) = default;
};

/// Lines `tie w[1][0,0] w[1][1,1]` or `fix b[2][0] 0x6`; `#` comments.
std::vector<TieConstraint> parse_constraints(std::string_view text);
std::string print_constraints(const std::vector<TieConstraint>& cs);
void check_constraints(const Architecture& arch, const FloatTables& tables,
                       const std::vector<TieConstraint>& cs);
bool satisfies(const ParamAssignment& params, const std::vector<TieConstraint>& cs);

/// A dataset of input/output rows; f : N -> R^n and t : N -> R^m with tuples
/// encoded last coordinate fastest.
struct SpanDataset {
  FloatFormat format;
  std::size_t n = 0;
  std::size_t m = 0;
  FinFunction f;
  FinFunction t;

  std::size_t rows() const { return f.dom().size(); }
  std::vector<Element> input(std::size_t row) const;
  std::vector<Element> output(std::size_t row) const;

  friend bool operator==(const SpanDataset&, const SpanDataset&) = default;
};

/// Header `dataset <fmt> <n> <m>`, then one `x... -> t...` row per element of N.
SpanDataset parse_dataset(std::string_view text);
std::string print_dataset(const SpanDataset& d);
/// Index of the first row where the two datasets differ, or nullopt.
std::optional<std::size_t> first_difference(const SpanDataset& a, const SpanDataset& b);

/// Pullback of a.t against b.f, with legs a.f and b.t.
SpanDataset compose_spans(const SpanDataset& a, const SpanDataset& b);

// Theories ----------------------------------------------------------------------

/// a.<name> with characters outside [A-Za-z0-9_] replaced by '_'.
std::string activation_op(std::string_view sigma_name);

struct FloatTheory {
  Theory theory;
  SetStructure model; // the defining structure
};

/// Hard-coded (V = R, E = R x R, s = add, t = mul, a.<name> = sigma) plus
/// projections p1, p2 : E -> V and pair : V,V -> E, all pinned by graphs.
FloatTheory float_theory(const FloatTables& tables, std::string_view sigma_name);

/// Span schema {N; f.i : N -> V, t.j : N -> V} glued to the float theory with sigma = id.
Theory rspan_theory(std::size_t n, std::size_t m, const FloatTables& tables);

struct NetworkTheory {
  Architecture arch;
  std::size_t first_layer = 1;
  Theory theory;       // parameters are free constants
  Theory rspan;        // rspan_theory(a0, an)
  Interpretation iota; // rspan -> theory
};

NetworkTheory layer_theory(std::string_view sigma, std::size_t n, std::size_t m,
                           const FloatTables& tables, std::size_t layer = 1);
NetworkTheory network_theory(const Architecture& arch, const FloatTables& tables,
                             std::size_t first_layer = 1);
/// Glues over the shared float vocabulary; `b`'s layers must follow `a`'s.
NetworkTheory compose_theories(const NetworkTheory& a, const NetworkTheory& b,
                               const FloatTables& tables);
/// One closed equation per constraint.
NetworkTheory apply_constraints(const NetworkTheory& g, const std::vector<TieConstraint>& cs);

/// Float symbols by their defining tables, parameter constants by `params`.
SetStructure build_model(const NetworkTheory& g, const FloatTables& tables,
                         const ParamAssignment& params);
/// Precomposes `m` along g.iota; rows sorted by input.
SpanDataset infer(const NetworkTheory& g, const SetStructure& m, const FloatTables& tables,
                  const PrecomposeOptions& opts = {});
/// Direct evaluation over the whole input domain.
SpanDataset oracle_dataset(const Architecture& arch, const FloatTables& tables,
                           const ParamAssignment& params);

inline constexpr std::size_t max_input_domain = std::size_t{1} << 20;

} // namespace cohnet
