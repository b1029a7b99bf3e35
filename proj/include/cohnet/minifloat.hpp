#pragma once

// Tiny IEEE-style binary floating-point formats, their exhaustive arithmetic
// tables, activation functions, and a direct dense-network evaluator.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cohnet/finset.hpp"

namespace cohnet {

enum class Specials { ieee_nan, saturating };

struct FloatFormat {
  unsigned exponent_bits = 2;
  unsigned mantissa_bits = 1;
  int bias = 1;
  Specials specials = Specials::ieee_nan;

  /// Bias 2^(e-1) - 1; throws unless 1 <= e, 1+e+m <= 8 and, with NaNs, m >= 1.
  static FloatFormat make(unsigned e, unsigned m, Specials sp = Specials::ieee_nan);
  unsigned bits() const { return 1 + exponent_bits + mantissa_bits; }
  std::size_t size() const { return std::size_t{1} << bits(); }
  /// s1e<E>m<M>, plus ":sat" in saturating mode.
  std::string name() const;

  friend bool operator==(const FloatFormat&, const FloatFormat&) = default;
};

/// `s1e<E>m<M>[:sat|:nan]`
FloatFormat parse_float_format(std::string_view text);

/// Finite values are (-1)^negative * significand * 2^exponent.
struct Decoded {
  enum class Kind { finite, infinite, nan };
  Kind kind = Kind::finite;
  bool negative = false;
  std::int64_t significand = 0;
  int exponent = 0;

  bool is_zero() const { return kind == Kind::finite && significand == 0; }
  double to_double() const;
};

Decoded decode(const FloatFormat& fmt, Element pattern);

struct FloatTables {
  FloatFormat format;
  std::vector<Decoded> values;  // indexed by pattern
  FinFunction add;              // R x R -> R, index a * |R| + b
  FinFunction mul;
  std::optional<Element> nan;   // the canonical NaN in ieee mode

  FinSet set() const { return FinSet(values.size()); }
  Element apply_add(Element a, Element b) const { return add(a * values.size() + b); }
  Element apply_mul(Element a, Element b) const { return mul(a * values.size() + b); }
  Element positive_zero() const { return 0; }
  Element negative_zero() const;
  /// The pattern of the exactly representable finite `x`, if any.
  std::optional<Element> pattern_of(double x) const;
};

FloatTables build_tables(const FloatFormat& fmt);

/// "id", "relu" or "table:<path>".
FinFunction activation(std::string_view name, const FloatTables& tables);
/// Lines of `pattern -> pattern`; every pattern must appear exactly once.
FinFunction parse_activation_table(std::string_view text, const FloatTables& tables);

/// Hex pattern spelling used in files, e.g. 0x3.
std::string pattern_string(Element p);

struct LayerParams {
  std::vector<std::vector<Element>> w; // w[j][i]: input i into output j
  std::vector<Element> b;

  friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

/// Right-nested: add(x0, add(x1, ... add(x_{n-2}, x_{n-1}))).
Element add_n(const FloatTables& tables, const std::vector<Element>& xs);

/// Layer k computes sigma_k(add(add_n(mul(w_ji, x_i)), b_j)) for every output j.
std::vector<Element> oracle_eval(const FloatTables& tables,
                                 const std::vector<FinFunction>& activations,
                                 const std::vector<LayerParams>& layers,
                                 const std::vector<Element>& input);

} // namespace cohnet
