#include "cohnet/minifloat.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "lexer.hpp"

namespace cohnet {

using boost::multiprecision::cpp_int;

FloatFormat FloatFormat::make(unsigned e, unsigned m, Specials sp) {
  if (e < 1)
    throw Error("float format needs at least one exponent bit");
  if (1 + e + m > 8)
    throw Error("float format wider than 8 bits");
  if (sp == Specials::ieee_nan && m < 1)
    throw Error("NaN encoding needs at least one mantissa bit");
  return FloatFormat{e, m, (1 << (e - 1)) - 1, sp};
}

std::string FloatFormat::name() const {
  std::string s = "s1e" + std::to_string(exponent_bits) + "m" + std::to_string(mantissa_bits);
  return specials == Specials::saturating ? s + ":sat" : s;
}

FloatFormat parse_float_format(std::string_view text) {
  std::string_view body = text, mode;
  if (auto colon = text.find(':'); colon != std::string_view::npos) {
    body = text.substr(0, colon);
    mode = text.substr(colon + 1);
  }
  auto bad = [&] { throw Error("bad float format '" + std::string(text) + "'"); };
  Specials sp = Specials::ieee_nan;
  if (mode == "sat")
    sp = Specials::saturating;
  else if (!mode.empty() && mode != "nan")
    bad();
  if (body.substr(0, 3) != "s1e")
    bad();
  auto mpos = body.find('m');
  if (mpos == std::string_view::npos || mpos == 3 || mpos + 1 == body.size())
    bad();
  auto digits = [&](std::string_view d) {
    unsigned v = 0;
    for (char c : d) {
      if (c < '0' || c > '9' || v > 100)
        bad();
      v = v * 10 + unsigned(c - '0');
    }
    return v;
  };
  return FloatFormat::make(digits(body.substr(3, mpos - 3)), digits(body.substr(mpos + 1)), sp);
}

double Decoded::to_double() const {
  double v;
  if (kind == Kind::nan)
    v = std::nan("");
  else if (kind == Kind::infinite)
    v = HUGE_VAL;
  else
    v = std::ldexp(double(significand), exponent);
  return negative ? -v : v;
}

Decoded decode(const FloatFormat& fmt, Element pattern) {
  if (pattern >= fmt.size())
    throw Error("pattern outside the format");
  const unsigned m = fmt.mantissa_bits, e = fmt.exponent_bits;
  const Element mant = pattern & ((Element{1} << m) - 1);
  const Element ex = (pattern >> m) & ((Element{1} << e) - 1);
  Decoded d;
  d.negative = (pattern >> (m + e)) & 1;
  const Element all_ones = (Element{1} << e) - 1;
  if (fmt.specials == Specials::ieee_nan && ex == all_ones) {
    d.kind = mant == 0 ? Decoded::Kind::infinite : Decoded::Kind::nan;
    return d;
  }
  if (ex == 0) {
    d.significand = std::int64_t(mant);
    d.exponent = 1 - fmt.bias - int(m);
  } else {
    d.significand = std::int64_t((Element{1} << m) + mant);
    d.exponent = int(ex) - fmt.bias - int(m);
  }
  return d;
}

Element FloatTables::negative_zero() const {
  return Element{1} << (format.exponent_bits + format.mantissa_bits);
}

std::optional<Element> FloatTables::pattern_of(double x) const {
  for (Element p = 0; p < values.size(); ++p) {
    const auto& d = values[p];
    if (d.kind == Decoded::Kind::finite && d.to_double() == x &&
        std::signbit(x) == d.negative)
      return p;
  }
  return std::nullopt;
}

namespace {

// Exact arithmetic on integers scaled by 2^scale, then rounding to the
// nearest pattern with ties to even.
class Rounder {
public:
  explicit Rounder(const FloatFormat& fmt, const std::vector<Decoded>& values)
      : fmt_(fmt), values_(values) {
    const int q = 1 - fmt.bias - int(fmt.mantissa_bits);
    scale_ = std::min(q, 2 * q);
    for (Element p = 0; p < values.size(); ++p) {
      const auto& d = values[p];
      if (d.kind == Decoded::Kind::finite && !d.negative)
        positives_.push_back({magnitude(d), p});
    }
    std::sort(positives_.begin(), positives_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    // max plus one ulp: where the next value would sit, used only for overflow
    const auto& top = values_[positives_.back().second];
    beyond_ = positives_.back().first + (cpp_int(1) << (top.exponent - scale_));
    sign_bit_ = Element{1} << (fmt.exponent_bits + fmt.mantissa_bits);
    const Element all_ones = (Element{1} << fmt.exponent_bits) - 1;
    inf_ = all_ones << fmt.mantissa_bits;
    if (fmt.specials == Specials::ieee_nan)
      nan_ = inf_ | (Element{1} << (fmt.mantissa_bits - 1));
  }

  cpp_int magnitude(const Decoded& d) const {
    return cpp_int(d.significand) << (d.exponent - scale_);
  }
  cpp_int signed_value(const Decoded& d) const {
    cpp_int v = magnitude(d);
    return d.negative ? cpp_int(-v) : v;
  }
  cpp_int product(const Decoded& a, const Decoded& b) const {
    // exponents add; the sum never drops below 2*q, hence the choice of scale_
    cpp_int v = cpp_int(a.significand * b.significand) << (a.exponent + b.exponent - scale_);
    return a.negative != b.negative ? cpp_int(-v) : v;
  }

  // `v` is nonzero or a zero whose sign the caller already decided.
  Element round(const cpp_int& v, bool negative_zero) const {
    if (v == 0)
      return negative_zero ? sign_bit_ : 0;
    const bool neg = v < 0;
    const cpp_int a = neg ? cpp_int(-v) : v;
    return (neg ? sign_bit_ : 0) | round_magnitude(a);
  }

  std::optional<Element> nan() const { return nan_; }
  Element inf(bool negative) const { return (negative ? sign_bit_ : 0) | inf_; }

private:
  Element round_magnitude(const cpp_int& a) const {
    auto it = std::lower_bound(positives_.begin(), positives_.end(), a,
                               [](const auto& c, const cpp_int& x) { return c.first < x; });
    if (it != positives_.end() && it->first == a)
      return it->second;
    if (it == positives_.end()) {
      const auto& [max_mag, max_pat] = positives_.back();
      if (fmt_.specials == Specials::saturating)
        return max_pat;
      if (a >= beyond_)
        return inf_;
      const cpp_int twice = 2 * a, mid = max_mag + beyond_;
      // the virtual neighbour above max has an even significand
      return twice < mid ? max_pat : inf_;
    }
    const auto& [hi_mag, hi_pat] = *it;
    const auto& [lo_mag, lo_pat] = *(it - 1);
    const cpp_int twice = 2 * a, mid = lo_mag + hi_mag;
    if (twice < mid)
      return lo_pat;
    if (twice > mid)
      return hi_pat;
    return (lo_pat & 1) == 0 ? lo_pat : hi_pat;
  }

  const FloatFormat& fmt_;
  const std::vector<Decoded>& values_;
  int scale_ = 0;
  std::vector<std::pair<cpp_int, Element>> positives_;
  cpp_int beyond_;
  Element sign_bit_ = 0;
  Element inf_ = 0;
  std::optional<Element> nan_;
};

} // namespace

FloatTables build_tables(const FloatFormat& fmt) {
  if (fmt.bits() > 8)
    throw Error("float format wider than 8 bits");
  const std::size_t n = fmt.size();
  FloatTables t;
  t.format = fmt;
  for (Element p = 0; p < n; ++p)
    t.values.push_back(decode(fmt, p));
  Rounder r(fmt, t.values);
  t.nan = r.nan();
  using K = Decoded::Kind;
  std::vector<Element> add(n * n), mul(n * n);
  for (Element i = 0; i < n; ++i) {
    for (Element j = 0; j < n; ++j) {
      const Decoded &a = t.values[i], &b = t.values[j];
      Element& s = add[i * n + j];
      Element& p = mul[i * n + j];
      if (a.kind == K::nan || b.kind == K::nan) {
        s = p = *t.nan;
        continue;
      }
      if (a.kind == K::infinite || b.kind == K::infinite) {
        if (a.kind == K::infinite && b.kind == K::infinite)
          s = a.negative == b.negative ? r.inf(a.negative) : *t.nan;
        else
          s = r.inf(a.kind == K::infinite ? a.negative : b.negative);
        if (a.is_zero() || b.is_zero())
          p = *t.nan;
        else
          p = r.inf(a.negative != b.negative);
        continue;
      }
      s = r.round(r.signed_value(a) + r.signed_value(b), a.negative && b.negative);
      p = r.round(r.product(a, b), a.negative != b.negative);
    }
  }
  const FinSet rs(n), rr(n * n);
  t.add = FinFunction(rr, rs, std::move(add));
  t.mul = FinFunction(rr, rs, std::move(mul));
  return t;
}

FinFunction parse_activation_table(std::string_view text, const FloatTables& tables) {
  detail::TokenStream ts(text);
  const std::size_t n = tables.values.size();
  std::vector<std::optional<Element>> table(n);
  while (!ts.at_end()) {
    const auto at = ts.peek();
    const auto x = ts.number();
    ts.expect("->");
    const auto y = ts.number();
    if (x >= n || y >= n)
      detail::TokenStream::fail_at(at, "pattern outside the format");
    if (table[x])
      detail::TokenStream::fail_at(at, "pattern listed twice");
    table[x] = y;
  }
  std::vector<Element> out;
  for (Element x = 0; x < n; ++x) {
    if (!table[x])
      throw Error("activation table has no entry for " + pattern_string(x));
    out.push_back(*table[x]);
  }
  return FinFunction(tables.set(), tables.set(), std::move(out));
}

FinFunction activation(std::string_view name, const FloatTables& tables) {
  const FinSet r = tables.set();
  if (name == "id")
    return FinFunction::identity(r);
  if (name == "relu") {
    std::vector<Element> out;
    for (Element p = 0; p < r.size(); ++p) {
      const Decoded& d = tables.values[p];
      if (d.kind == Decoded::Kind::nan)
        out.push_back(*tables.nan);
      else
        out.push_back(d.negative ? tables.positive_zero() : p);
    }
    return FinFunction(r, r, std::move(out));
  }
  if (name.substr(0, 6) == "table:") {
    const std::string path(name.substr(6));
    std::ifstream in(path);
    if (!in)
      throw Error("cannot read activation table '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_activation_table(buf.str(), tables);
  }
  throw Error("unknown activation '" + std::string(name) + "'");
}

std::string pattern_string(Element p) {
  std::ostringstream out;
  out << "0x" << std::hex << p;
  return out.str();
}

Element add_n(const FloatTables& tables, const std::vector<Element>& xs) {
  if (xs.empty())
    throw Error("add_n of no summands");
  Element acc = xs.back();
  for (std::size_t i = xs.size() - 1; i-- > 0;)
    acc = tables.apply_add(xs[i], acc);
  return acc;
}

std::vector<Element> oracle_eval(const FloatTables& tables,
                                 const std::vector<FinFunction>& activations,
                                 const std::vector<LayerParams>& layers,
                                 const std::vector<Element>& input) {
  if (activations.size() != layers.size())
    throw Error("oracle_eval: one activation per layer");
  std::vector<Element> x = input;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const LayerParams& l = layers[k];
    if (l.w.size() != l.b.size())
      throw Error("oracle_eval: layer " + std::to_string(k + 1) + " bias length mismatch");
    std::vector<Element> y;
    for (std::size_t j = 0; j < l.w.size(); ++j) {
      if (l.w[j].size() != x.size())
        throw Error("oracle_eval: layer " + std::to_string(k + 1) + " width mismatch");
      std::vector<Element> terms;
      for (std::size_t i = 0; i < x.size(); ++i)
        terms.push_back(tables.apply_mul(l.w[j][i], x[i]));
      y.push_back(activations[k](tables.apply_add(add_n(tables, terms), l.b[j])));
    }
    x = std::move(y);
  }
  return x;
}

} // namespace cohnet
