#include "cohnet/nn.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

#include "lexer.hpp"

namespace cohnet {

// Architectures -------------------------------------------------------------------

void Architecture::validate() const {
  if (activations.empty())
    throw Error("architecture needs at least one layer");
  if (widths.size() != activations.size() + 1)
    throw Error("architecture needs one more width than layers");
  for (auto w : widths)
    if (w == 0)
      throw Error("architecture widths must be positive");
}

Architecture parse_architecture(std::string_view text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i)
    if (i == text.size() || text[i] == '-') {
      parts.emplace_back(text.substr(start, i - start));
      start = i + 1;
    }
  auto bad = [&](const std::string& why) {
    throw Error("bad architecture '" + std::string(text) + "': " + why);
  };
  if (parts.size() < 3 || parts.size() % 2 == 0)
    bad("expected <width>-<activation>-<width>...");
  Architecture arch;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i % 2 == 1) {
      if (parts[i].empty())
        bad("empty activation");
      arch.activations.push_back(parts[i]);
      continue;
    }
    const std::string& w = parts[i];
    if (w.empty() || w.size() > 6 || !std::all_of(w.begin(), w.end(), ::isdigit))
      bad("width '" + w + "' is not a number");
    arch.widths.push_back(std::stoul(w));
  }
  arch.validate();
  return arch;
}

std::string print_architecture(const Architecture& arch) {
  std::string s = std::to_string(arch.widths[0]);
  for (std::size_t k = 0; k < arch.layers(); ++k)
    s += "-" + arch.activations[k] + "-" + std::to_string(arch.widths[k + 1]);
  return s;
}

Architecture compose(const Architecture& first, const Architecture& second) {
  first.validate();
  second.validate();
  if (first.output_width() != second.input_width())
    throw Error("cannot compose: output width " + std::to_string(first.output_width()) +
                " does not match input width " + std::to_string(second.input_width()));
  Architecture out = first;
  out.activations.insert(out.activations.end(), second.activations.begin(),
                         second.activations.end());
  out.widths.insert(out.widths.end(), second.widths.begin() + 1, second.widths.end());
  return out;
}

// Parameters ----------------------------------------------------------------------

void check_shape(const Architecture& arch, const ParamAssignment& params,
                 const FloatTables& tables) {
  arch.validate();
  if (params.size() != arch.layers())
    throw Error("params have " + std::to_string(params.size()) + " layers, architecture has " +
                std::to_string(arch.layers()));
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& l = params[k];
    const std::string where = "layer " + std::to_string(k + 1) + ": ";
    if (l.w.size() != arch.widths[k + 1] || l.b.size() != arch.widths[k + 1])
      throw Error(where + "expected " + std::to_string(arch.widths[k + 1]) + " rows");
    for (const auto& row : l.w) {
      if (row.size() != arch.widths[k])
        throw Error(where + "expected " + std::to_string(arch.widths[k]) + " columns");
      for (auto v : row)
        if (v >= tables.values.size())
          throw Error(where + "weight pattern out of range");
    }
    for (auto v : l.b)
      if (v >= tables.values.size())
        throw Error(where + "bias pattern out of range");
  }
}

namespace {

Element json_pattern(const nlohmann::json& j) {
  if (j.is_number_unsigned())
    return j.get<Element>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(s, &used, 0);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == s.size() && !s.empty())
      return v;
  }
  throw Error("params: bad pattern " + j.dump());
}

} // namespace

ParamAssignment parse_params(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("params: ") + e.what());
  }
  if (!j.is_object() || !j.contains("layers") || !j["layers"].is_array())
    throw Error("params: expected an object with a \"layers\" array");
  ParamAssignment out;
  for (const auto& layer : j["layers"]) {
    if (!layer.is_object() || !layer.contains("w") || !layer.contains("b") ||
        !layer["w"].is_array() || !layer["b"].is_array())
      throw Error("params: each layer needs \"w\" and \"b\" arrays");
    LayerParams l;
    for (const auto& row : layer["w"]) {
      if (!row.is_array())
        throw Error("params: weight rows must be arrays");
      std::vector<Element> r;
      for (const auto& v : row)
        r.push_back(json_pattern(v));
      l.w.push_back(std::move(r));
    }
    for (const auto& v : layer["b"])
      l.b.push_back(json_pattern(v));
    out.push_back(std::move(l));
  }
  return out;
}

std::string print_params(const ParamAssignment& params) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : params) {
    nlohmann::json w = nlohmann::json::array(), b = nlohmann::json::array();
    for (const auto& row : l.w) {
      nlohmann::json r = nlohmann::json::array();
      for (auto v : row)
        r.push_back(pattern_string(v));
      w.push_back(std::move(r));
    }
    for (auto v : l.b)
      b.push_back(pattern_string(v));
    layers.push_back({{"w", std::move(w)}, {"b", std::move(b)}});
  }
  return nlohmann::json{{"layers", std::move(layers)}}.dump() + "\n";
}

std::string param_constant(const ParamRef& p) {
  if (p.kind == ParamRef::Kind::bias)
    return "b." + std::to_string(p.layer) + "." + std::to_string(p.row);
  return "w." + std::to_string(p.layer) + "." + std::to_string(p.row) + "." +
         std::to_string(p.col);
}

Element param_value(const ParamAssignment& params, const ParamRef& p) {
  const auto& l = params.at(p.layer - 1);
  return p.kind == ParamRef::Kind::bias ? l.b.at(p.row) : l.w.at(p.row).at(p.col);
}

// Constraints --------------------------------------------------------------------------

namespace {

ParamRef parse_ref(detail::TokenStream& ts) {
  ParamRef r;
  const auto at = ts.peek();
  const std::string kind = ts.ident();
  if (kind == "w")
    r.kind = ParamRef::Kind::weight;
  else if (kind == "b")
    r.kind = ParamRef::Kind::bias;
  else
    detail::TokenStream::fail_at(at, "expected 'w' or 'b'");
  ts.expect("[");
  r.layer = ts.number();
  if (r.layer == 0)
    detail::TokenStream::fail_at(at, "layers are numbered from 1");
  ts.expect("]");
  ts.expect("[");
  r.row = ts.number();
  if (r.kind == ParamRef::Kind::weight) {
    ts.expect(",");
    r.col = ts.number();
  }
  ts.expect("]");
  return r;
}

std::string print_ref(const ParamRef& r) {
  std::string s = (r.kind == ParamRef::Kind::weight ? "w[" : "b[") + std::to_string(r.layer) +
                  "][" + std::to_string(r.row);
  if (r.kind == ParamRef::Kind::weight)
    s += "," + std::to_string(r.col);
  return s + "]";
}

void check_ref(const Architecture& arch, const ParamRef& r) {
  const std::string name = print_ref(r);
  if (r.layer < 1 || r.layer > arch.layers())
    throw Error("constraint names missing layer: " + name);
  if (r.row >= arch.widths[r.layer])
    throw Error("constraint row out of range: " + name);
  if (r.kind == ParamRef::Kind::weight && r.col >= arch.widths[r.layer - 1])
    throw Error("constraint column out of range: " + name);
}

} // namespace

std::vector<TieConstraint> parse_constraints(std::string_view text) {
  detail::TokenStream ts(text);
  std::vector<TieConstraint> out;
  while (!ts.at_end()) {
    TieConstraint c;
    if (ts.accept_keyword("tie")) {
      c.kind = TieConstraint::Kind::tie;
      c.lhs = parse_ref(ts);
      c.rhs = parse_ref(ts);
    } else if (ts.accept_keyword("fix")) {
      c.kind = TieConstraint::Kind::fix;
      c.lhs = parse_ref(ts);
      c.value = ts.number();
    } else {
      ts.fail("expected 'tie' or 'fix'");
    }
    out.push_back(c);
  }
  return out;
}

std::string print_constraints(const std::vector<TieConstraint>& cs) {
  std::string s;
  for (const auto& c : cs) {
    if (c.kind == TieConstraint::Kind::tie)
      s += "tie " + print_ref(c.lhs) + " " + print_ref(c.rhs) + "\n";
    else
      s += "fix " + print_ref(c.lhs) + " " + pattern_string(c.value) + "\n";
  }
  return s;
}

void check_constraints(const Architecture& arch, const FloatTables& tables,
                       const std::vector<TieConstraint>& cs) {
  for (const auto& c : cs) {
    check_ref(arch, c.lhs);
    if (c.kind == TieConstraint::Kind::tie)
      check_ref(arch, c.rhs);
    else if (c.value >= tables.values.size())
      throw Error("constraint fixes a pattern outside the format: " + pattern_string(c.value));
  }
}

bool satisfies(const ParamAssignment& params, const std::vector<TieConstraint>& cs) {
  for (const auto& c : cs) {
    const Element v = param_value(params, c.lhs);
    if (v != (c.kind == TieConstraint::Kind::tie ? param_value(params, c.rhs) : c.value))
      return false;
  }
  return true;
}

// Datasets ---------------------------------------------------------------------------------

namespace {

std::size_t domain_size(const FloatFormat& fmt, std::size_t k) {
  std::size_t s = 1;
  for (std::size_t i = 0; i < k; ++i) {
    s *= fmt.size();
    if (s > max_input_domain)
      throw Error("domain R^" + std::to_string(k) + " too large to enumerate");
  }
  return s;
}

ProductSet power(const FloatFormat& fmt, std::size_t k) {
  return ProductSet(std::vector<FinSet>(k, FinSet(fmt.size())));
}

} // namespace

std::vector<Element> SpanDataset::input(std::size_t row) const {
  return power(format, n).index_to_tuple(f(row));
}

std::vector<Element> SpanDataset::output(std::size_t row) const {
  return power(format, m).index_to_tuple(t(row));
}

SpanDataset parse_dataset(std::string_view text) {
  detail::TokenStream ts(text);
  ts.expect_keyword("dataset");
  const auto fmt_at = ts.peek();
  std::string fmt_text = ts.ident();
  if (ts.accept(":"))
    fmt_text += ":" + ts.ident();
  SpanDataset d;
  try {
    d.format = parse_float_format(fmt_text);
  } catch (const Error& e) {
    detail::TokenStream::fail_at(fmt_at, e.what());
  }
  d.n = ts.number();
  d.m = ts.number();
  const ProductSet in = power(d.format, d.n), out = power(d.format, d.m);
  std::vector<Element> f, t;
  std::vector<Element> tuple;
  auto read = [&](std::size_t k) {
    tuple.clear();
    for (std::size_t i = 0; i < k; ++i) {
      const auto at = ts.peek();
      const auto v = ts.number();
      if (v >= d.format.size())
        detail::TokenStream::fail_at(at, "pattern outside the format");
      tuple.push_back(v);
    }
  };
  while (!ts.at_end()) {
    read(d.n);
    f.push_back(in.tuple_to_index(tuple));
    ts.expect("->");
    read(d.m);
    t.push_back(out.tuple_to_index(tuple));
  }
  const FinSet rows(f.size());
  d.f = FinFunction(rows, in.as_set(), std::move(f));
  d.t = FinFunction(rows, out.as_set(), std::move(t));
  return d;
}

std::string print_dataset(const SpanDataset& d) {
  std::ostringstream out;
  out << "dataset " << d.format.name() << " " << d.n << " " << d.m << "\n";
  for (std::size_t r = 0; r < d.rows(); ++r) {
    for (auto x : d.input(r))
      out << pattern_string(x) << " ";
    out << "->";
    for (auto y : d.output(r))
      out << " " << pattern_string(y);
    out << "\n";
  }
  return out.str();
}

std::optional<std::size_t> first_difference(const SpanDataset& a, const SpanDataset& b) {
  if (!(a.format == b.format) || a.n != b.n || a.m != b.m)
    return 0;
  const std::size_t common = std::min(a.rows(), b.rows());
  for (std::size_t r = 0; r < common; ++r)
    if (a.f(r) != b.f(r) || a.t(r) != b.t(r))
      return r;
  if (a.rows() != b.rows())
    return common;
  return std::nullopt;
}

SpanDataset compose_spans(const SpanDataset& a, const SpanDataset& b) {
  if (!(a.format == b.format) || a.m != b.n)
    throw Error("compose_spans: spans do not meet");
  Pullback pb = pullback(a.t, b.f);
  return SpanDataset{a.format, a.n, b.m, a.f.after(pb.left), b.t.after(pb.right)};
}

// Theories ---------------------------------------------------------------------------------

std::string activation_op(std::string_view sigma_name) {
  std::string s = "a.";
  for (char c : sigma_name)
    s += std::isalnum(static_cast<unsigned char>(c)) || c == '_' ? c : '_';
  return s;
}

FloatTheory float_theory(const FloatTables& tables, std::string_view sigma_name) {
  const std::size_t n = tables.values.size();
  const std::string act = activation_op(sigma_name);
  CategoryPresentation pol;
  pol.add_object("V");
  pol.add_object("E");
  pol.add_generator("s", "E", "V");
  pol.add_generator("t", "E", "V");
  pol.add_generator(act, "V", "V");
  Instance inst{pol,
                {FinSet(n), FinSet(n * n)},
                {tables.add, tables.mul, activation(sigma_name, tables)}};
  FloatTheory ft{hard_code(inst), hard_code_model(inst)};
  Signature& sig = ft.theory.signature;
  sig.add_op("p1", {"E"}, "V");
  sig.add_op("p2", {"E"}, "V");
  sig.add_op("pair", {"V", "V"}, "E");
  OpGraph p1{"p1", {}}, p2{"p2", {}}, pair{"pair", {}};
  std::vector<Element> t1, t2, tp;
  for (Element k = 0; k < n * n; ++k) {
    const std::string e = element_constant("E", k);
    const std::string a = element_constant("V", k / n), b = element_constant("V", k % n);
    p1.rows.push_back({{e}, a});
    p2.rows.push_back({{e}, b});
    pair.rows.push_back({{a, b}, e});
    t1.push_back(k / n);
    t2.push_back(k % n);
    tp.push_back(k);
  }
  ft.theory.axioms.push_back(SchemaAxiom{std::move(p1)});
  ft.theory.axioms.push_back(SchemaAxiom{std::move(p2)});
  ft.theory.axioms.push_back(SchemaAxiom{std::move(pair)});
  const FinSet v(n), e(n * n);
  ft.model.signature = sig;
  ft.model.ops.emplace_back(e, v, std::move(t1));
  ft.model.ops.emplace_back(e, v, std::move(t2));
  ft.model.ops.emplace_back(e, e, std::move(tp));
  return ft;
}

Theory rspan_theory(std::size_t n, std::size_t m, const FloatTables& tables) {
  if (n == 0 || m == 0)
    throw Error("rspan_theory: widths must be positive");
  CategoryPresentation span;
  span.add_object("N");
  span.add_object("V");
  for (std::size_t i = 0; i < n; ++i)
    span.add_generator("f." + std::to_string(i), "N", "V");
  for (std::size_t j = 0; j < m; ++j)
    span.add_generator("t." + std::to_string(j), "N", "V");
  return pushout(schema_to_theory(span), float_theory(tables, "id").theory, {{"V", "V"}},
                 {"", ""})
      .apex;
}

namespace {

bool is_float_symbol(const std::string& name) {
  static const std::set<std::string> fixed{"V", "E", "s", "t", "p1", "p2", "pair"};
  return fixed.count(name) || name.rfind("a.", 0) == 0 || name.rfind("V.", 0) == 0 ||
         name.rfind("E.", 0) == 0;
}

Term add_term(Term x, Term y) {
  return Term::apply("s", {Term::apply("pair", {std::move(x), std::move(y)})});
}

Term mul_term(Term x, Term y) {
  return Term::apply("t", {Term::apply("pair", {std::move(x), std::move(y)})});
}

std::vector<Term> layer_terms(std::string_view sigma, std::size_t layer,
                              const std::vector<Term>& xs, std::size_t m) {
  std::vector<Term> out;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<Term> prods;
    for (std::size_t i = 0; i < xs.size(); ++i)
      prods.push_back(mul_term(
          Term::apply(param_constant({ParamRef::Kind::weight, layer, j, i})), xs[i]));
    Term sum = prods.back();
    for (std::size_t i = prods.size() - 1; i-- > 0;)
      sum = add_term(prods[i], std::move(sum));
    Term pre = add_term(std::move(sum), Term::apply(param_constant({ParamRef::Kind::bias, layer, j, 0})));
    out.push_back(Term::apply(activation_op(sigma), {std::move(pre)}));
  }
  return out;
}

Interpretation span_interpretation(const Theory& rspan, const Theory& g, std::size_t n,
                                   const std::vector<Term>& outputs) {
  Interpretation iota{rspan, g, {}, {}, {}};
  iota.sort_map["N"] = Context(n, "V");
  iota.sort_map["V"] = {"V"};
  iota.sort_map["E"] = {"E"};
  const std::string id_op = activation_op("id");
  for (const auto& op : rspan.signature.ops()) {
    const std::string& name = op.name;
    std::vector<Term> img;
    if (name.rfind("f.", 0) == 0) {
      img.push_back(Term::variable(std::stoul(name.substr(2))));
    } else if (name.rfind("t.", 0) == 0 && name != "t") {
      img.push_back(outputs.at(std::stoul(name.substr(2))));
    } else if (name == id_op && !g.signature.op_index(id_op)) {
      img.push_back(Term::variable(0));
    } else {
      std::vector<Term> args;
      for (std::size_t i = 0; i < op.args.size(); ++i)
        args.push_back(Term::variable(i));
      img.push_back(Term::apply(name, std::move(args)));
    }
    iota.op_map[name] = std::move(img);
  }
  iota.validate();
  return iota;
}

std::vector<Term> input_vars(std::size_t n) {
  std::vector<Term> xs;
  for (std::size_t i = 0; i < n; ++i)
    xs.push_back(Term::variable(i));
  return xs;
}

std::vector<Term> output_terms(const Interpretation& iota, std::size_t m) {
  std::vector<Term> out;
  for (std::size_t j = 0; j < m; ++j)
    out.push_back(iota.op_map.at("t." + std::to_string(j)).at(0));
  return out;
}

} // namespace

NetworkTheory layer_theory(std::string_view sigma, std::size_t n, std::size_t m,
                           const FloatTables& tables, std::size_t layer) {
  if (n == 0 || m == 0 || layer == 0)
    throw Error("layer_theory: widths and layer index must be positive");
  Theory params;
  params.signature.add_sort("V");
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < n; ++i)
      params.signature.add_constant(param_constant({ParamRef::Kind::weight, layer, j, i}), "V");
  for (std::size_t j = 0; j < m; ++j)
    params.signature.add_constant(param_constant({ParamRef::Kind::bias, layer, j, 0}), "V");
  NetworkTheory nt;
  nt.arch = Architecture{{std::string(sigma)}, {n, m}};
  nt.first_layer = layer;
  nt.theory = pushout(float_theory(tables, sigma).theory, params, {{"V", "V"}}, {"", ""}).apex;
  nt.rspan = rspan_theory(n, m, tables);
  nt.iota = span_interpretation(nt.rspan, nt.theory, n, layer_terms(sigma, layer, input_vars(n), m));
  return nt;
}

NetworkTheory network_theory(const Architecture& arch, const FloatTables& tables,
                             std::size_t first_layer) {
  arch.validate();
  NetworkTheory nt = layer_theory(arch.activations[0], arch.widths[0], arch.widths[1], tables,
                                  first_layer);
  for (std::size_t k = 1; k < arch.layers(); ++k)
    nt = compose_theories(nt,
                          layer_theory(arch.activations[k], arch.widths[k], arch.widths[k + 1],
                                       tables, first_layer + k),
                          tables);
  return nt;
}

NetworkTheory compose_theories(const NetworkTheory& a, const NetworkTheory& b,
                               const FloatTables& tables) {
  if (b.first_layer != a.first_layer + a.arch.layers())
    throw Error("compose_theories: second network's layers must follow the first's");
  NetworkTheory out;
  out.arch = compose(a.arch, b.arch);
  out.first_layer = a.first_layer;
  std::vector<SymbolPair> shared;
  const Signature& sa = a.theory.signature;
  const Signature& sb = b.theory.signature;
  for (const auto& s : sb.sorts())
    if (is_float_symbol(s) && sa.sort_index(s))
      shared.push_back({s, s});
  for (const auto& op : sb.ops())
    if (is_float_symbol(op.name) && sa.op_index(op.name))
      shared.push_back({op.name, op.name});
  try {
    out.theory = pushout(a.theory, b.theory, shared, {"", ""}).apex;
  } catch (const Error& e) {
    throw Error(std::string("compose_theories: ") + e.what());
  }
  const std::size_t n = a.arch.input_width(), m = out.arch.output_width();
  std::vector<Term> inner = output_terms(a.iota, a.arch.output_width());
  std::vector<Term> outer = output_terms(b.iota, m);
  for (auto& t : outer)
    t = substitute(t, inner);
  out.rspan = rspan_theory(n, m, tables);
  out.iota = span_interpretation(out.rspan, out.theory, n, outer);
  return out;
}

NetworkTheory apply_constraints(const NetworkTheory& g, const std::vector<TieConstraint>& cs) {
  NetworkTheory h = g;
  for (const auto& c : cs) {
    for (const ParamRef* r : {&c.lhs, &c.rhs}) {
      if (c.kind == TieConstraint::Kind::fix && r == &c.rhs)
        continue;
      if (r->layer < g.first_layer || r->layer >= g.first_layer + g.arch.layers())
        throw Error("constraint names a layer outside the network: " + param_constant(*r));
      if (!g.theory.signature.op_index(param_constant(*r)))
        throw Error("constraint names an unknown parameter: " + param_constant(*r));
    }
    Term lhs = Term::apply(param_constant(c.lhs));
    Term rhs = Term::apply(c.kind == TieConstraint::Kind::tie ? param_constant(c.rhs)
                                                               : element_constant("V", c.value));
    if (!g.theory.signature.op_index(rhs.op))
      throw Error("constraint fixes an unknown pattern: " + rhs.op);
    h.theory.axioms.push_back(Sequent{{}, {}, {Formula::equals(std::move(lhs), std::move(rhs))}});
  }
  h.iota.target = h.theory;
  return h;
}

SetStructure build_model(const NetworkTheory& g, const FloatTables& tables,
                         const ParamAssignment& params) {
  check_shape(g.arch, params, tables);
  std::map<std::string, FinFunction, std::less<>> by_name;
  for (const auto& sigma : g.arch.activations) {
    FloatTheory ft = float_theory(tables, sigma);
    const auto& ops = ft.model.signature.ops();
    for (std::size_t k = 0; k < ops.size(); ++k)
      by_name.emplace(ops[k].name, ft.model.ops[k]);
  }
  const FinSet r = tables.set();
  for (std::size_t k = 0; k < params.size(); ++k) {
    const std::size_t layer = g.first_layer + k;
    for (std::size_t j = 0; j < params[k].w.size(); ++j) {
      for (std::size_t i = 0; i < params[k].w[j].size(); ++i)
        by_name.emplace(param_constant({ParamRef::Kind::weight, layer, j, i}),
                        FinFunction::point(r, params[k].w[j][i]));
      by_name.emplace(param_constant({ParamRef::Kind::bias, layer, j, 0}),
                      FinFunction::point(r, params[k].b[j]));
    }
  }
  SetStructure m{g.theory.signature, {}, {}, {}};
  for (const auto& s : m.signature.sorts()) {
    if (s == "V")
      m.sorts.push_back(r);
    else if (s == "E")
      m.sorts.emplace_back(r.size() * r.size());
    else
      throw Error("build_model: unexpected sort '" + s + "'");
  }
  for (const auto& op : m.signature.ops()) {
    auto it = by_name.find(op.name);
    if (it == by_name.end())
      throw Error("build_model: no interpretation for '" + op.name + "'");
    m.ops.push_back(it->second);
  }
  if (!m.signature.preds().empty())
    throw Error("build_model: network theories have no predicates");
  m.validate();
  return m;
}

SpanDataset infer(const NetworkTheory& g, const SetStructure& m, const FloatTables& tables,
                  const PrecomposeOptions& opts) {
  const FloatFormat& fmt = tables.format;
  const std::size_t n = g.arch.input_width(), k = g.arch.output_width();
  domain_size(fmt, n);
  SetStructure span = precompose(g.iota, m, opts);
  // elements of the model's V are read back as patterns through the constants V.p
  std::vector<Element> pattern_of(fmt.size());
  for (Element p = 0; p < fmt.size(); ++p)
    pattern_of.at(m.op(element_constant("V", p))(0)) = p;
  const ProductSet in = power(fmt, n), out = power(fmt, k);
  std::vector<const FinFunction*> fs, ts;
  for (std::size_t i = 0; i < n; ++i)
    fs.push_back(&span.op("f." + std::to_string(i)));
  for (std::size_t j = 0; j < k; ++j)
    ts.push_back(&span.op("t." + std::to_string(j)));
  const std::size_t rows = span.sort("N").size();
  std::vector<std::pair<Element, Element>> table(rows);
  std::vector<Element> tuple;
  for (std::size_t x = 0; x < rows; ++x) {
    tuple.clear();
    for (auto* f : fs)
      tuple.push_back(pattern_of[(*f)(x)]);
    table[x].first = in.tuple_to_index(tuple);
    tuple.clear();
    for (auto* t : ts)
      tuple.push_back(pattern_of[(*t)(x)]);
    table[x].second = out.tuple_to_index(tuple);
  }
  std::stable_sort(table.begin(), table.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Element> f, t;
  for (const auto& [a, b] : table) {
    f.push_back(a);
    t.push_back(b);
  }
  const FinSet nset(rows);
  return SpanDataset{fmt, n, k, FinFunction(nset, in.as_set(), std::move(f)),
                     FinFunction(nset, out.as_set(), std::move(t))};
}

SpanDataset oracle_dataset(const Architecture& arch, const FloatTables& tables,
                           const ParamAssignment& params) {
  check_shape(arch, params, tables);
  const FloatFormat& fmt = tables.format;
  const std::size_t rows = domain_size(fmt, arch.input_width());
  std::vector<FinFunction> acts;
  for (const auto& s : arch.activations)
    acts.push_back(activation(s, tables));
  const ProductSet in = power(fmt, arch.input_width()), out = power(fmt, arch.output_width());
  std::vector<Element> t(rows);
  for (std::size_t x = 0; x < rows; ++x)
    t[x] = out.tuple_to_index(oracle_eval(tables, acts, params, in.index_to_tuple(x)));
  const FinSet nset(rows);
  return SpanDataset{fmt, arch.input_width(), arch.output_width(), FinFunction::identity(nset),
                     FinFunction(nset, out.as_set(), std::move(t))};
}

} // namespace cohnet
