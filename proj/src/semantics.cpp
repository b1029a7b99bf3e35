#include "cohnet/semantics.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <sstream>
#include <thread>

#include "lexer.hpp"

namespace cohnet {

void SetStructure::validate() const {
  const Signature& sig = signature;
  if (sorts.size() != sig.sorts().size() || ops.size() != sig.ops().size() ||
      preds.size() != sig.preds().size())
    throw Error("structure: shape does not match signature");
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const auto& decl = sig.ops()[k];
    if (ops[k].dom().size() != arg_set(decl.args).size() || !(ops[k].cod() == sort(decl.result)))
      throw Error("structure: operation '" + decl.name + "' has the wrong shape");
  }
  for (std::size_t k = 0; k < preds.size(); ++k)
    if (!(preds[k].ambient() == arg_set(sig.preds()[k].args)))
      throw Error("structure: predicate '" + sig.preds()[k].name + "' has the wrong ambient");
}

const FinSet& SetStructure::sort(std::string_view name) const {
  return sorts.at(signature.require_sort(name));
}

const FinFunction& SetStructure::op(std::string_view name) const {
  auto i = signature.op_index(name);
  if (!i)
    throw Error("structure: unknown operation '" + std::string(name) + "'");
  return ops.at(*i);
}

const Subobject& SetStructure::pred(std::string_view name) const {
  auto i = signature.pred_index(name);
  if (!i)
    throw Error("structure: unknown predicate '" + std::string(name) + "'");
  return preds.at(*i);
}

ProductSet SetStructure::context_set(const Context& ctx) const {
  std::vector<FinSet> f;
  f.reserve(ctx.size());
  for (const auto& s : ctx)
    f.push_back(sort(s));
  return ProductSet(std::move(f));
}

Algebra SetStructure::algebra() const {
  Algebra a;
  a.sorts = sorts;
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const auto& decl = signature.ops()[k];
    AlgebraOp op;
    for (const auto& s : decl.args)
      op.args.push_back(signature.require_sort(s));
    op.result = signature.require_sort(decl.result);
    op.table = ops[k];
    a.ops.push_back(std::move(op));
  }
  return a;
}

// Evaluation ----------------------------------------------------------------

namespace {

FinFunction eval_term_over(const SetStructure& m, const Context& ctx, const ProductSet& p,
                           const Term& t) {
  if (t.is_var()) {
    if (t.var >= ctx.size())
      throw Error("eval_term: variable outside context");
    return p.projection(t.var);
  }
  const auto idx = m.signature.op_index(t.op);
  if (!idx)
    throw Error("eval_term: unknown operation '" + t.op + "'");
  const FinFunction& op = m.ops[*idx];
  if (t.args.empty())
    return FinFunction::constant(p.as_set(), op.cod(), op(0));
  std::vector<Element> index(p.size(), 0);
  for (const auto& a : t.args) {
    FinFunction v = eval_term_over(m, ctx, p, a);
    const std::size_t radix = v.cod().size();
    for (std::size_t i = 0; i < index.size(); ++i)
      index[i] = index[i] * radix + v(i);
  }
  for (auto& i : index)
    i = op(i);
  return FinFunction(p.as_set(), op.cod(), std::move(index));
}

Subobject eval_formula_over(const SetStructure& m, const Context& ctx, const ProductSet& p,
                            const Formula& f) {
  switch (f.kind) {
  case Formula::Kind::top:
    return Subobject::full(p);
  case Formula::Kind::bottom:
    return Subobject::empty(p);
  case Formula::Kind::eq:
    return equalizer(eval_term_over(m, ctx, p, f.terms.at(0)),
                     eval_term_over(m, ctx, p, f.terms.at(1)))
        .with_ambient(p);
  case Formula::Kind::pred: {
    std::vector<FinFunction> comps;
    for (const auto& t : f.terms)
      comps.push_back(eval_term_over(m, ctx, p, t));
    return preimage(pairing(p.as_set(), comps), m.pred(f.name)).with_ambient(p);
  }
  case Formula::Kind::conj:
  case Formula::Kind::disj: {
    std::vector<Subobject> parts;
    for (const auto& q : f.parts)
      parts.push_back(eval_formula_over(m, ctx, p, q));
    return sub_lattice(f.kind == Formula::Kind::conj ? LatticeOp::meet : LatticeOp::join, p,
                       parts);
  }
  case Formula::Kind::exists: {
    Context inner;
    inner.reserve(ctx.size() + 1);
    inner.push_back(f.name);
    inner.insert(inner.end(), ctx.begin(), ctx.end());
    ProductSet ip = m.context_set(inner);
    Subobject body = eval_formula_over(m, inner, ip, f.parts.at(0));
    // slot 0 is the most significant coordinate; projecting it away is `mod |p|`
    std::vector<std::size_t> img;
    img.reserve(body.count());
    for (std::size_t i : body.members())
      img.push_back(i % p.size());
    return Subobject(p, std::move(img));
  }
  }
  throw Error("eval_formula: unknown formula kind");
}

Witness make_witness(AxiomId id, const ProductSet& p, std::size_t tuple) {
  return Witness{id, tuple, p.index_to_tuple(tuple)};
}

std::size_t value_of_constant(const SetStructure& m, const std::string& c) {
  return m.op(c)(0);
}

ValidityReport check_schema(const SetStructure& m, const SchemaAxiom& ax, std::size_t index) {
  if (const auto* d = std::get_if<DistinctConstants>(&ax)) {
    std::vector<Element> vals;
    for (const auto& c : d->constants)
      vals.push_back(value_of_constant(m, c));
    // least pair (i, j), i < j, in the order `expand` lists them
    const std::size_t k = vals.size();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    std::optional<std::pair<std::size_t, std::size_t>> best;
    for (std::size_t r = 0; r + 1 < k; ++r) {
      const std::size_t i = order[r], j = order[r + 1];
      if (vals[i] != vals[j] || (r > 0 && vals[order[r - 1]] == vals[i]))
        continue;
      // i is the smallest index of its value class, j the next one
      if (!best || i < best->first)
        best = {i, j};
    }
    if (!best)
      return {};
    const auto [i, j] = *best;
    const std::size_t part = i * (2 * k - i - 1) / 2 + (j - i - 1);
    return {Witness{{index, part}, 0, {}}};
  }
  if (const auto* c = std::get_if<CoverByConstants>(&ax)) {
    const FinSet& s = m.sort(c->sort);
    std::vector<bool> hit(s.size(), false);
    for (const auto& k : c->constants)
      hit[value_of_constant(m, k)] = true;
    for (Element x = 0; x < s.size(); ++x)
      if (!hit[x])
        return {Witness{{index, 0}, x, {x}}};
    return {};
  }
  const auto& g = std::get<OpGraph>(ax);
  const FinFunction& op = m.op(g.op);
  const OpDecl& decl = m.signature.require_op(g.op);
  ProductSet dom = m.arg_set(decl.args);
  std::vector<Element> tuple;
  for (std::size_t r = 0; r < g.rows.size(); ++r) {
    tuple.clear();
    for (const auto& in : g.rows[r].inputs)
      tuple.push_back(value_of_constant(m, in));
    if (op(dom.tuple_to_index(tuple)) != value_of_constant(m, g.rows[r].output))
      return {Witness{{index, r}, 0, {}}};
  }
  return {};
}

void require_same_signature(const SetStructure& m, const Theory& thy) {
  if (!(m.signature == thy.signature))
    throw Error("structure and theory have different signatures");
}

} // namespace

FinFunction eval_term(const SetStructure& m, const Context& ctx, const Term& t) {
  return eval_term_over(m, ctx, m.context_set(ctx), t);
}

Subobject eval_formula(const SetStructure& m, const Context& ctx, const Formula& f) {
  return eval_formula_over(m, ctx, m.context_set(ctx), f);
}

ValidityReport check_sequent(const SetStructure& m, const Sequent& s, AxiomId id) {
  ProductSet p = m.context_set(s.context);
  std::vector<Subobject> l, r;
  for (const auto& f : s.lhs)
    l.push_back(eval_formula_over(m, s.context, p, f));
  Subobject lhs = sub_lattice(LatticeOp::meet, p, l);
  if (lhs.is_empty())
    return {};
  for (const auto& f : s.rhs)
    r.push_back(eval_formula_over(m, s.context, p, f));
  Subobject rhs = sub_lattice(LatticeOp::join, p, r);
  for (std::size_t i : lhs.members())
    if (!rhs.contains(i))
      return {make_witness(id, p, i)};
  return {};
}

ValidityReport check_axiom(const SetStructure& m, const Axiom& ax, std::size_t index) {
  if (const auto* s = std::get_if<Sequent>(&ax))
    return check_sequent(m, *s, {index, 0});
  return check_schema(m, std::get<SchemaAxiom>(ax), index);
}

ValidityReport check_model(const SetStructure& m, const Theory& thy, unsigned jobs) {
  require_same_signature(m, thy);
  const std::size_t n = thy.axioms.size();
  if (jobs <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i)
      if (auto r = check_axiom(m, thy.axioms[i], i); !r.valid())
        return r;
    return {};
  }
  std::vector<ValidityReport> reports(n);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> first_failure{n};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      if (i > first_failure.load())
        continue;
      reports[i] = check_axiom(m, thy.axioms[i], i);
      if (!reports[i].valid()) {
        std::size_t cur = first_failure.load();
        while (i < cur && !first_failure.compare_exchange_weak(cur, i)) {
        }
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(jobs, n); ++t)
    pool.emplace_back(worker);
  pool.clear();
  std::size_t f = first_failure.load();
  return f < n ? reports[f] : ValidityReport{};
}

ValidityReport check_model_expanded(const SetStructure& m, const Theory& thy) {
  require_same_signature(m, thy);
  for (std::size_t i = 0; i < thy.axioms.size(); ++i) {
    if (const auto* s = std::get_if<Sequent>(&thy.axioms[i])) {
      if (auto r = check_sequent(m, *s, {i, 0}); !r.valid())
        return r;
      continue;
    }
    auto parts = expand(std::get<SchemaAxiom>(thy.axioms[i]));
    for (std::size_t k = 0; k < parts.size(); ++k)
      if (auto r = check_sequent(m, parts[k], {i, k}); !r.valid())
        return r;
  }
  return {};
}

// Morphisms -----------------------------------------------------------------

namespace {

void check_family_shape(const SetStructure& m, const SetStructure& m2, const SortFamily& alpha) {
  if (alpha.size() != m.sorts.size())
    throw Error("sort family has the wrong number of components");
  for (std::size_t s = 0; s < alpha.size(); ++s)
    if (!(alpha[s].dom() == m.sorts[s]) || !(alpha[s].cod() == m2.sorts[s]))
      throw Error("component for sort '" + m.signature.sorts()[s] + "' has wrong endpoints");
}

std::size_t map_tuple(const ProductSet& from, const ProductSet& to, std::size_t index,
                      const std::vector<const FinFunction*>& comps) {
  std::vector<Element> t(comps.size());
  for (std::size_t j = 0; j < comps.size(); ++j)
    t[j] = (*comps[j])(from.coordinate(index, j));
  return to.tuple_to_index(t);
}

std::vector<const FinFunction*> components_for(const Signature& sig, const SortFamily& alpha,
                                               const std::vector<std::string>& args) {
  std::vector<const FinFunction*> out;
  for (const auto& s : args)
    out.push_back(&alpha[sig.require_sort(s)]);
  return out;
}

} // namespace

std::optional<MorphismFailure> check_model_morphism(const SetStructure& m,
                                                    const SetStructure& m2,
                                                    const SortFamily& alpha) {
  if (!(m.signature == m2.signature))
    throw Error("check_model_morphism: structures have different signatures");
  check_family_shape(m, m2, alpha);
  const Signature& sig = m.signature;
  for (std::size_t k = 0; k < sig.ops().size(); ++k) {
    const auto& decl = sig.ops()[k];
    ProductSet d1 = m.arg_set(decl.args), d2 = m2.arg_set(decl.args);
    auto comps = components_for(sig, alpha, decl.args);
    const FinFunction& out = alpha[sig.require_sort(decl.result)];
    for (std::size_t i = 0; i < d1.size(); ++i)
      if (out(m.ops[k](i)) != m2.ops[k](map_tuple(d1, d2, i, comps)))
        return MorphismFailure{SymbolKind::op, decl.name, i};
  }
  for (std::size_t k = 0; k < sig.preds().size(); ++k) {
    const auto& decl = sig.preds()[k];
    ProductSet d1 = m.arg_set(decl.args), d2 = m2.arg_set(decl.args);
    auto comps = components_for(sig, alpha, decl.args);
    for (std::size_t i : m.preds[k].members())
      if (!m2.preds[k].contains(map_tuple(d1, d2, i, comps)))
        return MorphismFailure{SymbolKind::pred, decl.name, i};
  }
  return std::nullopt;
}

std::optional<SortFamily> find_structure_iso(const SetStructure& a, const SetStructure& b) {
  if (!(a.signature == b.signature))
    return std::nullopt;
  const Signature& sig = a.signature;
  auto preds_match = [&](const SortFamily& alpha) {
    for (std::size_t k = 0; k < sig.preds().size(); ++k) {
      const auto& decl = sig.preds()[k];
      if (a.preds[k].count() != b.preds[k].count())
        return false;
      ProductSet d1 = a.arg_set(decl.args), d2 = b.arg_set(decl.args);
      auto comps = components_for(sig, alpha, decl.args);
      for (std::size_t i : a.preds[k].members())
        if (!b.preds[k].contains(map_tuple(d1, d2, i, comps)))
          return false;
    }
    return true;
  };
  return find_natural_iso(a.algebra(), b.algebra(), preds_match);
}

SetStructure transport(const SetStructure& m, const SortFamily& alpha) {
  for (const auto& f : alpha)
    if (!f.is_bijective())
      throw Error("transport: components must be bijections");
  SetStructure out{m.signature, {}, {}, {}};
  for (const auto& f : alpha)
    out.sorts.push_back(f.cod());
  check_family_shape(m, out, alpha);
  const Signature& sig = m.signature;
  for (std::size_t k = 0; k < sig.ops().size(); ++k) {
    const auto& decl = sig.ops()[k];
    ProductSet d1 = m.arg_set(decl.args), d2 = out.arg_set(decl.args);
    auto comps = components_for(sig, alpha, decl.args);
    const FinFunction& res = alpha[sig.require_sort(decl.result)];
    std::vector<Element> t(d2.size());
    for (std::size_t i = 0; i < d1.size(); ++i)
      t[map_tuple(d1, d2, i, comps)] = res(m.ops[k](i));
    out.ops.emplace_back(d2.as_set(), res.cod(), std::move(t));
  }
  for (std::size_t k = 0; k < sig.preds().size(); ++k) {
    const auto& decl = sig.preds()[k];
    ProductSet d1 = m.arg_set(decl.args), d2 = out.arg_set(decl.args);
    auto comps = components_for(sig, alpha, decl.args);
    std::vector<std::size_t> mem;
    for (std::size_t i : m.preds[k].members())
      mem.push_back(map_tuple(d1, d2, i, comps));
    out.preds.emplace_back(d2, std::move(mem));
  }
  return out;
}

// Text form -----------------------------------------------------------------

SetStructure parse_structure(std::string_view text, const Signature& sig) {
  using detail::TokenStream;
  TokenStream ts(text);
  std::vector<std::optional<FinSet>> sorts(sig.sorts().size());
  std::vector<std::optional<std::pair<detail::Token, std::vector<Element>>>> ops(sig.ops().size());
  std::vector<std::optional<std::pair<detail::Token, std::vector<std::size_t>>>> preds(
      sig.preds().size());
  while (!ts.at_end()) {
    if (ts.accept_keyword("sort")) {
      const auto at = ts.peek();
      auto i = sig.sort_index(ts.ident());
      if (!i)
        TokenStream::fail_at(at, "unknown sort");
      if (sorts[*i])
        TokenStream::fail_at(at, "sort assigned twice");
      ts.expect("=");
      sorts[*i] = FinSet(ts.number());
    } else if (ts.accept_keyword("op")) {
      const auto at = ts.peek();
      auto i = sig.op_index(ts.ident());
      if (!i)
        TokenStream::fail_at(at, "unknown operation");
      if (ops[*i])
        TokenStream::fail_at(at, "operation assigned twice");
      ts.expect("=");
      ts.expect("[");
      std::vector<Element> t;
      while (!ts.accept("]"))
        t.push_back(ts.number());
      ops[*i] = {at, std::move(t)};
    } else if (ts.accept_keyword("pred")) {
      const auto at = ts.peek();
      auto i = sig.pred_index(ts.ident());
      if (!i)
        TokenStream::fail_at(at, "unknown predicate");
      if (preds[*i])
        TokenStream::fail_at(at, "predicate assigned twice");
      ts.expect("=");
      ts.expect("{");
      std::vector<std::size_t> mem;
      while (!ts.accept("}"))
        mem.push_back(ts.number());
      preds[*i] = {at, std::move(mem)};
    } else {
      ts.fail("expected 'sort', 'op' or 'pred'");
    }
    ts.expect(";");
  }
  SetStructure m{sig, {}, {}, {}};
  for (std::size_t i = 0; i < sorts.size(); ++i) {
    if (!sorts[i])
      throw Error("structure: no set given for sort '" + sig.sorts()[i] + "'");
    m.sorts.push_back(*sorts[i]);
  }
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const auto& decl = sig.ops()[i];
    if (!ops[i])
      throw Error("structure: no table given for operation '" + decl.name + "'");
    try {
      m.ops.emplace_back(m.arg_set(decl.args).as_set(), m.sort(decl.result), ops[i]->second);
    } catch (const Error& e) {
      TokenStream::fail_at(ops[i]->first, e.what());
    }
  }
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto& decl = sig.preds()[i];
    if (!preds[i])
      throw Error("structure: no members given for predicate '" + decl.name + "'");
    try {
      m.preds.emplace_back(m.arg_set(decl.args), preds[i]->second);
    } catch (const Error& e) {
      TokenStream::fail_at(preds[i]->first, e.what());
    }
  }
  return m;
}

std::string print_structure(const SetStructure& m) {
  std::ostringstream out;
  const Signature& sig = m.signature;
  for (std::size_t i = 0; i < m.sorts.size(); ++i)
    out << "sort " << sig.sorts()[i] << " = " << m.sorts[i].size() << ";\n";
  for (std::size_t i = 0; i < m.ops.size(); ++i) {
    out << "op " << sig.ops()[i].name << " = [";
    const auto& t = m.ops[i].table();
    for (std::size_t j = 0; j < t.size(); ++j)
      out << (j ? " " : "") << t[j];
    out << "];\n";
  }
  for (std::size_t i = 0; i < m.preds.size(); ++i) {
    out << "pred " << sig.preds()[i].name << " = {";
    const auto& mem = m.preds[i].members();
    for (std::size_t j = 0; j < mem.size(); ++j)
      out << (j ? " " : "") << mem[j];
    out << "};\n";
  }
  return out.str();
}

std::string describe(const Theory& thy, const Witness& w) {
  std::ostringstream out;
  const Axiom& ax = thy.axioms.at(w.axiom.axiom);
  const Sequent* seq = std::get_if<Sequent>(&ax);
  std::vector<Sequent> parts;
  out << "axiom " << w.axiom.axiom;
  if (!seq) {
    parts = expand(std::get<SchemaAxiom>(ax));
    seq = &parts.at(w.axiom.part);
    out << " (schema part " << w.axiom.part << ")";
  }
  out << " fails: " << print_axiom(thy.signature, *seq);
  if (!seq->context.empty()) {
    auto names = detail::variable_names(thy.signature, seq->context.size());
    out << " at";
    for (std::size_t i = 0; i < names.size(); ++i)
      out << " " << names[i] << "=" << w.elements.at(i);
  }
  return out.str();
}

} // namespace cohnet
