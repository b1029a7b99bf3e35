#include "cohnet/constructions.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "lexer.hpp"

namespace cohnet {

namespace {

std::vector<Term> vars(std::size_t n, std::size_t from = 0) {
  std::vector<Term> v;
  for (std::size_t i = 0; i < n; ++i)
    v.push_back(Term::variable(from + i));
  return v;
}

template <class Map>
const typename Map::mapped_type& lookup(const Map& m, std::string_view key, const char* what) {
  auto it = m.find(key);
  if (it == m.end())
    throw Error(std::string("interpretation: no image for ") + what + " '" + std::string(key) + "'");
  return it->second;
}

Formula conjunction(std::vector<Formula> fs) {
  if (fs.empty())
    return Formula::truth();
  if (fs.size() == 1)
    return std::move(fs.front());
  return Formula::all_of(std::move(fs));
}

} // namespace

// Interpretations -------------------------------------------------------------

const Context& Interpretation::sort_image(std::string_view sort) const {
  return lookup(sort_map, sort, "sort");
}

Context Interpretation::flatten(const Context& ctx) const {
  Context out;
  for (const auto& s : ctx) {
    const auto& img = sort_image(s);
    out.insert(out.end(), img.begin(), img.end());
  }
  return out;
}

void Interpretation::validate() const {
  const Signature& src = source.signature;
  const Signature& tgt = target.signature;
  for (const auto& s : src.sorts())
    for (const auto& t : sort_image(s))
      if (!tgt.sort_index(t))
        throw SortError(std::nullopt, "sort '" + s + "' maps to unknown sort '" + t + "'");
  for (const auto& op : src.ops()) {
    const auto& terms = lookup(op_map, op.name, "operation");
    const Context ctx = flatten(op.args);
    const Context& want = sort_image(op.result);
    if (terms.size() != want.size())
      throw SortError(std::nullopt, "operation '" + op.name + "' needs " +
                                        std::to_string(want.size()) + " terms");
    for (std::size_t k = 0; k < terms.size(); ++k)
      if (sort_of(tgt, ctx, terms[k]) != want[k])
        throw SortError(std::nullopt, "operation '" + op.name + "': component " +
                                          std::to_string(k) + " has the wrong sort");
  }
  for (const auto& p : src.preds())
    sort_check(tgt, flatten(p.args), lookup(pred_map, p.name, "predicate"));
  if (sort_map.size() != src.sorts().size() || op_map.size() != src.ops().size() ||
      pred_map.size() != src.preds().size())
    throw SortError(std::nullopt, "interpretation maps symbols outside the source signature");
}

namespace {

bool op_is_renamed(const Interpretation& iota, const OpDecl& op) {
  for (const auto& s : op.args)
    if (iota.sort_image(s).size() != 1)
      return false;
  if (iota.sort_image(op.result).size() != 1)
    return false;
  const auto& terms = lookup(iota.op_map, op.name, "operation");
  return terms.size() == 1 && !terms[0].is_var() && terms[0].args == vars(op.args.size());
}

std::string renamed_op(const Interpretation& iota, const std::string& op) {
  return lookup(iota.op_map, op, "operation").front().op;
}

// A schema axiom can be carried over verbatim when every symbol it mentions is
// sent to a single symbol of the same shape.
std::optional<SchemaAxiom> rename_schema(const Interpretation& iota, const SchemaAxiom& ax) {
  const Signature& sig = iota.source.signature;
  auto consts = [&](const std::vector<std::string>& cs, std::vector<std::string>& out) {
    for (const auto& c : cs) {
      if (!op_is_renamed(iota, sig.require_op(c)))
        return false;
      out.push_back(renamed_op(iota, c));
    }
    return true;
  };
  if (const auto* d = std::get_if<DistinctConstants>(&ax)) {
    DistinctConstants r;
    if (iota.sort_image(d->sort).size() != 1 || !consts(d->constants, r.constants))
      return std::nullopt;
    r.sort = iota.sort_image(d->sort)[0];
    return r;
  }
  if (const auto* c = std::get_if<CoverByConstants>(&ax)) {
    CoverByConstants r;
    if (iota.sort_image(c->sort).size() != 1 || !consts(c->constants, r.constants))
      return std::nullopt;
    r.sort = iota.sort_image(c->sort)[0];
    return r;
  }
  const auto& g = std::get<OpGraph>(ax);
  if (!op_is_renamed(iota, sig.require_op(g.op)))
    return std::nullopt;
  OpGraph r;
  r.op = renamed_op(iota, g.op);
  for (const auto& row : g.rows) {
    GraphRow nr;
    std::vector<std::string> out;
    if (!consts(row.inputs, nr.inputs) || !consts({row.output}, out))
      return std::nullopt;
    nr.output = out[0];
    r.rows.push_back(std::move(nr));
  }
  return r;
}

} // namespace

bool Interpretation::is_renaming() const {
  for (const auto& s : source.signature.sorts())
    if (sort_image(s).size() != 1)
      return false;
  for (const auto& op : source.signature.ops())
    if (!op_is_renamed(*this, op))
      return false;
  for (const auto& p : source.signature.preds()) {
    const auto& f = lookup(pred_map, p.name, "predicate");
    if (f.kind != Formula::Kind::pred || f.terms != vars(p.args.size()))
      return false;
  }
  return true;
}

std::vector<Term> translate_term(const Interpretation& iota, const Context& ctx, const Term& t) {
  if (t.is_var()) {
    if (t.var >= ctx.size())
      throw Error("translate_term: variable outside context");
    std::size_t offset = 0;
    for (std::size_t i = 0; i < t.var; ++i)
      offset += iota.sort_image(ctx[i]).size();
    return vars(iota.sort_image(ctx[t.var]).size(), offset);
  }
  std::vector<Term> args;
  for (const auto& a : t.args) {
    auto parts = translate_term(iota, ctx, a);
    args.insert(args.end(), parts.begin(), parts.end());
  }
  std::vector<Term> out;
  for (const auto& body : lookup(iota.op_map, t.op, "operation"))
    out.push_back(substitute(body, args));
  return out;
}

Formula translate_formula(const Interpretation& iota, const Context& ctx, const Formula& f) {
  switch (f.kind) {
  case Formula::Kind::top:
  case Formula::Kind::bottom:
    return f;
  case Formula::Kind::eq: {
    auto l = translate_term(iota, ctx, f.terms.at(0));
    auto r = translate_term(iota, ctx, f.terms.at(1));
    std::vector<Formula> eqs;
    for (std::size_t k = 0; k < l.size(); ++k)
      eqs.push_back(Formula::equals(l[k], r[k]));
    return conjunction(std::move(eqs));
  }
  case Formula::Kind::pred: {
    std::vector<Term> args;
    for (const auto& a : f.terms) {
      auto parts = translate_term(iota, ctx, a);
      args.insert(args.end(), parts.begin(), parts.end());
    }
    return substitute(lookup(iota.pred_map, f.name, "predicate"), args);
  }
  case Formula::Kind::conj:
  case Formula::Kind::disj: {
    Formula out{f.kind, {}, {}, {}};
    for (const auto& p : f.parts)
      out.parts.push_back(translate_formula(iota, ctx, p));
    return out;
  }
  case Formula::Kind::exists: {
    Context inner;
    inner.push_back(f.name);
    inner.insert(inner.end(), ctx.begin(), ctx.end());
    Formula body = translate_formula(iota, inner, f.parts.at(0));
    // the block t1..tk sits at slots 0..k-1; the outermost binder takes tk
    const Context& block = iota.sort_image(f.name);
    for (const auto& s : block)
      body = Formula::exists(s, std::move(body));
    return body;
  }
  }
  throw Error("translate_formula: unknown formula kind");
}

Sequent translate_sequent(const Interpretation& iota, const Sequent& s) {
  Sequent out;
  out.context = iota.flatten(s.context);
  for (const auto& f : s.lhs)
    out.lhs.push_back(translate_formula(iota, s.context, f));
  for (const auto& f : s.rhs)
    out.rhs.push_back(translate_formula(iota, s.context, f));
  return out;
}

std::vector<Axiom> translate_axiom(const Interpretation& iota, const Axiom& ax) {
  if (const auto* s = std::get_if<Sequent>(&ax))
    return {translate_sequent(iota, *s)};
  const auto& sch = std::get<SchemaAxiom>(ax);
  if (auto r = rename_schema(iota, sch))
    return {*r};
  std::vector<Axiom> out;
  for (const auto& s : expand(sch))
    out.push_back(translate_sequent(iota, s));
  return out;
}

Interpretation identity_interpretation(const Theory& thy) {
  Interpretation iota{thy, thy, {}, {}, {}};
  const Signature& sig = thy.signature;
  for (const auto& s : sig.sorts())
    iota.sort_map[s] = {s};
  for (const auto& op : sig.ops())
    iota.op_map[op.name] = {Term::apply(op.name, vars(op.args.size()))};
  for (const auto& p : sig.preds())
    iota.pred_map[p.name] = Formula::predicate(p.name, vars(p.args.size()));
  return iota;
}

Interpretation compose(const Interpretation& first, const Interpretation& second) {
  if (!(first.target.signature == second.source.signature))
    throw Error("compose: interpretations are not composable");
  Interpretation out{first.source, second.target, {}, {}, {}};
  const Signature& sig = first.source.signature;
  for (const auto& s : sig.sorts())
    out.sort_map[s] = second.flatten(first.sort_image(s));
  for (const auto& op : sig.ops()) {
    const Context mid = first.flatten(op.args);
    std::vector<Term> terms;
    for (const auto& t : lookup(first.op_map, op.name, "operation")) {
      auto parts = translate_term(second, mid, t);
      terms.insert(terms.end(), parts.begin(), parts.end());
    }
    out.op_map[op.name] = std::move(terms);
  }
  for (const auto& p : sig.preds())
    out.pred_map[p.name] =
        translate_formula(second, first.flatten(p.args), lookup(first.pred_map, p.name, "predicate"));
  return out;
}

SetStructure precompose(const Interpretation& iota, const SetStructure& m,
                        const PrecomposeOptions& opts) {
  if (!(m.signature == iota.target.signature))
    throw Error("precompose: structure is not over the interpretation's target");
  if (opts.check_target) {
    auto r = check_model(m, iota.target, opts.jobs);
    if (!r.valid())
      throw PrecomposeError(PrecomposeError::Kind::target_invalid, *r.witness,
                            "target model invalid: " + describe(iota.target, *r.witness));
  }
  if (opts.check_translation) {
    for (std::size_t i = 0; i < iota.source.axioms.size(); ++i) {
      Theory translated{iota.target.signature, translate_axiom(iota, iota.source.axioms[i])};
      auto r = check_model(m, translated, opts.jobs);
      if (r.valid())
        continue;
      Witness w = *r.witness;
      std::string what = "source axiom " + std::to_string(i) + " fails after translation: " +
                         describe(translated, w);
      if (translated.axioms.size() > 1)
        w.axiom.part = w.axiom.axiom;
      w.axiom.axiom = i;
      throw PrecomposeError(PrecomposeError::Kind::source_axiom_invalid, std::move(w), what);
    }
  }
  const Signature& sig = iota.source.signature;
  SetStructure out{sig, {}, {}, {}};
  for (const auto& s : sig.sorts())
    out.sorts.push_back(m.context_set(iota.sort_image(s)).as_set());
  for (const auto& op : sig.ops()) {
    const Context ctx = iota.flatten(op.args);
    const ProductSet dom = m.context_set(ctx);
    const ProductSet cod = m.context_set(iota.sort_image(op.result));
    std::vector<Element> table(dom.size(), 0);
    for (const auto& t : lookup(iota.op_map, op.name, "operation")) {
      FinFunction v = eval_term(m, ctx, t);
      for (std::size_t i = 0; i < table.size(); ++i)
        table[i] = table[i] * v.cod().size() + v(i);
    }
    out.ops.emplace_back(dom.as_set(), cod.as_set(), std::move(table));
  }
  for (const auto& p : sig.preds()) {
    Subobject s = eval_formula(m, iota.flatten(p.args), lookup(iota.pred_map, p.name, "predicate"));
    out.preds.push_back(s.with_ambient(out.arg_set(p.args)));
  }
  return out;
}

// Schemas ---------------------------------------------------------------------

namespace {

Term path_term(const Path& p) {
  Term t = Term::variable(0);
  for (const auto& g : p.generators)
    t = Term::apply(g, {std::move(t)});
  return t;
}

} // namespace

Theory schema_to_theory(const CategoryPresentation& d) {
  Theory thy;
  for (const auto& o : d.objects())
    thy.signature.add_sort(o);
  for (const auto& g : d.generators())
    thy.signature.add_op(g.name, {g.source}, g.target);
  for (const auto& eq : d.equations())
    thy.axioms.push_back(
        Sequent{{eq.lhs.start}, {}, {Formula::equals(path_term(eq.lhs), path_term(eq.rhs))}});
  return thy;
}

SetStructure instance_to_structure(const Instance& inst) {
  inst.validate();
  return SetStructure{schema_to_theory(inst.schema).signature, inst.sets, inst.maps, {}};
}

Instance structure_to_instance(const SetStructure& m, const CategoryPresentation& d) {
  if (!(m.signature == schema_to_theory(d).signature))
    throw Error("structure_to_instance: signature does not come from the schema");
  Instance inst{d, m.sorts, m.ops};
  inst.validate();
  return inst;
}

std::string element_constant(std::string_view object, Element x) {
  return std::string(object) + "." + std::to_string(x);
}

Theory hard_code(const Instance& inst) {
  inst.validate();
  if (auto v = check_functorial(inst))
    throw Error("hard_code: instance is not functorial: " + v->message);
  const CategoryPresentation& d = inst.schema;
  Theory thy = schema_to_theory(d);
  for (std::size_t o = 0; o < d.objects().size(); ++o)
    for (Element x = 0; x < inst.sets[o].size(); ++x)
      thy.signature.add_constant(element_constant(d.objects()[o], x), d.objects()[o]);
  for (std::size_t o = 0; o < d.objects().size(); ++o) {
    const std::string& obj = d.objects()[o];
    std::vector<std::string> cs;
    for (Element x = 0; x < inst.sets[o].size(); ++x)
      cs.push_back(element_constant(obj, x));
    thy.axioms.push_back(SchemaAxiom{DistinctConstants{obj, cs}});
    thy.axioms.push_back(SchemaAxiom{CoverByConstants{obj, cs}});
  }
  for (std::size_t g = 0; g < d.generators().size(); ++g) {
    const Generator& gen = d.generators()[g];
    OpGraph graph{gen.name, {}};
    const FinFunction& f = inst.maps[g];
    for (Element x = 0; x < f.dom().size(); ++x)
      graph.rows.push_back(
          GraphRow{{element_constant(gen.source, x)}, element_constant(gen.target, f(x))});
    thy.axioms.push_back(SchemaAxiom{std::move(graph)});
  }
  return thy;
}

SetStructure hard_code_model(const Instance& inst) {
  SetStructure m = instance_to_structure(inst);
  m.signature = hard_code(inst).signature;
  for (std::size_t o = 0; o < inst.sets.size(); ++o)
    for (Element x = 0; x < inst.sets[o].size(); ++x)
      m.ops.push_back(FinFunction::point(inst.sets[o], x));
  return m;
}

// Gluing ------------------------------------------------------------------------

namespace {

struct Renaming {
  std::map<std::string, std::string, std::less<>> names;

  const std::string& operator()(const std::string& s) const { return names.at(s); }
  std::vector<std::string> all(const std::vector<std::string>& xs) const {
    std::vector<std::string> out;
    for (const auto& x : xs)
      out.push_back((*this)(x));
    return out;
  }
};

Interpretation renaming_leg(const Theory& source, const Renaming& r) {
  Interpretation iota{source, {}, {}, {}, {}};
  const Signature& sig = source.signature;
  for (const auto& s : sig.sorts())
    iota.sort_map[s] = {r(s)};
  for (const auto& op : sig.ops())
    iota.op_map[op.name] = {Term::apply(r(op.name), vars(op.args.size()))};
  for (const auto& p : sig.preds())
    iota.pred_map[p.name] = Formula::predicate(r(p.name), vars(p.args.size()));
  return iota;
}

} // namespace

TheoryPushout pushout(const Theory& left, const Theory& right,
                      const std::vector<SymbolPair>& shared, const PushoutNaming& naming) {
  const Signature& ls = left.signature;
  const Signature& rs = right.signature;
  std::map<std::string, std::string, std::less<>> right_to_left;
  for (const auto& [l, r] : shared) {
    auto lk = ls.kind_of(l), rk = rs.kind_of(r);
    if (!lk || !rk)
      throw Error("pushout: unknown symbol in identification " + l + " ~ " + r);
    if (*lk != *rk)
      throw Error("pushout: identified symbols " + l + " and " + r + " differ in kind");
    auto [it, fresh] = right_to_left.emplace(r, l);
    if (!fresh && it->second != l)
      throw Error("pushout: right symbol " + r + " identified twice");
  }
  std::set<std::string, std::less<>> left_shared;
  for (const auto& [r, l] : right_to_left)
    left_shared.insert(l);

  Renaming lr, rr;
  auto name_left = [&](const std::string& s) {
    lr.names[s] = left_shared.count(s) ? s : naming.left_prefix + s;
  };
  for (const auto& s : ls.sorts())
    name_left(s);
  for (const auto& op : ls.ops())
    name_left(op.name);
  for (const auto& p : ls.preds())
    name_left(p.name);
  auto name_right = [&](const std::string& s) {
    auto it = right_to_left.find(s);
    rr.names[s] = it != right_to_left.end() ? lr(it->second) : naming.right_prefix + s;
  };
  for (const auto& s : rs.sorts())
    name_right(s);
  for (const auto& op : rs.ops())
    name_right(op.name);
  for (const auto& p : rs.preds())
    name_right(p.name);

  Signature sig;
  for (const auto& s : ls.sorts())
    sig.add_sort(lr(s));
  for (const auto& s : rs.sorts())
    if (!right_to_left.count(s))
      sig.add_sort(rr(s));
  for (const auto& op : ls.ops())
    sig.add_op(lr(op.name), lr.all(op.args), lr(op.result));
  for (const auto& op : rs.ops()) {
    OpDecl renamed{rr(op.name), rr.all(op.args), rr(op.result)};
    if (right_to_left.count(op.name)) {
      if (!(sig.require_op(renamed.name) == renamed))
        throw Error("pushout: operations " + right_to_left[op.name] + " and " + op.name +
                    " have different shapes");
      continue;
    }
    sig.add_op(renamed.name, renamed.args, renamed.result);
  }
  for (const auto& p : ls.preds())
    sig.add_pred(lr(p.name), lr.all(p.args));
  for (const auto& p : rs.preds()) {
    PredDecl renamed{rr(p.name), rr.all(p.args)};
    if (right_to_left.count(p.name)) {
      if (!(sig.require_pred(renamed.name) == renamed))
        throw Error("pushout: predicates " + right_to_left[p.name] + " and " + p.name +
                    " have different shapes");
      continue;
    }
    sig.add_pred(renamed.name, renamed.args);
  }

  TheoryPushout out{left, right, Theory{sig, {}}, renaming_leg(left, lr), renaming_leg(right, rr)};
  auto add_axioms = [&](const Interpretation& leg) {
    for (const auto& ax : leg.source.axioms)
      for (auto& t : translate_axiom(leg, ax))
        if (std::find(out.apex.axioms.begin(), out.apex.axioms.end(), t) == out.apex.axioms.end())
          out.apex.axioms.push_back(std::move(t));
  };
  add_axioms(out.left_leg);
  add_axioms(out.right_leg);
  out.left_leg.target = out.apex;
  out.right_leg.target = out.apex;
  return out;
}

// Text form -----------------------------------------------------------------------

Interpretation parse_interpretation(std::string_view text, const Theory& source,
                                    const Theory& target) {
  using detail::TokenStream;
  TokenStream ts(text);
  ts.expect_keyword("interpretation");
  ts.expect(";");
  Interpretation iota{source, target, {}, {}, {}};
  const Signature& src = source.signature;
  const Signature& tgt = target.signature;
  auto header = [&](std::vector<std::string>& names, Context& ctx) {
    detail::parse_context(ts, tgt, names, ctx);
    ts.expect("->");
  };
  while (!ts.at_end()) {
    const auto at = ts.peek();
    if (ts.accept_keyword("sort")) {
      const auto name_at = ts.peek();
      std::string s = ts.ident();
      if (!src.sort_index(s))
        TokenStream::fail_at(name_at, "unknown source sort");
      ts.expect("->");
      ts.expect("[");
      Context img;
      if (!ts.accept("]")) {
        do {
          const auto sort_at = ts.peek();
          std::string t = ts.ident();
          if (!tgt.sort_index(t))
            TokenStream::fail_at(sort_at, "unknown target sort");
          img.push_back(t);
        } while (ts.accept(","));
        ts.expect("]");
      }
      if (!iota.sort_map.emplace(s, std::move(img)).second)
        TokenStream::fail_at(name_at, "sort mapped twice");
    } else if (ts.accept_keyword("op")) {
      const auto name_at = ts.peek();
      std::string f = ts.ident();
      if (!src.op_index(f))
        TokenStream::fail_at(name_at, "unknown source operation");
      std::vector<std::string> names;
      Context ctx;
      header(names, ctx);
      ts.expect("(");
      std::vector<Term> terms;
      if (!ts.accept(")")) {
        do
          terms.push_back(detail::parse_term(ts, tgt, names));
        while (ts.accept(","));
        ts.expect(")");
      }
      if (!iota.op_map.emplace(f, std::move(terms)).second)
        TokenStream::fail_at(name_at, "operation mapped twice");
      try {
        if (ctx != iota.flatten(src.require_op(f).args))
          TokenStream::fail_at(name_at, "context does not match the flattened arguments");
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        TokenStream::fail_at(name_at, e.what());
      }
    } else if (ts.accept_keyword("pred")) {
      const auto name_at = ts.peek();
      std::string p = ts.ident();
      if (!src.pred_index(p))
        TokenStream::fail_at(name_at, "unknown source predicate");
      std::vector<std::string> names;
      Context ctx;
      header(names, ctx);
      Formula body = detail::parse_formula(ts, tgt, names);
      if (!iota.pred_map.emplace(p, std::move(body)).second)
        TokenStream::fail_at(name_at, "predicate mapped twice");
      try {
        if (ctx != iota.flatten(src.require_pred(p).args))
          TokenStream::fail_at(name_at, "context does not match the flattened arguments");
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        TokenStream::fail_at(name_at, e.what());
      }
    } else {
      TokenStream::fail_at(at, "expected 'sort', 'op' or 'pred'");
    }
    ts.expect(";");
  }
  iota.validate();
  return iota;
}

std::string print_interpretation(const Interpretation& iota) {
  std::ostringstream out;
  const Signature& src = iota.source.signature;
  const Signature& tgt = iota.target.signature;
  out << "interpretation;\n";
  for (const auto& s : src.sorts()) {
    out << "sort " << s << " -> [";
    const auto& img = iota.sort_image(s);
    for (std::size_t i = 0; i < img.size(); ++i)
      out << (i ? ", " : "") << img[i];
    out << "];\n";
  }
  for (const auto& op : src.ops()) {
    const Context ctx = iota.flatten(op.args);
    auto names = detail::variable_names(tgt, ctx.size());
    out << "op " << op.name << " " << detail::print_context(ctx, names) << " -> (";
    const auto& terms = lookup(iota.op_map, op.name, "operation");
    for (std::size_t i = 0; i < terms.size(); ++i)
      out << (i ? ", " : "") << print_term(tgt, terms[i], names);
    out << ");\n";
  }
  for (const auto& p : src.preds()) {
    const Context ctx = iota.flatten(p.args);
    auto names = detail::variable_names(tgt, ctx.size());
    out << "pred " << p.name << " " << detail::print_context(ctx, names) << " -> "
        << print_formula(tgt, lookup(iota.pred_map, p.name, "predicate"), names) << ";\n";
  }
  return out.str();
}

} // namespace cohnet
