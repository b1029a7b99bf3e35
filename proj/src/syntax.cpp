#include "cohnet/syntax.hpp"

#include <set>
#include <sstream>

#include "lexer.hpp"

namespace cohnet {

namespace {

const std::set<std::string, std::less<>> reserved = {"true", "false", "and", "or", "exists"};

std::string kind_name(SymbolKind k) {
  switch (k) {
  case SymbolKind::sort:
    return "sort";
  case SymbolKind::op:
    return "operation";
  case SymbolKind::pred:
    return "predicate";
  }
  return "symbol";
}

} // namespace

void Signature::claim(const std::string& name, SymbolKind kind, std::size_t index) {
  if (name.empty())
    throw Error("signature: empty symbol name");
  if (reserved.count(name))
    throw Error("signature: '" + name + "' is a reserved word");
  auto [it, fresh] = names_.try_emplace(name, kind, index);
  if (!fresh)
    throw Error("signature: duplicate symbol '" + name + "' (already a " +
                kind_name(it->second.first) + ")");
}

void Signature::add_sort(const std::string& name) {
  claim(name, SymbolKind::sort, sorts_.size());
  sorts_.push_back(name);
}

void Signature::add_op(const std::string& name, std::vector<std::string> args,
                       const std::string& result) {
  for (const auto& a : args)
    require_sort(a);
  require_sort(result);
  claim(name, SymbolKind::op, ops_.size());
  ops_.push_back({name, std::move(args), result});
}

void Signature::add_pred(const std::string& name, std::vector<std::string> args) {
  for (const auto& a : args)
    require_sort(a);
  claim(name, SymbolKind::pred, preds_.size());
  preds_.push_back({name, std::move(args)});
}

std::optional<std::size_t> Signature::sort_index(std::string_view name) const {
  auto it = names_.find(name);
  if (it == names_.end() || it->second.first != SymbolKind::sort)
    return std::nullopt;
  return it->second.second;
}

std::optional<std::size_t> Signature::op_index(std::string_view name) const {
  auto it = names_.find(name);
  if (it == names_.end() || it->second.first != SymbolKind::op)
    return std::nullopt;
  return it->second.second;
}

std::optional<std::size_t> Signature::pred_index(std::string_view name) const {
  auto it = names_.find(name);
  if (it == names_.end() || it->second.first != SymbolKind::pred)
    return std::nullopt;
  return it->second.second;
}

std::optional<SymbolKind> Signature::kind_of(std::string_view name) const {
  auto it = names_.find(name);
  if (it == names_.end())
    return std::nullopt;
  return it->second.first;
}

std::size_t Signature::require_sort(std::string_view name) const {
  if (auto i = sort_index(name))
    return *i;
  throw SortError(std::nullopt, "unknown sort '" + std::string(name) + "'");
}

const OpDecl& Signature::require_op(std::string_view name) const {
  if (auto i = op_index(name))
    return ops_[*i];
  throw SortError(std::nullopt, "unknown operation '" + std::string(name) + "'");
}

const PredDecl& Signature::require_pred(std::string_view name) const {
  if (auto i = pred_index(name))
    return preds_[*i];
  throw SortError(std::nullopt, "unknown predicate '" + std::string(name) + "'");
}

// Sort checking ---------------------------------------------------------

std::string sort_of(const Signature& sig, const Context& ctx, const Term& t) {
  if (t.is_var()) {
    if (t.var >= ctx.size())
      throw SortError(std::nullopt, "variable #" + std::to_string(t.var) +
                                        " outside context of length " +
                                        std::to_string(ctx.size()));
    return ctx[t.var];
  }
  const OpDecl& op = sig.require_op(t.op);
  if (op.args.size() != t.args.size())
    throw SortError(std::nullopt, "operation '" + t.op + "' expects " +
                                      std::to_string(op.args.size()) + " arguments, got " +
                                      std::to_string(t.args.size()));
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    std::string s = sort_of(sig, ctx, t.args[i]);
    if (s != op.args[i])
      throw SortError(std::nullopt, "argument " + std::to_string(i) + " of '" + t.op +
                                        "' has sort " + s + ", expected " + op.args[i]);
  }
  return op.result;
}

void sort_check(const Signature& sig, const Context& ctx, const Formula& f) {
  switch (f.kind) {
  case Formula::Kind::top:
  case Formula::Kind::bottom:
    return;
  case Formula::Kind::eq: {
    if (f.terms.size() != 2)
      throw SortError(std::nullopt, "equation must have two sides");
    std::string l = sort_of(sig, ctx, f.terms[0]);
    std::string r = sort_of(sig, ctx, f.terms[1]);
    if (l != r)
      throw SortError(std::nullopt, "sort mismatch in equation: " + l + " vs " + r);
    return;
  }
  case Formula::Kind::pred: {
    const PredDecl& p = sig.require_pred(f.name);
    if (p.args.size() != f.terms.size())
      throw SortError(std::nullopt, "predicate '" + f.name + "' expects " +
                                        std::to_string(p.args.size()) + " arguments");
    for (std::size_t i = 0; i < f.terms.size(); ++i)
      if (sort_of(sig, ctx, f.terms[i]) != p.args[i])
        throw SortError(std::nullopt, "argument " + std::to_string(i) + " of predicate '" +
                                          f.name + "' has the wrong sort");
    return;
  }
  case Formula::Kind::conj:
  case Formula::Kind::disj:
    for (const auto& p : f.parts)
      sort_check(sig, ctx, p);
    return;
  case Formula::Kind::exists: {
    sig.require_sort(f.name);
    if (f.parts.size() != 1)
      throw SortError(std::nullopt, "existential must have exactly one body");
    Context inner;
    inner.reserve(ctx.size() + 1);
    inner.push_back(f.name);
    inner.insert(inner.end(), ctx.begin(), ctx.end());
    sort_check(sig, inner, f.parts[0]);
    return;
  }
  }
}

void sort_check(const Signature& sig, const Sequent& s) {
  for (const auto& c : s.context)
    sig.require_sort(c);
  for (const auto& f : s.lhs)
    sort_check(sig, s.context, f);
  for (const auto& f : s.rhs)
    sort_check(sig, s.context, f);
}

namespace {

void check_constant_of(const Signature& sig, const std::string& c, const std::string& sort) {
  const OpDecl& op = sig.require_op(c);
  if (!op.is_constant())
    throw SortError(std::nullopt, "'" + c + "' is not a constant");
  if (op.result != sort)
    throw SortError(std::nullopt, "constant '" + c + "' has sort " + op.result + ", expected " +
                                      sort);
}

} // namespace

void sort_check(const Signature& sig, const SchemaAxiom& ax) {
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, OpGraph>) {
          const OpDecl& op = sig.require_op(a.op);
          for (const auto& row : a.rows) {
            if (row.inputs.size() != op.args.size())
              throw SortError(std::nullopt, "graph row arity does not match '" + a.op + "'");
            for (std::size_t i = 0; i < row.inputs.size(); ++i)
              check_constant_of(sig, row.inputs[i], op.args[i]);
            check_constant_of(sig, row.output, op.result);
          }
        } else {
          sig.require_sort(a.sort);
          for (const auto& c : a.constants)
            check_constant_of(sig, c, a.sort);
        }
      },
      ax);
}

void sort_check(const Theory& thy) {
  for (std::size_t i = 0; i < thy.axioms.size(); ++i) {
    try {
      std::visit([&](const auto& a) { sort_check(thy.signature, a); }, thy.axioms[i]);
    } catch (const SortError& e) {
      throw SortError(i, e.what());
    }
  }
}

std::vector<Sequent> expand(const SchemaAxiom& ax) {
  std::vector<Sequent> out;
  if (const auto* d = std::get_if<DistinctConstants>(&ax)) {
    const auto& cs = d->constants;
    for (std::size_t i = 0; i < cs.size(); ++i)
      for (std::size_t j = i + 1; j < cs.size(); ++j)
        out.push_back({{},
                       {Formula::equals(Term::apply(cs[i]), Term::apply(cs[j]))},
                       {Formula::falsity()}});
  } else if (const auto* c = std::get_if<CoverByConstants>(&ax)) {
    std::vector<Formula> alts;
    for (const auto& k : c->constants)
      alts.push_back(Formula::equals(Term::variable(0), Term::apply(k)));
    out.push_back({{c->sort}, {Formula::truth()}, {Formula::any_of(std::move(alts))}});
  } else {
    const auto& g = std::get<OpGraph>(ax);
    for (const auto& row : g.rows) {
      std::vector<Term> args;
      for (const auto& in : row.inputs)
        args.push_back(Term::apply(in));
      out.push_back({{},
                     {Formula::truth()},
                     {Formula::equals(Term::apply(g.op, std::move(args)), Term::apply(row.output))}});
    }
  }
  return out;
}

std::size_t expanded_size(const SchemaAxiom& ax) {
  if (const auto* d = std::get_if<DistinctConstants>(&ax)) {
    std::size_t n = d->constants.size();
    return n < 2 ? 0 : n * (n - 1) / 2;
  }
  if (std::holds_alternative<CoverByConstants>(ax))
    return 1;
  return std::get<OpGraph>(ax).rows.size();
}

// Substitution ------------------------------------------------------------

Term shift(const Term& t, std::size_t by, std::size_t cutoff) {
  if (t.is_var())
    return Term::variable(t.var >= cutoff ? t.var + by : t.var);
  Term out = Term::apply(t.op);
  out.args.reserve(t.args.size());
  for (const auto& a : t.args)
    out.args.push_back(shift(a, by, cutoff));
  return out;
}

Term substitute(const Term& t, const std::vector<Term>& values) {
  if (t.is_var()) {
    if (t.var >= values.size())
      throw Error("substitute: variable #" + std::to_string(t.var) + " has no replacement");
    return values[t.var];
  }
  Term out = Term::apply(t.op);
  out.args.reserve(t.args.size());
  for (const auto& a : t.args)
    out.args.push_back(substitute(a, values));
  return out;
}

Formula substitute(const Formula& f, const std::vector<Term>& values) {
  Formula out{f.kind, f.name, {}, {}};
  for (const auto& t : f.terms)
    out.terms.push_back(substitute(t, values));
  if (f.kind == Formula::Kind::exists) {
    std::vector<Term> inner{Term::variable(0)};
    for (const auto& v : values)
      inner.push_back(shift(v, 1));
    out.parts.push_back(substitute(f.parts.at(0), inner));
  } else {
    for (const auto& p : f.parts)
      out.parts.push_back(substitute(p, values));
  }
  return out;
}

// Printing ----------------------------------------------------------------

namespace detail {

std::string fresh_name(const Signature& sig, std::string name) {
  while (sig.kind_of(name) || reserved.count(name))
    name += "_";
  return name;
}

std::vector<std::string> variable_names(const Signature& sig, std::size_t count,
                                        std::string_view stem) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < count; ++i)
    names.push_back(fresh_name(sig, std::string(stem) + std::to_string(i)));
  return names;
}

std::string print_context(const Context& ctx, const std::vector<std::string>& names) {
  std::string s = "[";
  for (std::size_t i = 0; i < ctx.size(); ++i)
    s += (i ? ", " : "") + names[i] + ":" + ctx[i];
  return s + "]";
}

} // namespace detail

std::string print_term(const Signature& sig, const Term& t, const std::vector<std::string>& names) {
  if (t.is_var())
    return t.var < names.size() ? names[t.var] : "#" + std::to_string(t.var);
  if (t.args.empty())
    return t.op;
  std::string s = t.op + "(";
  for (std::size_t i = 0; i < t.args.size(); ++i)
    s += (i ? "," : "") + print_term(sig, t.args[i], names);
  return s + ")";
}

namespace {

void print_formula_to(std::ostream& out, const Signature& sig, const Formula& f,
                      std::vector<std::string>& names, std::size_t depth) {
  auto list = [&](const char* head) {
    out << head << "(";
    for (std::size_t i = 0; i < f.parts.size(); ++i) {
      if (i)
        out << ", ";
      print_formula_to(out, sig, f.parts[i], names, depth);
    }
    out << ")";
  };
  switch (f.kind) {
  case Formula::Kind::top:
    out << "true";
    break;
  case Formula::Kind::bottom:
    out << "false";
    break;
  case Formula::Kind::eq:
    out << print_term(sig, f.terms[0], names) << " = " << print_term(sig, f.terms[1], names);
    break;
  case Formula::Kind::pred:
    out << f.name << "(";
    for (std::size_t i = 0; i < f.terms.size(); ++i)
      out << (i ? "," : "") << print_term(sig, f.terms[i], names);
    out << ")";
    break;
  case Formula::Kind::conj:
    list("and");
    break;
  case Formula::Kind::disj:
    list("or");
    break;
  case Formula::Kind::exists: {
    std::string bound = detail::fresh_name(sig, "y" + std::to_string(depth));
    out << "exists [" << bound << ":" << f.name << "] ";
    names.insert(names.begin(), bound);
    print_formula_to(out, sig, f.parts.at(0), names, depth + 1);
    names.erase(names.begin());
    break;
  }
  }
}

std::string join_names(const std::vector<std::string>& xs, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i)
    s += (i ? sep : "") + xs[i];
  return s;
}

} // namespace

std::string print_formula(const Signature& sig, const Formula& f, std::vector<std::string> names) {
  std::ostringstream out;
  print_formula_to(out, sig, f, names, 0);
  return out.str();
}

std::string print_axiom(const Signature& sig, const Axiom& ax) {
  std::ostringstream out;
  if (const auto* s = std::get_if<Sequent>(&ax)) {
    auto names = detail::variable_names(sig, s->context.size());
    out << "axiom " << detail::print_context(s->context, names);
    for (std::size_t i = 0; i < s->lhs.size(); ++i)
      out << (i ? ", " : " ") << print_formula(sig, s->lhs[i], names);
    out << " |-";
    for (std::size_t i = 0; i < s->rhs.size(); ++i)
      out << (i ? ", " : " ") << print_formula(sig, s->rhs[i], names);
    out << ";";
    return out.str();
  }
  const auto& sch = std::get<SchemaAxiom>(ax);
  if (const auto* d = std::get_if<DistinctConstants>(&sch))
    out << "schema distinct " << d->sort << " { " << join_names(d->constants, " ") << " };";
  else if (const auto* c = std::get_if<CoverByConstants>(&sch))
    out << "schema cover " << c->sort << " { " << join_names(c->constants, " ") << " };";
  else {
    const auto& g = std::get<OpGraph>(sch);
    out << "schema graph " << g.op << " {";
    for (const auto& row : g.rows)
      out << " (" << join_names(row.inputs, ",") << ") -> " << row.output << ";";
    out << " };";
  }
  return out.str();
}

std::string print_theory(const Theory& thy) {
  const Signature& sig = thy.signature;
  std::ostringstream out;
  for (const auto& s : sig.sorts())
    out << "sort " << s << ";\n";
  for (const auto& op : sig.ops()) {
    if (op.is_constant())
      out << "const " << op.name << " : " << op.result << ";\n";
    else
      out << "op " << op.name << " : " << join_names(op.args, ",") << " -> " << op.result << ";\n";
  }
  for (const auto& p : sig.preds())
    out << "pred " << p.name << " : " << join_names(p.args, ",") << ";\n";
  for (const auto& ax : thy.axioms)
    out << print_axiom(sig, ax) << "\n";
  return out.str();
}

// Parsing -----------------------------------------------------------------

namespace detail {

namespace {

std::optional<std::size_t> lookup(const std::vector<std::string>& scope, std::string_view name) {
  for (std::size_t i = 0; i < scope.size(); ++i)
    if (scope[i] == name)
      return i;
  return std::nullopt;
}

std::vector<std::string> sort_list(TokenStream& ts, const Signature& sig) {
  std::vector<std::string> out;
  if (ts.peek().kind != TokKind::ident)
    return out;
  do {
    const Token& at = ts.peek();
    std::string s = ts.ident();
    if (!sig.sort_index(s))
      TokenStream::fail_at(at, "unknown sort '" + s + "'");
    out.push_back(s);
  } while (ts.accept(","));
  return out;
}

} // namespace

Term parse_term(TokenStream& ts, const Signature& sig, const std::vector<std::string>& scope) {
  const Token& at = ts.peek();
  std::string name = ts.ident();
  if (ts.accept("(")) {
    if (!sig.op_index(name))
      TokenStream::fail_at(at, "unknown operation '" + name + "'");
    std::vector<Term> args;
    if (!ts.accept(")")) {
      do
        args.push_back(parse_term(ts, sig, scope));
      while (ts.accept(","));
      ts.expect(")");
    }
    return Term::apply(name, std::move(args));
  }
  if (auto v = lookup(scope, name))
    return Term::variable(*v);
  if (sig.op_index(name))
    return Term::apply(name);
  TokenStream::fail_at(at, "unknown variable or constant '" + name + "'");
}

void parse_context(TokenStream& ts, const Signature& sig, std::vector<std::string>& names,
                   Context& sorts) {
  ts.expect("[");
  if (!ts.accept("]")) {
    do {
      names.push_back(ts.ident());
      ts.expect(":");
      const Token& at = ts.peek();
      std::string s = ts.ident();
      if (!sig.sort_index(s))
        TokenStream::fail_at(at, "unknown sort '" + s + "'");
      sorts.push_back(s);
    } while (ts.accept(","));
    ts.expect("]");
  }
}

Formula parse_formula(TokenStream& ts, const Signature& sig, std::vector<std::string> scope) {
  if (ts.accept_keyword("true"))
    return Formula::truth();
  if (ts.accept_keyword("false"))
    return Formula::falsity();
  if (ts.is_keyword("and") || ts.is_keyword("or")) {
    bool conj = ts.next().text == "and";
    ts.expect("(");
    std::vector<Formula> parts;
    if (!ts.accept(")")) {
      do
        parts.push_back(parse_formula(ts, sig, scope));
      while (ts.accept(","));
      ts.expect(")");
    }
    return conj ? Formula::all_of(std::move(parts)) : Formula::any_of(std::move(parts));
  }
  if (ts.accept_keyword("exists")) {
    std::vector<std::string> names;
    Context sorts;
    parse_context(ts, sig, names, sorts);
    if (names.empty())
      ts.fail("existential binds no variables");
    for (const auto& n : names)
      scope.insert(scope.begin(), n);
    Formula body = parse_formula(ts, sig, std::move(scope));
    for (std::size_t i = sorts.size(); i-- > 0;)
      body = Formula::exists(sorts[i], std::move(body));
    return body;
  }
  if (ts.peek().kind == TokKind::ident && sig.pred_index(ts.peek().text) &&
      !lookup(scope, ts.peek().text)) {
    std::string p = ts.ident();
    ts.expect("(");
    std::vector<Term> args;
    if (!ts.accept(")")) {
      do
        args.push_back(parse_term(ts, sig, scope));
      while (ts.accept(","));
      ts.expect(")");
    }
    return Formula::predicate(p, std::move(args));
  }
  Term l = parse_term(ts, sig, scope);
  ts.expect("=");
  Term r = parse_term(ts, sig, scope);
  return Formula::equals(std::move(l), std::move(r));
}

namespace {

std::vector<Formula> formula_list(TokenStream& ts, const Signature& sig,
                                  const std::vector<std::string>& scope, std::string_view stop) {
  std::vector<Formula> out;
  if (ts.is_punct(stop))
    return out;
  do
    out.push_back(parse_formula(ts, sig, scope));
  while (ts.accept(","));
  return out;
}

std::vector<std::string> ident_block(TokenStream& ts) {
  std::vector<std::string> out;
  ts.expect("{");
  while (!ts.accept("}"))
    out.push_back(ts.ident());
  return out;
}

} // namespace

} // namespace detail

Theory parse_theory(std::string_view text) {
  using namespace detail;
  TokenStream ts(text);
  Theory thy;
  Signature& sig = thy.signature;
  while (!ts.at_end()) {
    const Token at = ts.peek();
    try {
      if (ts.accept_keyword("sort")) {
        sig.add_sort(ts.ident());
      } else if (ts.accept_keyword("op")) {
        std::string name = ts.ident();
        ts.expect(":");
        auto args = sort_list(ts, sig);
        ts.expect("->");
        std::string res = ts.ident();
        sig.add_op(name, std::move(args), res);
      } else if (ts.accept_keyword("const")) {
        std::string name = ts.ident();
        ts.expect(":");
        sig.add_constant(name, ts.ident());
      } else if (ts.accept_keyword("pred")) {
        std::string name = ts.ident();
        ts.expect(":");
        sig.add_pred(name, sort_list(ts, sig));
      } else if (ts.accept_keyword("axiom")) {
        Sequent s;
        std::vector<std::string> names;
        parse_context(ts, sig, names, s.context);
        s.lhs = formula_list(ts, sig, names, "|-");
        ts.expect("|-");
        s.rhs = formula_list(ts, sig, names, ";");
        sort_check(sig, s);
        thy.axioms.emplace_back(std::move(s));
      } else if (ts.accept_keyword("schema")) {
        SchemaAxiom ax;
        if (ts.accept_keyword("distinct")) {
          std::string sort = ts.ident();
          ax = DistinctConstants{sort, ident_block(ts)};
        } else if (ts.accept_keyword("cover")) {
          std::string sort = ts.ident();
          ax = CoverByConstants{sort, ident_block(ts)};
        } else if (ts.accept_keyword("graph")) {
          OpGraph g{ts.ident(), {}};
          ts.expect("{");
          while (!ts.accept("}")) {
            GraphRow row;
            ts.expect("(");
            if (!ts.accept(")")) {
              do
                row.inputs.push_back(ts.ident());
              while (ts.accept(","));
              ts.expect(")");
            }
            ts.expect("->");
            row.output = ts.ident();
            ts.expect(";");
            g.rows.push_back(std::move(row));
          }
          ax = std::move(g);
        } else {
          ts.fail("expected 'distinct', 'cover' or 'graph'");
        }
        sort_check(sig, ax);
        thy.axioms.emplace_back(std::move(ax));
      } else {
        ts.fail("expected a declaration");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      TokenStream::fail_at(at, e.what());
    }
    ts.expect(";");
  }
  return thy;
}

} // namespace cohnet
