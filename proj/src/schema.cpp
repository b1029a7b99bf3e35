#include "cohnet/schema.hpp"

#include <algorithm>
#include <sstream>

#include "lexer.hpp"

namespace cohnet {

namespace {

template <typename T, typename Key>
std::optional<std::size_t> index_by_name(const std::vector<T>& v, std::string_view name, Key key) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (key(v[i]) == name)
      return i;
  return std::nullopt;
}

std::string path_text(const Path& p) {
  if (p.generators.empty())
    return "id";
  std::string s;
  for (std::size_t i = 0; i < p.generators.size(); ++i)
    s += (i ? " " : "") + p.generators[i];
  return s;
}

} // namespace

void CategoryPresentation::add_object(const std::string& name) {
  if (object_index(name) || generator_index(name))
    throw Error("schema: duplicate name '" + name + "'");
  objects_.push_back(name);
}

void CategoryPresentation::add_generator(const std::string& name, const std::string& source,
                                         const std::string& target) {
  if (object_index(name) || generator_index(name))
    throw Error("schema: duplicate name '" + name + "'");
  require_object(source);
  require_object(target);
  generators_.push_back({name, source, target});
}

void CategoryPresentation::add_equation(Path lhs, Path rhs) {
  if (lhs.start != rhs.start)
    throw Error("schema: equation sides start at different objects");
  if (path_target(lhs) != path_target(rhs))
    throw Error("schema: equation sides end at different objects");
  equations_.push_back({std::move(lhs), std::move(rhs)});
}

std::optional<std::size_t> CategoryPresentation::object_index(std::string_view name) const {
  return index_by_name(objects_, name, [](const std::string& s) -> std::string_view { return s; });
}

std::optional<std::size_t> CategoryPresentation::generator_index(std::string_view name) const {
  return index_by_name(generators_, name,
                       [](const Generator& g) -> std::string_view { return g.name; });
}

std::size_t CategoryPresentation::require_object(std::string_view name) const {
  if (auto i = object_index(name))
    return *i;
  throw Error("schema: unknown object '" + std::string(name) + "'");
}

std::size_t CategoryPresentation::require_generator(std::string_view name) const {
  if (auto i = generator_index(name))
    return *i;
  throw Error("schema: unknown generator '" + std::string(name) + "'");
}

std::string CategoryPresentation::path_target(const Path& p) const {
  require_object(p.start);
  std::string at = p.start;
  for (const auto& g : p.generators) {
    const auto& gen = generators_[require_generator(g)];
    if (gen.source != at)
      throw Error("schema: path does not compose at generator '" + g + "'");
    at = gen.target;
  }
  return at;
}

void Instance::validate() const {
  if (sets.size() != schema.objects().size() || maps.size() != schema.generators().size())
    throw Error("instance: shape does not match schema");
  for (std::size_t k = 0; k < maps.size(); ++k) {
    const auto& g = schema.generators()[k];
    if (!(maps[k].dom() == set(g.source)) || !(maps[k].cod() == set(g.target)))
      throw Error("instance: function for '" + g.name + "' has wrong endpoints");
  }
}

const FinSet& Instance::set(std::string_view object) const {
  return sets.at(schema.require_object(object));
}

const FinFunction& Instance::map(std::string_view generator) const {
  return maps.at(schema.require_generator(generator));
}

FinFunction Instance::along(const Path& p) const {
  FinFunction acc = FinFunction::identity(set(p.start));
  for (const auto& g : p.generators)
    acc = map(g).after(acc);
  return acc;
}

Algebra Instance::algebra() const {
  Algebra a;
  a.sorts = sets;
  for (std::size_t k = 0; k < maps.size(); ++k) {
    const auto& g = schema.generators()[k];
    a.ops.push_back({{schema.require_object(g.source)}, schema.require_object(g.target), maps[k]});
  }
  return a;
}

std::optional<EquationViolation> check_functorial(const Instance& inst) {
  inst.validate();
  const auto& eqs = inst.schema.equations();
  for (std::size_t e = 0; e < eqs.size(); ++e) {
    FinFunction l = inst.along(eqs[e].lhs);
    FinFunction r = inst.along(eqs[e].rhs);
    for (Element x = 0; x < l.dom().size(); ++x)
      if (l(x) != r(x)) {
        std::ostringstream msg;
        msg << "equation " << e << " (" << eqs[e].lhs.start << " : " << path_text(eqs[e].lhs)
            << " = " << path_text(eqs[e].rhs) << ") fails at element " << x << ": " << l(x)
            << " != " << r(x);
        return EquationViolation{e, x, msg.str()};
      }
  }
  return std::nullopt;
}

std::optional<NaturalityFailure> check_natural(const NatTransformCandidate& cand) {
  cand.source.validate();
  cand.target.validate();
  const auto& schema = cand.source.schema;
  if (!(schema == cand.target.schema))
    throw Error("check_natural: instances over different schemas");
  if (cand.components.size() != schema.objects().size())
    throw Error("check_natural: wrong number of components");
  for (std::size_t o = 0; o < schema.objects().size(); ++o)
    if (!(cand.components[o].dom() == cand.source.sets[o]) ||
        !(cand.components[o].cod() == cand.target.sets[o]))
      throw Error("check_natural: component at '" + schema.objects()[o] + "' has wrong endpoints");
  for (std::size_t k = 0; k < schema.generators().size(); ++k) {
    const auto& g = schema.generators()[k];
    const auto& a_src = cand.components[schema.require_object(g.source)];
    const auto& a_dst = cand.components[schema.require_object(g.target)];
    for (Element x = 0; x < a_src.dom().size(); ++x) {
      Element via_source = a_dst(cand.source.maps[k](x));
      Element via_target = cand.target.maps[k](a_src(x));
      if (via_source != via_target) {
        std::ostringstream msg;
        msg << "naturality square for '" << g.name << "' fails at element " << x << ": "
            << via_source << " != " << via_target;
        return NaturalityFailure{k, x, msg.str()};
      }
    }
  }
  return std::nullopt;
}

NatTransformCandidate compose(const NatTransformCandidate& first,
                              const NatTransformCandidate& second) {
  NatTransformCandidate out{first.source, second.target, {}};
  for (std::size_t o = 0; o < first.components.size(); ++o)
    out.components.push_back(second.components.at(o).after(first.components[o]));
  return out;
}

CategoryPresentation builtin(BuiltinSchema which) {
  CategoryPresentation c;
  switch (which) {
  case BuiltinSchema::sort:
    c.add_object("S");
    break;
  case BuiltinSchema::oper:
    c.add_object("A");
    c.add_object("B");
    c.add_generator("g", "A", "B");
    break;
  case BuiltinSchema::span:
    c.add_object("X");
    c.add_object("N");
    c.add_object("Y");
    c.add_generator("f", "N", "X");
    c.add_generator("t", "N", "Y");
    break;
  case BuiltinSchema::pol:
    c.add_object("V");
    c.add_object("E");
    c.add_generator("s", "E", "V");
    c.add_generator("t", "E", "V");
    c.add_generator("a", "V", "V");
    break;
  case BuiltinSchema::shop:
    for (const char* o : {"Item", "Price", "Order", "Customer", "Employee", "Person", "Address"})
      c.add_object(o);
    c.add_generator("a", "Item", "Price");
    c.add_generator("b", "Order", "Item");
    c.add_generator("c", "Order", "Customer");
    c.add_generator("d", "Order", "Employee");
    c.add_generator("e", "Customer", "Person");
    c.add_generator("f", "Employee", "Person");
    c.add_generator("g", "Person", "Address");
    break;
  }
  return c;
}

CategoryPresentation builtin(std::string_view name) {
  if (name == "Sort")
    return builtin(BuiltinSchema::sort);
  if (name == "Oper")
    return builtin(BuiltinSchema::oper);
  if (name == "Span")
    return builtin(BuiltinSchema::span);
  if (name == "Pol")
    return builtin(BuiltinSchema::pol);
  if (name == "Shop")
    return builtin(BuiltinSchema::shop);
  throw Error("unknown builtin schema '" + std::string(name) + "'");
}

CategoryPresentation parse_schema(std::string_view text) {
  detail::TokenStream ts(text);
  CategoryPresentation c;
  auto parse_path = [&](const std::string& start) {
    Path p{start, {}};
    if (ts.accept_keyword("id"))
      return p;
    while (ts.peek().kind == detail::TokKind::ident)
      p.generators.push_back(ts.ident());
    if (p.generators.empty())
      ts.fail("expected path");
    return p;
  };
  while (!ts.at_end()) {
    const auto& at = ts.peek();
    try {
      if (ts.accept_keyword("object")) {
        c.add_object(ts.ident());
      } else if (ts.accept_keyword("arrow")) {
        std::string name = ts.ident();
        ts.expect(":");
        std::string src = ts.ident();
        ts.expect("->");
        std::string dst = ts.ident();
        c.add_generator(name, src, dst);
      } else if (ts.accept_keyword("equation")) {
        std::string start = ts.ident();
        ts.expect(":");
        Path l = parse_path(start);
        ts.expect("=");
        Path r = parse_path(start);
        c.add_equation(std::move(l), std::move(r));
      } else {
        ts.fail("expected 'object', 'arrow' or 'equation'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      detail::TokenStream::fail_at(at, e.what());
    }
    ts.expect(";");
  }
  return c;
}

std::string print_schema(const CategoryPresentation& schema) {
  std::ostringstream out;
  for (const auto& o : schema.objects())
    out << "object " << o << ";\n";
  for (const auto& g : schema.generators())
    out << "arrow " << g.name << " : " << g.source << " -> " << g.target << ";\n";
  for (const auto& e : schema.equations())
    out << "equation " << e.lhs.start << " : " << path_text(e.lhs) << " = " << path_text(e.rhs)
        << ";\n";
  return out.str();
}

Instance parse_instance(std::string_view text, const CategoryPresentation& schema) {
  detail::TokenStream ts(text);
  std::vector<std::optional<FinSet>> sets(schema.objects().size());
  std::vector<std::optional<std::pair<detail::Token, std::vector<Element>>>> tables(
      schema.generators().size());
  while (!ts.at_end()) {
    if (ts.accept_keyword("set")) {
      const auto& at = ts.peek();
      auto o = schema.object_index(ts.ident());
      if (!o)
        detail::TokenStream::fail_at(at, "unknown object");
      if (sets[*o])
        detail::TokenStream::fail_at(at, "object assigned twice");
      ts.expect("=");
      sets[*o] = FinSet(ts.number());
    } else if (ts.accept_keyword("map")) {
      const auto at = ts.peek();
      auto g = schema.generator_index(ts.ident());
      if (!g)
        detail::TokenStream::fail_at(at, "unknown generator");
      if (tables[*g])
        detail::TokenStream::fail_at(at, "generator assigned twice");
      ts.expect("=");
      ts.expect("[");
      std::vector<Element> t;
      while (!ts.accept("]"))
        t.push_back(ts.number());
      tables[*g] = {at, std::move(t)};
    } else {
      ts.fail("expected 'set' or 'map'");
    }
    ts.expect(";");
  }
  Instance inst{schema, {}, {}};
  for (std::size_t o = 0; o < sets.size(); ++o) {
    if (!sets[o])
      throw Error("instance: no set given for object '" + schema.objects()[o] + "'");
    inst.sets.push_back(*sets[o]);
  }
  for (std::size_t k = 0; k < tables.size(); ++k) {
    const auto& g = schema.generators()[k];
    if (!tables[k])
      throw Error("instance: no map given for generator '" + g.name + "'");
    try {
      inst.maps.emplace_back(inst.set(g.source), inst.set(g.target), tables[k]->second);
    } catch (const Error& e) {
      detail::TokenStream::fail_at(tables[k]->first, e.what());
    }
  }
  return inst;
}

std::string print_instance(const Instance& inst) {
  std::ostringstream out;
  for (std::size_t o = 0; o < inst.sets.size(); ++o)
    out << "set " << inst.schema.objects()[o] << " = " << inst.sets[o].size() << ";\n";
  for (std::size_t k = 0; k < inst.maps.size(); ++k) {
    out << "map " << inst.schema.generators()[k].name << " = [";
    for (std::size_t i = 0; i < inst.maps[k].table().size(); ++i)
      out << (i ? " " : "") << inst.maps[k].table()[i];
    out << "];\n";
  }
  return out.str();
}

} // namespace cohnet
