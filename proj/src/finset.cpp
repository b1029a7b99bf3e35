#include "cohnet/finset.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace cohnet {

FinSet::FinSet(std::size_t size, std::vector<std::string> labels)
    : size_(size), labels_(std::move(labels)) {
  if (!labels_.empty()) {
    if (labels_.size() != size_)
      throw Error("FinSet: label count does not match size");
    std::set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size())
      throw Error("FinSet: labels must be pairwise distinct");
  }
}

std::string FinSet::label(Element x) const {
  return has_labels() ? labels_.at(x) : std::to_string(x);
}

FinFunction::FinFunction(FinSet dom, FinSet cod, std::vector<Element> table)
    : dom_(std::move(dom)), cod_(std::move(cod)), table_(std::move(table)) {
  if (table_.size() != dom_.size())
    throw Error("FinFunction: table length " + std::to_string(table_.size()) +
                " does not match domain size " + std::to_string(dom_.size()));
  for (Element y : table_)
    if (y >= cod_.size())
      throw Error("FinFunction: value " + std::to_string(y) + " outside codomain of size " +
                  std::to_string(cod_.size()));
}

FinFunction FinFunction::identity(const FinSet& s) {
  std::vector<Element> t(s.size());
  std::iota(t.begin(), t.end(), Element{0});
  return FinFunction(s, s, std::move(t));
}

FinFunction FinFunction::constant(const FinSet& dom, const FinSet& cod, Element value) {
  return FinFunction(dom, cod, std::vector<Element>(dom.size(), value));
}

FinFunction FinFunction::point(const FinSet& cod, Element value) {
  return FinFunction(FinSet(1), cod, {value});
}

FinFunction FinFunction::after(const FinFunction& g) const {
  if (!(g.cod() == dom_))
    throw Error("FinFunction::after: codomain/domain mismatch");
  std::vector<Element> t(g.dom().size());
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = table_[g(i)];
  return FinFunction(g.dom(), cod_, std::move(t));
}

bool FinFunction::is_injective() const {
  std::vector<bool> hit(cod_.size(), false);
  for (Element y : table_) {
    if (hit[y])
      return false;
    hit[y] = true;
  }
  return true;
}

bool FinFunction::is_surjective() const {
  std::vector<bool> hit(cod_.size(), false);
  std::size_t n = 0;
  for (Element y : table_)
    if (!hit[y]) {
      hit[y] = true;
      ++n;
    }
  return n == cod_.size();
}

std::optional<FinFunction> FinFunction::inverse() const {
  if (!is_bijective())
    return std::nullopt;
  std::vector<Element> t(cod_.size());
  for (std::size_t i = 0; i < table_.size(); ++i)
    t[table_[i]] = i;
  return FinFunction(cod_, dom_, std::move(t));
}

ProductSet::ProductSet(std::vector<FinSet> factors)
    : factors_(std::move(factors)), strides_(factors_.size()) {
  std::size_t stride = 1;
  for (std::size_t k = factors_.size(); k-- > 0;) {
    strides_[k] = stride;
    stride *= factors_[k].size();
  }
  size_ = stride;
}

std::size_t ProductSet::tuple_to_index(std::span<const Element> tuple) const {
  if (tuple.size() != factors_.size())
    throw Error("ProductSet: tuple arity mismatch");
  std::size_t index = 0;
  for (std::size_t k = 0; k < tuple.size(); ++k) {
    if (tuple[k] >= factors_[k].size())
      throw Error("ProductSet: coordinate out of range");
    index += tuple[k] * strides_[k];
  }
  return index;
}

std::vector<Element> ProductSet::index_to_tuple(std::size_t index) const {
  std::vector<Element> tuple(factors_.size());
  for (std::size_t k = 0; k < factors_.size(); ++k)
    tuple[k] = coordinate(index, k);
  return tuple;
}

Element ProductSet::coordinate(std::size_t index, std::size_t k) const {
  return (index / strides_[k]) % factors_[k].size();
}

FinFunction ProductSet::projection(std::size_t k) const {
  std::vector<Element> t(size_);
  for (std::size_t i = 0; i < size_; ++i)
    t[i] = coordinate(i, k);
  return FinFunction(as_set(), factors_.at(k), std::move(t));
}

ProductSet product(std::vector<FinSet> factors) { return ProductSet(std::move(factors)); }

FinFunction pairing(const FinSet& dom, std::span<const FinFunction> components) {
  std::vector<FinSet> cods;
  for (const auto& c : components) {
    if (!(c.dom() == dom))
      throw Error("pairing: component domain mismatch");
    cods.push_back(c.cod());
  }
  ProductSet cod(std::move(cods));
  std::vector<Element> t(dom.size(), 0);
  std::size_t stride = 1;
  for (std::size_t k = components.size(); k-- > 0;) {
    const auto& tab = components[k].table();
    for (std::size_t i = 0; i < t.size(); ++i)
      t[i] += tab[i] * stride;
    stride *= components[k].cod().size();
  }
  return FinFunction(dom, cod.as_set(), std::move(t));
}

Subobject::Subobject(ProductSet ambient, std::vector<std::size_t> members)
    : ambient_(std::move(ambient)), members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  if (!members_.empty() && members_.back() >= ambient_.size())
    throw Error("Subobject: member outside ambient");
}

Subobject Subobject::full(ProductSet ambient) {
  std::vector<std::size_t> m(ambient.size());
  std::iota(m.begin(), m.end(), std::size_t{0});
  return Subobject(std::move(ambient), std::move(m));
}

Subobject Subobject::empty(ProductSet ambient) { return Subobject(std::move(ambient), {}); }

bool Subobject::contains(std::size_t index) const {
  return std::binary_search(members_.begin(), members_.end(), index);
}

bool Subobject::is_subset_of(const Subobject& other) const {
  return std::includes(other.members_.begin(), other.members_.end(), members_.begin(),
                       members_.end());
}

Subobject Subobject::with_ambient(ProductSet ambient) const {
  if (ambient.size() != ambient_.size())
    throw Error("Subobject::with_ambient: cardinality mismatch");
  Subobject s;
  s.ambient_ = std::move(ambient);
  s.members_ = members_;
  return s;
}

Subobject equalizer(const FinFunction& f, const FinFunction& g) {
  if (!(f.dom() == g.dom()) || !(f.cod() == g.cod()))
    throw Error("equalizer: domain/codomain mismatch");
  std::vector<std::size_t> m;
  for (std::size_t i = 0; i < f.dom().size(); ++i)
    if (f(i) == g(i))
      m.push_back(i);
  return Subobject(ProductSet({f.dom()}), std::move(m));
}

Pullback pullback(const FinFunction& f, const FinFunction& g) {
  if (!(f.cod() == g.cod()))
    throw Error("pullback: codomain mismatch");
  ProductSet amb({f.dom(), g.dom()});
  // bucket g's domain by value
  std::vector<std::vector<Element>> fibres(g.cod().size());
  for (std::size_t b = 0; b < g.dom().size(); ++b)
    fibres[g(b)].push_back(b);
  std::vector<std::size_t> m;
  std::vector<Element> left, right;
  for (std::size_t a = 0; a < f.dom().size(); ++a)
    for (Element b : fibres[f(a)]) {
      m.push_back(a * g.dom().size() + b);
      left.push_back(a);
      right.push_back(b);
    }
  FinSet apex(m.size());
  return Pullback{Subobject(std::move(amb), std::move(m)),
                  FinFunction(apex, f.dom(), std::move(left)),
                  FinFunction(apex, g.dom(), std::move(right))};
}

Subobject preimage(const FinFunction& f, const Subobject& sub) {
  if (f.cod().size() != sub.ambient().size())
    throw Error("preimage: codomain does not match the subobject's ambient");
  std::vector<std::size_t> m;
  for (std::size_t i = 0; i < f.dom().size(); ++i)
    if (sub.contains(f(i)))
      m.push_back(i);
  return Subobject(ProductSet({f.dom()}), std::move(m));
}

Subobject image(const FinFunction& f) {
  std::vector<bool> hit(f.cod().size(), false);
  for (Element y : f.table())
    hit[y] = true;
  std::vector<std::size_t> m;
  for (std::size_t y = 0; y < hit.size(); ++y)
    if (hit[y])
      m.push_back(y);
  return Subobject(ProductSet({f.cod()}), std::move(m));
}

Subobject meet(const Subobject& a, const Subobject& b) {
  if (!(a.ambient() == b.ambient()))
    throw Error("meet: ambient mismatch");
  std::vector<std::size_t> m;
  std::set_intersection(a.members().begin(), a.members().end(), b.members().begin(),
                        b.members().end(), std::back_inserter(m));
  return Subobject(a.ambient(), std::move(m));
}

Subobject join(const Subobject& a, const Subobject& b) {
  if (!(a.ambient() == b.ambient()))
    throw Error("join: ambient mismatch");
  std::vector<std::size_t> m;
  std::set_union(a.members().begin(), a.members().end(), b.members().begin(),
                 b.members().end(), std::back_inserter(m));
  return Subobject(a.ambient(), std::move(m));
}

Subobject sub_lattice(LatticeOp op, const ProductSet& ambient, std::span<const Subobject> subs) {
  Subobject acc = op == LatticeOp::meet ? Subobject::full(ambient) : Subobject::empty(ambient);
  for (const auto& s : subs)
    acc = op == LatticeOp::meet ? meet(acc, s) : join(acc, s);
  return acc;
}

namespace {

constexpr std::size_t unassigned = static_cast<std::size_t>(-1);

struct IsoSearch {
  const Algebra& a;
  const Algebra& b;
  const std::function<bool(const SortFamily&)>& accept;
  std::vector<ProductSet> a_doms, b_doms;

  struct State {
    std::vector<std::vector<std::size_t>> fwd;
    std::vector<std::vector<bool>> used;
  };

  bool assign(State& st, std::size_t sort, Element x, Element y) const {
    auto& slot = st.fwd[sort][x];
    if (slot == y)
      return true;
    if (slot != unassigned || st.used[sort][y])
      return false;
    slot = y;
    st.used[sort][y] = true;
    return true;
  }

  // Forces every square whose arguments are all assigned.
  bool propagate(State& st) const {
    bool changed = true;
    std::vector<Element> btuple;
    while (changed) {
      changed = false;
      for (std::size_t k = 0; k < a.ops.size(); ++k) {
        const auto& op = a.ops[k];
        const auto& dom = a_doms[k];
        btuple.resize(op.args.size());
        for (std::size_t d = 0; d < dom.size(); ++d) {
          bool ready = true;
          for (std::size_t j = 0; j < op.args.size(); ++j) {
            Element mapped = st.fwd[op.args[j]][dom.coordinate(d, j)];
            if (mapped == unassigned) {
              ready = false;
              break;
            }
            btuple[j] = mapped;
          }
          if (!ready)
            continue;
          Element want = b.ops[k].table(b_doms[k].tuple_to_index(btuple));
          Element have = op.table(d);
          std::size_t before = st.fwd[op.result][have];
          if (!assign(st, op.result, have, want))
            return false;
          if (before == unassigned)
            changed = true;
        }
      }
    }
    return true;
  }

  std::optional<SortFamily> search(State st) const {
    if (!propagate(st))
      return std::nullopt;
    for (std::size_t s = 0; s < st.fwd.size(); ++s)
      for (Element x = 0; x < st.fwd[s].size(); ++x) {
        if (st.fwd[s][x] != unassigned)
          continue;
        for (Element y = 0; y < b.sorts[s].size(); ++y) {
          if (st.used[s][y])
            continue;
          State next = st;
          assign(next, s, x, y);
          if (auto r = search(std::move(next)))
            return r;
        }
        return std::nullopt;
      }
    SortFamily family;
    for (std::size_t s = 0; s < st.fwd.size(); ++s)
      family.emplace_back(a.sorts[s], b.sorts[s], st.fwd[s]);
    if (accept && !accept(family))
      return std::nullopt;
    return family;
  }
};

void check_same_shape(const Algebra& a, const Algebra& b) {
  if (a.sorts.size() != b.sorts.size() || a.ops.size() != b.ops.size())
    throw Error("algebras have different shapes");
  for (std::size_t k = 0; k < a.ops.size(); ++k)
    if (a.ops[k].args != b.ops[k].args || a.ops[k].result != b.ops[k].result)
      throw Error("algebras disagree on the profile of operation " + std::to_string(k));
}

ProductSet arg_product(const Algebra& alg, const AlgebraOp& op) {
  std::vector<FinSet> f;
  for (std::size_t s : op.args)
    f.push_back(alg.sorts[s]);
  return ProductSet(std::move(f));
}

} // namespace

std::optional<SortFamily> find_natural_iso(const Algebra& a, const Algebra& b,
                                           const std::function<bool(const SortFamily&)>& accept) {
  check_same_shape(a, b);
  for (std::size_t s = 0; s < a.sorts.size(); ++s)
    if (a.sorts[s].size() != b.sorts[s].size())
      return std::nullopt;
  IsoSearch search{a, b, accept, {}, {}};
  for (const auto& op : a.ops)
    search.a_doms.push_back(arg_product(a, op));
  for (const auto& op : b.ops)
    search.b_doms.push_back(arg_product(b, op));
  IsoSearch::State st;
  for (const auto& s : a.sorts) {
    st.fwd.emplace_back(s.size(), unassigned);
    st.used.emplace_back(s.size(), false);
  }
  return search.search(std::move(st));
}

bool commutes(const Algebra& a, const Algebra& b, const SortFamily& alpha) {
  check_same_shape(a, b);
  if (alpha.size() != a.sorts.size())
    return false;
  for (std::size_t k = 0; k < a.ops.size(); ++k) {
    const auto& op = a.ops[k];
    ProductSet adom = arg_product(a, op);
    ProductSet bdom = arg_product(b, b.ops[k]);
    std::vector<Element> tuple(op.args.size());
    for (std::size_t d = 0; d < adom.size(); ++d) {
      for (std::size_t j = 0; j < op.args.size(); ++j)
        tuple[j] = alpha[op.args[j]](adom.coordinate(d, j));
      if (alpha[op.result](op.table(d)) != b.ops[k].table(bdom.tuple_to_index(tuple)))
        return false;
    }
  }
  return true;
}

} // namespace cohnet
