#pragma once

// Finite sets, total functions between them, finite limits, images and
// subobject lattices. Elements of a set of size n are the integers 0..n-1.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cohnet/error.hpp"

namespace cohnet {

using Element = std::size_t;

class FinSet {
public:
  FinSet() = default;
  explicit FinSet(std::size_t size) : size_(size) {}
  FinSet(std::size_t size, std::vector<std::string> labels);

  std::size_t size() const { return size_; }
  bool has_labels() const { return !labels_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::string label(Element x) const;

  // labels are metadata; sets compare by cardinality
  friend bool operator==(const FinSet& a, const FinSet& b) { return a.size_ == b.size_; }

private:
  std::size_t size_ = 0;
  std::vector<std::string> labels_;
};

class FinFunction {
public:
  FinFunction() = default;
  FinFunction(FinSet dom, FinSet cod, std::vector<Element> table);

  static FinFunction identity(const FinSet& s);
  static FinFunction constant(const FinSet& dom, const FinSet& cod, Element value);
  /// The global element 1 -> cod picking `value`.
  static FinFunction point(const FinSet& cod, Element value);

  const FinSet& dom() const { return dom_; }
  const FinSet& cod() const { return cod_; }
  const std::vector<Element>& table() const { return table_; }
  Element operator()(Element x) const { return table_[x]; }

  /// this ∘ g  (apply g first)
  FinFunction after(const FinFunction& g) const;
  bool is_injective() const;
  bool is_surjective() const;
  bool is_bijective() const { return is_injective() && is_surjective(); }
  std::optional<FinFunction> inverse() const;

  friend bool operator==(const FinFunction& a, const FinFunction& b) {
    return a.dom_ == b.dom_ && a.cod_ == b.cod_ && a.table_ == b.table_;
  }

private:
  FinSet dom_;
  FinSet cod_;
  std::vector<Element> table_;
};

/// Mixed-radix product; the last factor varies fastest.
class ProductSet {
public:
  ProductSet() = default;
  explicit ProductSet(std::vector<FinSet> factors);

  const std::vector<FinSet>& factors() const { return factors_; }
  std::size_t arity() const { return factors_.size(); }
  std::size_t size() const { return size_; }
  FinSet as_set() const { return FinSet(size_); }

  std::size_t tuple_to_index(std::span<const Element> tuple) const;
  std::vector<Element> index_to_tuple(std::size_t index) const;
  /// Coordinate `k` of the tuple at `index`, without materializing the tuple.
  Element coordinate(std::size_t index, std::size_t k) const;
  /// The k-th product projection as a function.
  FinFunction projection(std::size_t k) const;

  friend bool operator==(const ProductSet& a, const ProductSet& b) {
    return a.factors_ == b.factors_;
  }

private:
  std::vector<FinSet> factors_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

ProductSet product(std::vector<FinSet> factors);

/// Tupling ⟨f1,...,fk⟩ : D -> C1 x ... x Ck.
FinFunction pairing(const FinSet& dom, std::span<const FinFunction> components);

class Subobject {
public:
  Subobject() = default;
  /// `members` need not be sorted or unique; they are canonicalized.
  Subobject(ProductSet ambient, std::vector<std::size_t> members);

  static Subobject full(ProductSet ambient);
  static Subobject empty(ProductSet ambient);

  const ProductSet& ambient() const { return ambient_; }
  const std::vector<std::size_t>& members() const { return members_; }
  std::size_t count() const { return members_.size(); }
  bool contains(std::size_t index) const;
  bool is_full() const { return members_.size() == ambient_.size(); }
  bool is_empty() const { return members_.empty(); }
  bool is_subset_of(const Subobject& other) const;
  /// Same members over an ambient of identical cardinality.
  Subobject with_ambient(ProductSet ambient) const;

  friend bool operator==(const Subobject& a, const Subobject& b) {
    return a.ambient_ == b.ambient_ && a.members_ == b.members_;
  }

private:
  ProductSet ambient_;
  std::vector<std::size_t> members_;
};

Subobject equalizer(const FinFunction& f, const FinFunction& g);

struct Pullback {
  Subobject object;  // ⊆ dom(f) x dom(g)
  FinFunction left;  // restriction of the first projection
  FinFunction right; // restriction of the second projection
};

Pullback pullback(const FinFunction& f, const FinFunction& g);

/// Pullback of a mono `sub` ↣ cod(f) along f, as a subobject of dom(f).
Subobject preimage(const FinFunction& f, const Subobject& sub);

Subobject image(const FinFunction& f);

enum class LatticeOp { meet, join };

/// meet([]) = ⊤ and join([]) = ⊥, both over `ambient`.
Subobject sub_lattice(LatticeOp op, const ProductSet& ambient, std::span<const Subobject> subs);
Subobject meet(const Subobject& a, const Subobject& b);
Subobject join(const Subobject& a, const Subobject& b);

// Many-sorted algebra: the data needed to search for a natural isomorphism.
struct AlgebraOp {
  std::vector<std::size_t> args; // sort indices
  std::size_t result = 0;
  FinFunction table;             // dom = product of the argument sets
};

struct Algebra {
  std::vector<FinSet> sorts;
  std::vector<AlgebraOp> ops;
};

using SortFamily = std::vector<FinFunction>;

/// Search for bijections α_s : A(s) -> B(s) with α ∘ A(f) = B(f) ∘ α for
/// every operation f. Nullary operations seed the search; the rest is
/// backtracking with propagation. `accept` may reject complete candidates
/// (e.g. on predicate structure), in which case the search continues.
std::optional<SortFamily> find_natural_iso(
    const Algebra& a, const Algebra& b,
    const std::function<bool(const SortFamily&)>& accept = {});

/// True iff every square α_out ∘ A(f) = B(f) ∘ (α x ... x α) commutes.
bool commutes(const Algebra& a, const Algebra& b, const SortFamily& alpha);

} // namespace cohnet
