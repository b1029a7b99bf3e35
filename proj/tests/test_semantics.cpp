#include <gtest/gtest.h>

#include "cohnet/minifloat.hpp"
#include "cohnet/nn.hpp"
#include "cohnet/semantics.hpp"
#include "support/random.hpp"

using namespace cohnet;
using namespace testsupport;

namespace {

Signature one_sort(std::size_t constants) {
  Signature sig;
  sig.add_sort("A");
  for (std::size_t i = 0; i < constants; ++i)
    sig.add_constant("k" + std::to_string(i), "A");
  sig.add_op("f", {"A", "A"}, "A");
  sig.add_pred("P", {"A"});
  return sig;
}

// constants land on random elements, so distinct and cover hold only sometimes
Theory random_schema_theory(Rng& rng, const Signature& sig, std::size_t k) {
  Theory thy{sig, {}};
  std::vector<std::string> cs;
  for (std::size_t i = 0; i < k; ++i)
    cs.push_back("k" + std::to_string(i));
  for (std::size_t n = 1 + pick(rng, 5); n > 0; --n) {
    switch (pick(rng, 4)) {
    case 0: {
      auto sub = cs;
      std::shuffle(sub.begin(), sub.end(), rng);
      sub.resize(pick(rng, k + 1));
      thy.axioms.push_back(SchemaAxiom{DistinctConstants{"A", sub}});
      break;
    }
    case 1: {
      auto sub = cs;
      std::shuffle(sub.begin(), sub.end(), rng);
      sub.resize(pick(rng, k + 1));
      thy.axioms.push_back(SchemaAxiom{CoverByConstants{"A", sub}});
      break;
    }
    case 2: {
      OpGraph g{"f", {}};
      for (std::size_t r = pick(rng, 6); r > 0; --r)
        g.rows.push_back({{cs[pick(rng, k)], cs[pick(rng, k)]}, cs[pick(rng, k)]});
      thy.axioms.push_back(SchemaAxiom{g});
      break;
    }
    default:
      thy.axioms.push_back(random_sequent(rng, sig));
    }
  }
  return thy;
}

void expect_same(const ValidityReport& a, const ValidityReport& b) {
  ASSERT_EQ(a.valid(), b.valid());
  if (a.valid())
    return;
  EXPECT_EQ(a.witness->axiom, b.witness->axiom);
  EXPECT_EQ(a.witness->tuple, b.witness->tuple);
  EXPECT_EQ(a.witness->elements, b.witness->elements);
}

} // namespace

TEST(EvalTerm, VariableIsProjection) {
  Signature sig = one_sort(1);
  Rng rng(41);
  SetStructure m = random_structure(rng, sig, 4);
  EXPECT_EQ(eval_term(m, {"A"}, Term::variable(0)), FinFunction::identity(m.sort("A")));
  auto pt = eval_term(m, {}, Term::apply("k0", {}));
  EXPECT_EQ(pt.dom().size(), 1u);
  EXPECT_EQ(pt(0), m.op("k0")(0));
}

TEST(EvalTerm, BinaryOpOverItsOwnContextIsTheTable) {
  auto t = build_tables(FloatFormat::make(2, 1));
  Signature sig;
  sig.add_sort("R");
  sig.add_op("add", {"R", "R"}, "R");
  SetStructure m{sig, {t.set()}, {t.add}, {}};
  m.validate();
  auto e = eval_term(m, {"R", "R"}, Term::apply("add", {Term::variable(0), Term::variable(1)}));
  EXPECT_EQ(e.table(), t.add.table());
  // swapped arguments read the table transposed
  auto sw = eval_term(m, {"R", "R"}, Term::apply("add", {Term::variable(1), Term::variable(0)}));
  for (Element a = 0; a < 16; ++a)
    for (Element b = 0; b < 16; ++b)
      ASSERT_EQ(sw(a * 16 + b), t.apply_add(b, a));
}

TEST(EvalFormula, SmallCases) {
  Signature sig = one_sort(0);
  SetStructure m{sig, {FinSet(3)}, {FinFunction::constant(FinSet(9), FinSet(3), 0)},
                 {Subobject(ProductSet({FinSet(3)}), {1})}};
  m.validate();
  EXPECT_TRUE(eval_formula(m, {"A"}, Formula::equals(Term::variable(0), Term::variable(0))).is_full());
  auto ex = Formula::exists("A", Formula::equals(Term::variable(1), Term::variable(1)));
  EXPECT_TRUE(eval_formula(m, {"A"}, ex).is_full());
  EXPECT_TRUE(eval_formula(m, {}, Formula::falsity()).is_empty());
  EXPECT_TRUE(eval_formula(m, {}, Formula::truth()).is_full());
  auto p = eval_formula(m, {"A", "A"}, Formula::predicate("P", {Term::variable(1)}));
  EXPECT_EQ(p.members(), (std::vector<std::size_t>{1, 4, 7}));

  SetStructure empty{sig, {FinSet(0)}, {FinFunction(FinSet(0), FinSet(0), {})},
                     {Subobject(ProductSet({FinSet(0)}), {})}};
  EXPECT_TRUE(eval_formula(empty, {}, Formula::exists("A", Formula::truth())).is_empty());
  EXPECT_EQ(eval_formula(empty, {"A"}, Formula::truth()).ambient().size(), 0u);
}

TEST(EvalFormula, AgreesWithNaiveEvaluator) {
  Rng rng(42);
  for (int trial = 0; trial < 3000; ++trial) {
    Signature sig = random_signature(rng, 4);
    SetStructure m = random_structure(rng, sig, 4);
    Context ctx = random_context(rng, sig, 3);
    Formula f = random_formula(rng, sig, ctx, 1 + static_cast<int>(pick(rng, 5)));
    ASSERT_EQ(eval_formula(m, ctx, f).members(), naive_extension(m, ctx, f)) << print_formula(sig, f, detail::variable_names(sig, ctx.size()));
  }
}

TEST(EvalFormula, OrIsExactlyJoin) {
  Rng rng(43);
  for (int trial = 0; trial < 300; ++trial) {
    Signature sig = random_signature(rng);
    SetStructure m = random_structure(rng, sig);
    Context ctx = random_context(rng, sig);
    Formula a = random_formula(rng, sig, ctx, 2), b = random_formula(rng, sig, ctx, 2);
    EXPECT_EQ(eval_formula(m, ctx, Formula::any_of({a, b})),
              join(eval_formula(m, ctx, a), eval_formula(m, ctx, b)));
    EXPECT_EQ(eval_formula(m, ctx, Formula::all_of({a, b})),
              meet(eval_formula(m, ctx, a), eval_formula(m, ctx, b)));
  }
}

TEST(CheckSequent, TrivialCases) {
  Signature sig = one_sort(0);
  Rng rng(44);
  SetStructure m = random_structure(rng, sig);
  EXPECT_TRUE(check_sequent(m, Sequent{{"A"}, {}, {Formula::truth()}}));
  auto r = check_sequent(m, Sequent{{"A"}, {}, {Formula::falsity()}});
  ASSERT_FALSE(r);
  EXPECT_EQ(r.witness->tuple, 0u);
  EXPECT_EQ(r.witness->elements, std::vector<Element>{0});
  auto closed = check_sequent(m, Sequent{{}, {}, {}});
  ASSERT_FALSE(closed);
  EXPECT_TRUE(closed.witness->elements.empty());
}

TEST(CheckSequent, WitnessIsLeastFailingTuple) {
  Rng rng(45);
  int invalid = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Signature sig = random_signature(rng);
    SetStructure m = random_structure(rng, sig);
    Sequent s = random_sequent(rng, sig);
    auto all = assignments(m, s.context);
    std::optional<std::size_t> first;
    for (std::size_t i = 0; i < all.size() && !first; ++i) {
      bool lhs = true, rhs = false;
      for (const auto& f : s.lhs)
        lhs = lhs && naive_holds(m, all[i], f);
      for (const auto& f : s.rhs)
        rhs = rhs || naive_holds(m, all[i], f);
      if (lhs && !rhs)
        first = i;
    }
    auto r = check_sequent(m, s);
    ASSERT_EQ(r.valid(), !first);
    if (first) {
      ++invalid;
      EXPECT_EQ(r.witness->tuple, *first);
      EXPECT_EQ(r.witness->elements, all[*first]);
    }
  }
  EXPECT_GT(invalid, 100);
}

TEST(CheckSequent, Monotone) {
  Rng rng(46);
  for (int trial = 0; trial < 600; ++trial) {
    Signature sig = random_signature(rng);
    SetStructure m = random_structure(rng, sig);
    Sequent s = random_sequent(rng, sig);
    if (!check_sequent(m, s))
      continue;
    Sequent more_rhs = s, more_lhs = s;
    more_rhs.rhs.push_back(random_formula(rng, sig, s.context, 2));
    more_lhs.lhs.push_back(random_formula(rng, sig, s.context, 2));
    EXPECT_TRUE(check_sequent(m, more_rhs));
    EXPECT_TRUE(check_sequent(m, more_lhs));
  }
}

TEST(CheckModel, EmptyTheoryAndSignatureMismatch) {
  Rng rng(47);
  Signature sig = one_sort(2);
  SetStructure m = random_structure(rng, sig);
  EXPECT_TRUE(check_model(m, Theory{sig, {}}));
  EXPECT_THROW(check_model(m, Theory{one_sort(3), {}}), Error);
}

TEST(CheckModel, FastPathsMatchExpansion) {
  Rng rng(48);
  int invalid = 0;
  for (int trial = 0; trial < 1500; ++trial) {
    const std::size_t k = 1 + pick(rng, 5);
    Signature sig = one_sort(k);
    SetStructure m = random_structure(rng, sig, 5);
    Theory thy = random_schema_theory(rng, sig, k);
    for (std::size_t i = 0; i < thy.axioms.size(); ++i) {
      SCOPED_TRACE(print_axiom(sig, thy.axioms[i]));
      Theory one{sig, {thy.axioms[i]}};
      auto fast = check_axiom(m, thy.axioms[i], 0);
      auto slow = check_model_expanded(m, one);
      expect_same(fast, slow);
      invalid += !fast.valid();
    }
    expect_same(check_model(m, thy), check_model_expanded(m, thy));
  }
  EXPECT_GT(invalid, 500);
}

TEST(CheckModel, ParallelMatchesSequential) {
  Rng rng(49);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 1 + pick(rng, 5);
    Signature sig = one_sort(k);
    SetStructure m = random_structure(rng, sig, 5);
    Theory thy = random_schema_theory(rng, sig, k);
    for (int r = 0; r < 3; ++r)
      thy.axioms.push_back(random_sequent(rng, sig));
    auto seq = check_model(m, thy, 1);
    expect_same(seq, check_model(m, thy, 4));
    expect_same(seq, check_model(m, thy, 64));
  }
}

TEST(CheckModel, VerdictIgnoresAxiomOrder) {
  Rng rng(50);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 1 + pick(rng, 4);
    Signature sig = one_sort(k);
    SetStructure m = random_structure(rng, sig, 4);
    Theory thy = random_schema_theory(rng, sig, k);
    Theory shuffled = thy;
    std::shuffle(shuffled.axioms.begin(), shuffled.axioms.end(), rng);
    EXPECT_EQ(check_model(m, thy).valid(), check_model(m, shuffled).valid());
  }
}

TEST(CheckModel, FloatTheoryAndCorruption) {
  auto t = build_tables(FloatFormat::make(1, 1));
  FloatTheory ft = float_theory(t, "id");
  ASSERT_TRUE(check_model(ft.model, ft.theory));
  SetStructure bad = ft.model;
  const std::size_t s = *bad.signature.op_index("s");
  auto tab = bad.ops[s].table();
  tab[5] = (tab[5] + 1) % t.set().size();
  bad.ops[s] = FinFunction(bad.ops[s].dom(), bad.ops[s].cod(), tab);
  auto r = check_model(bad, ft.theory);
  ASSERT_FALSE(r);
  const auto& ax = ft.theory.axioms.at(r.witness->axiom.axiom);
  const auto* sa = std::get_if<SchemaAxiom>(&ax);
  ASSERT_TRUE(sa);
  const auto* g = std::get_if<OpGraph>(sa);
  ASSERT_TRUE(g);
  EXPECT_EQ(g->op, "s");
  EXPECT_EQ(r.witness->axiom.part, 5u);
  EXPECT_NE(describe(ft.theory, *r.witness).find("fails"), std::string::npos);
}

TEST(Morphism, IdentityAndFullTargets) {
  Rng rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    Signature sig = random_signature(rng);
    SetStructure m = random_structure(rng, sig);
    SortFamily id;
    for (const auto& s : m.sorts)
      id.push_back(FinFunction::identity(s));
    EXPECT_FALSE(check_model_morphism(m, m, id));
  }
  // no operations: any map into a full predicate is a morphism
  Signature sig;
  sig.add_sort("A");
  sig.add_pred("P", {"A", "A"});
  SetStructure a{sig, {FinSet(3)}, {}, {Subobject(ProductSet({FinSet(3), FinSet(3)}), {0, 4, 5})}};
  SetStructure b{sig, {FinSet(2)}, {}, {Subobject::full(ProductSet({FinSet(2), FinSet(2)}))}};
  for (int trial = 0; trial < 20; ++trial)
    EXPECT_FALSE(check_model_morphism(a, b, {random_function(rng, FinSet(3), FinSet(2))}));
  SetStructure c = b;
  c.preds[0] = Subobject(c.preds[0].ambient(), {0, 1, 2});
  auto f = check_model_morphism(a, c, {FinFunction::constant(FinSet(3), FinSet(2), 1)});
  ASSERT_TRUE(f);
  EXPECT_EQ(f->kind, SymbolKind::pred);
  EXPECT_EQ(f->symbol, "P");
}

TEST(Morphism, BrokenSquareNamesOperation) {
  Signature sig = one_sort(0);
  sig.add_op("g", {"A"}, "A");
  FinSet a(2);
  ProductSet a2({a, a});
  SetStructure m{sig, {a},
                 {FinFunction::constant(a2.as_set(), a, 0), FinFunction(a, a, {1, 0})},
                 {Subobject::full(ProductSet({a}))}};
  // constant maps commute with f but not with the swap
  auto fail = check_model_morphism(m, m, {FinFunction::constant(a, a, 0)});
  ASSERT_TRUE(fail);
  EXPECT_EQ(fail->kind, SymbolKind::op);
  EXPECT_EQ(fail->symbol, "g");
  EXPECT_EQ(fail->tuple, 0u);
}

TEST(StructureIso, TransportIsRecovered) {
  Rng rng(52);
  for (int trial = 0; trial < 200; ++trial) {
    Signature sig = random_signature(rng);
    SetStructure m = random_structure(rng, sig);
    SortFamily alpha;
    for (const auto& s : m.sorts)
      alpha.push_back(random_bijection(rng, s));
    SetStructure n = transport(m, alpha);
    EXPECT_FALSE(check_model_morphism(m, n, alpha));
    auto found = find_structure_iso(m, n);
    ASSERT_TRUE(found);
    EXPECT_FALSE(check_model_morphism(m, n, *found));
    // validity is invariant under relabeling
    Sequent s = random_sequent(rng, sig);
    EXPECT_EQ(check_sequent(m, s).valid(), check_sequent(n, s).valid());
  }
}

TEST(StructureIso, PredicatesBlockIsos) {
  Signature sig;
  sig.add_sort("A");
  sig.add_pred("P", {"A"});
  ProductSet a({FinSet(3)});
  SetStructure m{sig, {FinSet(3)}, {}, {Subobject(a, {0})}};
  SetStructure n{sig, {FinSet(3)}, {}, {Subobject(a, {0, 1})}};
  EXPECT_FALSE(find_structure_iso(m, n));
  SetStructure o{sig, {FinSet(3)}, {}, {Subobject(a, {2})}};
  auto iso = find_structure_iso(m, o);
  ASSERT_TRUE(iso);
  EXPECT_EQ((*iso)[0](0), 2u);
}

TEST(StructureText, RoundTrip) {
  Rng rng(53);
  for (int trial = 0; trial < 300; ++trial) {
    Signature sig = random_signature(rng);
    SetStructure m = random_structure(rng, sig);
    std::string text = print_structure(m);
    ASSERT_EQ(parse_structure(text, sig), m) << text;
  }
  Signature sig = one_sort(0);
  EXPECT_THROW(parse_structure("sort A = 2; op f = [0 1 2 0]; pred P = {};", sig), Error);
  EXPECT_THROW(parse_structure("sort A = 2; op f = [0 1 1 0];", sig), Error);
}
