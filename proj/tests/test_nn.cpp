#include <gtest/gtest.h>

#include "cohnet/nn.hpp"
#include "support/random.hpp"

using namespace cohnet;
using namespace testsupport;

namespace {

ParamAssignment random_params(Rng& rng, const Architecture& arch, std::size_t r) {
  ParamAssignment ps;
  for (std::size_t k = 0; k < arch.layers(); ++k) {
    LayerParams lp;
    lp.w.assign(arch.widths[k + 1], std::vector<Element>(arch.widths[k]));
    lp.b.assign(arch.widths[k + 1], 0);
    for (auto& row : lp.w)
      for (auto& x : row)
        x = pick(rng, r);
    for (auto& x : lp.b)
      x = pick(rng, r);
    ps.push_back(lp);
  }
  return ps;
}

bool is_span_leg(const std::string& name) { return name.rfind("f.", 0) == 0 || name.rfind("t.", 0) == 0; }

/// An RSpan structure over `rows` points, float part from the defining model.
SetStructure rspan_structure(const Theory& rspan, const SetStructure& floats, std::size_t rows, Rng& rng) {
  const Signature& sig = rspan.signature;
  SetStructure m{sig, {}, {}, {}};
  for (const auto& s : sig.sorts())
    m.sorts.push_back(s == "N" ? FinSet(rows) : floats.sort(s));
  for (const auto& op : sig.ops())
    m.ops.push_back(is_span_leg(op.name) ? random_function(rng, FinSet(rows), floats.sort("V"))
                                         : floats.op(op.name));
  return m;
}

Theory span_schema_theory(std::size_t n, std::size_t m) {
  CategoryPresentation span;
  span.add_object("N");
  span.add_object("V");
  for (std::size_t i = 0; i < n; ++i)
    span.add_generator("f." + std::to_string(i), "N", "V");
  for (std::size_t j = 0; j < m; ++j)
    span.add_generator("t." + std::to_string(j), "N", "V");
  return schema_to_theory(span);
}

std::size_t count_constants(const Signature& sig, char prefix) {
  std::size_t n = 0;
  for (const auto& op : sig.ops())
    n += op.is_constant() && op.name.size() > 2 && op.name[0] == prefix && op.name[1] == '.';
  return n;
}

} // namespace

TEST(Architecture, ParsePrintCompose) {
  auto a = parse_architecture("2-relu-2-id-1");
  EXPECT_EQ(a.activations, (std::vector<std::string>{"relu", "id"}));
  EXPECT_EQ(a.widths, (std::vector<std::size_t>{2, 2, 1}));
  EXPECT_EQ(print_architecture(a), "2-relu-2-id-1");
  auto c = compose(parse_architecture("2-relu-3"), parse_architecture("3-id-1"));
  EXPECT_EQ(c, (Architecture{{"relu", "id"}, {2, 3, 1}}));
  EXPECT_THROW(compose(parse_architecture("2-relu-3"), parse_architecture("2-id-1")), Error);
  EXPECT_THROW(parse_architecture("2-relu"), Error);
  EXPECT_THROW(parse_architecture("0-relu-1"), Error);
  EXPECT_THROW(parse_architecture("2-relu-x"), Error);
  EXPECT_THROW(parse_architecture("2"), Error);
}

TEST(FloatTheory, DefiningModelAndCorruptions) {
  auto t = build_tables(FloatFormat::make(1, 1));
  for (const char* sigma : {"id", "relu"}) {
    FloatTheory ft = float_theory(t, sigma);
    EXPECT_TRUE(check_model(ft.model, ft.theory));
    EXPECT_EQ(ft.model.sort("V").size(), 8u);
    const std::string a = activation_op(sigma);
    SetStructure bad = ft.model;
    const std::size_t k = *bad.signature.op_index(a);
    auto tab = bad.ops[k].table();
    tab[3] = (tab[3] + 1) % 8;
    bad.ops[k] = FinFunction(bad.ops[k].dom(), bad.ops[k].cod(), tab);
    EXPECT_FALSE(check_model(bad, ft.theory));
    // a projection that disagrees with pair breaks the pairing graphs
    SetStructure bad2 = ft.model;
    const std::size_t p = *bad2.signature.op_index("p1");
    auto pt = bad2.ops[p].table();
    std::swap(pt[0], pt[63]);
    bad2.ops[p] = FinFunction(bad2.ops[p].dom(), bad2.ops[p].cod(), pt);
    EXPECT_FALSE(check_model(bad2, ft.theory));
  }
  EXPECT_EQ(activation_op("table:/tmp/my-act.txt"), "a.table__tmp_my_act_txt");
}

TEST(FloatTheory, ModelsHaveExactlyRElements) {
  auto t = build_tables(FloatFormat::make(1, 1));
  FloatTheory ft = float_theory(t, "id");
  // resize V with every other symbol kept as close as possible: always rejected
  for (std::size_t size : {7u, 9u}) {
    SetStructure m = ft.model;
    const std::size_t v = *m.signature.sort_index("V");
    m.sorts[v] = FinSet(size);
    for (std::size_t k = 0; k < m.ops.size(); ++k) {
      const auto& decl = m.signature.ops()[k];
      FinSet dom = m.arg_set(decl.args).as_set();
      const FinSet& cod = m.sort(decl.result);
      std::vector<Element> tab(dom.size());
      for (std::size_t i = 0; i < dom.size(); ++i)
        tab[i] = std::min<Element>(i < ft.model.ops[k].dom().size() ? ft.model.ops[k](i) : 0, cod.size() - 1);
      m.ops[k] = FinFunction(dom, cod, tab);
    }
    EXPECT_FALSE(check_model(m, ft.theory));
  }
}

TEST(LayerTheory, FreeParameters) {
  auto t = build_tables(FloatFormat::make(2, 1));
  auto g = layer_theory("relu", 2, 2, t);
  EXPECT_EQ(count_constants(g.theory.signature, 'w') + count_constants(g.theory.signature, 'b'), 6u);
  EXPECT_TRUE(g.theory.signature.op_index("w.1.1.0"));
  EXPECT_TRUE(g.theory.signature.op_index("b.1.1"));
  // no choice of parameters is rejected
  Rng rng(81);
  for (int trial = 0; trial < 20; ++trial)
    EXPECT_TRUE(check_model(build_model(g, t, random_params(rng, g.arch, 16)), g.theory));
}

TEST(LayerTheory, SingleInputTerm) {
  auto t = build_tables(FloatFormat::make(2, 1));
  auto g = layer_theory("relu", 1, 1, t);
  auto pair = [](Term a, Term b) { return Term::apply("pair", {std::move(a), std::move(b)}); };
  Term w = Term::apply("w.1.0.0", {}), b = Term::apply("b.1.0", {});
  Term want = Term::apply(
      "a.relu", {Term::apply("s", {pair(Term::apply("t", {pair(w, Term::variable(0))}), b)})});
  EXPECT_EQ(g.iota.op_map.at("t.0"), std::vector<Term>{want});
  EXPECT_EQ(g.iota.op_map.at("f.0"), std::vector<Term>{Term::variable(0)});
  EXPECT_EQ(g.iota.sort_image("N"), Context{"V"});
}

TEST(RSpan, EmptyAndSinglePointDatasets) {
  auto t = build_tables(FloatFormat::make(1, 1));
  Theory rspan = rspan_theory(2, 1, t);
  SetStructure floats = float_theory(t, "id").model;
  Rng rng(82);
  EXPECT_TRUE(check_model(rspan_structure(rspan, floats, 0, rng), rspan));
  for (int trial = 0; trial < 10; ++trial)
    EXPECT_TRUE(check_model(rspan_structure(rspan, floats, 1, rng), rspan));
  EXPECT_TRUE(check_model(rspan_structure(rspan, floats, 5, rng), rspan));
}

TEST(RSpan, PushoutLegsAreSound) {
  auto t = build_tables(FloatFormat::make(1, 1));
  auto span = span_schema_theory(2, 1);
  auto ft = float_theory(t, "id");
  auto po = pushout(span, ft.theory, {{"V", "V"}}, {"", ""});
  ASSERT_EQ(po.apex, rspan_theory(2, 1, t));
  Rng rng(83);
  for (std::size_t rows : {0u, 1u, 4u}) {
    SetStructure m = rspan_structure(po.apex, ft.model, rows, rng);
    ASSERT_TRUE(check_model(m, po.apex));
    EXPECT_TRUE(check_model(precompose(po.left_leg, m), span));
    SetStructure back = precompose(po.right_leg, m);
    EXPECT_TRUE(check_model(back, ft.theory));
    EXPECT_EQ(back, ft.model);
  }
}

TEST(LayerTheory, PushoutLegsAreSound) {
  auto t = build_tables(FloatFormat::make(1, 1));
  auto ft = float_theory(t, "relu");
  Theory params;
  params.signature.add_sort("V");
  for (const char* c : {"w.1.0.0", "w.1.0.1", "b.1.0"})
    params.signature.add_constant(c, "V");
  auto po = pushout(ft.theory, params, {{"V", "V"}}, {"", ""});
  auto g = layer_theory("relu", 2, 1, t);
  ASSERT_EQ(po.apex, g.theory);
  Rng rng(84);
  for (int trial = 0; trial < 10; ++trial) {
    SetStructure m = build_model(g, t, random_params(rng, g.arch, 8));
    EXPECT_TRUE(check_model(precompose(po.left_leg, m), ft.theory));
    EXPECT_TRUE(check_model(precompose(po.right_leg, m), params));
  }
}

TEST(Infer, MatchesOracleAndIsAnRSpanModel) {
  auto t = build_tables(FloatFormat::make(2, 1));
  auto arch = parse_architecture("2-relu-2-id-1");
  auto g = network_theory(arch, t);
  Rng rng(85);
  for (int trial = 0; trial < 5; ++trial) {
    auto params = random_params(rng, arch, 16);
    SetStructure m = build_model(g, t, params);
    ASSERT_TRUE(check_model(m, g.theory));
    SpanDataset got = infer(g, m, t);
    SpanDataset want = oracle_dataset(arch, t, params);
    EXPECT_EQ(got.rows(), 256u);
    EXPECT_FALSE(first_difference(got, want));
    EXPECT_EQ(got, want);
    for (std::size_t r = 0; r < got.rows(); ++r)
      ASSERT_EQ(got.input(r), (std::vector<Element>{Element(r / 16), Element(r % 16)}));
    SetStructure span = precompose(g.iota, m);
    EXPECT_TRUE(check_model(span, g.rspan));
  }
}

TEST(Infer, RejectsInvalidModels) {
  auto t = build_tables(FloatFormat::make(1, 1));
  auto g = layer_theory("id", 1, 1, t);
  SetStructure m = build_model(g, t, {LayerParams{{{1}}, {0}}});
  const std::size_t s = *m.signature.op_index("s");
  auto tab = m.ops[s].table();
  tab[9] = (tab[9] + 1) % 8;
  m.ops[s] = FinFunction(m.ops[s].dom(), m.ops[s].cod(), tab);
  try {
    infer(g, m, t);
    FAIL();
  } catch (const PrecomposeError& e) {
    EXPECT_EQ(e.kind(), PrecomposeError::Kind::target_invalid);
  }
  EXPECT_THROW(build_model(g, t, {LayerParams{{{1, 1}}, {0}}}), Error);
  EXPECT_THROW(build_model(g, t, {LayerParams{{{8}}, {0}}}), Error);
}

TEST(Infer, IdentityLayer) {
  auto t = build_tables(FloatFormat::make(2, 1));
  auto g = layer_theory("id", 1, 1, t);
  const Element one = *t.pattern_of(1.0);
  auto d = infer(g, build_model(g, t, {LayerParams{{{one}}, {t.negative_zero()}}}), t);
  for (std::size_t r = 0; r < d.rows(); ++r) {
    const Element x = d.input(r)[0];
    EXPECT_EQ(d.output(r)[0], decode(t.format, x).kind == Decoded::Kind::nan ? *t.nan : x);
  }
}

TEST(Compose, IdentityLayerLeavesInferenceUnchanged) {
  auto t = build_tables(FloatFormat::make(2, 1));
  auto arch = parse_architecture("2-relu-2-id-1");
  auto full = network_theory(compose(arch, parse_architecture("1-id-1")), t);
  auto g = network_theory(arch, t);
  Rng rng(86);
  const Element one = *t.pattern_of(1.0);
  for (int trial = 0; trial < 5; ++trial) {
    auto params = random_params(rng, arch, 16);
    auto longer = params;
    longer.push_back(LayerParams{{{one}}, {t.negative_zero()}});
    EXPECT_EQ(infer(full, build_model(full, t, longer), t), infer(g, build_model(g, t, params), t));
  }
}

TEST(Compose, TheoriesAgreeWithSpanPullback) {
  auto t = build_tables(FloatFormat::make(2, 1));
  auto a = parse_architecture("2-relu-3"), b = parse_architecture("3-id-1");
  auto ga = network_theory(a, t);
  auto gb = network_theory(b, t, 2);
  auto gab = compose_theories(ga, gb, t);
  EXPECT_EQ(gab.theory, network_theory(compose(a, b), t).theory);
  EXPECT_THROW(compose_theories(ga, network_theory(b, t, 1), t), Error);
  Rng rng(87);
  for (int trial = 0; trial < 3; ++trial) {
    auto pa = random_params(rng, a, 16), pb = random_params(rng, b, 16);
    ParamAssignment pab = pa;
    pab.insert(pab.end(), pb.begin(), pb.end());
    auto da = infer(ga, build_model(ga, t, pa), t);
    // the second network on every 3-vector, then pulled back along the first
    auto db = oracle_dataset(b, t, pb);
    auto composite = compose_spans(da, db);
    auto direct = infer(gab, build_model(gab, t, pab), t);
    EXPECT_EQ(composite, direct);
  }
}

TEST(Constraints, TieViolationNamesAxiom) {
  auto t = build_tables(FloatFormat::make(2, 1));
  auto g = layer_theory("relu", 2, 2, t);
  auto cs = parse_constraints("# diagonal\ntie w[1][0,0] w[1][1,1]\n");
  auto h = apply_constraints(g, cs);
  ASSERT_EQ(h.theory.axioms.size(), g.theory.axioms.size() + 1);
  ParamAssignment p{LayerParams{{{2, 0}, {0, 3}}, {0, 0}}};
  EXPECT_FALSE(satisfies(p, cs));
  auto r = check_model(build_model(h, t, p), h.theory);
  ASSERT_FALSE(r);
  EXPECT_EQ(r.witness->axiom.axiom, g.theory.axioms.size());
  p[0].w[1][1] = 2;
  EXPECT_TRUE(satisfies(p, cs));
  EXPECT_TRUE(check_model(build_model(h, t, p), h.theory));
  EXPECT_EQ(infer(h, build_model(h, t, p), t), infer(g, build_model(g, t, p), t));
}

TEST(Constraints, AcceptanceIsExactlySatisfaction) {
  auto t = build_tables(FloatFormat::make(1, 1));
  auto g = layer_theory("id", 2, 2, t);
  auto cs = parse_constraints("tie w[1][0,1] w[1][1,0]\ntie b[1][0] b[1][1]\nfix w[1][0,0] 0x2\n");
  check_constraints(g.arch, t, cs);
  auto h = apply_constraints(g, cs);
  Rng rng(88);
  int accepted = 0;
  for (int trial = 0; trial < 400; ++trial) {
    auto p = random_params(rng, g.arch, 8);
    if (coin(rng)) {
      p[0].w[1][0] = p[0].w[0][1];
      p[0].b[1] = p[0].b[0];
      p[0].w[0][0] = 2;
    }
    const bool ok = check_model(build_model(h, t, p), h.theory).valid();
    ASSERT_EQ(ok, satisfies(p, cs));
    accepted += ok;
  }
  EXPECT_GT(accepted, 100);
}

TEST(Constraints, FixingEverythingLeavesOneModel) {
  auto t = build_tables(FloatFormat::make(1, 1));
  auto g = layer_theory("relu", 1, 1, t);
  auto h = apply_constraints(g, parse_constraints("fix w[1][0,0] 0x3\nfix b[1][0] 0x5\n"));
  int models = 0;
  for (Element w = 0; w < 8; ++w)
    for (Element b = 0; b < 8; ++b)
      models += check_model(build_model(h, t, {LayerParams{{{w}}, {b}}}), h.theory).valid();
  EXPECT_EQ(models, 1);
}

TEST(Constraints, RejectsOutOfRange) {
  auto t = build_tables(FloatFormat::make(1, 1));
  auto arch = parse_architecture("2-relu-2");
  EXPECT_THROW(check_constraints(arch, t, parse_constraints("tie w[1][0,2] w[1][0,0]")), Error);
  EXPECT_THROW(check_constraints(arch, t, parse_constraints("tie w[2][0,0] w[1][0,0]")), Error);
  EXPECT_THROW(check_constraints(arch, t, parse_constraints("fix b[1][0] 0x8")), Error);
  EXPECT_THROW(parse_constraints("tie w[1][0] w[1][0,0]"), ParseError);
  EXPECT_THROW(parse_constraints("bind w[1][0,0] 0x1"), ParseError);
}

TEST(Text, ParamsConstraintsDatasetsRoundTrip) {
  auto t = build_tables(FloatFormat::make(2, 1));
  Rng rng(89);
  auto arch = parse_architecture("3-relu-2-id-2");
  for (int trial = 0; trial < 20; ++trial) {
    auto p = random_params(rng, arch, 16);
    EXPECT_EQ(parse_params(print_params(p)), p);
    EXPECT_NO_THROW(check_shape(arch, p, t));
  }
  EXPECT_EQ(parse_params(R"({"layers":[{"w":[[3, "0x1"]],"b":[0]}]})"),
            (ParamAssignment{LayerParams{{{3, 1}}, {0}}}));
  EXPECT_THROW(parse_params(R"({"layers":[{"w":[["zz"]],"b":[0]}]})"), Error);
  EXPECT_THROW(check_shape(arch, random_params(rng, parse_architecture("3-relu-2"), 16), t), Error);

  auto cs = parse_constraints("tie w[1][0,0] w[2][1,1]\nfix b[2][1] 0x6\ntie b[1][0] b[1][1]\n");
  EXPECT_EQ(cs.size(), 3u);
  EXPECT_EQ(parse_constraints(print_constraints(cs)), cs);

  auto d = oracle_dataset(arch, t, random_params(rng, arch, 16));
  EXPECT_EQ(d.rows(), 4096u);
  EXPECT_EQ(parse_dataset(print_dataset(d)), d);
  EXPECT_EQ(print_dataset(parse_dataset(print_dataset(d))), print_dataset(d));
  auto d2 = d;
  auto tab = d2.t.table();
  tab[100] = (tab[100] + 1) % d2.t.cod().size();
  d2.t = FinFunction(d2.t.dom(), d2.t.cod(), tab);
  EXPECT_EQ(first_difference(d, d2), std::optional<std::size_t>{100});
  EXPECT_THROW(parse_dataset("dataset s1e2m1 1 1\n0x0 0x1 -> 0x0\n"), Error);
}

TEST(Infer, InputDomainGuard) {
  auto t = build_tables(FloatFormat::make(3, 2));
  auto arch = parse_architecture("4-id-1");
  auto g = network_theory(arch, t);
  Rng rng(90);
  auto p = random_params(rng, arch, 64);
  EXPECT_THROW(oracle_dataset(arch, t, p), Error);
  EXPECT_THROW(infer(g, build_model(g, t, p), t), Error);
}
