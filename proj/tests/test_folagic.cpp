#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ell/folagic.hpp"
#include "ell/util.hpp"

using namespace ell;

namespace {

Signature one_binary() {
  Signature sig;
  sig.symbols = {{"E", 2}};
  return sig;
}

}  // namespace

TEST_CASE("parser basics and errors") {
  auto sig = one_binary();
  SUBCASE("atoms, connectives, quantifiers") {
    auto f = parse_formula("exists x. forall y. (E(x,y) | !E(y,x) & x=y)", sig);
    CHECK(f->kind == Formula::Kind::Exists);
    auto pc = prefix_class(f);
    CHECK(pc.label() == "Sigma2");
  }
  SUBCASE("phi_root-shaped text parses with a free variable") {
    Signature s2 = signature_for(2);
    auto f = parse_formula("forall y. !F[0,0,0,0](y,x)", s2);
    auto fv = free_vars(f);
    REQUIRE(fv.size() == 1);
    CHECK(fv[0] == "x");
  }
  SUBCASE("syntax errors carry positions") {
    CHECK_THROWS_AS(parse_formula("E(x", sig), ParseError);
    CHECK_THROWS_AS(parse_formula("exists x", sig), ParseError);
    CHECK_THROWS_AS(parse_formula("E(x,y) extra", sig), ParseError);
  }
  SUBCASE("unknown symbol and arity mismatch") {
    CHECK_THROWS_AS(parse_formula("Q(x,y)", sig), ParseError);
    CHECK_THROWS_AS(parse_formula("E(x)", sig), ParseError);
  }
  SUBCASE("counting quantifiers desugar to plain FO") {
    auto f = parse_formula("exists>=2 x. E(x,x)", sig);
    CHECK(prefix_class(f).label() == "Sigma1");
    auto g = parse_formula("exists=1 x. E(x,x)", sig);
    CHECK(g->kind == Formula::Kind::Exists);
  }
}

TEST_CASE("print/parse round trip preserves structure and class") {
  auto sig = one_binary();
  std::vector<std::string> samples = {
      "exists x. forall y. E(x,y)",
      "forall x. forall y. (E(x,y) -> E(y,x))",
      "exists x. (E(x,x) & forall y. E(x,y))",
      "!(x=y) | E(y,y)",
      "true",
      "exists>=3 x. !E(x,x)",
  };
  for (const auto& text : samples) {
    auto f = parse_formula(text, sig);
    auto printed = print_formula(f, sig);
    auto g = parse_formula(printed, sig);
    CHECK(print_formula(g, sig) == printed);
    CHECK(prefix_class(g) == prefix_class(f));
  }
}

TEST_CASE("prefix classification") {
  auto sig = one_binary();
  CHECK(prefix_class(parse_formula("exists x. forall y. E(x,y)", sig)).label() ==
        "Sigma2");
  CHECK(prefix_class(parse_formula("forall x. forall y. E(x,y)", sig)).label() ==
        "Pi1");
  CHECK(prefix_class(parse_formula("E(x,y)", sig)).label() == "Sigma0/Pi0");
  CHECK(prefix_class(parse_formula("exists x. (E(x,x) & forall y. E(x,y))", sig))
            .label() == "non-prenex");
  CHECK(prefix_class(parse_formula("forall x. exists y. forall z. E(x,y)", sig))
            .label() == "Pi3");
}

TEST_CASE("eval: Tarskian truth on small structures") {
  auto sig = one_binary();
  Structure a(sig, 1);
  a.add_tuple(0, {0, 0});
  a.finalize();
  CHECK(eval_formula(a, parse_formula("exists x. E(x,x)", sig)));
  CHECK(!eval_formula(a, parse_formula("exists x. !E(x,x)", sig)));

  Structure b(sig, 3);  // directed path 0->1->2
  b.add_tuple(0, {0, 1});
  b.add_tuple(0, {1, 2});
  b.finalize();
  CHECK(eval_formula(b, parse_formula("exists x. exists y. exists z. (E(x,y) & E(y,z))", sig)));
  CHECK(!eval_formula(b, parse_formula("forall x. exists y. E(x,y)", sig)));
  CHECK(eval_formula(b, parse_formula("E(x,y)", sig), {{"x", 0}, {"y", 1}}));
  CHECK(!eval_formula(b, parse_formula("E(x,y)", sig), {{"x", 1}, {"y", 0}}));
  CHECK_THROWS(eval_formula(b, parse_formula("E(x,y)", sig), {{"x", 0}}));
}

TEST_CASE("eval budget is enforced") {
  auto sig = one_binary();
  Structure a(sig, 6);
  a.finalize();
  EvalOptions opt;
  opt.budget = 10;
  CHECK_THROWS_AS(eval_formula(a, parse_formula(
                                      "forall x. forall y. forall z. (E(x,y) | !E(y,z) | x=z)",
                                      sig),
                               {}, opt),
                  EvalBudgetExceeded);
}

TEST_CASE("eval is isomorphism invariant on random small structures") {
  auto sig = one_binary();
  Rng rng(3);
  auto f = parse_formula(
      "exists x. forall y. (E(x,y) | !E(y,y) | exists z. (E(y,z) & !(z=x)))", sig);
  for (int trial = 0; trial < 30; ++trial) {
    int32_t n = 2 + int32_t(rng.below(4));
    Structure a(sig, n);
    for (int32_t u = 0; u < n; ++u)
      for (int32_t v = 0; v < n; ++v)
        if (rng.below(3) == 0) a.add_tuple(0, {u, v});
    a.finalize();
    // random permutation copy
    std::vector<int32_t> perm(n);
    for (int32_t i = 0; i < n; ++i) perm[i] = i;
    rng.shuffle(perm);
    Structure b(sig, n);
    const auto& flat = a.flat(0);
    for (int64_t off = 0; off < int64_t(flat.size()); off += 2)
      b.add_tuple(0, {perm[flat[off]], perm[flat[off + 1]]});
    b.finalize();
    CHECK(eval_formula(a, f) == eval_formula(b, f));
  }
}

TEST_CASE("iota characterizes induced substructure embeddings") {
  auto sig = one_binary();
  SUBCASE("one element, no tuples") {
    Structure a(sig, 1);
    a.finalize();
    auto f = iota_formula(a, {"z1"});
    CHECK(print_formula(f, sig) == "!E(z1,z1)");
  }
  SUBCASE("two elements with one directed edge") {
    Structure a(sig, 2);
    a.add_tuple(0, {0, 1});
    a.finalize();
    auto f = iota_formula(a, {"z1", "z2"});
    CHECK(print_formula(f, sig) ==
          "E(z1,z2) & !E(z1,z1) & !E(z2,z1) & !E(z2,z2) & !(z1=z2)");
  }
  SUBCASE("satisfaction iff order-preserving induced isomorphism, exhaustively") {
    // all structures with <= 3 elements over one binary symbol
    for (int32_t na = 1; na <= 2; ++na) {
      int64_t max_a = int64_t(1) << (na * na);
      for (int64_t bits_a = 0; bits_a < max_a; ++bits_a) {
        Structure a(sig, na);
        for (int32_t u = 0; u < na; ++u)
          for (int32_t v = 0; v < na; ++v)
            if ((bits_a >> (u * na + v)) & 1) a.add_tuple(0, {u, v});
        a.finalize();
        std::vector<std::string> vars;
        for (int32_t i = 0; i < na; ++i) vars.push_back("z" + std::to_string(i));
        auto f = iota_formula(a, vars);
        for (int32_t nb = 1; nb <= 3; ++nb) {
          int64_t max_b = int64_t(1) << (nb * nb);
          for (int64_t bits_b = 0; bits_b < max_b; bits_b += 3) {  // sample
            Structure b(sig, nb);
            for (int32_t u = 0; u < nb; ++u)
              for (int32_t v = 0; v < nb; ++v)
                if ((bits_b >> (u * nb + v)) & 1) b.add_tuple(0, {u, v});
            b.finalize();
            // all assignments of vars into b
            std::vector<int32_t> asg(na, 0);
            for (;;) {
              Assignment am;
              for (int32_t i = 0; i < na; ++i) am.push_back({vars[i], asg[i]});
              // oracle: injective and induced-tuple-exact
              bool ok = true;
              for (int32_t i = 0; i < na && ok; ++i)
                for (int32_t j = 0; j < na && ok; ++j) {
                  if (i != j && asg[i] == asg[j]) ok = false;
                }
              for (int32_t u = 0; u < na && ok; ++u)
                for (int32_t v = 0; v < na && ok; ++v)
                  if (a.has_pair(0, u, v) != b.has_pair(0, asg[u], asg[v]))
                    ok = false;
              CHECK(eval_formula(b, f, am) == ok);
              int32_t pos = 0;
              while (pos < na && ++asg[pos] == nb) asg[pos++] = 0;
              if (pos == na) break;
            }
          }
        }
      }
    }
  }
}

TEST_CASE("phi_root picks out exactly the tree root") {
  auto base = random_regular_base(2, 3, 16);
  auto a = build_model(base.graph, 1);
  auto root = phi_root(2, "x");
  // tree-inspection oracle: the root is the unique element with no F-parent
  auto lay = layout_of(a.sig()).value();
  StructureIndex idx(a);
  for (int32_t v = 0; v < int32_t(a.n()); ++v) {
    bool has_parent = false;
    for (int32_t k = 0; k < lay.D4 && !has_parent; ++k)
      has_parent = !idx.in2(lay.f_sym(k), v).empty();
    CHECK(eval_formula(a, root, {{"x", v}}) == !has_parent);
  }
  CHECK(eval_formula(a, root, {{"x", 0}}));       // the root
  CHECK(!eval_formula(a, root, {{"x", 5}}));      // a leaf
}

TEST_CASE("zig-zag formulas hold on built models, per conjunct") {
  auto base = random_regular_base(2, 1, 16);
  auto a = build_model(base.graph, 1);
  for (auto part : {ZigzagPart::Tree, ZigzagPart::Rotation, ZigzagPart::Base,
                    ZigzagPart::Recursion}) {
    auto r = check_zigzag(a, base.graph, part);
    INFO(r.witness);
    CHECK(r.ok);
    CHECK(eval_formula(a, phi_conjunct(base.graph, part)));
  }
  CHECK(check_zigzag(a, base.graph, ZigzagPart::All).ok);
}

TEST_CASE("checkers catch single-tuple mutations with witnesses") {
  auto base = random_regular_base(2, 1, 16);
  auto a = build_model(base.graph, 2);
  auto lay = layout_of(a.sig()).value();

  SUBCASE("deleted F tuple breaks the tree check") {
    Structure m = a;
    m.remove_tuple(lay.f_sym(3), {0, 4});
    auto r = check_zigzag(m, base.graph, ZigzagPart::Tree);
    CHECK(!r.ok);
    CHECK(!r.witness.empty());
  }
  SUBCASE("redirected E tuple breaks self-inversion") {
    Structure m = a;
    // find a non-loop E tuple and redirect it
    for (int32_t i = 0; i < lay.D2; ++i) {
      const auto& flat = m.flat(lay.e_sym(i, 0));
      if (flat.size() >= 2 && flat[0] != flat[1]) {
        int32_t u = flat[0], v = flat[1];
        m.remove_tuple(lay.e_sym(i, 0), {u, v});
        m.add_tuple(lay.e_sym(i, 0), {u, (v + 1) % int32_t(m.n())});
        m.finalize();
        break;
      }
    }
    CHECK(!check_zigzag(m, base.graph, ZigzagPart::Rotation).ok);
  }
  SUBCASE("missing root E self-loop breaks base") {
    Structure m = a;
    m.remove_tuple(lay.e_sym(0, 0), {0, 0});
    CHECK(!check_zigzag(m, base.graph, ZigzagPart::Base).ok);
    CHECK(check_zigzag(m, base.graph, ZigzagPart::Tree).ok);
  }
}

TEST_CASE("checker agrees with generic eval on depth-1 models and mutations") {
  auto base = random_regular_base(2, 5, 16);
  auto a = build_model(base.graph, 1);
  FormulaPtr conj[4] = {phi_tree(2), phi_rotation_map(2), phi_base(base.graph),
                        phi_recursion(base.graph)};
  ZigzagPart parts[4] = {ZigzagPart::Tree, ZigzagPart::Rotation, ZigzagPart::Base,
                        ZigzagPart::Recursion};
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    Structure m = a;
    // mutate one random tuple: flip membership
    int sym = int(rng.below(m.sig().symbols.size()));
    int32_t u = int32_t(rng.below(uint64_t(m.n())));
    int32_t v = int32_t(rng.below(uint64_t(m.n())));
    if (m.has_pair(sym, u, v)) {
      m.remove_tuple(sym, {u, v});
    } else {
      m.add_tuple(sym, {u, v});
      m.finalize();
    }
    for (int c = 0; c < 4; ++c) {
      bool fast = check_zigzag(m, base.graph, parts[c]).ok;
      bool slow = eval_formula(m, conj[c]);
      INFO("trial ", trial, " conjunct ", c, " sym ", sym, " (", u, ",", v, ")");
      CHECK(fast == slow);
    }
  }
}

TEST_CASE("D=3 conjunct checkers accept the built model") {
  auto base = random_regular_base(3, 2, 4);
  auto a = build_model(base.graph, 1);
  for (auto part : {ZigzagPart::Tree, ZigzagPart::Rotation, ZigzagPart::Base,
                    ZigzagPart::Recursion}) {
    auto r = check_zigzag(a, base.graph, part);
    INFO(r.witness);
    CHECK(r.ok);
  }
}

TEST_CASE("formula text files round-trip through the parser") {
  auto base = random_regular_base(2, 1, 8);
  Signature sig = signature_for(2);
  for (auto part : {ZigzagPart::Tree, ZigzagPart::Rotation, ZigzagPart::Base,
                    ZigzagPart::Recursion}) {
    auto f = phi_conjunct(base.graph, part);
    auto text = print_formula(f, sig);
    auto g = parse_formula(text, sig);
    CHECK(print_formula(g, sig) == text);
  }
}
