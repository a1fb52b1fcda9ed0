// Acceptance suite: runs the numbered criteria and prints one line each.
// Usage: ell_acceptance [criterion-number | all]

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "ell/folagic.hpp"
#include "ell/gadgets.hpp"
#include "ell/rotgraph.hpp"
#include "ell/sigma2.hpp"
#include "ell/structures.hpp"
#include "ell/testing.hpp"
#include "ell/util.hpp"
#include "ell/witness.hpp"

using namespace ell;

namespace {

struct Criterion {
  bool pass = true;
  std::ostringstream notes;

  void check(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      notes << "  FAILED: " << what << "\n";
    }
  }
  void note(const std::string& line) { notes << "  " << line << "\n"; }
};

RotationGraph rotation_from_simple(const SimpleGraph& g) {
  int64_t d = g.degree(0);
  for (int64_t v = 0; v < g.n(); ++v)
    require(g.degree(v) == d, "rotation_from_simple: graph must be regular");
  RotationGraph r = RotationGraph::empty(int32_t(g.n()), int32_t(d));
  for (int32_t v = 0; v < r.n; ++v)
    for (int32_t i = 0; i < r.degree; ++i) {
      int32_t w = int32_t(g.row(v)[i]);
      const uint32_t* row = g.row(w);
      int32_t back = int32_t(std::lower_bound(row, row + g.degree(w), uint32_t(v)) -
                             row);
      r.set(v, i, w, back);
    }
  return r;
}

SimpleGraph cycle_graph(int64_t n) {
  SimpleGraph g(n);
  for (int64_t v = 0; v < n; ++v) g.add_edge(v, (v + 1) % n);
  g.finalize();
  return g;
}

SimpleGraph complete_graph(int64_t n) {
  SimpleGraph g(n);
  for (int64_t u = 0; u < n; ++u)
    for (int64_t v = u + 1; v < n; ++v) g.add_edge(u, v);
  g.finalize();
  return g;
}

SimpleGraph petersen() {
  SimpleGraph g(10);
  for (int64_t v = 0; v < 5; ++v) {
    g.add_edge(v, (v + 1) % 5);
    g.add_edge(v, v + 5);
    g.add_edge(v + 5, 5 + (v + 2) % 5);
  }
  g.finalize();
  return g;
}

SimpleGraph hypercube(int bits) {
  SimpleGraph g(int64_t(1) << bits);
  for (int64_t v = 0; v < g.n(); ++v)
    for (int b = 0; b < bits; ++b)
      if (!((v >> b) & 1)) g.add_edge(v, v | (int64_t(1) << b));
  g.finalize();
  return g;
}

SimpleGraph disjoint_k4s(int64_t m, int64_t isolated) {
  SimpleGraph g(4 * m + isolated);
  for (int64_t c = 0; c < m; ++c)
    for (int64_t u = 0; u < 4; ++u)
      for (int64_t v = u + 1; v < 4; ++v) g.add_edge(4 * c + u, 4 * c + v);
  g.finalize();
  return g;
}

// ---------------------------------------------------------------------------

void criterion_1(Criterion& c) {
  // |lambda(G^2) - lambda(G)^2| <= 1e-8 on 50 random rotation graphs
  double worst = 0;
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    Rng rng(seed * 77);
    int32_t n = 4 + int32_t(rng.below(61));  // 4..64
    int32_t D = 2 + int32_t(rng.below(3));   // 2..4
    auto g = random_rotation_graph(n, D, seed);
    double l = spectrum(g).lambda;
    double l2 = spectrum(square(g)).lambda;
    worst = std::max(worst, std::abs(l2 - l * l));
  }
  c.note("max |lambda(G^2) - lambda(G)^2| over 50 graphs: " + std::to_string(worst));
  c.check(worst <= 1e-8, "squaring law tolerance 1e-8");
}

void criterion_2(Criterion& c) {
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    Rng rng(seed * 131);
    int32_t d1 = 2 + int32_t(rng.below(3));       // degree of g1 = |V(g2)|
    int32_t n1 = 6 + 2 * int32_t(rng.below(10));  // vertices of g1
    int32_t d2 = 2 + int32_t(rng.below(2));
    auto g1 = random_rotation_graph(n1, d1, seed * 3 + 1);
    auto g2 = random_rotation_graph(d1, d2, seed * 3 + 2);
    auto z = zigzag(g1, g2);
    c.check(z.n == int64_t(n1) * d1, "zig-zag size N1*D1");
    c.check(z.degree == d2 * d2, "zig-zag degree D2^2");
    c.check(!validate(z).has_value(), "zig-zag output validates");
    double l1 = spectrum(g1).lambda;
    double l2 = spectrum(g2).lambda;
    double lz = spectrum(z).lambda;
    // the 1e-9 threshold matches the spectral report's own conventions
    if (l1 < 1.0 - 1e-9 && l2 < 1.0 - 1e-9) {
      c.check(lz < l1 + l2, "lambda(zigzag) < lambda1 + lambda2");
      c.check(lz < 1.0 - 1e-9, "lambda(zigzag) < 1");
    }
  }
}

void criterion_3(Criterion& c) {
  std::vector<RotationGraph> corpus;
  for (int n = 3; n <= 16; ++n) corpus.push_back(rotation_from_simple(cycle_graph(n)));
  for (int n = 4; n <= 9; ++n) corpus.push_back(rotation_from_simple(complete_graph(n)));
  corpus.push_back(rotation_from_simple(petersen()));
  corpus.push_back(rotation_from_simple(hypercube(3)));
  corpus.push_back(rotation_from_simple(hypercube(4)));
  for (uint64_t s = 1; s <= 8; ++s)
    corpus.push_back(random_rotation_graph(10 + int32_t(s % 7), 3, s));
  for (uint64_t s = 1; s <= 4; ++s)
    corpus.push_back(random_rotation_graph(12, 4, 100 + s));
  int64_t count = 0;
  for (const auto& g : corpus) {
    if (g.n > 16) continue;
    auto sp = spectrum(g);
    auto cut = expansion_exhaustive(g);
    double bound = g.degree * (1.0 - sp.lambda) / 2.0;
    c.check(cut.h >= bound - 1e-9, "h(G) >= D(1-lambda)/2 on corpus graph of n=" +
                                       std::to_string(g.n));
    ++count;
  }
  c.note("corpus graphs checked: " + std::to_string(count));
}

void criterion_4(Criterion& c) {
  auto base = random_regular_base(2, 1, 64);
  const int64_t want_sizes[3] = {17, 273, 4369};
  for (int depth = 1; depth <= 3; ++depth) {
    auto a = build_model(base.graph, depth);
    c.check(a.n() == want_sizes[depth - 1],
            "size at depth " + std::to_string(depth));
    auto rep = verify_model(a, base.graph, depth, 2);
    c.check(rep.size_ok && rep.tree_ok, "tree shape at depth " + std::to_string(depth));
    c.check(rep.degree_ok, "degree law (2D^2+D^4+1 = 25) at depth " +
                               std::to_string(depth) + " " + rep.degree_witness);
    for (size_t m = 0; m < rep.levels.size(); ++m)
      if (rep.levels[m].iso_checked)
        c.check(rep.levels[m].iso_ok,
                "level " + std::to_string(m + 1) + " isomorphic to G_" +
                    std::to_string(m + 1));
    // F-restriction is a complete 16-ary tree
    auto f = restrict_structure(a, f_symbols(a.sig()));
    auto fg = gaifman(f);
    c.check(fg.edge_count() == a.n() - 1, "F-Gaifman edge count n-1");
    c.check(fg.degree(0) == 16, "root has 16 F-children");
    auto chk = check_zigzag(a, base.graph, ZigzagPart::All);
    c.check(chk.ok, "check_zigzag(all) at depth " + std::to_string(depth) + ": " +
                        chk.witness);
    auto u = underlying_graph(a);
    auto sp = spectrum(u);
    c.check(sp.lambda < 1.0, "lambda(U(A)) < 1 at depth " + std::to_string(depth));
    c.note("depth " + std::to_string(depth) + ": lambda(U) = " +
           std::to_string(sp.lambda));
  }
}

void criterion_5(Criterion& c) {
  auto base = random_regular_base(2, 1, 64);
  auto a = build_model(base.graph, 1);
  FormulaPtr conj[4] = {phi_tree(2), phi_rotation_map(2), phi_base(base.graph),
                        phi_recursion(base.graph)};
  ZigzagPart parts[4] = {ZigzagPart::Tree, ZigzagPart::Rotation, ZigzagPart::Base,
                         ZigzagPart::Recursion};
  EvalOptions opt;
  opt.budget = int64_t(4) * 1000 * 1000 * 1000;

  // the unmutated model first
  for (int k = 0; k < 4; ++k) {
    bool fast = check_zigzag(a, base.graph, parts[k]).ok;
    bool slow = eval_formula(a, conj[k], {}, opt);
    c.check(fast && slow, "conjunct " + std::to_string(k) + " holds on the model");
  }

  Rng rng(424242);
  int64_t agreements = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Structure m = a;
    int sym = int(rng.below(m.sig().symbols.size()));
    int32_t u = int32_t(rng.below(uint64_t(m.n())));
    int32_t v = int32_t(rng.below(uint64_t(m.n())));
    if (m.has_pair(sym, u, v)) {
      m.remove_tuple(sym, {u, v});
    } else {
      m.add_tuple(sym, {u, v});
      m.finalize();
    }
    for (int k = 0; k < 4; ++k) {
      bool fast = check_zigzag(m, base.graph, parts[k]).ok;
      bool slow = eval_formula(m, conj[k], {}, opt);
      if (fast == slow) ++agreements;
      c.check(fast == slow, "mutation trial " + std::to_string(trial) +
                                " conjunct " + std::to_string(k) +
                                " checker/eval disagreement");
    }
  }
  c.note("agreements: " + std::to_string(agreements) + "/800");
}

void criterion_6(Criterion& c) {
  auto base = random_regular_base(2, 1, 64);
  for (int depth = 1; depth <= 2; ++depth) {
    auto a = build_model(base.graph, depth);
    EncodeCaps caps;
    caps.max_vertices = 40000000;
    auto enc = encode(a, caps);
    auto back = decode(enc.graph, 2);
    c.check(back == a, "decode(encode(model)) exact identity at depth " +
                           std::to_string(depth));

    // triangle criterion equals provenance exactly
    auto orig = original_vertices(enc.graph);
    bool orig_exact = int64_t(orig.size()) == enc.provenance.original_count;
    for (size_t i = 0; i < orig.size() && orig_exact; ++i)
      orig_exact = orig[i] == int64_t(i);
    c.check(orig_exact, "triangle-criterion original set equals provenance at depth " +
                            std::to_string(depth));

    // degree regularity, literally: every vertex of degree d = 25.
    std::map<int64_t, int64_t> hist;
    for (int64_t v = 0; v < enc.graph.n(); ++v) hist[enc.graph.degree(v)]++;
    std::ostringstream hs;
    for (auto [deg, cnt] : hist) hs << " " << deg << ":" << cnt;
    c.note("depth " + std::to_string(depth) + " degree histogram:" + hs.str());
    bool aux_regular = true;
    for (int64_t v = enc.provenance.original_count; v < enc.graph.n(); ++v)
      if (enc.graph.degree(v) != 25) aux_regular = false;
    bool orig_preserved = true;
    for (int32_t v = 0; v < enc.provenance.original_count; ++v)
      if (enc.graph.degree(v) != a.degree_occurrence(v)) orig_preserved = false;
    c.check(aux_regular, "every auxiliary vertex has degree d");
    c.check(orig_preserved, "original degrees equal tuple-occurrence counts");
    c.check(hist.size() == 1 && hist.begin()->first == 25,
            "encoded graph d-regular at depth " + std::to_string(depth) +
                " (unattainable for this construction: R/L self-loop arrows "
                "attach both ends to their element, putting the root at 26 "
                "and each leaf at 41, and an attachment-parity argument rules "
                "out any per-tuple arrow encoding into a simple graph being "
                "exactly d-regular everywhere)");
  }
}

void criterion_7(Criterion& c) {
  Signature sig;
  sig.symbols = {{"E", 2}};
  const int64_t d = 2;
  std::vector<std::string> toys = {
      "exists x. forall y. (E(x,y) | !E(y,y))",
      "exists x. forall y. (E(x,x) & !E(y,x) | E(y,y))",
      "exists x. forall y. (!E(y,y) | x=y)",
      "exists x. exists z. forall y. (E(x,z) & !E(y,x) | E(y,y) & !(x=z))",
      "exists x. forall y. forall w. (!E(y,w) | E(x,x))",
  };
  // all labeled structures with <= 4 elements in C_2
  std::vector<Structure> corpus;
  for (int32_t n = 1; n <= 4; ++n)
    for (int64_t bits = 0; bits < (int64_t(1) << (n * n)); ++bits) {
      Structure a(sig, n);
      for (int32_t u = 0; u < n; ++u)
        for (int32_t v = 0; v < n; ++v)
          if ((bits >> (u * n + v)) & 1) a.add_tuple(0, {u, v});
      a.finalize();
      if (a.max_degree() <= d) corpus.push_back(std::move(a));
    }
  c.note("corpus size: " + std::to_string(corpus.size()));

  for (const auto& text : toys) {
    auto f = parse_formula(text, sig);
    auto rep = decompose(f, sig, d);
    for (const auto& m : rep.minimal)
      c.check(int64_t(m.n()) <= rep.split.k, "minimal model size bound for " + text);
    int64_t mismatches = 0;
    for (const auto& a : corpus)
      if (eval_formula(a, f) != eval_formula(a, rep.equivalent)) ++mismatches;
    c.check(mismatches == 0, "d-equivalence for " + text + " (" +
                                 std::to_string(mismatches) + " mismatches)");
  }

  // isolate-preservation: universal DNF sentences survive isolating any
  // element when |A| > d * ar * t
  {
    auto psi = parse_formula("forall y. forall w. (!E(y,w) | !E(w,y) | y=w)", sig);
    const int64_t dd = 1;  // guard: |A| > 1*2*2 = 4
    int64_t tested = 0;
    for (int32_t n = 5; n <= 6; ++n) {
      // degree-1 structures: partial matchings with loops
      std::function<void(Structure&, int32_t)> enumerate = [&](Structure& a,
                                                               int32_t from) {
        {
          Structure fin = a;
          fin.finalize();
          if (fin.max_degree() <= dd && eval_formula(fin, psi)) {
            for (int32_t b = 0; b < n; ++b) {
              ++tested;
              if (!eval_formula(isolate(fin, b), psi))
                c.check(false, "isolate-preservation failed at n=" +
                                   std::to_string(n));
            }
          }
        }
        for (int32_t u = from; u < n; ++u)
          for (int32_t v = 0; v < n; ++v) {
            Structure probe = a;
            probe.finalize();
            if (probe.degree(u) >= dd || (u != v && probe.degree(v) >= dd))
              continue;
            Structure b = a;
            b.add_tuple(0, {u, v});
            enumerate(b, u + 1);
          }
      };
      Structure empty(sig, n);
      enumerate(empty, 0);
    }
    c.note("isolate-preservation instances tested: " + std::to_string(tested));
    c.check(tested > 0, "isolate-preservation exercised");
  }
}

void criterion_8(Criterion& c) {
  auto g = random_regular_simple_graph(2000, 3, 8);
  GraphOracle o(g, 3);
  const double lambda = 0.2;
  auto exact = rho_exact(o, 1);

  // observed-support rule for t
  Rng pres(555);
  std::set<std::string> seen;
  int64_t presample = 10 * required_sample_size(1, lambda);
  for (int64_t i = 0; i < std::min<int64_t>(presample, g.n()); ++i) {
    int64_t v = int64_t(pres.below(uint64_t(g.n())));
    seen.insert(canonical_type(explore_ball(o, v, 1)).bytes);
  }
  int64_t t = std::max<int64_t>(1, 2 * int64_t(seen.size()));
  int64_t s = required_sample_size(t, lambda);
  c.note("observed support: " + std::to_string(seen.size()) + ", t = " +
         std::to_string(t) + ", s = " + std::to_string(s));

  int good = 0;
  for (int run = 0; run < 200; ++run) {
    auto est = estimate_frequencies(o, 1, s, Rng::split(99, uint64_t(run)));
    if (l1_distance(exact, est) <= lambda) ++good;
  }
  c.note("runs within lambda: " + std::to_string(good) + "/200");
  c.check(good >= 190, "L1 error <= lambda in at least 190/200 runs");
}

void criterion_9(Criterion& c) {
  // freeness case (a): degree-gap type at r=2 in C_3
  {
    SimpleGraph p5(5);
    for (int64_t v = 0; v + 1 < 5; ++v) p5.add_edge(v, v + 1);
    p5.finalize();
    auto tau = ball_from_graph(p5, 2);  // centre degree 1... use middle instead
    GraphOracle dummy(p5, 3);
    tau = explore_ball(dummy, 2, 2);
    auto g = disjoint_k4s(150, 0);  // all degrees 3: tau-free
    GraphOracle o(g, 3);
    int rejections = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      TesterOverrides ov;
      ov.seed = Rng::split(91, uint64_t(trial));
      ov.lambda = 0.2;
      ov.n0 = 1;
      ov.t = 4;
      if (!freeness_tester(o, tau, 0.3, ov).accept) ++rejections;
    }
    c.check(rejections == 0, "freeness (degree-gap case) one-sidedness: " +
                                 std::to_string(rejections) + " rejections");
  }
  // freeness case (b): full-degree type (K4 ball) on cycles
  {
    auto tau = ball_from_graph(complete_graph(4), 1);
    auto g = cycle_graph(600);
    GraphOracle o(g, 3);
    int rejections = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      TesterOverrides ov;
      ov.seed = Rng::split(92, uint64_t(trial));
      ov.lambda = 0.2;
      ov.t = 4;
      if (!freeness_tester(o, tau, 0.3, ov).accept) ++rejections;
    }
    c.check(rejections == 0, "freeness (full-degree case) one-sidedness: " +
                                 std::to_string(rejections) + " rejections");
  }
  // freeness case (c): 1-type at d=1 (isolated vertex), perfect matchings
  {
    SimpleGraph v1(1);
    v1.finalize();
    auto tau = ball_from_graph(v1, 1);
    SimpleGraph g(600);
    for (int64_t v = 0; v + 1 < 600; v += 2) g.add_edge(v, v + 1);
    g.finalize();
    GraphOracle o(g, 1);
    int rejections = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      TesterOverrides ov;
      ov.seed = Rng::split(93, uint64_t(trial));
      ov.lambda = 0.2;
      ov.n0 = 1;
      ov.t = 2;
      if (!freeness_tester(o, tau, 0.28, ov).accept) ++rejections;
    }
    c.check(rejections == 0, "freeness (1-type case) one-sidedness: " +
                                 std::to_string(rejections) + " rejections");
  }
  // regularity, K4 type
  {
    auto tau = ball_from_graph(complete_graph(4), 1);
    auto g = disjoint_k4s(150, 0);
    GraphOracle o(g, 3);
    int rejections = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      TesterOverrides ov;
      ov.seed = Rng::split(94, uint64_t(trial));
      ov.lambda = 0.2;
      ov.n0 = 1;
      ov.t = 4;
      if (!regularity_tester(o, tau, 0.3, ov).accept) ++rejections;
    }
    c.check(rejections == 0, "regularity (K4) one-sidedness: " +
                                 std::to_string(rejections) + " rejections");
  }
}

void criterion_10(Criterion& c) {
  SimpleGraph v1(1);
  v1.finalize();
  auto tau_isolated = ball_from_graph(v1, 1);

  // small instance: labeled far by the exhaustive oracle. One edge plus five
  // isolated vertices needs three modifications to kill every isolated
  // vertex, and the budget at eps = 0.1 is two.
  {
    SimpleGraph g(7);
    g.add_edge(0, 1);
    g.finalize();
    auto wants_free = [&](const SimpleGraph& h) {
      for (int64_t v = 0; v < h.n(); ++v)
        if (h.degree(v) == 0) return false;
      return true;
    };
    auto far = graph_farness(g, 3, 0.1, wants_free);
    c.check(far.far, "ground truth: the small instance is 0.1-far");
    GraphOracle o(g, 3);
    int rejections = 0;
    for (int trial = 0; trial < 200; ++trial) {
      TesterOverrides ov;
      ov.seed = Rng::split(101, uint64_t(trial));
      ov.lambda = 0.2;
      ov.n0 = 1;  // reduced constants force the sampling branch
      ov.t = 3;
      if (!freeness_tester(o, tau_isolated, 0.1, ov).accept) ++rejections;
    }
    c.note("small-instance rejections: " + std::to_string(rejections) + "/200");
    c.check(rejections * 3 >= 200 * 2, "rejection rate >= 2/3 on the far small instance");
  }

  // planted-far instance at n = 2000: freeness
  {
    auto base = random_regular_simple_graph(1700, 3, 10);
    SimpleGraph g(2000);
    for (int64_t v = 0; v < 1700; ++v) {
      const uint32_t* row = base.row(v);
      for (int64_t i = 0; i < base.degree(v); ++i)
        if (int64_t(row[i]) > v) g.add_edge(v, row[i]);
    }
    g.finalize();  // 300 isolated vertices planted
    GraphOracle o(g, 3);
    int rejections = 0;
    for (int trial = 0; trial < 200; ++trial) {
      TesterOverrides ov;
      ov.seed = Rng::split(102, uint64_t(trial));
      ov.lambda = 0.1;
      ov.n0 = 1;
      ov.t = 6;
      if (!freeness_tester(o, tau_isolated, 0.1, ov).accept) ++rejections;
    }
    c.note("planted freeness rejections: " + std::to_string(rejections) + "/200");
    c.check(rejections * 3 >= 200 * 2, "rejection rate >= 2/3 on planted-far freeness");
  }

  // planted-far instance at n = 2000: regularity (K4 type, allowed size)
  {
    auto tau = ball_from_graph(complete_graph(4), 1);
    auto g = disjoint_k4s(450, 200);  // n = 2000, divisible by 4
    GraphOracle o(g, 3);
    int rejections = 0;
    for (int trial = 0; trial < 200; ++trial) {
      TesterOverrides ov;
      ov.seed = Rng::split(103, uint64_t(trial));
      ov.lambda = 0.05;
      ov.n0 = 1;
      ov.t = 4;
      if (!regularity_tester(o, tau, 0.2, ov).accept) ++rejections;
    }
    c.note("planted regularity rejections: " + std::to_string(rejections) + "/200");
    c.check(rejections * 3 >= 200 * 2, "rejection rate >= 2/3 on planted-far regularity");
  }
}

void criterion_11(Criterion& c) {
  auto tau = ball_from_graph(complete_graph(4), 1);
  for (int64_t m : {3, 10, 100}) {
    auto g = disjoint_k4s(m, 1);  // n = 4m+1
    GraphOracle o(g, 3);
    for (int trial = 0; trial < 20; ++trial) {
      TesterOverrides ov;
      ov.seed = Rng::split(111, uint64_t(trial));
      auto out = regularity_tester(o, tau, 0.3, ov);
      c.check(!out.accept, "parity gate rejects n = 4m+1");
      c.check(out.reason == "n-in-M", "rejection happens at the size gate");
      c.check(out.queries == 0, "zero sampling queries at the size gate");
    }
  }
}

void criterion_12(Criterion& c) {
  auto rep = run_witness(2, 3, 1, 64, 3);
  c.note("n = " + std::to_string(rep.n) + ", copies = " + std::to_string(rep.copies) +
         ", padding = " + std::to_string(rep.padding));
  c.note("lambda(U(A)) = " + std::to_string(rep.lambda_u));
  c.note("certified farness lower bound = " +
         std::to_string(rep.certified_lower_bound) + " vs threshold eps*d*n = " +
         std::to_string(rep.threshold));
  c.note("measured cut across the component partition = " +
         std::to_string(rep.measured_cut) + " (|S| = " +
         std::to_string(rep.witness_set_size) + ")");
  std::ostringstream ds;
  for (size_t r = 0; r < rep.delta_per_radius.size(); ++r) {
    if (rep.delta_computed[r])
      ds << " r=" << r << ": " << rep.delta_per_radius[r];
    else
      ds << " r=" << r << ": skipped(cap)";
  }
  c.note("sampling distances:" + ds.str());
  c.note("delta_1 = " + std::to_string(rep.delta1) + " vs farness-normalized " +
         std::to_string(rep.farness_normalized));
  c.note("radius-1 type supports: A " + std::to_string(rep.support_a_r1) + ", B " +
         std::to_string(rep.support_b_r1));
  c.check(rep.certified_lower_bound > 0, "a certified lower bound was produced");
  c.check(rep.farness_certified, "certified bound meets the threshold");
  c.check(rep.measured_cut >= int64_t(rep.witness_set_size * rep.cheeger_h),
          "measured cut dominates |S| * Cheeger bound");
  c.check(rep.locality_gap,
          "delta_1 strictly below the farness-normalized distance (known gap in "
          "the constructive substitution: consecutive recursion depths have "
          "almost disjoint coloured 1-type supports at desk scale, so the "
          "sampling distance sits near its maximum; the original experiment "
          "needs the non-constructive small approximating structure)");
  c.check(rep.exhibited, "locality-gap pattern exhibited");
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  if (argc < 2 || std::strcmp(argv[1], "all") == 0) {
    for (int i = 1; i <= 12; ++i) which.push_back(i);
  } else {
    for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  }
  using Fn = void (*)(Criterion&);
  Fn fns[12] = {criterion_1, criterion_2, criterion_3,  criterion_4,
                criterion_5, criterion_6, criterion_7,  criterion_8,
                criterion_9, criterion_10, criterion_11, criterion_12};
  bool all_pass = true;
  for (int k : which) {
    if (k < 1 || k > 12) {
      std::cerr << "unknown criterion " << k << "\n";
      return 2;
    }
    Criterion c;
    auto start = std::chrono::steady_clock::now();
    try {
      fns[k - 1](c);
    } catch (const std::exception& e) {
      c.pass = false;
      c.notes << "  EXCEPTION: " << e.what() << "\n";
    }
    auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              start)
                    .count();
    std::cout << "criterion " << k << ": " << (c.pass ? "PASS" : "FAIL") << "  ("
              << std::fixed << secs << "s)\n"
              << c.notes.str();
    std::cout.unsetf(std::ios_base::fixed);
    all_pass = all_pass && c.pass;
  }
  return all_pass ? 0 : 1;
}
