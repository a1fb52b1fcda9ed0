#include "ell/testing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "ell/util.hpp"

namespace ell {

// ---------------------------------------------------------------------------
// Oracles

StructureOracle::StructureOracle(const Structure& a,
                                 std::optional<int64_t> degree_bound)
    : a_(&a) {
  d_ = degree_bound ? *degree_bound : a.max_degree();
  const auto& sig = a.sig();
  incidence_.resize(sig.symbols.size());
  for (size_t s = 0; s < sig.symbols.size(); ++s) {
    incidence_[s].resize(a.n());
    const int ar = sig.symbols[s].arity;
    const auto& flat = a.flat(int(s));
    for (int64_t off = 0; off < int64_t(flat.size()); off += ar) {
      int32_t prev = -1;
      // flat is sorted, so per-element offset lists stay lexicographic
      std::vector<int32_t> entries(flat.begin() + off, flat.begin() + off + ar);
      std::sort(entries.begin(), entries.end());
      for (int32_t e : entries) {
        if (e != prev) incidence_[s][e].push_back(off);
        prev = e;
      }
    }
  }
}

std::optional<std::vector<int32_t>> StructureOracle::answer(int64_t i, int sym,
                                                            int64_t k) const {
  require(i >= 0 && i < a_->n(), "neighbor_query: element out of range");
  require(sym >= 0 && sym < symbol_count(), "neighbor_query: bad symbol");
  require(k >= 1, "neighbor_query: k is 1-based");
  const auto& list = incidence_[sym][i];
  if (k > int64_t(list.size())) return std::nullopt;
  const int ar = a_->sig().symbols[sym].arity;
  const auto& flat = a_->flat(sym);
  int64_t off = list[k - 1];
  return std::vector<int32_t>(flat.begin() + off, flat.begin() + off + ar);
}

GraphOracle::GraphOracle(const SimpleGraph& g, std::optional<int64_t> degree_bound)
    : g_(&g) {
  if (degree_bound) {
    d_ = *degree_bound;
  } else {
    d_ = 0;
    for (int64_t v = 0; v < g.n(); ++v) d_ = std::max(d_, g.degree(v));
  }
}

std::optional<std::vector<int32_t>> GraphOracle::answer(int64_t i, int sym,
                                                        int64_t k) const {
  require(i >= 0 && i < g_->n(), "neighbor_query: vertex out of range");
  require(sym == 0, "neighbor_query: bad symbol");
  require(k >= 1, "neighbor_query: k is 1-based");
  if (k > g_->degree(i)) return std::nullopt;
  int64_t w = g_->row(i)[k - 1];
  // an undirected edge is one tuple, reported endpoint-sorted
  return std::vector<int32_t>{int32_t(std::min(i, w)), int32_t(std::max(i, w))};
}

// ---------------------------------------------------------------------------
// Balls

bool Ball::has_local_pair(int sym, int32_t a, int32_t b) const {
  const int ar = arities[sym];
  if (ar != 2) return false;
  if (symmetric[sym] && a > b) std::swap(a, b);
  const auto& flat = rels[sym];
  for (int64_t off = 0; off < int64_t(flat.size()); off += 2)
    if (flat[off] == a && flat[off + 1] == b) return true;
  return false;
}

int64_t Ball::local_degree(int32_t v) const {
  int64_t deg = 0;
  for (size_t s = 0; s < rels.size(); ++s) {
    const int ar = arities[s];
    const auto& flat = rels[s];
    for (int64_t off = 0; off < int64_t(flat.size()); off += ar)
      for (int z = 0; z < ar; ++z)
        if (flat[off + z] == v) {
          ++deg;
          break;
        }
  }
  return deg;
}

bool Ball::gaifman_adjacent(int32_t a, int32_t b) const {
  for (size_t s = 0; s < rels.size(); ++s) {
    const int ar = arities[s];
    const auto& flat = rels[s];
    for (int64_t off = 0; off < int64_t(flat.size()); off += ar) {
      bool has_a = false, has_b = false;
      for (int z = 0; z < ar; ++z) {
        if (flat[off + z] == a) has_a = true;
        if (flat[off + z] == b) has_b = true;
      }
      if (has_a && has_b) return true;
    }
  }
  return false;
}

std::vector<int32_t> Ball::gaifman_distances() const {
  std::vector<int32_t> dist(n(), -1);
  std::queue<int32_t> q;
  dist[0] = 0;
  q.push(0);
  while (!q.empty()) {
    int32_t v = q.front();
    q.pop();
    for (int32_t w = 0; w < int32_t(n()); ++w)
      if (dist[w] < 0 && w != v && gaifman_adjacent(v, w)) {
        dist[w] = dist[v] + 1;
        q.push(w);
      }
  }
  return dist;
}

Ball explore_ball(const Oracle& o, int64_t v, int r, const BallCaps& caps) {
  require(v >= 0 && v < o.size(), "explore_ball: centre out of range");
  require(r >= 0 && r <= caps.max_radius,
          "explore_ball: radius exceeds the cap (override BallCaps::max_radius)");
  Ball ball;
  ball.r = r;
  for (int s = 0; s < o.symbol_count(); ++s) {
    ball.arities.push_back(o.arity(s));
    ball.symmetric.push_back(o.symmetric(s));
  }
  ball.rels.resize(o.symbol_count());

  std::unordered_map<int64_t, int32_t> local;
  std::vector<int> dist;
  auto add_member = [&](int64_t g, int d) -> int32_t {
    auto it = local.find(g);
    if (it != local.end()) return it->second;
    require(int64_t(ball.members.size()) < caps.max_members,
            "explore_ball: ball size cap exceeded");
    int32_t id = int32_t(ball.members.size());
    local.emplace(g, id);
    ball.members.push_back(g);
    dist.push_back(d);
    return id;
  };
  add_member(v, 0);
  for (size_t head = 0; head < ball.members.size(); ++head) {
    if (dist[head] >= r) continue;
    int64_t g = ball.members[head];
    for (int s = 0; s < o.symbol_count(); ++s) {
      for (int64_t k = 1;; ++k) {
        auto t = o.neighbor_query(g, s, k);
        if (!t) break;
        for (int32_t e : *t) add_member(e, dist[head] + 1);
      }
    }
  }
  // induced tuples: everything incident to a member with all entries inside
  std::vector<std::set<std::vector<int32_t>>> seen(o.symbol_count());
  for (int64_t g : ball.members) {
    for (int s = 0; s < o.symbol_count(); ++s) {
      for (int64_t k = 1;; ++k) {
        auto t = o.neighbor_query(g, s, k);
        if (!t) break;
        std::vector<int32_t> lt;
        bool inside = true;
        for (int32_t e : *t) {
          auto it = local.find(e);
          if (it == local.end()) {
            inside = false;
            break;
          }
          lt.push_back(it->second);
        }
        if (inside) {
          if (ball.symmetric[s]) std::sort(lt.begin(), lt.end());
          seen[s].insert(std::move(lt));
        }
      }
    }
  }
  for (int s = 0; s < o.symbol_count(); ++s)
    for (const auto& t : seen[s])
      ball.rels[s].insert(ball.rels[s].end(), t.begin(), t.end());
  return ball;
}

// ---------------------------------------------------------------------------
// Canonical types: colour refinement + individualization, minimizing the
// serialized form. Binary symbols only.

namespace {

struct Canonizer {
  const Ball& b;
  int32_t n;
  // per symbol: adjacency as (out, in) lists of (other, is_loop)
  std::vector<std::vector<std::vector<int32_t>>> out, in;
  std::string best;
  bool have_best = false;
  int64_t nodes = 0;

  explicit Canonizer(const Ball& ball) : b(ball), n(int32_t(ball.n())) {
    out.resize(b.rels.size());
    in.resize(b.rels.size());
    for (size_t s = 0; s < b.rels.size(); ++s) {
      require(b.arities[s] <= 2, "canonical_type: only binary symbols supported");
      out[s].assign(n, {});
      in[s].assign(n, {});
      const auto& flat = b.rels[s];
      if (b.arities[s] == 2) {
        for (int64_t off = 0; off < int64_t(flat.size()); off += 2) {
          if (b.symmetric[s]) {
            // undirected: both endpoints see each other in `out`
            out[s][flat[off]].push_back(flat[off + 1]);
            if (flat[off] != flat[off + 1])
              out[s][flat[off + 1]].push_back(flat[off]);
          } else {
            out[s][flat[off]].push_back(flat[off + 1]);
            in[s][flat[off + 1]].push_back(flat[off]);
          }
        }
      } else {
        for (int64_t off = 0; off < int64_t(flat.size()); ++off)
          out[s][flat[off]].push_back(flat[off]);
      }
    }
  }

  std::vector<int64_t> refine(std::vector<int64_t> c) const {
    for (int round = 0; round < n; ++round) {
      std::map<std::vector<int64_t>, int64_t> ids;
      std::vector<std::vector<int64_t>> sigs(n);
      for (int32_t v = 0; v < n; ++v) {
        auto& sig = sigs[v];
        sig.push_back(c[v]);
        for (size_t s = 0; s < out.size(); ++s) {
          std::vector<int64_t> o1, i1;
          for (int32_t w : out[s][v]) o1.push_back(w == v ? -1 : c[w]);
          for (int32_t w : in[s][v]) i1.push_back(w == v ? -1 : c[w]);
          std::sort(o1.begin(), o1.end());
          std::sort(i1.begin(), i1.end());
          sig.push_back(int64_t(o1.size()));
          sig.insert(sig.end(), o1.begin(), o1.end());
          sig.push_back(int64_t(i1.size()));
          sig.insert(sig.end(), i1.begin(), i1.end());
        }
      }
      // canonical ranks in signature order
      for (int32_t v = 0; v < n; ++v) ids.emplace(sigs[v], 0);
      int64_t rank = 0;
      for (auto& [sig, id] : ids) id = rank++;
      std::vector<int64_t> next(n);
      for (int32_t v = 0; v < n; ++v) next[v] = ids[sigs[v]];
      if (next == c) break;
      bool split = false;
      {
        std::map<int64_t, int64_t> m1;
        for (int32_t v = 0; v < n; ++v) {
          auto it = m1.find(c[v]);
          if (it == m1.end())
            m1[c[v]] = next[v];
          else if (it->second != next[v])
            split = true;
        }
      }
      c = std::move(next);
      if (!split) break;
    }
    return c;
  }

  std::string serialize(const std::vector<int64_t>& c) const {
    // discrete colors: position by rank
    std::vector<int32_t> pos(n);
    for (int32_t v = 0; v < n; ++v) pos[v] = int32_t(c[v]);
    std::string s;
    auto put = [&](int64_t x) {
      for (int k = 0; k < 4; ++k) s.push_back(char((x >> (8 * k)) & 0xff));
    };
    put(b.r);
    put(n);
    put(int64_t(b.rels.size()));
    for (size_t sym = 0; sym < b.rels.size(); ++sym) {
      const auto& flat = b.rels[sym];
      const int ar = b.arities[sym];
      std::vector<std::vector<int32_t>> tuples;
      for (int64_t off = 0; off < int64_t(flat.size()); off += ar) {
        std::vector<int32_t> t(ar);
        for (int z = 0; z < ar; ++z) t[z] = pos[flat[off + z]];
        if (b.symmetric[sym]) std::sort(t.begin(), t.end());
        tuples.push_back(std::move(t));
      }
      std::sort(tuples.begin(), tuples.end());
      put(int64_t(tuples.size()));
      for (const auto& t : tuples)
        for (int32_t e : t) put(e);
    }
    return s;
  }

  void search(std::vector<int64_t> c) {
    if (++nodes > 200000)
      throw std::runtime_error("canonical_type: search budget exceeded");
    c = refine(c);
    // discrete?
    std::map<int64_t, std::vector<int32_t>> classes;
    for (int32_t v = 0; v < n; ++v) classes[c[v]].push_back(v);
    int64_t target = -1;
    for (auto& [col, vs] : classes)
      if (vs.size() > 1) {
        target = col;
        break;
      }
    if (target < 0) {
      auto s = serialize(c);
      if (!have_best || s < best) {
        best = std::move(s);
        have_best = true;
      }
      return;
    }
    for (int32_t v : classes[target]) {
      std::vector<int64_t> c2(n);
      for (int32_t w = 0; w < n; ++w) c2[w] = c[w] * 2 + 1;
      c2[v] -= 1;
      search(std::move(c2));
    }
  }
};

}  // namespace

BallType canonical_type(const Ball& b) {
  Canonizer cz(b);
  std::vector<int64_t> init(cz.n, 1);
  init[0] = 0;  // the centre is fixed
  cz.search(std::move(init));
  return BallType{b.r, cz.best};
}

bool balls_isomorphic(const Ball& a, const Ball& b) {
  if (a.r != b.r || a.n() != b.n() || a.arities != b.arities ||
      a.symmetric != b.symmetric)
    return false;
  for (size_t s = 0; s < a.rels.size(); ++s)
    if (a.rels[s].size() != b.rels[s].size()) return false;
  const int32_t n = int32_t(a.n());
  for (size_t s = 0; s < a.rels.size(); ++s)
    if (a.arities[s] == 2 &&
        a.has_local_pair(int(s), 0, 0) != b.has_local_pair(int(s), 0, 0))
      return false;
  std::vector<int32_t> map(n, -1), used(n, 0);
  map[0] = 0;
  used[0] = 1;

  // incremental consistency: tuples entirely over mapped vertices must match
  std::function<bool(int32_t)> go = [&](int32_t v) -> bool {
    if (v == n) return true;
    for (int32_t w = 1; w < n; ++w) {
      if (used[w]) continue;
      map[v] = w;
      used[w] = 1;
      bool ok = true;
      for (size_t s = 0; s < a.rels.size() && ok; ++s) {
        const int ar = a.arities[s];
        const auto& flat = a.rels[s];
        for (int64_t off = 0; off < int64_t(flat.size()) && ok; off += ar) {
          bool all_mapped = true;
          for (int z = 0; z < ar; ++z)
            if (map[flat[off + z]] < 0) all_mapped = false;
          if (!all_mapped) continue;
          std::vector<int32_t> t(ar);
          for (int z = 0; z < ar; ++z) t[z] = map[flat[off + z]];
          if (a.symmetric[s]) std::sort(t.begin(), t.end());
          bool found = false;
          const auto& bf = b.rels[s];
          for (int64_t o2 = 0; o2 < int64_t(bf.size()) && !found; o2 += ar)
            found = std::equal(t.begin(), t.end(), bf.begin() + o2);
          ok = found;
        }
      }
      if (ok && go(v + 1)) return true;
      used[w] = 0;
      map[v] = -1;
    }
    return false;
  };
  return go(1);
}

// ---------------------------------------------------------------------------
// Distributions

double TypeDistribution::total() const {
  double t = 0;
  for (auto& [k, f] : freq) t += f;
  return t;
}

TypeDistribution rho_exact(const Oracle& o, int r, const BallCaps& caps) {
  TypeDistribution dist;
  dist.r = r;
  for (int64_t v = 0; v < o.size(); ++v)
    dist.freq[canonical_type(explore_ball(o, v, r, caps)).bytes] += 1.0;
  for (auto& [k, f] : dist.freq) f /= double(o.size());
  return dist;
}

TypeDistribution estimate_frequencies(const Oracle& o, int r, int64_t s,
                                      uint64_t seed, const BallCaps& caps) {
  require(s >= 1, "estimate_frequencies: s must be >= 1");
  TypeDistribution dist;
  dist.r = r;
  Rng rng(seed);
  for (int64_t i = 0; i < s; ++i) {
    int64_t v = int64_t(rng.below(uint64_t(o.size())));
    dist.freq[canonical_type(explore_ball(o, v, r, caps)).bytes] += 1.0;
  }
  for (auto& [k, f] : dist.freq) f /= double(s);
  return dist;
}

double l1_distance(const TypeDistribution& a, const TypeDistribution& b) {
  double sum = 0;
  for (auto& [k, f] : a.freq) {
    auto it = b.freq.find(k);
    sum += std::abs(f - (it == b.freq.end() ? 0.0 : it->second));
  }
  for (auto& [k, f] : b.freq)
    if (!a.freq.count(k)) sum += f;
  return sum;
}

std::string type_distribution_to_json(const TypeDistribution& dist) {
  nlohmann::json j;
  j["r"] = dist.r;
  j["support"] = dist.support();
  j["frequencies"] = nlohmann::json::array();
  for (const auto& [bytes, f] : dist.freq) {
    std::string hex;
    for (unsigned char c : bytes) {
      static const char* digits = "0123456789abcdef";
      hex.push_back(digits[c >> 4]);
      hex.push_back(digits[c & 15]);
    }
    j["frequencies"].push_back({{"type", hex}, {"frequency", f}});
  }
  return j.dump(2);
}

int64_t required_sample_size(int64_t t, double lambda) {
  require(t >= 1 && lambda > 0, "required_sample_size: bad parameters");
  long double v = (long double)(t) * t / ((long double)lambda * lambda) *
                  std::log((long double)(t + 40));
  return int64_t(std::ceil(v));
}

SamplingDistance sampling_distance(const Oracle& a, const Oracle& b, int r_max,
                                   const BallCaps& caps) {
  SamplingDistance out;
  for (int r = 0; r <= r_max; ++r) {
    auto da = rho_exact(a, r, caps);
    auto db = rho_exact(b, r, caps);
    out.per_radius.push_back(0.5 * l1_distance(da, db));
  }
  out.truncated = 0;
  for (int r = 0; r <= r_max; ++r)
    out.truncated += std::ldexp(out.per_radius[r], -r);
  out.tail_bound = std::ldexp(1.0, -r_max);
  return out;
}

// ---------------------------------------------------------------------------
// Framework tester

TesterOutcome framework_tester(const Oracle& o, const FrameworkParams& p) {
  require(p.lambda > 0 && p.lambda <= 1, "framework_tester: lambda in (0,1]");
  o.reset_queries();
  TesterOutcome out;
  const int64_t n = o.size();

  if (p.size_excluded && p.size_excluded(n)) {
    out.accept = false;
    out.reason = "n-in-M";
    out.queries = o.queries();
    return out;
  }
  if (n < p.n0) {
    out.reason = "exact-small";
    out.accept = true;
    for (int64_t v = 0; v < n && out.accept; ++v) {
      auto type = canonical_type(explore_ball(o, v, p.r, p.caps));
      if (p.forbidden(type)) out.accept = false;
    }
    out.queries = o.queries();
    return out;
  }

  int64_t t;
  Rng rng(p.seed);
  if (p.t_override) {
    t = *p.t_override;
  } else {
    // observed-support rule: presample 10*s0 vertices (s0 = the t=1 sample
    // size), then take twice the number of distinct observed types
    int64_t presample = std::min<int64_t>(n, 10 * required_sample_size(1, p.lambda));
    std::set<std::string> seen;
    for (int64_t i = 0; i < presample; ++i) {
      int64_t v = int64_t(rng.below(uint64_t(n)));
      seen.insert(canonical_type(explore_ball(o, v, p.r, p.caps)).bytes);
    }
    t = std::max<int64_t>(1, 2 * int64_t(seen.size()));
  }
  out.t_used = t;
  out.sample_size = required_sample_size(t, p.lambda);

  out.accept = true;
  for (int64_t i = 0; i < out.sample_size; ++i) {
    int64_t v = int64_t(rng.below(uint64_t(n)));
    auto type = canonical_type(explore_ball(o, v, p.r, p.caps));
    if (p.forbidden(type)) {
      out.accept = false;
      out.reason = "sampled-forbidden";
      out.queries = o.queries();
      return out;
    }
  }
  out.reason = "clean-sample";
  out.queries = o.queries();
  return out;
}

// ---------------------------------------------------------------------------
// Concrete testers

TesterOutcome freeness_tester(const Oracle& o, const Ball& tau, double epsilon,
                              const TesterOverrides& ov) {
  require(epsilon > 0 && epsilon <= 1, "freeness_tester: epsilon in (0,1]");
  require(tau.r >= 1, "freeness_tester: the type radius must be >= 1");
  const int64_t d = o.degree_bound();
  require(d >= 1, "freeness_tester: degree bound must be >= 1");

  // Unrealizable type (some degree exceeds d): F is empty, always accept.
  bool realizable = true;
  for (int32_t v = 0; v < int32_t(tau.n()); ++v)
    if (tau.local_degree(v) > d) realizable = false;

  FrameworkParams p;
  p.r = tau.r;
  p.caps.max_members = std::max<int64_t>(40, tau.n() + 8);
  p.seed = ov.seed;
  p.t_override = ov.t;

  bool odd_gate = false;
  if (!realizable) {
    p.lambda = epsilon;
    p.n0 = 1;
    p.forbidden = [](const BallType&) { return false; };
  } else {
    auto dist = tau.gaifman_distances();
    std::set<int64_t> interior_degrees;
    for (int32_t v = 0; v < int32_t(tau.n()); ++v)
      if (dist[v] >= 0 && dist[v] <= tau.r - 1)
        interior_degrees.insert(tau.local_degree(v));

    std::optional<int64_t> gap;  // witnessing degree d~ < d with d~+1 absent
    for (int64_t dt = 0; dt < d; ++dt)
      if (interior_degrees.count(dt) && !interior_degrees.count(dt + 1)) {
        gap = dt;
        break;
      }
    bool all_full = true;
    for (int64_t dd : interior_degrees)
      if (dd != d) all_full = false;

    if (gap) {
      // degree-gap case
      double exponent = std::pow(double(d), double(2 * tau.r + 1));
      p.lambda = epsilon * double(d) / (14.0 * (1.0 + exponent));
      p.n0 = int64_t(std::ceil(2.0 * double(d) * double(d) / epsilon));
      odd_gate = (d == 1 && *gap == 0);
    } else if (all_full) {
      p.lambda = epsilon;
      p.n0 = 1;
    } else if (tau.r == 1) {
      p.lambda = epsilon * double(d) / (14.0 * (1.0 + std::pow(double(d), 3.0)));
      p.n0 = int64_t(std::ceil(2.0 * double(d) * double(d) / epsilon));
    } else {
      throw std::invalid_argument(
          "freeness_tester: unsupported type (no interior degree gap and not "
          "full-degree)");
    }
    auto target = canonical_type(tau);
    p.forbidden = [target](const BallType& t) { return t == target; };
  }
  if (ov.lambda) p.lambda = *ov.lambda;
  if (ov.n0) p.n0 = *ov.n0;
  if (odd_gate) p.size_excluded = [](int64_t n) { return n % 2 == 1; };
  return framework_tester(o, p);
}

std::optional<std::map<int64_t, int64_t>> maxcl_of_ball(const Ball& tau) {
  if (tau.r != 1) return std::nullopt;
  const int32_t n = int32_t(tau.n());
  // components of the ball minus the centre
  std::vector<int32_t> comp(n, -1);
  int32_t comps = 0;
  for (int32_t v = 1; v < n; ++v) {
    if (comp[v] >= 0) continue;
    std::vector<int32_t> stack{v};
    comp[v] = comps;
    while (!stack.empty()) {
      int32_t u = stack.back();
      stack.pop_back();
      for (int32_t w = 1; w < n; ++w)
        if (comp[w] < 0 && w != u && tau.gaifman_adjacent(u, w)) {
          comp[w] = comps;
          stack.push_back(w);
        }
    }
    ++comps;
  }
  std::vector<int64_t> size(comps, 0);
  for (int32_t v = 1; v < n; ++v) size[comp[v]]++;
  // each component must be a clique adjacent to the centre
  for (int32_t v = 1; v < n; ++v) {
    if (!tau.gaifman_adjacent(0, v)) return std::nullopt;
    for (int32_t w = v + 1; w < n; ++w)
      if (comp[v] == comp[w] && !tau.gaifman_adjacent(v, w)) return std::nullopt;
  }
  std::map<int64_t, int64_t> counts;
  if (comps == 0)
    counts[1] = 1;  // the centre alone is a maximal clique
  else
    for (int32_t c = 0; c < comps; ++c) counts[size[c] + 1]++;
  return counts;
}

TesterOutcome regularity_tester(const Oracle& o, const Ball& tau, double epsilon,
                                const TesterOverrides& ov) {
  require(epsilon > 0 && epsilon <= 1, "regularity_tester: epsilon in (0,1]");
  auto counts_opt = maxcl_of_ball(tau);
  if (!counts_opt)
    throw std::invalid_argument(
        "regularity_tester: the 1-type must be a disjoint union of cliques "
        "through the centre");
  const auto counts = *counts_opt;
  const int64_t d = o.degree_bound();

  FrameworkParams p;
  p.r = 1;
  p.caps.max_members = std::max<int64_t>(40, tau.n() + 8);
  p.seed = ov.seed;
  p.t_override = ov.t;
  p.lambda = epsilon / (20.0 * std::pow(double(d), 6.0));
  p.n0 = int64_t(20.0 * std::pow(double(d), 8.0));
  if (ov.lambda) p.lambda = *ov.lambda;
  if (ov.n0) p.n0 = *ov.n0;

  // cliques in C_d have up to d+1 vertices, so the congruence gate runs to d+1
  p.size_excluded = [counts, d](int64_t n) {
    for (int64_t i = 1; i <= d + 1; ++i) {
      auto it = counts.find(i);
      int64_t c = it == counts.end() ? 0 : it->second;
      if ((c * n) % i != 0) return true;
    }
    return false;
  };
  auto target = canonical_type(tau);
  p.forbidden = [target](const BallType& t) { return t != target; };
  return framework_tester(o, p);
}

namespace {

// induced-substructure containment of `pattern` inside a ball
bool ball_contains_pattern(const Ball& ball, const Structure& pattern) {
  const int32_t np = int32_t(pattern.n());
  if (np > ball.n()) return false;
  std::vector<int32_t> map(np, -1);
  std::vector<char> used(ball.n(), 0);
  std::function<bool(int32_t)> go = [&](int32_t v) -> bool {
    if (v == np) return true;
    for (int32_t w = 0; w < int32_t(ball.n()); ++w) {
      if (used[w]) continue;
      map[v] = w;
      used[w] = 1;
      bool ok = true;
      // induced-exactness over the mapped prefix
      for (size_t s = 0; s < pattern.sig().symbols.size() && ok; ++s) {
        const int ar = pattern.sig().symbols[s].arity;
        if (ar != 2) continue;
        for (int32_t a = 0; a <= v && ok; ++a)
          for (int32_t b = 0; b <= v && ok; ++b) {
            if (a != v && b != v) continue;
            bool want = pattern.has_pair(int(s), a, b);
            bool have = ball.has_local_pair(int(s), map[a], map[b]);
            if (want != have) ok = false;
          }
      }
      if (ok && go(v + 1)) return true;
      used[w] = 0;
      map[v] = -1;
    }
    return false;
  };
  return go(0);
}

}  // namespace

TesterOutcome substructure_freeness_tester(const Oracle& o, const Structure& pattern,
                                           double epsilon, uint64_t seed) {
  require(epsilon > 0 && epsilon <= 1, "substructure tester: epsilon in (0,1]");
  require(pattern.n() >= 1 && pattern.n() <= 6,
          "substructure tester: pattern must have 1..6 elements");
  // Gaifman diameter; the pattern must be connected
  SimpleGraph pg = gaifman(pattern);
  int32_t r = 0;
  for (int64_t v = 0; v < pg.n(); ++v) {
    std::vector<int32_t> dist(pg.n(), -1);
    std::queue<int64_t> q;
    dist[v] = 0;
    q.push(v);
    while (!q.empty()) {
      int64_t u = q.front();
      q.pop();
      for (int64_t i = 0; i < pg.degree(u); ++i) {
        int64_t w = pg.row(u)[i];
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          q.push(w);
        }
      }
    }
    for (int64_t w = 0; w < pg.n(); ++w) {
      require(dist[w] >= 0,
              "substructure tester: pattern Gaifman graph must be connected");
      r = std::max(r, dist[w]);
    }
  }
  if (pattern.n() == 1) r = 0;

  o.reset_queries();
  TesterOutcome out;
  const int64_t n = o.size();
  const int64_t d = std::max<int64_t>(1, o.degree_bound());
  const double c = 3.0 * double(pattern.n()) * std::pow(double(d), double(r + 1));
  int64_t s = int64_t(std::ceil(c / epsilon));
  out.sample_size = s;
  BallCaps caps;
  caps.max_members = 200;

  out.accept = true;
  if (s >= n) {
    out.reason = "exact-small";
    for (int64_t v = 0; v < n && out.accept; ++v)
      if (ball_contains_pattern(explore_ball(o, v, r, caps), pattern))
        out.accept = false;
  } else {
    out.reason = "clean-sample";
    Rng rng(seed);
    for (int64_t i = 0; i < s; ++i) {
      int64_t v = int64_t(rng.below(uint64_t(n)));
      if (ball_contains_pattern(explore_ball(o, v, r, caps), pattern)) {
        out.accept = false;
        out.reason = "sampled-forbidden";
        break;
      }
    }
  }
  out.queries = o.queries();
  return out;
}

// ---------------------------------------------------------------------------
// maxcl

namespace {

void bron_kerbosch(const SimpleGraph& g, std::vector<int64_t>& r,
                   std::vector<int64_t> p, std::vector<int64_t> x,
                   std::map<int64_t, int64_t>& counts) {
  if (p.empty() && x.empty()) {
    counts[int64_t(r.size())]++;
    return;
  }
  auto p_copy = p;
  for (int64_t v : p_copy) {
    std::vector<int64_t> p2, x2;
    for (int64_t w : p)
      if (w != v && g.adjacent(v, w)) p2.push_back(w);
    for (int64_t w : x)
      if (g.adjacent(v, w)) x2.push_back(w);
    r.push_back(v);
    bron_kerbosch(g, r, std::move(p2), std::move(x2), counts);
    r.pop_back();
    p.erase(std::find(p.begin(), p.end(), v));
    x.push_back(v);
  }
}

}  // namespace

std::map<int64_t, int64_t> maxcl(const SimpleGraph& g, int64_t v) {
  require(v >= 0 && v < g.n(), "maxcl: vertex out of range");
  require(g.degree(v) <= 24, "maxcl: degree too large for clique enumeration");
  std::vector<int64_t> r{v}, p, x;
  for (int64_t i = 0; i < g.degree(v); ++i) p.push_back(g.row(v)[i]);
  std::map<int64_t, int64_t> counts;
  bron_kerbosch(g, r, std::move(p), std::move(x), counts);
  return counts;
}

// ---------------------------------------------------------------------------
// Farness ground truth

namespace {

std::vector<std::pair<int32_t, int32_t>> edge_slots(int64_t n) {
  std::vector<std::pair<int32_t, int32_t>> slots;
  for (int32_t u = 0; u < n; ++u)
    for (int32_t v = u + 1; v < n; ++v) slots.push_back({u, v});
  return slots;
}

uint32_t graph_mask(const SimpleGraph& g,
                    const std::vector<std::pair<int32_t, int32_t>>& slots) {
  uint32_t mask = 0;
  for (size_t i = 0; i < slots.size(); ++i)
    if (g.adjacent(slots[i].first, slots[i].second)) mask |= uint32_t(1) << i;
  return mask;
}

SimpleGraph graph_from_mask(int64_t n, uint32_t mask,
                            const std::vector<std::pair<int32_t, int32_t>>& slots) {
  SimpleGraph g(n);
  for (size_t i = 0; i < slots.size(); ++i)
    if ((mask >> i) & 1) g.add_edge(slots[i].first, slots[i].second);
  g.finalize();
  return g;
}

bool mask_degree_ok(int64_t n, uint32_t mask, int64_t d,
                    const std::vector<std::pair<int32_t, int32_t>>& slots) {
  std::vector<int64_t> deg(n, 0);
  for (size_t i = 0; i < slots.size(); ++i)
    if ((mask >> i) & 1) {
      if (++deg[slots[i].first] > d) return false;
      if (++deg[slots[i].second] > d) return false;
    }
  return true;
}

}  // namespace

FarnessResult graph_farness(const SimpleGraph& g, int64_t d, double epsilon,
                            const std::function<bool(const SimpleGraph&)>& property) {
  require(g.n() <= 7, "graph_farness: n must be <= 7");
  auto slots = edge_slots(g.n());
  uint32_t self = graph_mask(g, slots);
  FarnessResult out;
  out.budget = int64_t(epsilon * double(d) * double(g.n()));
  int64_t best = -1;
  for (uint32_t mask = 0; mask < (uint32_t(1) << slots.size()); ++mask) {
    int64_t dist = __builtin_popcount(mask ^ self);
    if (dist > out.budget) continue;
    if (best >= 0 && dist >= best) continue;
    if (!mask_degree_ok(g.n(), mask, d, slots)) continue;
    if (property(graph_from_mask(g.n(), mask, slots))) best = dist;
  }
  out.far = best < 0;
  out.distance = best;
  return out;
}

FarnessResult graph_farness_bfs(const SimpleGraph& g, int64_t d, double epsilon,
                                const std::function<bool(const SimpleGraph&)>& property) {
  require(g.n() <= 7, "graph_farness_bfs: n must be <= 7");
  auto slots = edge_slots(g.n());
  uint32_t self = graph_mask(g, slots);
  FarnessResult out;
  out.budget = int64_t(epsilon * double(d) * double(g.n()));
  std::unordered_set<uint32_t> visited{self};
  std::vector<uint32_t> frontier{self};
  for (int64_t layer = 0; layer <= out.budget; ++layer) {
    for (uint32_t mask : frontier) {
      if (mask_degree_ok(g.n(), mask, d, slots) &&
          property(graph_from_mask(g.n(), mask, slots))) {
        out.far = false;
        out.distance = layer;
        return out;
      }
    }
    if (layer == out.budget) break;
    std::vector<uint32_t> next;
    for (uint32_t mask : frontier)
      for (size_t i = 0; i < slots.size(); ++i) {
        uint32_t m2 = mask ^ (uint32_t(1) << i);
        if (visited.insert(m2).second) next.push_back(m2);
      }
    frontier = std::move(next);
  }
  out.far = true;
  out.distance = -1;
  return out;
}

FarnessResult structure_farness(const Structure& a, int64_t d, double epsilon,
                                const std::function<bool(const Structure&)>& property) {
  FarnessResult out;
  out.budget = int64_t(epsilon * double(d) * double(a.n()));
  // all (symbol, tuple) flip slots
  std::vector<std::pair<int, std::vector<int32_t>>> slots;
  for (size_t s = 0; s < a.sig().symbols.size(); ++s) {
    const int ar = a.sig().symbols[s].arity;
    int64_t cells = 1;
    for (int z = 0; z < ar; ++z) cells *= a.n();
    std::vector<int32_t> t(ar);
    for (int64_t idx = 0; idx < cells; ++idx) {
      int64_t rest = idx;
      for (int z = ar - 1; z >= 0; --z) {
        t[z] = int32_t(rest % a.n());
        rest /= a.n();
      }
      slots.push_back({int(s), t});
    }
  }
  require(int64_t(slots.size()) <= 200,
          "structure_farness: too many tuple slots for exhaustive search");

  auto key_of = [&](const Structure& s) {
    std::string key;
    for (size_t sym = 0; sym < s.sig().symbols.size(); ++sym) {
      for (int32_t v : s.flat(int(sym))) key += std::to_string(v) + ",";
      key += ";";
    }
    return key;
  };
  std::set<std::string> visited{key_of(a)};
  std::vector<Structure> frontier{a};
  for (int64_t layer = 0; layer <= out.budget; ++layer) {
    for (const auto& s : frontier)
      if (s.max_degree() <= d && property(s)) {
        out.far = false;
        out.distance = layer;
        return out;
      }
    if (layer == out.budget) break;
    std::vector<Structure> next;
    for (const auto& s : frontier)
      for (const auto& [sym, t] : slots) {
        Structure s2 = s;
        if (s2.has_tuple(sym, t)) {
          s2.remove_tuple(sym, t);
        } else {
          s2.add_tuple(sym, t);
          s2.finalize();
        }
        if (visited.insert(key_of(s2)).second) next.push_back(std::move(s2));
      }
    frontier = std::move(next);
  }
  out.far = true;
  out.distance = -1;
  return out;
}

SimpleGraph random_regular_simple_graph(int64_t n, int32_t d, uint64_t seed) {
  require(n >= d + 1 && (n * d) % 2 == 0,
          "random_regular_simple_graph: need n > d and n*d even");
  Rng rng(seed);
  for (int attempt = 0; attempt < 2000; ++attempt) {
    std::vector<int64_t> stubs;
    for (int64_t v = 0; v < n; ++v)
      for (int32_t i = 0; i < d; ++i) stubs.push_back(v);
    rng.shuffle(stubs);
    std::set<std::pair<int64_t, int64_t>> edges;
    bool ok = true;
    for (size_t i = 0; i < stubs.size() && ok; i += 2) {
      int64_t u = stubs[i], v = stubs[i + 1];
      if (u == v) ok = false;
      if (ok && !edges.insert({std::min(u, v), std::max(u, v)}).second) ok = false;
    }
    if (!ok) continue;
    SimpleGraph g(n);
    for (auto [u, v] : edges) g.add_edge(u, v);
    g.finalize();
    return g;
  }
  throw std::runtime_error("random_regular_simple_graph: too many rejections");
}

Ball ball_from_graph(const SimpleGraph& g, int r) {
  GraphOracle o(g);
  return explore_ball(o, 0, r, BallCaps{.max_members = g.n() + 1});
}

}  // namespace ell
