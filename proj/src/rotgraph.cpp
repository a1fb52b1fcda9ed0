#include "ell/rotgraph.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "ell/util.hpp"

namespace ell {

int64_t RotationGraph::loop_slots() const {
  int64_t c = 0;
  for (int32_t v = 0; v < n; ++v)
    for (int32_t i = 0; i < degree; ++i)
      if (at(v, i).first == v) ++c;
  return c;
}

std::optional<RotViolation> validate(const RotationGraph& g) {
  if (g.n < 0 || g.degree < 0 || g.rot.size() != size_t(g.n) * g.degree)
    return RotViolation{-1, -1, "rotation table size does not match n*degree"};
  for (int32_t v = 0; v < g.n; ++v) {
    for (int32_t i = 0; i < g.degree; ++i) {
      auto [w, j] = g.at(v, i);
      if (w < 0 || w >= g.n || j < 0 || j >= g.degree) {
        std::ostringstream os;
        os << "slot (" << v << "," << i << ") maps out of range to (" << w
           << "," << j << ")";
        return RotViolation{v, i, os.str()};
      }
      auto [v2, i2] = g.at(w, j);
      if (v2 != v || i2 != i) {
        std::ostringstream os;
        os << "not self-inverse at (" << v << "," << i << "): maps to (" << w
           << "," << j << ") which maps to (" << v2 << "," << i2 << ")";
        return RotViolation{v, i, os.str()};
      }
    }
  }
  return std::nullopt;
}

void validate_or_throw(const RotationGraph& g, const std::string& what) {
  if (auto v = validate(g))
    throw std::invalid_argument(what + ": invalid rotation map: " + v->message);
}

RotationGraph square(const RotationGraph& g) {
  validate_or_throw(g, "square");
  const int32_t d = g.degree;
  RotationGraph s = RotationGraph::empty(g.n, d * d);
  for (int32_t u = 0; u < g.n; ++u) {
    for (int32_t k1 = 0; k1 < d; ++k1) {
      auto [v, l1] = g.at(u, k1);
      for (int32_t k2 = 0; k2 < d; ++k2) {
        auto [w, l2] = g.at(v, k2);
        s.set(u, k1 * d + k2, w, l2 * d + l1);
      }
    }
  }
  return s;
}

RotationGraph zigzag(const RotationGraph& g1, const RotationGraph& g2,
                     const std::vector<int32_t>* relabel) {
  validate_or_throw(g1, "zigzag(g1)");
  validate_or_throw(g2, "zigzag(g2)");
  if (g2.n != g1.degree)
    throw std::invalid_argument(
        "zigzag: g2 must have exactly g1.degree vertices (got " +
        std::to_string(g2.n) + " vs D1=" + std::to_string(g1.degree) + ")");
  std::vector<int32_t> ident;
  if (relabel) {
    require(int32_t(relabel->size()) == g1.degree,
            "zigzag: relabel size must equal g1.degree");
    ident = *relabel;
  } else {
    ident.resize(g1.degree);
    std::iota(ident.begin(), ident.end(), 0);
  }
  std::vector<int32_t> inv(g1.degree, -1);
  for (int32_t p = 0; p < g1.degree; ++p) {
    require(ident[p] >= 0 && ident[p] < g2.n && inv[ident[p]] == -1,
            "zigzag: relabel must be a bijection");
    inv[ident[p]] = p;
  }

  const int32_t d1 = g1.degree, d2 = g2.degree;
  RotationGraph z = RotationGraph::empty(int64_t(g1.n) * d1 <= INT32_MAX
                                             ? g1.n * d1
                                             : throw std::invalid_argument(
                                                   "zigzag: result too large"),
                                         d2 * d2);
  for (int32_t v = 0; v < g1.n; ++v) {
    for (int32_t k = 0; k < d1; ++k) {
      for (int32_t i = 0; i < d2; ++i) {
        auto [k2v, ip] = g2.at(ident[k], i);  // ROT_G2(k, i) = (k', i')
        int32_t kp = inv[k2v];
        auto [w, lp] = g1.at(v, kp);  // ROT_G1(v, k') = (w, l')
        for (int32_t j = 0; j < d2; ++j) {
          auto [lv, jp] = g2.at(ident[lp], j);  // ROT_G2(l', j) = (l, j')
          int32_t l = inv[lv];
          z.set(v * d1 + k, i * d2 + j, w * d1 + l, jp * d2 + ip);
        }
      }
    }
  }
  return z;
}

namespace {

// Column-normalized adjacency counts: a[v][w] = #{i : rot(v,i).first == w}.
Eigen::MatrixXd normalized_adjacency(const RotationGraph& g) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(g.n, g.n);
  for (int32_t v = 0; v < g.n; ++v)
    for (int32_t i = 0; i < g.degree; ++i) m(g.at(v, i).first, v) += 1.0;
  m /= double(g.degree);
  return m;
}

struct MatVec {
  const RotationGraph* g;
  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (int32_t v = 0; v < g->n; ++v)
      for (int32_t i = 0; i < g->degree; ++i)
        y[g->at(v, i).first] += x[v];
    double inv = 1.0 / g->degree;
    for (auto& t : y) t *= inv;
  }
};

// Dominant eigenvalue of op (PSD by construction below) via power iteration.
// op(x) must be symmetric with nonnegative spectrum.
template <typename Op>
std::pair<double, int64_t> power_dominant(int32_t n, const Op& op, double tol,
                                          int64_t max_iter) {
  std::vector<double> x(n), y(n);
  Rng rng(0x5eedULL);
  for (auto& t : x) t = rng.unit() - 0.5;
  double norm = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
  for (auto& t : x) t /= norm;
  double prev = 0.0;
  int64_t it = 0;
  for (; it < max_iter; ++it) {
    op(x, y);
    double r = std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
    norm = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
    if (norm < 1e-300) return {0.0, it};
    for (int32_t i = 0; i < n; ++i) x[i] = y[i] / norm;
    if (it > 8 && std::abs(r - prev) < tol) return {r, it};
    prev = r;
  }
  return {prev, it};
}

}  // namespace

SpectralReport spectrum(const RotationGraph& g, const SpectrumOptions& opt) {
  validate_or_throw(g, "spectrum");
  require(g.n >= 1, "spectrum: empty graph");
  SpectralReport rep;
  if (g.n == 1) {
    // Single vertex: only eigenvalue is 1.
    rep.lambda2 = 1.0;
    rep.lambdaN = 1.0;
    rep.lambda = 1.0;
    rep.connected = true;
    rep.bipartite = false;
    return rep;
  }
  if (g.n <= opt.dense_limit) {
    Eigen::MatrixXd m = normalized_adjacency(g);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();  // ascending
    rep.lambda2 = ev(g.n - 2);
    rep.lambdaN = ev(0);
  } else {
    rep.dense = false;
    MatVec mv{&g};
    const double n = double(g.n);
    // C = (M + I)/2 deflated by the uniform top eigenvector: eigenvalues
    // (lambda_i + 1)/2 for i >= 2, all in [0,1]; dominant gives lambda2.
    auto opC = [&](const std::vector<double>& x, std::vector<double>& y) {
      double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
      std::vector<double> xd(x);
      for (auto& t : xd) t -= mean;
      mv.apply(xd, y);
      for (size_t i = 0; i < y.size(); ++i) y[i] = 0.5 * (y[i] + xd[i]);
    };
    auto [c, it1] = power_dominant(g.n, opC, opt.tol, opt.max_iterations);
    rep.lambda2 = 2.0 * c - 1.0;
    // D = (I - M)/2: eigenvalues (1 - lambda_i)/2 >= 0; dominant gives lambdaN.
    auto opD = [&](const std::vector<double>& x, std::vector<double>& y) {
      mv.apply(x, y);
      for (size_t i = 0; i < y.size(); ++i) y[i] = 0.5 * (x[i] - y[i]);
    };
    auto [dv, it2] = power_dominant(g.n, opD, opt.tol, opt.max_iterations);
    rep.lambdaN = 1.0 - 2.0 * dv;
    rep.iterations = it1 + it2;
  }
  rep.lambda = std::max(std::abs(rep.lambda2), std::abs(rep.lambdaN));
  rep.connected = rep.lambda2 < 1.0 - opt.threshold_tol;
  rep.bipartite = rep.connected && rep.lambdaN < -1.0 + opt.threshold_tol;
  return rep;
}

int64_t cut_boundary(const RotationGraph& g, const std::vector<int32_t>& s) {
  std::vector<char> in(g.n, 0);
  for (int32_t v : s) {
    require(v >= 0 && v < g.n, "cut_boundary: vertex out of range");
    in[v] = 1;
  }
  int64_t b = 0;
  for (int32_t v : s)
    for (int32_t i = 0; i < g.degree; ++i)
      if (!in[g.at(v, i).first]) ++b;
  return b;
}

CutReport expansion_exhaustive(const RotationGraph& g) {
  validate_or_throw(g, "expansion");
  require(g.n >= 2, "expansion: need at least 2 vertices");
  require(g.n <= 24, "expansion: exhaustive mode requires n <= 24");
  // Neighbor targets as vertex ids only.
  std::vector<int32_t> nbr(size_t(g.n) * g.degree);
  for (int32_t v = 0; v < g.n; ++v)
    for (int32_t i = 0; i < g.degree; ++i)
      nbr[size_t(v) * g.degree + i] = g.at(v, i).first;

  double best_h = std::numeric_limits<double>::infinity();
  uint32_t best_mask = 0;
  int64_t best_b = 0;
  const uint32_t full = uint32_t(1) << g.n;
  const int half = g.n / 2;
  for (uint32_t mask = 1; mask < full; ++mask) {
    int size = __builtin_popcount(mask);
    if (size > half) continue;
    int64_t b = 0;
    uint32_t rest = mask;
    while (rest) {
      int v = __builtin_ctz(rest);
      rest &= rest - 1;
      const int32_t* row = &nbr[size_t(v) * g.degree];
      for (int32_t i = 0; i < g.degree; ++i)
        if (!((mask >> row[i]) & 1)) ++b;
    }
    double h = double(b) / size;
    if (h < best_h) {
      best_h = h;
      best_mask = mask;
      best_b = b;
    }
  }
  CutReport rep;
  rep.h = best_h;
  rep.boundary = best_b;
  rep.exact = true;
  for (int v = 0; v < g.n; ++v)
    if ((best_mask >> v) & 1) rep.witness_set.push_back(v);
  return rep;
}

CutReport expansion_sampled(const RotationGraph& g, int64_t k, uint64_t seed) {
  validate_or_throw(g, "expansion");
  require(g.n >= 2, "expansion: need at least 2 vertices");
  Rng rng(seed);
  CutReport best;
  best.h = std::numeric_limits<double>::infinity();
  auto consider = [&](const std::vector<int32_t>& s) {
    if (s.empty() || int64_t(s.size()) > g.n / 2) return;
    int64_t b = cut_boundary(g, s);
    double h = double(b) / double(s.size());
    if (h < best.h) {
      best.h = h;
      best.boundary = b;
      best.witness_set = s;
    }
  };
  for (int32_t v = 0; v < g.n; ++v) consider({v});
  std::vector<int32_t> perm(g.n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int64_t t = 0; t < k; ++t) {
    rng.shuffle(perm);
    int64_t size = 1 + int64_t(rng.below(uint64_t(g.n / 2)));
    consider(std::vector<int32_t>(perm.begin(), perm.begin() + size));
  }
  best.exact = false;
  return best;
}

std::vector<RotationGraph> build_family(const RotationGraph& h, int m,
                                        int64_t vertex_cap) {
  validate_or_throw(h, "build_family");
  const int64_t D = h.degree;
  require(D >= 2, "build_family: base degree must be >= 2");
  require(int64_t(h.n) == D * D * D * D,
          "build_family: base graph must have D^4 vertices (got " +
              std::to_string(h.n) + ", want " + std::to_string(D * D * D * D) +
              ")");
  require(m >= 1, "build_family: m must be >= 1");
  int64_t size = h.n;
  for (int k = 1; k <= m; ++k) {
    require(size <= vertex_cap, "build_family: vertex cap exceeded at level " +
                                    std::to_string(k));
    if (k < m) size *= h.n;
  }
  std::vector<RotationGraph> fam;
  fam.push_back(square(h));  // G_1 = H^2, degree D^2 on D^4 vertices
  for (int k = 2; k <= m; ++k) fam.push_back(zigzag(square(fam.back()), h));
  return fam;
}

namespace {

RotationGraph matching_rotation(int32_t n, int32_t D, Rng& rng) {
  // Random pairing of the n*D port slots; odd slot count leaves the last
  // shuffled slot as a fixed point (a self-loop).
  std::vector<int64_t> slots(size_t(n) * D);
  std::iota(slots.begin(), slots.end(), 0);
  rng.shuffle(slots);
  RotationGraph g = RotationGraph::empty(n, D);
  size_t pairs = slots.size() / 2;
  for (size_t p = 0; p < pairs; ++p) {
    int64_t a = slots[2 * p], b = slots[2 * p + 1];
    g.set(int32_t(a / D), int32_t(a % D), int32_t(b / D), int32_t(b % D));
    g.set(int32_t(b / D), int32_t(b % D), int32_t(a / D), int32_t(a % D));
  }
  if (slots.size() % 2 == 1) {
    int64_t a = slots.back();
    g.set(int32_t(a / D), int32_t(a % D), int32_t(a / D), int32_t(a % D));
  }
  return g;
}

}  // namespace

RotationGraph random_rotation_graph(int32_t n, int32_t D, uint64_t seed) {
  require(n >= 1 && D >= 1, "random_rotation_graph: need n >= 1, D >= 1");
  Rng rng(seed);
  return matching_rotation(n, D, rng);
}

BaseSearch random_regular_base(int32_t D, uint64_t seed, int trials) {
  require(D >= 2, "random_regular_base: D must be >= 2");
  require(trials >= 1, "random_regular_base: trials must be >= 1");
  const int64_t n64 = int64_t(D) * D * D * D;
  require(n64 <= INT32_MAX, "random_regular_base: D too large");
  const int32_t n = int32_t(n64);
  BaseSearch best;
  best.seed = seed;
  best.trials = trials;
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    RotationGraph g = matching_rotation(n, D, rng);
    double lam = spectrum(g).lambda;
    if (t == 0 || lam < best.lambda) {
      best.graph = std::move(g);
      best.lambda = lam;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Multigraph isomorphism via color refinement + individualization.

namespace {

struct AdjCounts {
  // For each vertex: sorted (neighbor, multiplicity) pairs; self-loop slots
  // recorded as multiplicity toward self.
  std::vector<std::vector<std::pair<int32_t, int32_t>>> rows;

  static AdjCounts from(const RotationGraph& g) {
    AdjCounts a;
    a.rows.resize(g.n);
    for (int32_t v = 0; v < g.n; ++v) {
      std::map<int32_t, int32_t> cnt;
      for (int32_t i = 0; i < g.degree; ++i) cnt[g.at(v, i).first]++;
      a.rows[v].assign(cnt.begin(), cnt.end());
    }
    return a;
  }
};

using Colors = std::vector<int64_t>;

Colors refine(const AdjCounts& a, Colors c) {
  const int32_t n = int32_t(a.rows.size());
  for (int round = 0; round < n; ++round) {
    std::map<std::vector<int64_t>, int64_t> sig_ids;
    Colors next(n);
    for (int32_t v = 0; v < n; ++v) {
      std::vector<int64_t> sig;
      sig.push_back(c[v]);
      std::vector<std::pair<int64_t, int64_t>> nb;
      for (auto [w, m] : a.rows[v]) nb.push_back({c[w], m});
      std::sort(nb.begin(), nb.end());
      for (auto [cc, m] : nb) {
        sig.push_back(cc);
        sig.push_back(m);
      }
      auto it = sig_ids.find(sig);
      if (it == sig_ids.end()) it = sig_ids.emplace(sig, int64_t(sig_ids.size())).first;
      next[v] = it->second;
    }
    bool changed = false;
    {
      // stable iff the partition did not split
      std::map<int64_t, int64_t> m1;
      for (int32_t v = 0; v < n; ++v) {
        auto it = m1.find(c[v]);
        if (it == m1.end())
          m1[c[v]] = next[v];
        else if (it->second != next[v])
          changed = true;
      }
    }
    c = std::move(next);
    if (!changed) break;
  }
  return c;
}

std::map<int64_t, int64_t> color_histogram(const Colors& c) {
  std::map<int64_t, int64_t> h;
  for (auto x : c) h[x]++;
  return h;
}

bool iso_search(const AdjCounts& a, const AdjCounts& b, Colors ca, Colors cb,
                std::vector<int32_t>& map_ab, std::vector<int32_t>& map_ba,
                int64_t& budget);

bool try_extend(const AdjCounts& a, const AdjCounts& b, const Colors& ca,
                const Colors& cb, std::vector<int32_t>& map_ab,
                std::vector<int32_t>& map_ba, int64_t& budget) {
  if (color_histogram(ca) != color_histogram(cb)) return false;
  // If partitions are discrete, check the induced bijection directly.
  const int32_t n = int32_t(a.rows.size());
  std::map<int64_t, std::vector<int32_t>> classes_a, classes_b;
  for (int32_t v = 0; v < n; ++v) classes_a[ca[v]].push_back(v);
  for (int32_t v = 0; v < n; ++v) classes_b[cb[v]].push_back(v);
  int64_t best_size = INT64_MAX;
  int64_t best_color = -1;
  for (auto& [col, vs] : classes_a) {
    if (vs.size() > 1 && int64_t(vs.size()) < best_size) {
      best_size = int64_t(vs.size());
      best_color = col;
    }
  }
  if (best_color < 0) {
    // discrete: candidate bijection by color
    std::vector<int32_t> f(n);
    for (auto& [col, vs] : classes_a) f[vs[0]] = classes_b[col][0];
    for (int32_t v = 0; v < n; ++v) {
      std::vector<std::pair<int32_t, int32_t>> row;
      for (auto [w, m] : a.rows[v]) row.push_back({f[w], m});
      std::sort(row.begin(), row.end());
      if (row != b.rows[f[v]]) return false;
    }
    return true;
  }
  // Individualize: first vertex of the chosen class in a, against each
  // candidate in b.
  int32_t va = classes_a[best_color][0];
  for (int32_t vb : classes_b[best_color]) {
    if (--budget < 0) throw std::runtime_error("multigraph_isomorphic: search budget exceeded");
    Colors ca2 = ca, cb2 = cb;
    int64_t fresh = INT64_MIN;  // will be remapped by refine's re-numbering
    for (auto c : ca) fresh = std::max(fresh, c);
    ca2[va] = fresh + 1;
    cb2[vb] = fresh + 1;
    if (iso_search(a, b, std::move(ca2), std::move(cb2), map_ab, map_ba, budget))
      return true;
  }
  return false;
}

bool iso_search(const AdjCounts& a, const AdjCounts& b, Colors ca, Colors cb,
                std::vector<int32_t>& map_ab, std::vector<int32_t>& map_ba,
                int64_t& budget) {
  ca = refine(a, ca);
  cb = refine(b, cb);
  return try_extend(a, b, ca, cb, map_ab, map_ba, budget);
}

}  // namespace

bool multigraph_isomorphic(const RotationGraph& ga, const RotationGraph& gb) {
  if (ga.n != gb.n || ga.degree != gb.degree) return false;
  AdjCounts a = AdjCounts::from(ga), b = AdjCounts::from(gb);
  Colors ca(ga.n, 0), cb(gb.n, 0);
  std::vector<int32_t> m1, m2;
  int64_t budget = 2000000;
  return iso_search(a, b, std::move(ca), std::move(cb), m1, m2, budget);
}

// ---------------------------------------------------------------------------
// Text format.

void save_rotgraph(std::ostream& os, const RotationGraph& g) {
  os << "rotgraph " << g.n << " " << g.degree << "\n";
  for (int32_t v = 0; v < g.n; ++v)
    for (int32_t i = 0; i < g.degree; ++i) {
      auto [w, j] = g.at(v, i);
      os << v << " " << i << " " << w << " " << j << "\n";
    }
}

RotationGraph load_rotgraph(std::istream& is) {
  std::string tag;
  int64_t n = -1, d = -1;
  if (!(is >> tag >> n >> d) || tag != "rotgraph")
    throw std::runtime_error("load_rotgraph: bad header (want 'rotgraph <n> <D>')");
  require(n >= 0 && d >= 0 && n <= INT32_MAX && d <= INT32_MAX,
          "load_rotgraph: bad dimensions");
  RotationGraph g = RotationGraph::empty(int32_t(n), int32_t(d));
  std::vector<char> seen(size_t(n) * d, 0);
  int64_t v, i, w, j;
  while (is >> v >> i >> w >> j) {
    if (v < 0 || v >= n || i < 0 || i >= d)
      throw std::runtime_error("load_rotgraph: slot out of range");
    if (seen[size_t(v) * d + i])
      throw std::runtime_error("load_rotgraph: duplicate slot (" +
                               std::to_string(v) + "," + std::to_string(i) + ")");
    seen[size_t(v) * d + i] = 1;
    g.set(int32_t(v), int32_t(i), int32_t(w), int32_t(j));
  }
  for (size_t k = 0; k < seen.size(); ++k)
    if (!seen[k])
      throw std::runtime_error("load_rotgraph: missing slot (" +
                               std::to_string(k / d) + "," +
                               std::to_string(k % d) + ")");
  if (auto viol = validate(g))
    throw std::runtime_error("load_rotgraph: " + viol->message);
  return g;
}

void save_rotgraph_file(const std::string& path, const RotationGraph& g) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  save_rotgraph(os, g);
}

RotationGraph load_rotgraph_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  return load_rotgraph(is);
}

RotationGraph restrict_component(const RotationGraph& g,
                                 const std::vector<int32_t>& vertices) {
  std::vector<int32_t> local(g.n, -1);
  for (size_t k = 0; k < vertices.size(); ++k) local[vertices[k]] = int32_t(k);
  RotationGraph r = RotationGraph::empty(int32_t(vertices.size()), g.degree);
  for (size_t k = 0; k < vertices.size(); ++k) {
    for (int32_t i = 0; i < g.degree; ++i) {
      auto [w, j] = g.at(vertices[k], i);
      require(local[w] >= 0,
              "restrict_component: vertex set not closed under rotation map");
      r.set(int32_t(k), i, local[w], j);
    }
  }
  return r;
}

std::vector<std::vector<int32_t>> components(const RotationGraph& g) {
  std::vector<int32_t> comp(g.n, -1);
  std::vector<std::vector<int32_t>> out;
  for (int32_t s = 0; s < g.n; ++s) {
    if (comp[s] >= 0) continue;
    int32_t id = int32_t(out.size());
    out.emplace_back();
    std::vector<int32_t> stack{s};
    comp[s] = id;
    while (!stack.empty()) {
      int32_t v = stack.back();
      stack.pop_back();
      out[id].push_back(v);
      for (int32_t i = 0; i < g.degree; ++i) {
        int32_t w = g.at(v, i).first;
        if (comp[w] < 0) {
          comp[w] = id;
          stack.push_back(w);
        }
      }
    }
    std::sort(out[id].begin(), out[id].end());
  }
  return out;
}

}  // namespace ell
