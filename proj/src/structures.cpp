#include "ell/structures.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "ell/util.hpp"

namespace ell {

// ---------------------------------------------------------------------------
// SimpleGraph

void SimpleGraph::add_edge(int64_t u, int64_t v) {
  require(building_, "SimpleGraph::add_edge: not in building mode");
  require(u >= 0 && u < n_ && v >= 0 && v < n_, "SimpleGraph: vertex out of range");
  require(u != v, "SimpleGraph: self-loops are not allowed");
  pending_.push_back({uint32_t(u), uint32_t(v)});
}

void SimpleGraph::finalize() {
  require(building_, "SimpleGraph::finalize: not in building mode");
  for (auto& [u, v] : pending_)
    if (u > v) std::swap(u, v);
  std::sort(pending_.begin(), pending_.end());
  pending_.erase(std::unique(pending_.begin(), pending_.end()), pending_.end());
  std::vector<int64_t> deg(n_, 0);
  for (auto [u, v] : pending_) {
    deg[u]++;
    deg[v]++;
  }
  offsets_.assign(size_t(n_) + 1, 0);
  for (int64_t i = 0; i < n_; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
  nbrs_.assign(size_t(offsets_[n_]), 0);
  std::vector<int64_t> cur(offsets_.begin(), offsets_.end() - 1);
  for (auto [u, v] : pending_) {
    nbrs_[cur[u]++] = v;
    nbrs_[cur[v]++] = u;
  }
  for (int64_t i = 0; i < n_; ++i)
    std::sort(nbrs_.begin() + offsets_[i], nbrs_.begin() + offsets_[i + 1]);
  pending_.clear();
  pending_.shrink_to_fit();
  building_ = false;
}

bool SimpleGraph::adjacent(int64_t u, int64_t v) const {
  const uint32_t* b = nbrs_.data() + offsets_[u];
  const uint32_t* e = nbrs_.data() + offsets_[u + 1];
  return std::binary_search(b, e, uint32_t(v));
}

void SimpleGraph::prepare(int64_t n, const std::vector<int64_t>& degrees) {
  n_ = n;
  offsets_.assign(size_t(n) + 1, 0);
  for (int64_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + degrees[i];
  nbrs_.assign(size_t(offsets_[n]), 0);
  cursor_.assign(offsets_.begin(), offsets_.end() - 1);
  building_ = false;
}

void SimpleGraph::add_edge_prepared(int64_t u, int64_t v) {
  nbrs_[cursor_[u]++] = uint32_t(v);
  nbrs_[cursor_[v]++] = uint32_t(u);
}

void SimpleGraph::finish_prepared() {
  for (int64_t i = 0; i < n_; ++i) {
    require(cursor_[i] == offsets_[i + 1],
            "SimpleGraph::finish_prepared: degree mismatch at vertex " +
                std::to_string(i));
    std::sort(nbrs_.begin() + offsets_[i], nbrs_.begin() + offsets_[i + 1]);
  }
  cursor_.clear();
  cursor_.shrink_to_fit();
}

void save_graph(std::ostream& os, const SimpleGraph& g) {
  os << "graph " << g.n() << "\n";
  for (int64_t v = 0; v < g.n(); ++v) {
    const uint32_t* r = g.row(v);
    for (int64_t k = 0; k < g.degree(v); ++k)
      if (int64_t(r[k]) > v) os << v << " " << r[k] << "\n";
  }
}

SimpleGraph load_graph(std::istream& is) {
  std::string tag;
  int64_t n = -1;
  if (!(is >> tag >> n) || tag != "graph" || n < 0)
    throw std::runtime_error("load_graph: bad header (want 'graph <n>')");
  SimpleGraph g(n);
  int64_t u, v;
  while (is >> u >> v) g.add_edge(u, v);
  g.finalize();
  return g;
}

void save_graph_file(const std::string& path, const SimpleGraph& g) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  save_graph(os, g);
}

SimpleGraph load_graph_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  return load_graph(is);
}

// ---------------------------------------------------------------------------
// Signature

int Signature::find(const std::string& name) const {
  for (size_t i = 0; i < symbols.size(); ++i)
    if (symbols[i].name == name) return int(i);
  return -1;
}

int Signature::require_symbol(const std::string& name) const {
  int i = find(name);
  if (i < 0) throw std::invalid_argument("unknown relation symbol: " + name);
  return i;
}

namespace {

std::string port_pair_name(int32_t D, int32_t p, int32_t q) {
  // p, q in [D^2] as pairs (p/D, p%D), (q/D, q%D)
  std::ostringstream os;
  os << p / D << "," << p % D << "," << q / D << "," << q % D;
  return os.str();
}

}  // namespace

Signature signature_for(int32_t D) {
  require(D >= 2, "signature_for: D must be >= 2");
  const int32_t D2 = D * D, D4 = D2 * D2;
  Signature sig;
  sig.symbols.reserve(3 * D4 + 1);
  for (int32_t i = 0; i < D2; ++i)
    for (int32_t j = 0; j < D2; ++j)
      sig.symbols.push_back({"E[" + port_pair_name(D, i, j) + "]", 2});
  for (int32_t k = 0; k < D4; ++k)
    sig.symbols.push_back({"F[" + port_pair_name(D, k / D2, k % D2) + "]", 2});
  sig.symbols.push_back({"R", 2});
  for (int32_t k = 0; k < D4; ++k)
    sig.symbols.push_back({"L[" + port_pair_name(D, k / D2, k % D2) + "]", 2});
  return sig;
}

std::optional<SigLayout> layout_of(const Signature& sig) {
  // 3*D^4 + 1 symbols
  int64_t m = int64_t(sig.symbols.size());
  if (m < 4 || (m - 1) % 3 != 0) return std::nullopt;
  int64_t D4 = (m - 1) / 3;
  int32_t D = 2;
  while (int64_t(D) * D * D * D < D4) ++D;
  if (int64_t(D) * D * D * D != D4) return std::nullopt;
  if (sig == signature_for(D)) {
    SigLayout lay;
    lay.D = D;
    lay.D2 = D * D;
    lay.D4 = int32_t(D4);
    lay.e_base = 0;
    lay.f_base = int32_t(D4);
    lay.r_index = int32_t(2 * D4);
    lay.l_base = int32_t(2 * D4 + 1);
    return lay;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Structure

Structure::Structure(Signature sig, int64_t n) : sig_(std::move(sig)), n_(n) {
  require(n >= 0, "Structure: negative universe");
  rels_.resize(sig_.symbols.size());
  dirty_.assign(sig_.symbols.size(), false);
}

void Structure::add_tuple(int sym, const std::vector<int32_t>& t) {
  require(sym >= 0 && sym < int(rels_.size()), "add_tuple: bad symbol");
  require(int(t.size()) == sig_.symbols[sym].arity, "add_tuple: arity mismatch");
  for (int32_t e : t)
    require(e >= 0 && e < n_, "add_tuple: element out of range");
  rels_[sym].insert(rels_[sym].end(), t.begin(), t.end());
  dirty_[sym] = true;
}

namespace {

// View over flat tuple storage for lexicographic chunk operations.
struct ChunkLess {
  int ar;
  const std::vector<int32_t>* flat;
  bool operator()(int64_t a, int64_t b) const {
    return std::lexicographical_compare(flat->begin() + a, flat->begin() + a + ar,
                                        flat->begin() + b, flat->begin() + b + ar);
  }
};

void sort_chunks(std::vector<int32_t>& flat, int ar) {
  int64_t cnt = int64_t(flat.size()) / ar;
  std::vector<int64_t> idx(cnt);
  for (int64_t i = 0; i < cnt; ++i) idx[i] = i * ar;
  std::sort(idx.begin(), idx.end(), ChunkLess{ar, &flat});
  std::vector<int32_t> out;
  out.reserve(flat.size());
  for (int64_t i = 0; i < cnt; ++i) {
    if (i > 0 && std::equal(flat.begin() + idx[i], flat.begin() + idx[i] + ar,
                            flat.begin() + idx[i - 1]))
      continue;  // dedupe
    out.insert(out.end(), flat.begin() + idx[i], flat.begin() + idx[i] + ar);
  }
  flat = std::move(out);
}

}  // namespace

void Structure::finalize() {
  for (size_t s = 0; s < rels_.size(); ++s) {
    if (!dirty_[s]) continue;
    sort_chunks(rels_[s], sig_.symbols[s].arity);
    dirty_[s] = false;
  }
}

bool Structure::has_tuple(int sym, const std::vector<int32_t>& t) const {
  require(!dirty_[sym], "has_tuple: structure not finalized");
  const int ar = sig_.symbols[sym].arity;
  const auto& flat = rels_[sym];
  int64_t lo = 0, hi = int64_t(flat.size()) / ar;
  while (lo < hi) {
    int64_t mid = (lo + hi) / 2;
    auto cmp = std::lexicographical_compare_three_way(
        flat.begin() + mid * ar, flat.begin() + (mid + 1) * ar, t.begin(), t.end());
    if (cmp == std::strong_ordering::less)
      lo = mid + 1;
    else if (cmp == std::strong_ordering::greater)
      hi = mid;
    else
      return true;
  }
  return false;
}

bool Structure::has_pair(int sym, int32_t a, int32_t b) const {
  return has_tuple(sym, {a, b});
}

void Structure::remove_tuple(int sym, const std::vector<int32_t>& t) {
  require(!dirty_[sym], "remove_tuple: structure not finalized");
  const int ar = sig_.symbols[sym].arity;
  auto& flat = rels_[sym];
  for (int64_t off = 0; off + ar <= int64_t(flat.size()); off += ar) {
    if (std::equal(t.begin(), t.end(), flat.begin() + off)) {
      flat.erase(flat.begin() + off, flat.begin() + off + ar);
      return;
    }
  }
  throw std::invalid_argument("remove_tuple: tuple not present");
}

int64_t Structure::tuple_count(int sym) const {
  return int64_t(rels_[sym].size()) / sig_.symbols[sym].arity;
}

int64_t Structure::total_tuples() const {
  int64_t c = 0;
  for (size_t s = 0; s < rels_.size(); ++s) c += tuple_count(int(s));
  return c;
}

int64_t Structure::degree(int32_t a) const {
  int64_t d = 0;
  for (size_t s = 0; s < rels_.size(); ++s) {
    const int ar = sig_.symbols[s].arity;
    const auto& flat = rels_[s];
    for (int64_t off = 0; off < int64_t(flat.size()); off += ar) {
      for (int k = 0; k < ar; ++k)
        if (flat[off + k] == a) {
          ++d;
          break;
        }
    }
  }
  return d;
}

int64_t Structure::degree_occurrence(int32_t a) const {
  int64_t d = 0;
  for (size_t s = 0; s < rels_.size(); ++s)
    for (int32_t e : rels_[s])
      if (e == a) ++d;
  return d;
}

int64_t Structure::max_degree() const {
  std::vector<int64_t> deg(n_, 0);
  for (size_t s = 0; s < rels_.size(); ++s) {
    const int ar = sig_.symbols[s].arity;
    const auto& flat = rels_[s];
    std::vector<int32_t> seen;
    for (int64_t off = 0; off < int64_t(flat.size()); off += ar) {
      seen.assign(flat.begin() + off, flat.begin() + off + ar);
      std::sort(seen.begin(), seen.end());
      seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
      for (int32_t e : seen) deg[e]++;
    }
  }
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

// ---------------------------------------------------------------------------
// StructureIndex

StructureIndex::StructureIndex(const Structure& a) : a_(&a) {
  const auto& sig = a.sig();
  const size_t m = sig.symbols.size();
  inc_.resize(m);
  out2_.resize(m);
  in2_.resize(m);
  for (size_t s = 0; s < m; ++s) {
    const int ar = sig.symbols[s].arity;
    inc_[s].resize(a.n());
    if (ar == 2) {
      out2_[s].resize(a.n());
      in2_[s].resize(a.n());
    }
    const auto& flat = a.flat(int(s));
    for (int64_t off = 0; off < int64_t(flat.size()); off += ar) {
      int32_t prev = -1;
      for (int k = 0; k < ar; ++k) {
        int32_t e = flat[off + k];
        if (e != prev) inc_[s][e].push_back(off);  // dedupe (a,a) incidence
        prev = e;
      }
      if (ar == 2) {
        out2_[s][flat[off]].push_back({flat[off + 1], off});
        in2_[s][flat[off + 1]].push_back({flat[off], off});
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Model construction

namespace {

std::vector<int64_t> level_offsets(int32_t D4, int depth) {
  std::vector<int64_t> off(depth + 2, 0);
  int64_t size = 1;
  for (int m = 0; m <= depth; ++m) {
    off[m + 1] = off[m] + size;
    size *= D4;
  }
  return off;
}

}  // namespace

Structure build_model(const RotationGraph& h, int depth, const ModelCaps& caps) {
  validate_or_throw(h, "build_model");
  const int64_t D = h.degree;
  require(D >= 2 && int64_t(h.n) == D * D * D * D,
          "build_model: base graph must be D-regular on D^4 vertices");
  require(depth >= 1, "build_model: depth must be >= 1");
  const int32_t D2 = int32_t(D * D), D4 = int32_t(D2) * D2;

  auto off = level_offsets(D4, depth);
  const int64_t n = off[depth + 1];

  // Tuple budget: E <= n*D^2 + D^2, F = n-1, L = leaves*D^4, R = 1.
  int64_t leaves = off[depth + 1] - off[depth];
  int64_t budget = n * D2 + D2 + (n - 1) + leaves * int64_t(D4) + 1;
  require(budget <= caps.max_tuples,
          "build_model: tuple cap exceeded (need about " + std::to_string(budget) +
              ", cap " + std::to_string(caps.max_tuples) + ")");
  require(n <= INT32_MAX, "build_model: universe too large");

  Signature sig = signature_for(int32_t(D));
  auto lay = layout_of(sig).value();
  Structure a(std::move(sig), n);

  // Root bookkeeping: R self-loop and the diagonal E self-loops (the identity
  // rotation map on the root's E ports).
  a.add_tuple(lay.r_index, {0, 0});
  for (int32_t i = 0; i < D2; ++i) a.add_tuple(lay.e_sym(i, i), {0, 0});

  // Tree: child k of element (level m, index q) is element off(m+1) + q*D4 + k.
  for (int m = 0; m < depth; ++m) {
    int64_t level_size = off[m + 1] - off[m];
    for (int64_t q = 0; q < level_size; ++q) {
      int32_t parent = int32_t(off[m] + q);
      for (int32_t k = 0; k < D4; ++k)
        a.add_tuple(lay.f_sym(k), {parent, int32_t(off[m + 1] + q * D4 + k)});
    }
  }

  // Leaves: all L_k self-loops.
  for (int64_t q = off[depth]; q < off[depth + 1]; ++q)
    for (int32_t k = 0; k < D4; ++k)
      a.add_tuple(lay.l_sym(k), {int32_t(q), int32_t(q)});

  // Levels m >= 1 realize G_m; element (level m, index v) is vertex v of G_m,
  // consistent with child numbering ((v,k) of the zig-zag product is v*D4+k).
  auto fam = build_family(h, depth, n + 1);
  for (int m = 1; m <= depth; ++m) {
    const RotationGraph& gm = fam[m - 1];
    for (int32_t v = 0; v < gm.n; ++v)
      for (int32_t i = 0; i < D2; ++i) {
        auto [w, j] = gm.at(v, i);
        a.add_tuple(lay.e_sym(i, j),
                    {int32_t(off[m] + v), int32_t(off[m] + w)});
      }
  }
  a.finalize();
  return a;
}

RotationGraph underlying_graph(const Structure& a) {
  auto lay_opt = layout_of(a.sig());
  require(lay_opt.has_value(), "underlying_graph: signature is not signature_for(D)");
  const SigLayout lay = *lay_opt;
  const int32_t D2 = lay.D2, D4 = lay.D4;
  const int32_t deg = 1 + D4 + D2;
  require(a.n() <= INT32_MAX, "underlying_graph: universe too large");
  StructureIndex idx(a);

  auto fail = [](int32_t v, const std::string& why) {
    throw std::runtime_error("underlying_graph: element " + std::to_string(v) +
                             ": " + why);
  };

  RotationGraph u = RotationGraph::empty(int32_t(a.n()), deg);
  for (int32_t v = 0; v < int32_t(a.n()); ++v) {
    // port 0: R self-loop or the unique F-parent
    if (a.has_pair(lay.r_index, v, v)) {
      u.set(v, 0, v, 0);
    } else {
      int32_t parent = -1, pk = -1;
      int count = 0;
      for (int32_t k = 0; k < D4; ++k)
        for (auto [w, offt] : idx.in2(lay.f_sym(k), v)) {
          (void)offt;
          ++count;
          parent = w;
          pk = k;
        }
      if (count != 1) fail(v, "needs exactly one F-parent or an R self-loop");
      u.set(v, 0, parent, 1 + pk);
    }
    // ports 1+k: F-child or L self-loop
    for (int32_t k = 0; k < D4; ++k) {
      const auto& out = idx.out2(lay.f_sym(k), v);
      if (out.size() == 1) {
        u.set(v, 1 + k, out[0].first, 0);
      } else if (out.empty() && a.has_pair(lay.l_sym(k), v, v)) {
        u.set(v, 1 + k, v, 1 + k);
      } else {
        fail(v, "needs exactly one F_k-child or an L_k self-loop (k=" +
                    std::to_string(k) + ")");
      }
    }
    // ports 1+D4+i: E rotation
    for (int32_t i = 0; i < D2; ++i) {
      int32_t tw = -1, tj = -1;
      int count = 0;
      for (int32_t j = 0; j < D2; ++j)
        for (auto [w, offt] : idx.out2(lay.e_sym(i, j), v)) {
          (void)offt;
          ++count;
          tw = w;
          tj = j;
        }
      if (count != 1)
        fail(v, "E-port " + std::to_string(i) + " must have exactly one target");
      u.set(v, 1 + D4 + i, tw, 1 + D4 + tj);
    }
  }
  if (auto viol = validate(u))
    throw std::runtime_error("underlying_graph: result not self-inverse: " +
                             viol->message);
  return u;
}

SimpleGraph gaifman(const Structure& a) {
  SimpleGraph g(a.n());
  for (size_t s = 0; s < a.sig().symbols.size(); ++s) {
    const int ar = a.sig().symbols[s].arity;
    const auto& flat = a.flat(int(s));
    for (int64_t off = 0; off < int64_t(flat.size()); off += ar)
      for (int p = 0; p < ar; ++p)
        for (int q = p + 1; q < ar; ++q)
          if (flat[off + p] != flat[off + q])
            g.add_edge(flat[off + p], flat[off + q]);
  }
  g.finalize();
  return g;
}

Structure restrict_structure(const Structure& a, const std::vector<int>& keep) {
  Structure r(a.sig(), a.n());
  std::vector<bool> keep_mask(a.sig().symbols.size(), false);
  for (int s : keep) {
    require(s >= 0 && s < int(a.sig().symbols.size()), "restrict: unknown symbol");
    keep_mask[s] = true;
  }
  for (size_t s = 0; s < a.sig().symbols.size(); ++s) {
    if (!keep_mask[s]) continue;
    const int ar = a.sig().symbols[s].arity;
    const auto& flat = a.flat(int(s));
    for (int64_t off = 0; off < int64_t(flat.size()); off += ar)
      r.add_tuple(int(s), std::vector<int32_t>(flat.begin() + off,
                                               flat.begin() + off + ar));
  }
  r.finalize();
  return r;
}

std::vector<int> e_symbols(const Signature& sig) {
  auto lay = layout_of(sig);
  require(lay.has_value(), "e_symbols: not a parameter-D signature");
  std::vector<int> out;
  for (int32_t i = 0; i < lay->D2; ++i)
    for (int32_t j = 0; j < lay->D2; ++j) out.push_back(lay->e_sym(i, j));
  return out;
}

std::vector<int> f_symbols(const Signature& sig) {
  auto lay = layout_of(sig);
  require(lay.has_value(), "f_symbols: not a parameter-D signature");
  std::vector<int> out;
  for (int32_t k = 0; k < lay->D4; ++k) out.push_back(lay->f_sym(k));
  return out;
}

// ---------------------------------------------------------------------------
// Edit distance

int64_t edit_distance_exact(const Structure& a, const Structure& b) {
  require(a.sig() == b.sig(), "edit_distance: signature mismatch");
  require(a.n() == b.n(), "edit_distance: exact mode needs equal sizes");
  require(a.n() <= 8, "edit_distance: exact mode needs size <= 8");
  const int32_t n = int32_t(a.n());
  std::vector<int32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  int64_t best = INT64_MAX;
  std::vector<int32_t> mapped;
  do {
    int64_t cost = 0;
    for (size_t s = 0; s < a.sig().symbols.size() && cost < best; ++s) {
      const int ar = a.sig().symbols[s].arity;
      const auto& flat_b = b.flat(int(s));
      int64_t match = 0;
      for (int64_t off = 0; off < int64_t(flat_b.size()); off += ar) {
        mapped.assign(ar, 0);
        for (int k = 0; k < ar; ++k) mapped[k] = perm[flat_b[off + k]];
        if (a.has_tuple(int(s), mapped)) ++match;
      }
      cost += a.tuple_count(int(s)) + b.tuple_count(int(s)) - 2 * match;
    }
    best = std::min(best, cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

int64_t edit_distance_cut_bound(const Structure& a, const Structure& b,
                                const std::vector<int32_t>& s) {
  require(a.n() == b.n(), "cut bound: sizes must match");
  std::vector<char> in(b.n(), 0);
  for (int32_t v : s) {
    require(v >= 0 && v < b.n(), "cut bound: vertex out of range");
    in[v] = 1;
  }
  // b must have no tuples crossing the partition
  for (size_t sym = 0; sym < b.sig().symbols.size(); ++sym) {
    const int ar = b.sig().symbols[sym].arity;
    const auto& flat = b.flat(int(sym));
    for (int64_t off = 0; off < int64_t(flat.size()); off += ar) {
      bool any_in = false, any_out = false;
      for (int k = 0; k < ar; ++k)
        (in[flat[off + k]] ? any_in : any_out) = true;
      require(!(any_in && any_out),
              "cut bound: b has a tuple crossing the partition");
    }
  }
  RotationGraph u = underlying_graph(a);
  return cut_boundary(u, s);
}

Structure disjoint_copies(const Structure& a, int64_t copies, int64_t pad_to_n) {
  require(copies >= 1, "disjoint_copies: copies must be >= 1");
  int64_t n = a.n() * copies;
  if (pad_to_n > 0) {
    require(pad_to_n >= n, "disjoint_copies: pad target smaller than copies");
    n = pad_to_n;
  }
  Structure r(a.sig(), n);
  for (int64_t c = 0; c < copies; ++c) {
    const int32_t base = int32_t(c * a.n());
    for (size_t s = 0; s < a.sig().symbols.size(); ++s) {
      const int ar = a.sig().symbols[s].arity;
      const auto& flat = a.flat(int(s));
      std::vector<int32_t> t(ar);
      for (int64_t off = 0; off < int64_t(flat.size()); off += ar) {
        for (int k = 0; k < ar; ++k) t[k] = flat[off + k] + base;
        r.add_tuple(int(s), t);
      }
    }
  }
  r.finalize();
  return r;
}

// ---------------------------------------------------------------------------
// Model verification

namespace {

struct TreeShape {
  bool ok = false;
  std::string witness;
  std::vector<std::vector<int32_t>> levels;
};

TreeShape tree_shape(const Structure& a, const SigLayout& lay) {
  TreeShape out;
  StructureIndex idx(a);
  const int32_t n = int32_t(a.n());
  // roots: no incoming F
  std::vector<int32_t> roots;
  for (int32_t v = 0; v < n; ++v) {
    bool has_in = false;
    for (int32_t k = 0; k < lay.D4 && !has_in; ++k)
      has_in = !idx.in2(lay.f_sym(k), v).empty();
    if (!has_in) roots.push_back(v);
  }
  if (roots.size() != 1) {
    out.witness = "expected exactly one root, found " + std::to_string(roots.size());
    return out;
  }
  std::vector<int32_t> depth(n, -1);
  std::vector<int32_t> frontier{roots[0]};
  depth[roots[0]] = 0;
  out.levels.push_back(frontier);
  int64_t seen = 1;
  while (!frontier.empty()) {
    std::vector<int32_t> next;
    for (int32_t v : frontier) {
      int64_t child_count = 0;
      for (int32_t k = 0; k < lay.D4; ++k) {
        const auto& outk = idx.out2(lay.f_sym(k), v);
        if (outk.size() > 1) {
          out.witness = "element " + std::to_string(v) + " has multiple F_" +
                        std::to_string(k) + " children";
          return out;
        }
        for (auto [w, offt] : outk) {
          (void)offt;
          if (depth[w] != -1) {
            out.witness = "element " + std::to_string(w) + " reached twice";
            return out;
          }
          depth[w] = depth[v] + 1;
          next.push_back(w);
          ++child_count;
        }
      }
      if (child_count != 0 && child_count != lay.D4) {
        out.witness = "element " + std::to_string(v) + " has " +
                      std::to_string(child_count) + " children, want 0 or " +
                      std::to_string(lay.D4);
        return out;
      }
    }
    if (!next.empty()) out.levels.push_back(next);
    seen += int64_t(next.size());
    frontier = std::move(next);
  }
  if (seen != n) {
    out.witness = "forest: " + std::to_string(n - seen) +
                  " elements unreachable from the root";
    return out;
  }
  // completeness: level sizes D4^m and only the last level childless
  int64_t want = 1;
  for (size_t m = 0; m < out.levels.size(); ++m) {
    if (int64_t(out.levels[m].size()) != want) {
      out.witness = "level " + std::to_string(m) + " has " +
                    std::to_string(out.levels[m].size()) + " elements, want " +
                    std::to_string(want);
      return out;
    }
    want *= lay.D4;
  }
  out.ok = true;
  return out;
}

}  // namespace

RotationGraph level_graph(const Structure& a, int level) {
  auto lay = layout_of(a.sig());
  require(lay.has_value(), "level_graph: not a parameter-D signature");
  TreeShape shape = tree_shape(a, *lay);
  require(shape.ok, "level_graph: not a tree: " + shape.witness);
  require(level >= 1 && level < int(shape.levels.size()), "level_graph: bad level");
  auto verts = shape.levels[level];
  std::sort(verts.begin(), verts.end());
  std::vector<int32_t> local(a.n(), -1);
  for (size_t i = 0; i < verts.size(); ++i) local[verts[i]] = int32_t(i);

  StructureIndex idx(a);
  RotationGraph g = RotationGraph::empty(int32_t(verts.size()), lay->D2);
  for (size_t q = 0; q < verts.size(); ++q) {
    int32_t v = verts[q];
    for (int32_t i = 0; i < lay->D2; ++i) {
      int32_t tw = -1, tj = -1;
      int count = 0;
      for (int32_t j = 0; j < lay->D2; ++j)
        for (auto [w, offt] : idx.out2(lay->e_sym(i, j), v)) {
          (void)offt;
          ++count;
          tw = w;
          tj = j;
        }
      require(count == 1, "level_graph: E-encoding not functional at element " +
                              std::to_string(v));
      require(local[tw] >= 0, "level_graph: E-edge leaves the level at element " +
                                  std::to_string(v));
      g.set(int32_t(q), i, local[tw], tj);
    }
  }
  validate_or_throw(g, "level_graph");
  return g;
}

bool ModelReport::ok() const {
  if (!size_ok || !tree_ok || !degree_ok) return false;
  for (const auto& l : levels)
    if (l.iso_checked && !l.iso_ok) return false;
  return true;
}

ModelReport verify_model(const Structure& a, const RotationGraph& h, int depth,
                         int iso_max_level) {
  auto lay_opt = layout_of(a.sig());
  require(lay_opt.has_value(), "verify_model: not a parameter-D signature");
  const SigLayout lay = *lay_opt;
  ModelReport rep;
  rep.depth = depth;
  rep.size = a.n();
  auto off = level_offsets(lay.D4, depth);
  rep.size_ok = (a.n() == off[depth + 1]);

  TreeShape shape = tree_shape(a, lay);
  rep.tree_ok = shape.ok && int(shape.levels.size()) == depth + 1;
  rep.tree_witness = shape.witness;
  if (shape.ok && int(shape.levels.size()) != depth + 1)
    rep.tree_witness = "tree depth " + std::to_string(shape.levels.size() - 1) +
                       ", want " + std::to_string(depth);

  // Degree law: d = 2D^2 + D^4 + 1 for every element, counting E incidences
  // per direction (an E self-loop tuple counts twice) and F/R/L per tuple.
  const int64_t d = lay.degree_bound();
  rep.degree_ok = true;
  {
    std::vector<int64_t> e_occ(a.n(), 0), frl(a.n(), 0);
    for (size_t s = 0; s < a.sig().symbols.size(); ++s) {
      const auto& flat = a.flat(int(s));
      bool is_e = int(s) >= lay.e_base && int(s) < lay.e_base + lay.D4;
      for (int64_t offt = 0; offt < int64_t(flat.size()); offt += 2) {
        if (is_e) {
          e_occ[flat[offt]]++;
          e_occ[flat[offt + 1]]++;
        } else {
          frl[flat[offt]]++;
          if (flat[offt + 1] != flat[offt]) frl[flat[offt + 1]]++;
        }
      }
    }
    for (int64_t v = 0; v < a.n(); ++v) {
      if (e_occ[v] + frl[v] != d) {
        rep.degree_ok = false;
        rep.degree_witness = "element " + std::to_string(v) + " has degree " +
                             std::to_string(e_occ[v] + frl[v]) + // E per direction
                             ", want " + std::to_string(d);
        break;
      }
    }
  }

  if (rep.tree_ok) {
    auto fam = build_family(h, depth, a.n() + 1);
    for (int m = 1; m <= depth; ++m) {
      LevelReport lr;
      lr.size = int64_t(shape.levels[m].size());
      if (m <= iso_max_level) {
        lr.iso_checked = true;
        RotationGraph lg = level_graph(a, m);
        lr.iso_ok = multigraph_isomorphic(lg, fam[m - 1]);
      }
      rep.levels.push_back(lr);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Text format

void save_structure(std::ostream& os, const Structure& a) {
  os << "structure " << a.n() << "\n";
  for (const auto& sym : a.sig().symbols)
    os << "sig " << sym.name << " " << sym.arity << "\n";
  for (size_t s = 0; s < a.sig().symbols.size(); ++s) {
    const int ar = a.sig().symbols[s].arity;
    const auto& flat = a.flat(int(s));
    for (int64_t off = 0; off < int64_t(flat.size()); off += ar) {
      os << a.sig().symbols[s].name;
      for (int k = 0; k < ar; ++k) os << " " << flat[off + k];
      os << "\n";
    }
  }
}

Structure load_structure(std::istream& is, const Signature* sig) {
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("load_structure: empty input");
  std::istringstream head(line);
  std::string tag;
  int64_t n = -1;
  if (!(head >> tag >> n) || tag != "structure" || n < 0)
    throw std::runtime_error("load_structure: bad header (want 'structure <n>')");

  Signature parsed;
  std::vector<std::pair<std::string, std::vector<int32_t>>> tuples;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string name;
    ls >> name;
    if (name == "sig") {
      std::string sym_name;
      int arity;
      if (!(ls >> sym_name >> arity) || arity < 1)
        throw std::runtime_error("load_structure: bad sig line: " + line);
      parsed.symbols.push_back({sym_name, arity});
      continue;
    }
    std::vector<int32_t> t;
    int64_t e;
    while (ls >> e) {
      if (e < 0 || e >= n)
        throw std::runtime_error("load_structure: element out of range in: " + line);
      t.push_back(int32_t(e));
    }
    tuples.push_back({name, std::move(t)});
  }
  const Signature& use = sig ? *sig : parsed;
  if (use.symbols.empty())
    throw std::runtime_error(
        "load_structure: no signature (pass one or add 'sig' lines)");
  Structure a(use, n);
  for (auto& [name, t] : tuples) {
    int s = use.find(name);
    if (s < 0) throw std::runtime_error("load_structure: unknown symbol " + name);
    if (int(t.size()) != use.symbols[s].arity)
      throw std::runtime_error("load_structure: arity mismatch for " + name);
    a.add_tuple(s, t);
  }
  a.finalize();
  return a;
}

void save_structure_file(const std::string& path, const Structure& a) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  save_structure(os, a);
}

Structure load_structure_file(const std::string& path, const Signature* sig) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  return load_structure(is, sig);
}

}  // namespace ell
