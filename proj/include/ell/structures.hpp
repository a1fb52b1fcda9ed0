#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ell/rotgraph.hpp"
#include "ell/simplegraph.hpp"

namespace ell {

struct Signature {
  struct Symbol {
    std::string name;
    int arity = 2;
    bool operator==(const Symbol&) const = default;
  };
  std::vector<Symbol> symbols;

  int find(const std::string& name) const;  // -1 if absent
  int require_symbol(const std::string& name) const;
  bool operator==(const Signature&) const = default;
};

// Signature for parameter D: E_{i,j} for i,j in [D]^2 (row-major over (i,j)),
// then F_k for k in ([D]^2)^2, then R, then L_k. All binary; 3*D^4 + 1 symbols.
// Ports p in [D^2] are identified with pairs (p/D, p%D); symbol names spell
// the pair digits, e.g. E[0,1,1,0] is E_{(0,1),(1,0)}.
Signature signature_for(int32_t D);

struct SigLayout {
  int32_t D = 0;
  int32_t D2 = 0;  // D^2
  int32_t D4 = 0;  // D^4
  int e_base = 0;  // symbol index of E_{i,j} is e_base + i*D2 + j
  int f_base = 0;
  int r_index = 0;
  int l_base = 0;
  int degree_bound() const { return 2 * D2 + D4 + 1; }  // d = 2D^2 + D^4 + 1
  int e_sym(int32_t i, int32_t j) const { return e_base + i * D2 + j; }
  int f_sym(int32_t k) const { return f_base + k; }
  int l_sym(int32_t k) const { return l_base + k; }
};

// Recovers the layout (and D) from a signature produced by signature_for.
std::optional<SigLayout> layout_of(const Signature& sig);

// Finite relational structure: universe {0..n-1} plus one tuple set per
// symbol. Tuples are stored flat and sorted; relations are sets.
class Structure {
 public:
  Structure() = default;
  Structure(Signature sig, int64_t n);

  const Signature& sig() const { return sig_; }
  int64_t n() const { return n_; }

  void add_tuple(int sym, const std::vector<int32_t>& t);
  void remove_tuple(int sym, const std::vector<int32_t>& t);
  bool has_tuple(int sym, const std::vector<int32_t>& t) const;
  bool has_pair(int sym, int32_t a, int32_t b) const;  // arity-2 fast path
  void finalize();  // sort + dedupe; must be called after bulk adds

  int64_t tuple_count(int sym) const;
  int64_t total_tuples() const;
  int arity(int sym) const { return sig_.symbols[sym].arity; }
  // Iteration: flat array of tuples for symbol, arity-strided.
  const std::vector<int32_t>& flat(int sym) const { return rels_[sym]; }

  // Number of tuples containing a, one count per (symbol, tuple).
  int64_t degree(int32_t a) const;
  // Tuple incidences counted per occurrence (a tuple (a,a) counts twice).
  int64_t degree_occurrence(int32_t a) const;
  int64_t max_degree() const;

  bool operator==(const Structure&) const = default;

 private:
  Signature sig_;
  int64_t n_ = 0;
  std::vector<std::vector<int32_t>> rels_;  // per symbol, flat, sorted
  std::vector<bool> dirty_;
};

// Per-element incidence index; build once over a finalized structure.
class StructureIndex {
 public:
  explicit StructureIndex(const Structure& a);
  const Structure& structure() const { return *a_; }
  // Tuples of symbol `sym` containing element `a`, as flat offsets into
  // a.flat(sym) (offset = tuple start).
  const std::vector<int64_t>& incident(int sym, int32_t a) const {
    return inc_[sym][a];
  }
  // Arity-2 helpers: out/in neighbor lists (pairs of (other, tuple offset)).
  const std::vector<std::pair<int32_t, int64_t>>& out2(int sym, int32_t a) const {
    return out2_[sym][a];
  }
  const std::vector<std::pair<int32_t, int64_t>>& in2(int sym, int32_t a) const {
    return in2_[sym][a];
  }

 private:
  const Structure* a_;
  std::vector<std::vector<std::vector<int64_t>>> inc_;
  std::vector<std::vector<std::vector<std::pair<int32_t, int64_t>>>> out2_;
  std::vector<std::vector<std::vector<std::pair<int32_t, int64_t>>>> in2_;
};

struct ModelCaps {
  int64_t max_tuples = 1000000;  // default cap, overridable
};

// Canonical model of the zig-zag formula for base graph h (D-regular on D^4
// vertices) with `depth` tree levels below the root. Elements are numbered
// breadth-first, root = 0; children ordered by parent then child relation
// index. Level m >= 1 realizes G_m from build_family(h, depth); the root
// carries (r,r) in R and the diagonal self-loops (r,r) in E_{i,i}; leaves
// carry all D^4 L_k self-loops.
Structure build_model(const RotationGraph& h, int depth,
                      const ModelCaps& caps = {});

// The (D^2+D^4+1)-regular underlying rotation graph of a model; requires the
// tree and rotation-map conditions to hold (throws naming the offending
// element otherwise). Ports: 0 = parent/R, 1+k = child/L_k, 1+D^4+i = E port.
RotationGraph underlying_graph(const Structure& a);

// Simple graph on the universe joining elements that share a tuple (ignores
// self-loop tuples).
SimpleGraph gaifman(const Structure& a);

// Same universe, only the kept relations.
Structure restrict_structure(const Structure& a, const std::vector<int>& keep_symbols);
std::vector<int> e_symbols(const Signature& sig);
std::vector<int> f_symbols(const Signature& sig);

// Exact edit distance: minimum over bijections A->B of the total symmetric
// difference. Requires |A| == |B| <= 8.
int64_t edit_distance_exact(const Structure& a, const Structure& b);
// Certified lower bound for the witness experiment: the boundary of S in the
// underlying graph of a. Requires b (same universe size) to have no tuples
// crossing S and its complement; checked.
int64_t edit_distance_cut_bound(const Structure& a, const Structure& b,
                                const std::vector<int32_t>& s);

// copies * a, plus pad_to_n - copies*|A| isolated elements (pad_to_n == 0
// means no padding).
Structure disjoint_copies(const Structure& a, int64_t copies, int64_t pad_to_n);

struct LevelReport {
  int64_t size = 0;
  bool iso_checked = false;
  bool iso_ok = false;
};

struct ModelReport {
  int depth = 0;
  int64_t size = 0;
  bool size_ok = false;
  std::vector<LevelReport> levels;  // index m-1 for level m
  bool tree_ok = false;
  std::string tree_witness;
  bool degree_ok = false;  // E per occurrence + F/R/L per tuple == d, everywhere
  std::string degree_witness;
  bool ok() const;
};

// Verifies sizes, tree shape, the degree law and level isomorphisms (levels
// m <= iso_max_level checked against build_family graphs by multigraph iso).
ModelReport verify_model(const Structure& a, const RotationGraph& h, int depth,
                         int iso_max_level = 2);

// The induced E-level graph of a model: vertices = elements of tree level m
// (by BFS numbering), rotation map read off the E relations.
RotationGraph level_graph(const Structure& a, int level);

// Structure text format: "structure <n>" header, optional "sig <name> <arity>"
// lines, then one "<symbol-name> <e1> <e2> ..." line per tuple.
void save_structure(std::ostream& os, const Structure& a);
Structure load_structure(std::istream& is, const Signature* sig = nullptr);
void save_structure_file(const std::string& path, const Structure& a);
Structure load_structure_file(const std::string& path, const Signature* sig = nullptr);

}  // namespace ell
