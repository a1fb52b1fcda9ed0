#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ell {

// D-regular multigraph on n vertices given by a self-inverse rotation map
// rot: (vertex, port) -> (vertex, port). A fixed point rot(v,i) == (v,i) is a
// self-loop and counts 1 toward the degree.
struct RotationGraph {
  int32_t n = 0;
  int32_t degree = 0;
  // Dense table, index v*degree + i; pair packed as (vertex, port).
  std::vector<std::pair<int32_t, int32_t>> rot;

  std::pair<int32_t, int32_t> at(int32_t v, int32_t i) const {
    return rot[size_t(v) * degree + i];
  }
  void set(int32_t v, int32_t i, int32_t w, int32_t j) {
    rot[size_t(v) * degree + i] = {w, j};
  }
  static RotationGraph empty(int32_t n, int32_t degree) {
    RotationGraph g;
    g.n = n;
    g.degree = degree;
    g.rot.assign(size_t(n) * degree, {-1, -1});
    return g;
  }
  // Number of (v,i) with rot(v,i).first == v (self-loop edge count, summed
  // over vertices; fixed points count 1, involutive self-pairs count 2).
  int64_t loop_slots() const;
};

struct RotViolation {
  int32_t vertex = -1;
  int32_t port = -1;
  std::string message;
};

// ok == nullopt; otherwise the first (v,i) violating range or self-inversion.
std::optional<RotViolation> validate(const RotationGraph& g);
void validate_or_throw(const RotationGraph& g, const std::string& what);

// G^2: degree D^2, port (k1,k2) flattened k1*D+k2 (row-major everywhere).
RotationGraph square(const RotationGraph& g);

// Zig-zag product. g2 must have exactly g1.degree vertices; its vertex set is
// identified with g1's port set numerically (or through relabel, where
// relabel[port of g1] = vertex of g2).
RotationGraph zigzag(const RotationGraph& g1, const RotationGraph& g2,
                     const std::vector<int32_t>* relabel = nullptr);

struct SpectralReport {
  double lambda2 = 0.0;   // second-largest eigenvalue of normalized adjacency
  double lambdaN = 0.0;   // smallest
  double lambda = 0.0;    // max(|lambda2|, |lambdaN|)
  bool connected = false;
  bool bipartite = false;
  bool dense = true;        // which solver ran
  int64_t iterations = 0;   // iterative path only
};

struct SpectrumOptions {
  int32_t dense_limit = 5000;
  double tol = 1e-10;          // iterative convergence
  int64_t max_iterations = 100000;
  double threshold_tol = 1e-9;  // connectivity / bipartiteness thresholds
};

SpectralReport spectrum(const RotationGraph& g, const SpectrumOptions& opt = {});

struct CutReport {
  double h = 0.0;
  std::vector<int32_t> witness_set;
  int64_t boundary = 0;
  bool exact = false;  // false: upper bound from sampled subsets
};

// Exhaustive minimum over all S with 1 <= |S| <= n/2; requires n <= 24.
CutReport expansion_exhaustive(const RotationGraph& g);
// Upper bound: k random subsets (seeded) plus all singletons.
CutReport expansion_sampled(const RotationGraph& g, int64_t k, uint64_t seed);

// Boundary edge count |<S, V\S>| for an explicit subset.
int64_t cut_boundary(const RotationGraph& g, const std::vector<int32_t>& s);

// Recursive expander family G_1 = h^2, G_m = G_{m-1}^2 (z) h.
// h must be D-regular on D^4 vertices. Caps |G_m| by vertex_cap.
std::vector<RotationGraph> build_family(const RotationGraph& h, int m,
                                        int64_t vertex_cap = 1 << 20);

struct BaseSearch {
  RotationGraph graph;
  double lambda = 1.0;
  uint64_t seed = 0;
  int trials = 0;
};

// Best-of-`trials` random D-regular rotation maps on D^4 vertices (random
// matching on the port slots; one fixed point when the slot count is odd).
BaseSearch random_regular_base(int32_t D, uint64_t seed, int trials);

// Random D-regular rotation graph on n vertices (pairing model), used for
// test corpora. n*D odd leaves one fixed point.
RotationGraph random_rotation_graph(int32_t n, int32_t D, uint64_t seed);

// Multigraph isomorphism (ignores port labels; compares edge multisets).
// Refinement + individualization; intended for the desk-scale graphs here.
bool multigraph_isomorphic(const RotationGraph& a, const RotationGraph& b);

// Text format: "rotgraph <n> <D>" then one "<v> <i> <w> <j>" line per slot.
void save_rotgraph(std::ostream& os, const RotationGraph& g);
RotationGraph load_rotgraph(std::istream& is);  // runs validate
void save_rotgraph_file(const std::string& path, const RotationGraph& g);
RotationGraph load_rotgraph_file(const std::string& path);

// Restriction of g to a vertex subset that is closed under rot (a union of
// connected components); throws otherwise.
RotationGraph restrict_component(const RotationGraph& g,
                                 const std::vector<int32_t>& vertices);

// Connected components as vertex lists (exact, by union of rot edges).
std::vector<std::vector<int32_t>> components(const RotationGraph& g);

}  // namespace ell
