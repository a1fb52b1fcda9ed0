#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ell/simplegraph.hpp"
#include "ell/structures.hpp"

namespace ell {

// Query-counted neighbour-query view of a structure or simple graph. The
// (i, sym, k) protocol answers the k-th tuple (1-based, lexicographic) of
// relation sym containing element i, or nothing.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual int64_t size() const = 0;
  virtual int symbol_count() const = 0;
  virtual int arity(int sym) const = 0;
  virtual bool symmetric(int sym) const { return false; }  // undirected edges
  virtual int64_t degree_bound() const = 0;  // d of the hosting class
  std::optional<std::vector<int32_t>> neighbor_query(int64_t i, int sym,
                                                     int64_t k) const {
    queries_.fetch_add(1, std::memory_order_relaxed);
    return answer(i, sym, k);
  }
  int64_t queries() const { return queries_.load(std::memory_order_relaxed); }
  void reset_queries() const { queries_.store(0, std::memory_order_relaxed); }

 protected:
  virtual std::optional<std::vector<int32_t>> answer(int64_t i, int sym,
                                                     int64_t k) const = 0;
  mutable std::atomic<int64_t> queries_{0};
};

class StructureOracle : public Oracle {
 public:
  explicit StructureOracle(const Structure& a,
                           std::optional<int64_t> degree_bound = std::nullopt);
  StructureOracle(Structure&&, std::optional<int64_t> = std::nullopt) = delete;
  int64_t size() const override { return a_->n(); }
  int symbol_count() const override { return int(a_->sig().symbols.size()); }
  int arity(int sym) const override { return a_->sig().symbols[sym].arity; }
  int64_t degree_bound() const override { return d_; }

 protected:
  std::optional<std::vector<int32_t>> answer(int64_t i, int sym,
                                             int64_t k) const override;

 private:
  const Structure* a_;
  int64_t d_;
  std::vector<std::vector<std::vector<int64_t>>> incidence_;  // sym -> elem -> offsets
};

class GraphOracle : public Oracle {
 public:
  explicit GraphOracle(const SimpleGraph& g,
                       std::optional<int64_t> degree_bound = std::nullopt);
  GraphOracle(SimpleGraph&&, std::optional<int64_t> = std::nullopt) = delete;
  int64_t size() const override { return g_->n(); }
  int symbol_count() const override { return 1; }
  int arity(int) const override { return 2; }
  bool symmetric(int) const override { return true; }
  int64_t degree_bound() const override { return d_; }
  const SimpleGraph& graph() const { return *g_; }

 protected:
  std::optional<std::vector<int32_t>> answer(int64_t i, int sym,
                                             int64_t k) const override;

 private:
  const SimpleGraph* g_;
  int64_t d_;
};

// Rooted induced substructure of radius r around a centre; members[0] is the
// centre, tuples are stored over local ids.
struct Ball {
  int r = 0;
  std::vector<int64_t> members;  // global ids
  std::vector<int> arities;
  std::vector<bool> symmetric;             // undirected symbols, entries sorted
  std::vector<std::vector<int32_t>> rels;  // per symbol, flat local tuples

  int64_t n() const { return int64_t(members.size()); }
  bool has_local_pair(int sym, int32_t a, int32_t b) const;
  int64_t local_degree(int32_t v) const;  // tuples containing v (set count)
  // Gaifman adjacency within the ball (binary symbols).
  bool gaifman_adjacent(int32_t a, int32_t b) const;
  std::vector<int32_t> gaifman_distances() const;  // from local 0
};

struct BallCaps {
  int64_t max_members = 40;
  int max_radius = 3;
};

Ball explore_ball(const Oracle& o, int64_t v, int r, const BallCaps& caps = {});

// Canonical byte string of the centre-rooted isomorphism class; equal bytes
// iff centre-preserving isomorphic. Binary symbols only.
struct BallType {
  int r = 0;
  std::string bytes;
  auto operator<=>(const BallType&) const = default;
};
BallType canonical_type(const Ball& b);

// Centre-preserving isomorphism by plain backtracking (test oracle).
bool balls_isomorphic(const Ball& a, const Ball& b);

struct TypeDistribution {
  int r = 0;
  std::map<std::string, double> freq;  // canonical bytes -> frequency
  int64_t support() const { return int64_t(freq.size()); }
  double total() const;
};

TypeDistribution rho_exact(const Oracle& o, int r, const BallCaps& caps = {});
TypeDistribution estimate_frequencies(const Oracle& o, int r, int64_t s,
                                      uint64_t seed, const BallCaps& caps = {});

double l1_distance(const TypeDistribution& a, const TypeDistribution& b);

// CLI-facing JSON record: radius, support, and hex-keyed frequencies.
std::string type_distribution_to_json(const TypeDistribution& dist);

// Sample size ceil((t^2/lambda^2) ln(t+40)) for a support bound t.
int64_t required_sample_size(int64_t t, double lambda);

struct SamplingDistance {
  std::vector<double> per_radius;  // delta^r for r = 0..r_max
  double truncated = 0.0;          // sum 2^-r * delta^r up to r_max
  double tail_bound = 0.0;         // 2^-r_max
};
SamplingDistance sampling_distance(const Oracle& a, const Oracle& b, int r_max,
                                   const BallCaps& caps = {});

// ---------------------------------------------------------------------------
// Testers

struct TesterOutcome {
  bool accept = false;
  int64_t queries = 0;
  std::string reason;  // "n-in-M" | "exact-small" | "sampled-forbidden" | "clean-sample"
  int64_t sample_size = 0;
  int64_t t_used = 0;
};

struct FrameworkParams {
  int r = 1;
  double lambda = 0.1;
  int64_t n0 = 1;
  std::function<bool(const BallType&)> forbidden;   // F membership
  std::function<bool(int64_t)> size_excluded;       // M (may be empty)
  std::optional<int64_t> t_override;  // else: observed-support rule
  BallCaps caps;
  uint64_t seed = 0;
};

// Four steps: reject on n in M; exact scan below n0; otherwise estimate
// frequencies at the required sample size and reject iff a forbidden type
// was seen. One-sided by construction.
TesterOutcome framework_tester(const Oracle& o, const FrameworkParams& p);

struct TesterOverrides {
  std::optional<double> lambda;
  std::optional<int64_t> n0;
  std::optional<int64_t> t;
  uint64_t seed = 0;
};

// Freeness of an r-type given by an explicit ball. Case analysis on the
// interior degrees picks the constants; unsupported cases throw.
TesterOutcome freeness_tester(const Oracle& o, const Ball& tau, double epsilon,
                              const TesterOverrides& ov = {});

// Regularity for a 1-type whose ball minus the centre is a disjoint union of
// cliques; the size gate comes from the maximal-clique congruences.
TesterOutcome regularity_tester(const Oracle& o, const Ball& tau, double epsilon,
                                const TesterOverrides& ov = {});

// One-sided substructure-freeness tester with documented artifact constants
// (samples ceil(c/eps) vertices, c = 3|B| d^{r+1}, r = Gaifman diameter).
TesterOutcome substructure_freeness_tester(const Oracle& o, const Structure& pattern,
                                           double epsilon, uint64_t seed = 0);

// maxcl(v, i): number of maximal i-cliques containing v.
std::map<int64_t, int64_t> maxcl(const SimpleGraph& g, int64_t v);
// maxcl of the centre inside a 1-ball whose remainder is a clique union;
// empty result means the clique condition fails.
std::optional<std::map<int64_t, int64_t>> maxcl_of_ball(const Ball& tau);

// ---------------------------------------------------------------------------
// Farness ground truth (exhaustive, desk scale)

struct FarnessResult {
  bool far = true;
  int64_t budget = 0;          // floor(eps * d * n)
  int64_t distance = -1;       // of the closest member found, -1 if far
};

// Exhaustive search over all graphs on the same universe within the class
// C_d; property must be isomorphism-closed.
FarnessResult graph_farness(const SimpleGraph& g, int64_t d, double epsilon,
                            const std::function<bool(const SimpleGraph&)>& property);
// Independent implementation: breadth-first over modification count.
FarnessResult graph_farness_bfs(const SimpleGraph& g, int64_t d, double epsilon,
                                const std::function<bool(const SimpleGraph&)>& property);
FarnessResult structure_farness(const Structure& a, int64_t d, double epsilon,
                                const std::function<bool(const Structure&)>& property);

// Seeded random d-regular simple graph (pairing model with rejection).
SimpleGraph random_regular_simple_graph(int64_t n, int32_t d, uint64_t seed);

// A ball value handmade from an explicit graph (centre = vertex 0 of g).
Ball ball_from_graph(const SimpleGraph& g, int r);

}  // namespace ell
