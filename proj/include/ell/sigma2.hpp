#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "ell/folagic.hpp"
#include "ell/structures.hpp"

namespace ell {

// A variable of the prefix: x_i (existential) or y_i (universal), 0-based.
struct VarRef {
  bool is_x = true;
  int index = 0;
  bool operator==(const VarRef&) const = default;
};

struct S2Literal {
  bool positive = true;
  bool is_eq = false;
  int symbol = -1;  // relational atoms only
  std::vector<VarRef> args;
  bool mentions_x() const;
  bool mentions_y() const;
};

// One DNF clause split into the four parts: alpha (x only), beta (y only),
// pos (positive mixed), neg (negated mixed). Positive mixed equalities are
// kept in pos; their y variable has been substituted away everywhere else.
struct S2Clause {
  std::vector<S2Literal> alpha, beta, pos, neg;
  bool pos_only_equalities() const;
  bool pos_empty() const { return pos.empty(); }
};

struct ClauseSplit {
  Signature sig;
  int k = 0;  // existential width
  int l = 0;  // universal width
  std::vector<std::string> xvars, yvars;  // original variable names
  std::vector<S2Clause> clauses;
};

struct NormalizeOptions {
  int64_t dnf_literal_budget = 1000000;
};

// Requires a prenex exists*-forall* sentence with quantifier-free matrix and
// at least one variable in each block.
ClauseSplit normalize_sigma2(const FormulaPtr& f, const Signature& sig,
                             const NormalizeOptions& opt = {});

// All structures over sig with 1 <= n <= max_n and degree <= d, up to
// isomorphism (canonical representatives, deterministic order).
std::vector<Structure> enumerate_structures(const Signature& sig, int32_t max_n,
                                            int64_t d);

// Induced substructure on a sorted element subset, renumbered.
Structure induced_substructure(const Structure& a, const std::vector<int32_t>& keep);
Structure apply_permutation(const Structure& a, const std::vector<int32_t>& perm);
bool structures_isomorphic(const Structure& a, const Structure& b);

// All <= k-element models of f in C_d up to isomorphism with proper induced
// submodels removed; each model re-verified by the generic evaluator.
std::vector<Structure> minimal_models(const FormulaPtr& f, const Signature& sig,
                                      int64_t d, int k);

// A structure H together with one surjective realization pattern of the l
// universal variables (pattern[i] = element playing y_i); patterns are kept
// up to automorphisms of H.
struct PatternedH {
  int h_index = 0;                // into DecompositionReport::h_sets[j].structures
  std::vector<int32_t> pattern;   // size l, surjective onto H
};

struct HSet {
  std::vector<Structure> structures;   // pairwise non-isomorphic
  std::vector<PatternedH> patterns;    // all admissible (structure, pattern)
};

// One (M, s) branch of the decomposition: M realized by the existential block
// under the surjection s (x_i plays element s[i]).
struct Branch {
  int m_index = 0;
  std::vector<int32_t> s;       // size k, surjective onto M
  std::vector<int> j_set;       // clause indices with M |= alpha^j under s
  // (clause j, pattern index into h_sets[j].patterns)
  std::vector<std::pair<int, int>> J;
  std::vector<std::pair<int, int>> Jp;  // subset of J with empty pos
  FormulaPtr psi;               // forall y. big-or of pattern descriptions
  FormulaPtr reconstituted;         // iota^M(x') & clause disjunction over j_set
  FormulaPtr reconstituted_iota;    // variant with iota^{H,p}(y) per (j,H,p)
};

struct DecompositionReport {
  ClauseSplit split;
  int64_t d = 0;
  std::vector<Structure> minimal;  // M_frak
  std::vector<HSet> h_sets;        // per clause
  std::vector<Branch> branches;
  FormulaPtr equivalent;           // disjunction of all reconstituted branches
};

struct DecomposeOptions {
  NormalizeOptions normalize;
  int max_k = 3;
  int max_l = 3;
};

DecompositionReport decompose(const FormulaPtr& f, const Signature& sig, int64_t d,
                              const DecomposeOptions& opt = {});

// The quantifier-free description of an l-tuple realizing (H, pattern):
// equality pattern plus the induced relations through representatives.
FormulaPtr pattern_description(const Structure& h, const std::vector<int32_t>& pattern,
                               const std::vector<std::string>& yvars);

// psi for a branch (also stored in the branch); empty J' gives forall y. false.
FormulaPtr universal_companion(const DecompositionReport& rep, const Branch& b);

// Remove all tuples containing b; universe unchanged.
Structure isolate(const Structure& a, int32_t b);

struct PlantResult {
  Structure planted;
  int64_t modifications = 0;  // tuples removed + tuples added
};

// Isolate the first |M| elements and add tuples so they induce a copy of M.
PlantResult plant(const Structure& a, const Structure& m);

// JSON rendering of the full report (structures in text format, formulas in
// the mini-language).
std::string decomposition_to_json(const DecompositionReport& rep);

}  // namespace ell
