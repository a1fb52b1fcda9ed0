#include "ell/sigma2.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ell/util.hpp"

namespace ell {

bool S2Literal::mentions_x() const {
  for (const auto& a : args)
    if (a.is_x) return true;
  return false;
}
bool S2Literal::mentions_y() const {
  for (const auto& a : args)
    if (!a.is_x) return true;
  return false;
}

bool S2Clause::pos_only_equalities() const {
  for (const auto& lit : pos)
    if (!lit.is_eq) return false;
  return true;
}

// ---------------------------------------------------------------------------
// normalize_sigma2

namespace {

struct RawLiteral {
  bool positive;
  const Formula* node;  // Atom or Eq
};

using RawClause = std::vector<RawLiteral>;

// NNF + DNF over the quantifier-free matrix, with a literal budget.
std::vector<RawClause> dnf(const Formula* f, bool positive, int64_t& budget) {
  auto spend = [&](int64_t amount) {
    budget -= amount;
    if (budget < 0)
      throw std::invalid_argument("normalize: DNF expansion exceeds budget");
  };
  switch (f->kind) {
    case Formula::Kind::True:
      return positive ? std::vector<RawClause>{{}} : std::vector<RawClause>{};
    case Formula::Kind::False:
      return positive ? std::vector<RawClause>{} : std::vector<RawClause>{{}};
    case Formula::Kind::Atom:
    case Formula::Kind::Eq:
      spend(1);
      return {{RawLiteral{positive, f}}};
    case Formula::Kind::Not:
      return dnf(f->children[0].get(), !positive, budget);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      bool conj = (f->kind == Formula::Kind::And) == positive;
      if (!conj) {
        // disjunction: concatenate
        std::vector<RawClause> out;
        for (const auto& c : f->children) {
          auto part = dnf(c.get(), positive, budget);
          out.insert(out.end(), part.begin(), part.end());
        }
        return out;
      }
      // conjunction: cross product
      std::vector<RawClause> acc{{}};
      for (const auto& c : f->children) {
        auto part = dnf(c.get(), positive, budget);
        std::vector<RawClause> next;
        spend(int64_t(acc.size()) * int64_t(part.size()));
        for (const auto& a : acc)
          for (const auto& b : part) {
            RawClause merged = a;
            merged.insert(merged.end(), b.begin(), b.end());
            next.push_back(std::move(merged));
          }
        acc = std::move(next);
      }
      return acc;
    }
    default:
      throw std::invalid_argument("normalize: matrix must be quantifier-free");
  }
}

}  // namespace

ClauseSplit normalize_sigma2(const FormulaPtr& f, const Signature& sig,
                             const NormalizeOptions& opt) {
  ClauseSplit out;
  out.sig = sig;

  const Formula* cur = f.get();
  while (cur->kind == Formula::Kind::Exists) {
    out.xvars.push_back(cur->qvar);
    cur = cur->children[0].get();
  }
  while (cur->kind == Formula::Kind::Forall) {
    out.yvars.push_back(cur->qvar);
    cur = cur->children[0].get();
  }
  out.k = int(out.xvars.size());
  out.l = int(out.yvars.size());
  require(out.k >= 1, "normalize: need a nonempty existential block");
  require(out.l >= 1, "normalize: need a nonempty universal block");

  auto var_of = [&](const std::string& name) -> VarRef {
    for (int i = 0; i < out.k; ++i)
      if (out.xvars[i] == name) return {true, i};
    for (int i = 0; i < out.l; ++i)
      if (out.yvars[i] == name) return {false, i};
    throw std::invalid_argument(
        "normalize: not a sentence in prenex exists*-forall* form (free '" +
        name + "')");
  };

  int64_t budget = opt.dnf_literal_budget;
  std::vector<RawClause> raw;
  try {
    raw = dnf(cur, true, budget);
  } catch (const std::invalid_argument& e) {
    if (std::string(e.what()).find("quantifier-free") != std::string::npos)
      throw std::invalid_argument("normalize: input is not Sigma_2 (prenex exists*-forall*)");
    throw;
  }

  for (const auto& rc : raw) {
    // convert literals
    std::vector<S2Literal> lits;
    bool clause_false = false;
    for (const auto& rl : rc) {
      S2Literal lit;
      lit.positive = rl.positive;
      if (rl.node->kind == Formula::Kind::Eq) {
        lit.is_eq = true;
        lit.args = {var_of(rl.node->vars[0]), var_of(rl.node->vars[1])};
        if (lit.args[0] == lit.args[1]) {
          if (lit.positive) continue;  // x=x: drop trivial literal
          clause_false = true;         // x!=x: clause unsatisfiable
          break;
        }
      } else {
        lit.is_eq = false;
        lit.symbol = rl.node->symbol;
        for (const auto& v : rl.node->vars) lit.args.push_back(var_of(v));
      }
      lits.push_back(std::move(lit));
    }
    if (clause_false) continue;

    // substitute y_j := x_i for each positive mixed equality, keeping the
    // equality literal itself
    std::vector<bool> processed(lits.size(), false);
    for (;;) {
      int found = -1;
      VarRef xv, yv;
      for (size_t i = 0; i < lits.size(); ++i) {
        const auto& lit = lits[i];
        if (processed[i] || !lit.is_eq || !lit.positive) continue;
        if (lit.args[0].is_x != lit.args[1].is_x) {
          found = int(i);
          xv = lit.args[0].is_x ? lit.args[0] : lit.args[1];
          yv = lit.args[0].is_x ? lit.args[1] : lit.args[0];
          break;
        }
      }
      if (found < 0) break;
      processed[found] = true;
      for (size_t i = 0; i < lits.size(); ++i) {
        if (int(i) == found) continue;
        for (auto& a : lits[i].args)
          if (a == yv) a = xv;
      }
    }

    // partition
    S2Clause clause;
    for (auto& lit : lits) {
      bool mx = lit.mentions_x(), my = lit.mentions_y();
      if (!my)
        clause.alpha.push_back(std::move(lit));
      else if (!mx)
        clause.beta.push_back(std::move(lit));
      else if (lit.positive)
        clause.pos.push_back(std::move(lit));
      else
        clause.neg.push_back(std::move(lit));
    }
    out.clauses.push_back(std::move(clause));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structure enumeration and isomorphism helpers

namespace {

std::vector<int32_t> serialize_structure(const Structure& a) {
  std::vector<int32_t> key;
  key.push_back(int32_t(a.n()));
  for (size_t s = 0; s < a.sig().symbols.size(); ++s) {
    key.push_back(int32_t(a.flat(int(s)).size()));
    key.insert(key.end(), a.flat(int(s)).begin(), a.flat(int(s)).end());
  }
  return key;
}

std::vector<int32_t> canonical_key(const Structure& a) {
  std::vector<int32_t> perm(a.n());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int32_t> best;
  do {
    auto key = serialize_structure(apply_permutation(a, perm));
    if (best.empty() || key < best) best = key;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

Structure apply_permutation(const Structure& a, const std::vector<int32_t>& perm) {
  Structure b(a.sig(), a.n());
  for (size_t s = 0; s < a.sig().symbols.size(); ++s) {
    const int ar = a.sig().symbols[s].arity;
    const auto& flat = a.flat(int(s));
    std::vector<int32_t> t(ar);
    for (int64_t off = 0; off < int64_t(flat.size()); off += ar) {
      for (int k = 0; k < ar; ++k) t[k] = perm[flat[off + k]];
      b.add_tuple(int(s), t);
    }
  }
  b.finalize();
  return b;
}

Structure induced_substructure(const Structure& a, const std::vector<int32_t>& keep) {
  std::vector<int32_t> local(a.n(), -1);
  for (size_t i = 0; i < keep.size(); ++i) local[keep[i]] = int32_t(i);
  Structure b(a.sig(), int64_t(keep.size()));
  for (size_t s = 0; s < a.sig().symbols.size(); ++s) {
    const int ar = a.sig().symbols[s].arity;
    const auto& flat = a.flat(int(s));
    std::vector<int32_t> t(ar);
    for (int64_t off = 0; off < int64_t(flat.size()); off += ar) {
      bool inside = true;
      for (int k = 0; k < ar && inside; ++k) inside = local[flat[off + k]] >= 0;
      if (!inside) continue;
      for (int k = 0; k < ar; ++k) t[k] = local[flat[off + k]];
      b.add_tuple(int(s), t);
    }
  }
  b.finalize();
  return b;
}

bool structures_isomorphic(const Structure& a, const Structure& b) {
  if (a.sig() != b.sig() || a.n() != b.n()) return false;
  if (a.n() > 8) throw std::invalid_argument("structures_isomorphic: too large");
  return canonical_key(a) == canonical_key(b);
}

std::vector<Structure> enumerate_structures(const Signature& sig, int32_t max_n,
                                            int64_t d) {
  std::vector<Structure> out;
  std::set<std::vector<int32_t>> seen;
  for (int32_t n = 1; n <= max_n; ++n) {
    int64_t slots = 0;
    for (const auto& sym : sig.symbols) {
      int64_t cells = 1;
      for (int k = 0; k < sym.arity; ++k) cells *= n;
      slots += cells;
    }
    require(slots <= 24, "enumerate_structures: universe/signature too large (" +
                             std::to_string(slots) + " tuple slots)");
    for (int64_t bits = 0; bits < (int64_t(1) << slots); ++bits) {
      Structure a(sig, n);
      int64_t pos = 0;
      for (size_t s = 0; s < sig.symbols.size(); ++s) {
        const int ar = sig.symbols[s].arity;
        int64_t cells = 1;
        for (int k = 0; k < ar; ++k) cells *= n;
        std::vector<int32_t> t(ar);
        for (int64_t idx = 0; idx < cells; ++idx, ++pos) {
          if (!((bits >> pos) & 1)) continue;
          int64_t rest = idx;
          for (int k = ar - 1; k >= 0; --k) {
            t[k] = int32_t(rest % n);
            rest /= n;
          }
          a.add_tuple(int(s), t);
        }
      }
      a.finalize();
      if (a.max_degree() > d) continue;
      auto key = canonical_key(a);
      if (seen.insert(key).second) out.push_back(std::move(a));
    }
  }
  return out;
}

std::vector<Structure> minimal_models(const FormulaPtr& f, const Signature& sig,
                                      int64_t d, int k) {
  require(k >= 1 && k <= 3, "minimal_models: k must be in 1..3");
  std::vector<Structure> models;
  for (auto& a : enumerate_structures(sig, k, d))
    if (eval_formula(a, f)) models.push_back(std::move(a));

  // drop members with a proper induced submodel
  std::vector<Structure> minimal;
  for (const auto& m : models) {
    bool has_proper_submodel = false;
    const int32_t n = int32_t(m.n());
    for (int64_t mask = 1; mask < (int64_t(1) << n) - 1 && !has_proper_submodel;
         ++mask) {
      std::vector<int32_t> keep;
      for (int32_t v = 0; v < n; ++v)
        if ((mask >> v) & 1) keep.push_back(v);
      if (eval_formula(induced_substructure(m, keep), f)) has_proper_submodel = true;
    }
    if (!has_proper_submodel) minimal.push_back(m);
  }
  return minimal;
}

// ---------------------------------------------------------------------------
// decompose

namespace {

int32_t resolve(const VarRef& v, const std::vector<int32_t>& xmap,
                const std::vector<int32_t>& ymap) {
  return v.is_x ? xmap[v.index] : ymap[v.index];
}

bool eval_literal(const Structure& a, const S2Literal& lit,
                  const std::vector<int32_t>& xmap,
                  const std::vector<int32_t>& ymap) {
  bool val;
  if (lit.is_eq) {
    val = resolve(lit.args[0], xmap, ymap) == resolve(lit.args[1], xmap, ymap);
  } else {
    std::vector<int32_t> t;
    for (const auto& v : lit.args) t.push_back(resolve(v, xmap, ymap));
    val = a.has_tuple(lit.symbol, t);
  }
  return lit.positive == val;
}

bool eval_literals(const Structure& a, const std::vector<S2Literal>& lits,
                   const std::vector<int32_t>& xmap,
                   const std::vector<int32_t>& ymap) {
  for (const auto& lit : lits)
    if (!eval_literal(a, lit, xmap, ymap)) return false;
  return true;
}

// surjections [width] -> [size]
std::vector<std::vector<int32_t>> surjections(int width, int32_t size) {
  std::vector<std::vector<int32_t>> out;
  std::vector<int32_t> cur(width, 0);
  for (;;) {
    std::vector<bool> hit(size, false);
    for (int32_t v : cur) hit[v] = true;
    if (std::all_of(hit.begin(), hit.end(), [](bool b) { return b; }))
      out.push_back(cur);
    int pos = 0;
    while (pos < width && ++cur[pos] == size) cur[pos++] = 0;
    if (pos == width) break;
  }
  return out;
}

std::vector<std::vector<int32_t>> automorphisms(const Structure& a) {
  std::vector<std::vector<int32_t>> out;
  std::vector<int32_t> perm(a.n());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    if (apply_permutation(a, perm) == a) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

Structure disjoint_union(const Structure& a, const Structure& b) {
  Structure u(a.sig(), a.n() + b.n());
  for (size_t s = 0; s < a.sig().symbols.size(); ++s) {
    const int ar = a.sig().symbols[s].arity;
    for (const Structure* src : {&a, &b}) {
      const int32_t base = src == &a ? 0 : int32_t(a.n());
      const auto& flat = src->flat(int(s));
      std::vector<int32_t> t(ar);
      for (int64_t off = 0; off < int64_t(flat.size()); off += ar) {
        for (int z = 0; z < ar; ++z) t[z] = flat[off + z] + base;
        u.add_tuple(int(s), t);
      }
    }
  }
  u.finalize();
  return u;
}

// literal -> folagic formula under variable name maps
FormulaPtr literal_formula(const S2Literal& lit,
                           const std::vector<std::string>& xnames,
                           const std::vector<std::string>& ynames) {
  auto name = [&](const VarRef& v) {
    return v.is_x ? xnames[v.index] : ynames[v.index];
  };
  FormulaPtr atom;
  if (lit.is_eq) {
    atom = f_eq(name(lit.args[0]), name(lit.args[1]));
  } else {
    std::vector<std::string> args;
    for (const auto& v : lit.args) args.push_back(name(v));
    atom = f_atom(lit.symbol, std::move(args));
  }
  return lit.positive ? atom : f_not(atom);
}

}  // namespace

FormulaPtr pattern_description(const Structure& h, const std::vector<int32_t>& pattern,
                               const std::vector<std::string>& yvars) {
  require(pattern.size() == yvars.size(), "pattern_description: width mismatch");
  std::vector<FormulaPtr> parts;
  // representative position for each element of h
  std::vector<int32_t> rep(h.n(), -1);
  for (size_t i = 0; i < pattern.size(); ++i)
    if (rep[pattern[i]] < 0) rep[pattern[i]] = int32_t(i);
  for (int32_t e = 0; e < h.n(); ++e)
    require(rep[e] >= 0, "pattern_description: pattern not surjective");
  // equality pattern
  for (size_t i = 0; i < pattern.size(); ++i)
    for (size_t j = i + 1; j < pattern.size(); ++j) {
      auto eq = f_eq(yvars[i], yvars[j]);
      parts.push_back(pattern[i] == pattern[j] ? eq : f_not(eq));
    }
  // relations through representatives
  for (size_t s = 0; s < h.sig().symbols.size(); ++s) {
    const int ar = h.sig().symbols[s].arity;
    int64_t cells = 1;
    for (int z = 0; z < ar; ++z) cells *= h.n();
    std::vector<int32_t> t(ar);
    for (int pass = 0; pass < 2; ++pass) {
      for (int64_t idx = 0; idx < cells; ++idx) {
        int64_t rest = idx;
        for (int z = ar - 1; z >= 0; --z) {
          t[z] = int32_t(rest % h.n());
          rest /= h.n();
        }
        bool present = h.has_tuple(int(s), t);
        if (present != (pass == 0)) continue;
        std::vector<std::string> args;
        for (int z = 0; z < ar; ++z) args.push_back(yvars[rep[t[z]]]);
        auto atom = f_atom(int(s), std::move(args));
        parts.push_back(present ? atom : f_not(atom));
      }
    }
  }
  return f_and(std::move(parts));
}

DecompositionReport decompose(const FormulaPtr& f, const Signature& sig, int64_t d,
                              const DecomposeOptions& opt) {
  DecompositionReport rep;
  rep.d = d;
  rep.split = normalize_sigma2(f, sig, opt.normalize);
  const int k = rep.split.k, l = rep.split.l;
  require(k <= opt.max_k, "decompose: existential width exceeds the scope gate");
  require(l <= opt.max_l, "decompose: universal width exceeds the scope gate");

  rep.minimal = minimal_models(f, sig, d, k);

  // h_sets per clause: structures with a surjective realization of beta^j
  auto candidates = enumerate_structures(sig, l, d);
  std::vector<std::vector<std::vector<int32_t>>> cand_auts;
  for (const auto& h : candidates) cand_auts.push_back(automorphisms(h));

  rep.h_sets.resize(rep.split.clauses.size());
  const std::vector<int32_t> no_x;
  for (size_t j = 0; j < rep.split.clauses.size(); ++j) {
    const auto& beta = rep.split.clauses[j].beta;
    // beta may not mention x variables by construction
    for (size_t ci = 0; ci < candidates.size(); ++ci) {
      const Structure& h = candidates[ci];
      int h_index = -1;
      std::set<std::vector<int32_t>> canonical_patterns;
      for (const auto& p : surjections(l, int32_t(h.n()))) {
        if (!eval_literals(h, beta, no_x, p)) continue;
        // canonical up to Aut(h)
        std::vector<int32_t> best = p;
        for (const auto& aut : cand_auts[ci]) {
          std::vector<int32_t> q(p.size());
          for (size_t i = 0; i < p.size(); ++i) q[i] = aut[p[i]];
          if (q < best) best = q;
        }
        if (!canonical_patterns.insert(best).second) continue;
        if (h_index < 0) {
          rep.h_sets[j].structures.push_back(h);
          h_index = int(rep.h_sets[j].structures.size()) - 1;
        }
        rep.h_sets[j].patterns.push_back({h_index, best});
      }
    }
  }

  // branches: per minimal model and surjective realization of the x block
  std::vector<std::string> xnames, ynames;
  for (int i = 0; i < k; ++i) xnames.push_back(rep.split.xvars[i]);
  for (int i = 0; i < l; ++i) ynames.push_back(rep.split.yvars[i]);

  for (size_t mi = 0; mi < rep.minimal.size(); ++mi) {
    const Structure& m = rep.minimal[mi];
    for (const auto& s : surjections(k, int32_t(m.n()))) {
      Branch br;
      br.m_index = int(mi);
      br.s = s;
      for (size_t j = 0; j < rep.split.clauses.size(); ++j)
        if (eval_literals(m, rep.split.clauses[j].alpha, s, {}))
          br.j_set.push_back(int(j));
      if (br.j_set.empty()) continue;  // branch can never be realized

      // J: pos contains only equalities and M | H[P] models f
      for (int j : br.j_set) {
        const auto& clause = rep.split.clauses[j];
        if (!clause.pos_only_equalities()) continue;
        for (size_t pi = 0; pi < rep.h_sets[j].patterns.size(); ++pi) {
          const auto& ph = rep.h_sets[j].patterns[pi];
          const Structure& h = rep.h_sets[j].structures[ph.h_index];
          // P: pattern elements at positions not equated to an x variable
          std::vector<bool> linked(l, false);
          for (const auto& lit : clause.pos)
            for (const auto& arg : lit.args)
              if (!arg.is_x) linked[arg.index] = true;
          std::vector<int32_t> keep_elems;
          for (int i = 0; i < l; ++i)
            if (!linked[i]) keep_elems.push_back(ph.pattern[i]);
          std::sort(keep_elems.begin(), keep_elems.end());
          keep_elems.erase(std::unique(keep_elems.begin(), keep_elems.end()),
                           keep_elems.end());
          Structure hp = induced_substructure(h, keep_elems);
          if (eval_formula(disjoint_union(m, hp), f))
            br.J.push_back({j, int(pi)});
        }
      }
      for (auto [j, pi] : br.J)
        if (rep.split.clauses[j].pos_empty()) br.Jp.push_back({j, pi});

      // psi
      {
        std::vector<FormulaPtr> opts;
        for (auto [j, pi] : br.Jp) {
          const auto& ph = rep.h_sets[j].patterns[pi];
          opts.push_back(pattern_description(rep.h_sets[j].structures[ph.h_index],
                                             ph.pattern, ynames));
        }
        FormulaPtr body = f_or(std::move(opts));
        for (int i = l - 1; i >= 0; --i) body = f_forall(ynames[i], body);
        br.psi = body;
      }

      // reconstituted formulas
      {
        std::vector<std::string> xprime;
        for (int32_t e = 0; e < m.n(); ++e)
          xprime.push_back("xw" + std::to_string(e));
        std::vector<std::string> xmap(k);
        for (int i = 0; i < k; ++i) xmap[i] = xprime[s[i]];

        auto clause_formula = [&](int j, bool use_iota) -> std::vector<FormulaPtr> {
          const auto& clause = rep.split.clauses[j];
          std::vector<FormulaPtr> shared;
          for (const auto& lit : clause.pos)
            shared.push_back(literal_formula(lit, xmap, ynames));
          for (const auto& lit : clause.neg)
            shared.push_back(literal_formula(lit, xmap, ynames));
          if (!use_iota) {
            std::vector<FormulaPtr> parts;
            for (const auto& lit : clause.beta)
              parts.push_back(literal_formula(lit, xmap, ynames));
            parts.insert(parts.end(), shared.begin(), shared.end());
            return {f_and(std::move(parts))};
          }
          std::vector<FormulaPtr> options;
          for (const auto& ph : rep.h_sets[j].patterns) {
            std::vector<FormulaPtr> parts;
            parts.push_back(pattern_description(rep.h_sets[j].structures[ph.h_index],
                                                ph.pattern, ynames));
            parts.insert(parts.end(), shared.begin(), shared.end());
            options.push_back(f_and(std::move(parts)));
          }
          return options;
        };

        for (int variant = 0; variant < 2; ++variant) {
          std::vector<FormulaPtr> options;
          for (int j : br.j_set) {
            auto cf = clause_formula(j, variant == 1);
            options.insert(options.end(), cf.begin(), cf.end());
          }
          FormulaPtr body =
              f_and({iota_formula(m, xprime), f_or(std::move(options))});
          for (int i = l - 1; i >= 0; --i) body = f_forall(ynames[i], body);
          for (int e = int(m.n()) - 1; e >= 0; --e) body = f_exists(xprime[e], body);
          (variant == 0 ? br.reconstituted : br.reconstituted_iota) = body;
        }
      }
      rep.branches.push_back(std::move(br));
    }
  }

  std::vector<FormulaPtr> all;
  for (const auto& br : rep.branches) all.push_back(br.reconstituted);
  rep.equivalent = f_or(std::move(all));
  return rep;
}

FormulaPtr universal_companion(const DecompositionReport& rep, const Branch& b) {
  (void)rep;
  return b.psi;
}

Structure isolate(const Structure& a, int32_t b) {
  require(b >= 0 && b < a.n(), "isolate: element out of range");
  Structure r(a.sig(), a.n());
  for (size_t s = 0; s < a.sig().symbols.size(); ++s) {
    const int ar = a.sig().symbols[s].arity;
    const auto& flat = a.flat(int(s));
    for (int64_t off = 0; off < int64_t(flat.size()); off += ar) {
      bool touches = false;
      for (int z = 0; z < ar && !touches; ++z) touches = flat[off + z] == b;
      if (!touches)
        r.add_tuple(int(s), std::vector<int32_t>(flat.begin() + off,
                                                 flat.begin() + off + ar));
    }
  }
  r.finalize();
  return r;
}

PlantResult plant(const Structure& a, const Structure& m) {
  require(a.sig() == m.sig(), "plant: signature mismatch");
  require(a.n() >= m.n(), "plant: universe too small");
  Structure cur = a;
  int64_t removed = 0;
  for (int32_t b = 0; b < m.n(); ++b) {
    int64_t before = cur.total_tuples();
    cur = isolate(cur, b);
    removed += before - cur.total_tuples();
  }
  int64_t added = 0;
  for (size_t s = 0; s < m.sig().symbols.size(); ++s) {
    const int ar = m.sig().symbols[s].arity;
    const auto& flat = m.flat(int(s));
    for (int64_t off = 0; off < int64_t(flat.size()); off += ar) {
      cur.add_tuple(int(s), std::vector<int32_t>(flat.begin() + off,
                                                 flat.begin() + off + ar));
      ++added;
    }
  }
  cur.finalize();
  return {std::move(cur), removed + added};
}

// ---------------------------------------------------------------------------
// JSON report

namespace {

std::string structure_text(const Structure& a) {
  std::ostringstream os;
  save_structure(os, a);
  return os.str();
}

nlohmann::json literal_json(const S2Literal& lit, const ClauseSplit& split) {
  nlohmann::json j;
  j["positive"] = lit.positive;
  if (lit.is_eq)
    j["eq"] = true;
  else
    j["symbol"] = split.sig.symbols[lit.symbol].name;
  std::vector<std::string> args;
  for (const auto& v : lit.args)
    args.push_back((v.is_x ? split.xvars[v.index] : split.yvars[v.index]));
  j["args"] = args;
  return j;
}

}  // namespace

std::string decomposition_to_json(const DecompositionReport& rep) {
  nlohmann::json j;
  j["k"] = rep.split.k;
  j["l"] = rep.split.l;
  j["d"] = rep.d;
  j["clauses"] = nlohmann::json::array();
  for (const auto& c : rep.split.clauses) {
    nlohmann::json cj;
    for (auto [name, lits] :
         std::initializer_list<std::pair<const char*, const std::vector<S2Literal>*>>{
             {"alpha", &c.alpha}, {"beta", &c.beta}, {"pos", &c.pos}, {"neg", &c.neg}}) {
      cj[name] = nlohmann::json::array();
      for (const auto& lit : *lits) cj[name].push_back(literal_json(lit, rep.split));
    }
    j["clauses"].push_back(cj);
  }
  j["minimal_models"] = nlohmann::json::array();
  for (const auto& m : rep.minimal) j["minimal_models"].push_back(structure_text(m));
  j["h_sets"] = nlohmann::json::array();
  for (const auto& hs : rep.h_sets) {
    nlohmann::json hj;
    hj["structures"] = nlohmann::json::array();
    for (const auto& h : hs.structures) hj["structures"].push_back(structure_text(h));
    hj["patterns"] = nlohmann::json::array();
    for (const auto& p : hs.patterns)
      hj["patterns"].push_back({{"structure", p.h_index}, {"pattern", p.pattern}});
    j["h_sets"].push_back(hj);
  }
  j["branches"] = nlohmann::json::array();
  for (const auto& br : rep.branches) {
    nlohmann::json bj;
    bj["m_index"] = br.m_index;
    bj["s"] = br.s;
    bj["j_set"] = br.j_set;
    bj["J"] = nlohmann::json::array();
    for (auto [a, b] : br.J) bj["J"].push_back({a, b});
    bj["J_prime"] = nlohmann::json::array();
    for (auto [a, b] : br.Jp) bj["J_prime"].push_back({a, b});
    bj["psi"] = print_formula(br.psi, rep.split.sig);
    j["branches"].push_back(bj);
  }
  return j.dump(2);
}

}  // namespace ell
