#include "ell/folagic.hpp"
#include "ell/util.hpp"

namespace ell {

namespace {

SigLayout layout_for_base(const RotationGraph& h) {
  require(h.degree >= 2, "zig-zag formulas need base degree >= 2");
  auto lay = layout_of(signature_for(h.degree));
  require(int64_t(h.n) == int64_t(lay->D4),
          "base graph must have D^4 vertices for its degree D");
  return *lay;
}

FormulaPtr f_or_f(const SigLayout& lay, const std::string& from,
                  const std::string& to) {
  // F(from,to) = disjunction over all F_k
  std::vector<FormulaPtr> parts;
  for (int32_t k = 0; k < lay.D4; ++k)
    parts.push_back(f_atom(lay.f_sym(k), {from, to}));
  return f_or(std::move(parts));
}

FormulaPtr exists_unique(const std::string& v, const std::string& u,
                         FormulaPtr body, FormulaPtr body_u) {
  // exists v. (body(v) & forall u. (body(u) -> u=v))
  return f_exists(v, f_and({std::move(body),
                            f_forall(u, f_implies(std::move(body_u), f_eq(u, v)))}));
}

}  // namespace

FormulaPtr phi_root(int32_t D, const std::string& x) {
  auto lay = layout_of(signature_for(D)).value();
  return f_forall("y", f_not(f_or_f(lay, "y", x)));
}

FormulaPtr phi_tree(int32_t D) {
  auto lay = layout_of(signature_for(D)).value();

  // exactly one root
  FormulaPtr one_root =
      f_exists("x", f_and({phi_root(D, "x"),
                           f_forall("u", f_implies(phi_root(D, "u"), f_eq("u", "x")))}));

  // root with R self-loop, or unique parent and no R
  FormulaPtr parent_clause;
  {
    FormulaPtr unique_parent =
        exists_unique("y", "u", f_or_f(lay, "y", "x"), f_or_f(lay, "u", "x"));
    FormulaPtr no_r =
        f_and({f_not(f_exists("y", f_atom(lay.r_index, {"x", "y"}))),
               f_not(f_exists("y", f_atom(lay.r_index, {"y", "x"})))});
    parent_clause = f_forall(
        "x", f_or({f_and({phi_root(D, "x"), f_atom(lay.r_index, {"x", "x"})}),
                   f_and({unique_parent, no_r})}));
  }

  // leaf with all L self-loops and nothing else in L, or no L at all and one
  // child per F_k
  FormulaPtr leaf_or_internal;
  {
    std::vector<FormulaPtr> leaf_parts;
    leaf_parts.push_back(f_not(f_exists("y", f_or_f(lay, "x", "y"))));
    for (int32_t k = 0; k < lay.D4; ++k)
      leaf_parts.push_back(f_atom(lay.l_sym(k), {"x", "x"}));
    {
      std::vector<FormulaPtr> no_l_other;
      for (int32_t k = 0; k < lay.D4; ++k) {
        no_l_other.push_back(f_not(f_atom(lay.l_sym(k), {"x", "y"})));
        no_l_other.push_back(f_not(f_atom(lay.l_sym(k), {"y", "x"})));
      }
      leaf_parts.push_back(f_forall(
          "y", f_implies(f_not(f_eq("y", "x")), f_and(std::move(no_l_other)))));
    }

    std::vector<FormulaPtr> internal_parts;
    {
      std::vector<FormulaPtr> any_l;
      for (int32_t k = 0; k < lay.D4; ++k) {
        any_l.push_back(f_atom(lay.l_sym(k), {"x", "y"}));
        any_l.push_back(f_atom(lay.l_sym(k), {"y", "x"}));
      }
      internal_parts.push_back(f_not(f_exists("y", f_or(std::move(any_l)))));
    }
    for (int32_t k = 0; k < lay.D4; ++k) {
      std::vector<FormulaPtr> child;
      child.push_back(f_not(f_eq("x", "w")));
      child.push_back(f_atom(lay.f_sym(k), {"x", "w"}));
      for (int32_t k2 = 0; k2 < lay.D4; ++k2)
        if (k2 != k) child.push_back(f_not(f_atom(lay.f_sym(k2), {"x", "w"})));
      child.push_back(f_forall(
          "y", f_implies(f_not(f_eq("y", "w")),
                         f_not(f_atom(lay.f_sym(k), {"x", "y"})))));
      internal_parts.push_back(f_exists("w", f_and(std::move(child))));
    }
    leaf_or_internal = f_forall(
        "x", f_or({f_and(std::move(leaf_parts)), f_and(std::move(internal_parts))}));
  }

  return f_and({one_root, parent_clause, leaf_or_internal});
}

FormulaPtr phi_rotation_map(int32_t D) {
  auto lay = layout_of(signature_for(D)).value();

  std::vector<FormulaPtr> inv;
  for (int32_t i = 0; i < lay.D2; ++i)
    for (int32_t j = 0; j < lay.D2; ++j)
      inv.push_back(f_implies(f_atom(lay.e_sym(i, j), {"x", "y"}),
                              f_atom(lay.e_sym(j, i), {"y", "x"})));
  FormulaPtr self_inverse = f_forall("x", f_forall("y", f_and(std::move(inv))));

  std::vector<FormulaPtr> func_ports;
  for (int32_t i = 0; i < lay.D2; ++i) {
    std::vector<FormulaPtr> options;
    for (int32_t j = 0; j < lay.D2; ++j) {
      std::vector<FormulaPtr> opt;
      opt.push_back(exists_unique("y", "u", f_atom(lay.e_sym(i, j), {"x", "y"}),
                                  f_atom(lay.e_sym(i, j), {"x", "u"})));
      for (int32_t j2 = 0; j2 < lay.D2; ++j2)
        if (j2 != j)
          opt.push_back(f_not(f_exists("y", f_atom(lay.e_sym(i, j2), {"x", "y"}))));
      options.push_back(f_and(std::move(opt)));
    }
    func_ports.push_back(f_or(std::move(options)));
  }
  FormulaPtr functional = f_forall("x", f_and(std::move(func_ports)));

  return f_and({self_inverse, functional});
}

FormulaPtr phi_base(const RotationGraph& h) {
  const SigLayout lay = layout_for_base(h);
  RotationGraph h2 = square(h);

  std::vector<FormulaPtr> parts;
  for (int32_t i = 0; i < lay.D2; ++i)
    parts.push_back(f_atom(lay.e_sym(i, i), {"x", "x"}));
  for (int32_t i = 0; i < lay.D2; ++i)
    for (int32_t j = 0; j < lay.D2; ++j)
      if (i != j) parts.push_back(f_not(f_atom(lay.e_sym(i, j), {"x", "x"})));
  {
    std::vector<FormulaPtr> none;
    for (int32_t i = 0; i < lay.D2; ++i)
      for (int32_t j = 0; j < lay.D2; ++j) {
        none.push_back(f_not(f_atom(lay.e_sym(i, j), {"x", "y"})));
        none.push_back(f_not(f_atom(lay.e_sym(i, j), {"y", "x"})));
      }
    parts.push_back(
        f_forall("y", f_implies(f_not(f_eq("x", "y")), f_and(std::move(none)))));
  }
  for (int32_t k = 0; k < lay.D4; ++k)
    for (int32_t i = 0; i < lay.D2; ++i) {
      auto [kp, ip] = h2.at(k, i);
      parts.push_back(f_exists(
          "y", f_exists("w", f_and({f_atom(lay.f_sym(k), {"x", "y"}),
                                    f_atom(lay.f_sym(kp), {"x", "w"}),
                                    f_atom(lay.e_sym(i, ip), {"y", "w"})}))));
    }

  return f_forall("x",
                  f_implies(phi_root(lay.D, "x"), f_and(std::move(parts))));
}

FormulaPtr phi_recursion(const RotationGraph& h) {
  const SigLayout lay = layout_for_base(h);
  const int32_t D = lay.D;

  std::vector<FormulaPtr> combos;
  for (int32_t k1p = 0; k1p < lay.D2; ++k1p)
    for (int32_t l1p = 0; l1p < lay.D2; ++l1p)
      for (int32_t k2p = 0; k2p < lay.D2; ++k2p)
        for (int32_t l2p = 0; l2p < lay.D2; ++l2p) {
          FormulaPtr guard = f_exists(
              "y", f_and({f_atom(lay.e_sym(k1p, l1p), {"x", "y"}),
                          f_atom(lay.e_sym(k2p, l2p), {"y", "z"})}));
          const int32_t K = k1p * lay.D2 + k2p;
          const int32_t Lp = l2p * lay.D2 + l1p;
          std::vector<FormulaPtr> demands;
          for (int32_t ip = 0; ip < D; ++ip) {
            auto [k, i] = h.at(K, ip);
            for (int32_t j = 0; j < D; ++j) {
              auto [l, jp] = h.at(Lp, j);
              demands.push_back(f_exists(
                  "xp",
                  f_exists("zp",
                           f_and({f_atom(lay.f_sym(k), {"x", "xp"}),
                                  f_atom(lay.f_sym(l), {"z", "zp"}),
                                  f_atom(lay.e_sym(i * D + j, jp * D + ip),
                                         {"xp", "zp"})}))));
            }
          }
          combos.push_back(f_implies(guard, f_and(std::move(demands))));
        }

  FormulaPtr both_childless =
      f_and({f_not(f_exists("y", f_or_f(lay, "x", "y"))),
             f_not(f_exists("y", f_or_f(lay, "z", "y")))});

  return f_forall(
      "x", f_forall("z", f_or({phi_root(D, "x"), phi_root(D, "z"), both_childless,
                               f_and(std::move(combos))})));
}

FormulaPtr phi_zigzag(const RotationGraph& h) {
  const SigLayout lay = layout_for_base(h);
  return f_and({phi_tree(lay.D), phi_rotation_map(lay.D), phi_base(h),
                phi_recursion(h)});
}

FormulaPtr phi_conjunct(const RotationGraph& h, ZigzagPart part) {
  const SigLayout lay = layout_for_base(h);
  switch (part) {
    case ZigzagPart::Tree:
      return phi_tree(lay.D);
    case ZigzagPart::Rotation:
      return phi_rotation_map(lay.D);
    case ZigzagPart::Base:
      return phi_base(h);
    case ZigzagPart::Recursion:
      return phi_recursion(h);
    case ZigzagPart::All:
      return phi_zigzag(h);
  }
  throw std::logic_error("phi_conjunct: bad part");
}

}  // namespace ell
