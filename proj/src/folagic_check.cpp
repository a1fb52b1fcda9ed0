#include <algorithm>
#include <sstream>

#include "ell/folagic.hpp"
#include "ell/util.hpp"

namespace ell {

namespace {

struct Checker {
  const Structure& a;
  const RotationGraph& h;
  const SigLayout lay;
  StructureIndex idx;

  Checker(const Structure& a_, const RotationGraph& h_, const SigLayout& lay_)
      : a(a_), h(h_), lay(lay_), idx(a_) {}

  bool is_root(int32_t v) const {
    for (int32_t k = 0; k < lay.D4; ++k)
      if (!idx.in2(lay.f_sym(k), v).empty()) return false;
    return true;
  }

  bool has_children(int32_t v) const {
    for (int32_t k = 0; k < lay.D4; ++k)
      if (!idx.out2(lay.f_sym(k), v).empty()) return true;
    return false;
  }

  CheckResult fail(int32_t v, const std::string& why) const {
    return {false, "element " + std::to_string(v) + ": " + why};
  }

  // phi_tree: exactly one root; every element is the R-looped root or has a
  // unique parent and no R tuples; every element is a leaf with all L
  // self-loops (and nothing else in L) or has exactly one child per F_k,
  // each distinct from it, unshared across k, and no L tuples at all.
  CheckResult tree() {
    int64_t roots = 0;
    for (int32_t v = 0; v < int32_t(a.n()); ++v)
      if (is_root(v)) ++roots;
    if (roots != 1)
      return {false, "expected exactly one root, found " + std::to_string(roots)};

    for (int32_t v = 0; v < int32_t(a.n()); ++v) {
      if (is_root(v)) {
        if (!a.has_pair(lay.r_index, v, v))
          return fail(v, "root lacks the R self-loop");
      } else {
        // exactly one distinct parent element (multiple F_k from the same
        // parent would be caught by the children clause below)
        std::vector<int32_t> parents;
        for (int32_t k = 0; k < lay.D4; ++k)
          for (auto [w, off] : idx.in2(lay.f_sym(k), v)) {
            (void)off;
            parents.push_back(w);
          }
        std::sort(parents.begin(), parents.end());
        parents.erase(std::unique(parents.begin(), parents.end()), parents.end());
        if (parents.size() != 1)
          return fail(v, "needs exactly one F-parent, found " +
                             std::to_string(parents.size()));
        if (!idx.out2(lay.r_index, v).empty() || !idx.in2(lay.r_index, v).empty())
          return fail(v, "non-root element touches R");
      }
    }

    for (int32_t v = 0; v < int32_t(a.n()); ++v) {
      bool l_self = true;
      for (int32_t k = 0; k < lay.D4 && l_self; ++k)
        l_self = a.has_pair(lay.l_sym(k), v, v);
      bool l_other = false;
      for (int32_t k = 0; k < lay.D4 && !l_other; ++k) {
        for (auto [w, off] : idx.out2(lay.l_sym(k), v)) {
          (void)off;
          if (w != v) l_other = true;
        }
        for (auto [w, off] : idx.in2(lay.l_sym(k), v)) {
          (void)off;
          if (w != v) l_other = true;
        }
      }
      bool l_any = l_other;
      for (int32_t k = 0; k < lay.D4 && !l_any; ++k)
        l_any = !idx.out2(lay.l_sym(k), v).empty() ||
                !idx.in2(lay.l_sym(k), v).empty();

      if (!has_children(v)) {
        if (!l_self) return fail(v, "leaf lacks some L_k self-loop");
        if (l_other) return fail(v, "leaf has an L tuple to another element");
      } else {
        if (l_any) return fail(v, "internal element touches L");
        for (int32_t k = 0; k < lay.D4; ++k) {
          const auto& out = idx.out2(lay.f_sym(k), v);
          if (out.size() != 1)
            return fail(v, "needs exactly one F_" + std::to_string(k) +
                               "-child, found " + std::to_string(out.size()));
          int32_t child = out[0].first;
          if (child == v) return fail(v, "is its own F-child");
          for (int32_t k2 = 0; k2 < lay.D4; ++k2) {
            if (k2 == k) continue;
            for (auto [w, off] : idx.out2(lay.f_sym(k2), v)) {
              (void)off;
              if (w == child)
                return fail(v, "child " + std::to_string(child) +
                                   " is shared between F indices");
            }
          }
        }
      }
    }
    return {true, ""};
  }

  // phi_rotationMap: E tuples are self-inverse and, per (element, port i),
  // there is exactly one outgoing tuple across all j.
  CheckResult rotation() {
    for (int32_t i = 0; i < lay.D2; ++i)
      for (int32_t j = 0; j < lay.D2; ++j) {
        const auto& flat = a.flat(lay.e_sym(i, j));
        for (int64_t off = 0; off < int64_t(flat.size()); off += 2) {
          if (!a.has_pair(lay.e_sym(j, i), flat[off + 1], flat[off])) {
            std::ostringstream os;
            os << "E tuple (" << flat[off] << "," << flat[off + 1]
               << ") with ports (" << i << "," << j << ") has no inverse";
            return {false, os.str()};
          }
        }
      }
    for (int32_t v = 0; v < int32_t(a.n()); ++v)
      for (int32_t i = 0; i < lay.D2; ++i) {
        int64_t out = 0;
        for (int32_t j = 0; j < lay.D2; ++j)
          out += int64_t(idx.out2(lay.e_sym(i, j), v).size());
        if (out != 1)
          return fail(v, "E port " + std::to_string(i) + " has " +
                             std::to_string(out) + " targets, wants exactly 1");
      }
    return {true, ""};
  }

  // phi_base: every root carries the diagonal E self-loops and no other E
  // tuples, and its children realize G_1 = H^2 through the F_k numbering.
  CheckResult base() {
    RotationGraph h2 = square(h);
    for (int32_t v = 0; v < int32_t(a.n()); ++v) {
      if (!is_root(v)) continue;
      for (int32_t i = 0; i < lay.D2; ++i)
        for (int32_t j = 0; j < lay.D2; ++j) {
          bool diag = i == j;
          if (diag && !a.has_pair(lay.e_sym(i, i), v, v))
            return fail(v, "root lacks E self-loop at port " + std::to_string(i));
          if (!diag && a.has_pair(lay.e_sym(i, j), v, v))
            return fail(v, "root has an off-diagonal E self-loop (" +
                               std::to_string(i) + "," + std::to_string(j) + ")");
          for (auto [w, off] : idx.out2(lay.e_sym(i, j), v)) {
            (void)off;
            if (w != v) return fail(v, "root has an E edge to another element");
          }
          for (auto [w, off] : idx.in2(lay.e_sym(i, j), v)) {
            (void)off;
            if (w != v) return fail(v, "root has an incoming E edge");
          }
        }
      for (int32_t k = 0; k < lay.D4; ++k)
        for (int32_t i = 0; i < lay.D2; ++i) {
          auto [kp, ip] = h2.at(k, i);
          bool found = false;
          for (auto [y, off1] : idx.out2(lay.f_sym(k), v)) {
            (void)off1;
            for (auto [yp, off2] : idx.out2(lay.f_sym(kp), v)) {
              (void)off2;
              if (a.has_pair(lay.e_sym(i, ip), y, yp)) found = true;
            }
          }
          if (!found) {
            std::ostringstream os;
            os << "missing G_1 edge for ROT_{H^2}(" << k << "," << i << ") = ("
               << kp << "," << ip << ") below the root";
            return fail(v, os.str());
          }
        }
    }
    return {true, ""};
  }

  // phi_recursion: for non-root x,z that are not both childless, every
  // two-step E path from x to z forces the corresponding zig-zag edges
  // between their children.
  CheckResult recursion() {
    const int32_t D = lay.D;
    for (int32_t x = 0; x < int32_t(a.n()); ++x) {
      if (is_root(x)) continue;
      for (int32_t i1 = 0; i1 < lay.D2; ++i1)
        for (int32_t j1 = 0; j1 < lay.D2; ++j1) {
          for (auto [y, off1] : idx.out2(lay.e_sym(i1, j1), x)) {
            (void)off1;
            for (int32_t i2 = 0; i2 < lay.D2; ++i2)
              for (int32_t j2 = 0; j2 < lay.D2; ++j2) {
                for (auto [z, off2] : idx.out2(lay.e_sym(i2, j2), y)) {
                  (void)off2;
                  if (is_root(z)) continue;
                  if (!has_children(x) && !has_children(z)) continue;
                  auto r = demand(x, z, i1, j1, i2, j2, D);
                  if (!r.ok) return r;
                }
              }
          }
        }
    }
    return {true, ""};
  }

  // The zig-zag edges demanded by a 2-path with colors (k1',l1') = (i1,j1)
  // and (k2',l2') = (i2,j2): K = (k1',k2'), L' = (l2',l1') as H vertices.
  CheckResult demand(int32_t x, int32_t z, int32_t k1p, int32_t l1p, int32_t k2p,
                     int32_t l2p, int32_t D) {
    const int32_t K = k1p * lay.D2 + k2p;
    const int32_t Lp = l2p * lay.D2 + l1p;
    for (int32_t ip = 0; ip < D; ++ip) {
      auto [k, i] = h.at(K, ip);  // ROT_H(k,i) = (K, i')
      for (int32_t j = 0; j < D; ++j) {
        auto [l, jp] = h.at(Lp, j);  // ROT_H(L', j) = (l, j')
        int e = lay.e_sym(i * D + j, jp * D + ip);
        bool found = false;
        for (auto [xc, off1] : idx.out2(lay.f_sym(k), x)) {
          (void)off1;
          for (auto [zc, off2] : idx.out2(lay.f_sym(l), z)) {
            (void)off2;
            if (a.has_pair(e, xc, zc)) found = true;
          }
        }
        if (!found) {
          std::ostringstream os;
          os << "2-path (" << x << " -> " << z << ") with colors (" << k1p << ","
             << l1p << "),(" << k2p << "," << l2p
             << ") lacks the zig-zag child edge for (i,j)=(" << i << "," << j
             << ")";
          return {false, os.str()};
        }
      }
    }
    return {true, ""};
  }
};

}  // namespace

CheckResult check_zigzag_local(const Structure& a, ZigzagPart part) {
  require(part == ZigzagPart::Tree || part == ZigzagPart::Rotation,
          "check_zigzag_local: only the tree and rotation conjuncts are local");
  auto lay = layout_of(a.sig());
  require(lay.has_value(), "check_zigzag_local: signature is not signature_for(D)");
  RotationGraph loops = RotationGraph::empty(lay->D4, lay->D);
  for (int32_t v = 0; v < loops.n; ++v)
    for (int32_t i = 0; i < loops.degree; ++i) loops.set(v, i, v, i);
  return check_zigzag(a, loops, part);
}

CheckResult check_zigzag(const Structure& a, const RotationGraph& h,
                         ZigzagPart part) {
  auto lay = layout_of(a.sig());
  require(lay.has_value(), "check_zigzag: signature is not signature_for(D)");
  require(int64_t(h.n) == int64_t(lay->D4) && h.degree == lay->D,
          "check_zigzag: base graph must be D-regular on D^4 vertices");
  Checker c(a, h, *lay);
  switch (part) {
    case ZigzagPart::Tree:
      return c.tree();
    case ZigzagPart::Rotation:
      return c.rotation();
    case ZigzagPart::Base:
      return c.base();
    case ZigzagPart::Recursion:
      return c.recursion();
    case ZigzagPart::All: {
      for (auto p : {ZigzagPart::Tree, ZigzagPart::Rotation, ZigzagPart::Base,
                     ZigzagPart::Recursion}) {
        auto r = check_zigzag(a, h, p);
        if (!r.ok) return r;
      }
      return {true, ""};
    }
  }
  return {false, "unreachable"};
}

}  // namespace ell
