#include <unordered_map>

#include "ell/folagic.hpp"
#include "ell/util.hpp"

namespace ell {

namespace {

struct Node {
  Formula::Kind kind;
  int symbol = -1;
  std::vector<int> arg_slots;  // Atom args / Eq pair
  int slot = -1;               // quantifier binding slot
  std::vector<int> children;
};

struct Compiled {
  std::vector<Node> nodes;
  int root = -1;
  int slot_count = 0;
};

struct CompileCtx {
  Compiled out;
  std::vector<std::pair<std::string, int>> scope;  // var -> slot

  int slot_of(const std::string& v) {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == v) return it->second;
    throw std::invalid_argument("eval: unassigned free variable '" + v + "'");
  }

  int compile(const FormulaPtr& f) {
    Node n;
    n.kind = f->kind;
    switch (f->kind) {
      case Formula::Kind::True:
      case Formula::Kind::False:
        break;
      case Formula::Kind::Atom:
        n.symbol = f->symbol;
        for (const auto& v : f->vars) n.arg_slots.push_back(slot_of(v));
        break;
      case Formula::Kind::Eq:
        n.arg_slots = {slot_of(f->vars[0]), slot_of(f->vars[1])};
        break;
      case Formula::Kind::Not:
      case Formula::Kind::And:
      case Formula::Kind::Or:
        for (const auto& c : f->children) n.children.push_back(compile(c));
        break;
      case Formula::Kind::Exists:
      case Formula::Kind::Forall: {
        n.slot = out.slot_count++;
        scope.push_back({f->qvar, n.slot});
        n.children.push_back(compile(f->children[0]));
        scope.pop_back();
        break;
      }
    }
    out.nodes.push_back(std::move(n));
    return int(out.nodes.size()) - 1;
  }
};

struct Evaluator {
  const Structure* a;
  const Compiled* c;
  int64_t budget;
  std::vector<int32_t> env;
  std::vector<int32_t> tmp;

  bool run(int ni) {
    const Node& n = c->nodes[ni];
    switch (n.kind) {
      case Formula::Kind::True:
        return true;
      case Formula::Kind::False:
        return false;
      case Formula::Kind::Atom: {
        tmp.clear();
        for (int s : n.arg_slots) tmp.push_back(env[s]);
        return a->has_tuple(n.symbol, tmp);
      }
      case Formula::Kind::Eq:
        return env[n.arg_slots[0]] == env[n.arg_slots[1]];
      case Formula::Kind::Not:
        return !run(n.children[0]);
      case Formula::Kind::And:
        for (int ch : n.children)
          if (!run(ch)) return false;
        return true;
      case Formula::Kind::Or:
        for (int ch : n.children)
          if (run(ch)) return true;
        return false;
      case Formula::Kind::Exists: {
        for (int32_t v = 0; v < a->n(); ++v) {
          if (--budget < 0) throw EvalBudgetExceeded();
          env[n.slot] = v;
          if (run(n.children[0])) return true;
        }
        return false;
      }
      case Formula::Kind::Forall: {
        for (int32_t v = 0; v < a->n(); ++v) {
          if (--budget < 0) throw EvalBudgetExceeded();
          env[n.slot] = v;
          if (!run(n.children[0])) return false;
        }
        return true;
      }
    }
    return false;
  }
};

}  // namespace

bool eval_formula(const Structure& a, const FormulaPtr& f,
                  const Assignment& assignment, const EvalOptions& opt) {
  CompileCtx ctx;
  for (const auto& [name, value] : assignment) {
    require(value >= 0 && value < a.n(), "eval: assignment out of range for '" + name + "'");
    int slot = ctx.out.slot_count++;
    ctx.scope.push_back({name, slot});
  }
  ctx.out.root = ctx.compile(f);
  Evaluator ev;
  ev.a = &a;
  ev.c = &ctx.out;
  ev.budget = opt.budget;
  ev.env.assign(ctx.out.slot_count, 0);
  for (size_t i = 0; i < assignment.size(); ++i)
    ev.env[int(i)] = assignment[i].second;
  return ev.run(ctx.out.root);
}

FormulaPtr iota_formula(const Structure& a, const std::vector<std::string>& vars,
                        int64_t budget) {
  require(int64_t(vars.size()) == a.n(), "iota: need exactly |A| variables");
  std::vector<FormulaPtr> parts;
  for (size_t s = 0; s < a.sig().symbols.size(); ++s) {
    const int ar = a.sig().symbols[s].arity;
    int64_t total = 1;
    for (int k = 0; k < ar; ++k) {
      total *= a.n();
      require(total <= budget, "iota: tuple enumeration exceeds budget");
    }
    budget -= total;
    std::vector<int32_t> t(ar, 0);
    std::vector<std::string> args(ar);
    // positive atoms over the relation, then negated atoms over the rest
    for (int pass = 0; pass < 2; ++pass) {
      for (int64_t idx = 0; idx < total; ++idx) {
        int64_t rest = idx;
        for (int k = ar - 1; k >= 0; --k) {
          t[k] = int32_t(rest % a.n());
          rest /= a.n();
        }
        bool present = a.has_tuple(int(s), t);
        if (present != (pass == 0)) continue;
        for (int k = 0; k < ar; ++k) args[k] = vars[t[k]];
        auto atom = f_atom(int(s), args);
        parts.push_back(present ? atom : f_not(atom));
      }
    }
  }
  for (size_t i = 0; i < vars.size(); ++i)
    for (size_t j = i + 1; j < vars.size(); ++j)
      parts.push_back(f_not(f_eq(vars[i], vars[j])));
  return f_and(std::move(parts));
}

}  // namespace ell
