#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ell/rotgraph.hpp"
#include "ell/structures.hpp"

namespace ell {

// First-order AST over a relational signature. Quantifier counting forms
// (exists>=m, exists=1) are desugared at parse time; the AST has plain
// quantifiers only.
struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { True, False, Atom, Eq, Not, And, Or, Exists, Forall };
  Kind kind = Kind::True;
  int symbol = -1;                 // Atom: index into the signature
  std::vector<std::string> vars;   // Atom arguments; Eq: exactly two
  std::vector<FormulaPtr> children;
  std::string qvar;                // Exists/Forall
  int line = 0, col = 0;           // source position when parsed
};

FormulaPtr f_true();
FormulaPtr f_false();
FormulaPtr f_atom(int symbol, std::vector<std::string> vars);
FormulaPtr f_eq(std::string a, std::string b);
FormulaPtr f_not(FormulaPtr f);
FormulaPtr f_and(std::vector<FormulaPtr> children);  // empty => true
FormulaPtr f_or(std::vector<FormulaPtr> children);   // empty => false
FormulaPtr f_exists(std::string v, FormulaPtr body);
FormulaPtr f_forall(std::string v, FormulaPtr body);
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b);  // !a | b

std::vector<std::string> free_vars(const FormulaPtr& f);

struct ParseError : std::runtime_error {
  int line = 0, col = 0;
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(msg + " at " + std::to_string(line) + ":" +
                           std::to_string(col)),
        line(line),
        col(col) {}
};

// Grammar: exists/forall x. body, counting forms exists>=K / exists=1,
// connectives & | ! ->, atoms R(x,y), equalities x=y, true/false, parens.
FormulaPtr parse_formula(const std::string& text, const Signature& sig);
std::string print_formula(const FormulaPtr& f, const Signature& sig);

struct PrefixClass {
  bool prenex = true;
  int blocks = 0;  // number of quantifier blocks; 0 = quantifier-free
  bool leading_exists = false;
  std::string label() const;
  bool operator==(const PrefixClass&) const = default;
};
PrefixClass prefix_class(const FormulaPtr& f);

struct EvalBudgetExceeded : std::runtime_error {
  EvalBudgetExceeded() : std::runtime_error("evaluation budget exceeded") {}
};

struct EvalOptions {
  int64_t budget = 100000000;  // quantifier assignment probes
};

using Assignment = std::vector<std::pair<std::string, int32_t>>;

// Tarskian truth by exhaustive assignment enumeration. Every free variable
// must be assigned.
bool eval_formula(const Structure& a, const FormulaPtr& f,
                  const Assignment& assignment = {}, const EvalOptions& opt = {});

// Quantifier-free description of a: satisfying tuples of iota(a, vars) in any
// structure are exactly the order-preserving induced-substructure embeddings.
FormulaPtr iota_formula(const Structure& a, const std::vector<std::string>& vars,
                        int64_t budget = 100000000);

// ---------------------------------------------------------------------------
// Zig-zag formula family and fast structural checkers.

enum class ZigzagPart { Tree, Rotation, Base, Recursion, All };

struct CheckResult {
  bool ok = true;
  std::string witness;  // first violation, names the offending element
};

// Direct structural algorithms, sound and complete for the corresponding
// emitted conjunct; h is the base rotation map (needed by Base/Recursion).
CheckResult check_zigzag(const Structure& a, const RotationGraph& h,
                         ZigzagPart part);

// Tree and Rotation only; these conjuncts do not depend on the base graph.
CheckResult check_zigzag_local(const Structure& a, ZigzagPart part);

// Emitted formulas over signature_for(D). phi_base/phi_recursion take the
// base graph h (D-regular on D^4 vertices).
FormulaPtr phi_root(int32_t D, const std::string& x);
FormulaPtr phi_tree(int32_t D);
FormulaPtr phi_rotation_map(int32_t D);
FormulaPtr phi_base(const RotationGraph& h);
FormulaPtr phi_recursion(const RotationGraph& h);
FormulaPtr phi_zigzag(const RotationGraph& h);
FormulaPtr phi_conjunct(const RotationGraph& h, ZigzagPart part);

}  // namespace ell
