#ifndef MSH_EXPR_HPP
#define MSH_EXPR_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msh/common.hpp"
#include "msh/errors.hpp"

namespace msh {

// Expression mini-language for coefficient kernels, forcings and scale rules.
//
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := ('+'|'-')* primary
//   primary := number | 'pi' | var | func '(' expr ')' | '(' expr ')'
//   var     := ('x' | 'y'DIGIT | name) ('[' index ']')?     index is 1-based
//   func    := 'sin' | 'cos' | 'exp' | 'sqrt'*               (*plain mode only)
//
// Kernel (periodic) mode additionally enforces periodicity by construction:
// every y-variable must appear inside a sin/cos argument of the exact shape
// c * yk[j] with c an integer multiple of 2*pi (constant factors may be
// written in any order). The slow variable x is unconstrained, which is what
// locally periodic coefficients A(x, y) need.

struct EvalContext {
    std::span<const Vec> ys;                 // periodic arguments y1..yn
    const Vec* x = nullptr;                  // slow spatial point, if any
    std::span<const double> named;           // plain-mode named scalars
};

class ScalarExpr {
  public:
    double eval(const EvalContext& ctx) const;
    int max_y_index() const { return max_y_; }  // 1-based count of y-slots used
    bool uses_x() const { return uses_x_; }

  private:
    struct Node {
        enum Kind : std::uint8_t {
            kConst, kVarY, kVarX, kVarNamed,
            kAdd, kSub, kMul, kDiv, kNeg,
            kSin, kCos, kExp, kSqrt
        } kind;
        double value = 0.0;
        int slot = 0;  // y index or named-symbol index
        int comp = 0;  // 0-based component
        int a = -1, b = -1;
    };

    std::vector<Node> nodes_;
    int root_ = -1;
    int max_y_ = 0;
    bool uses_x_ = false;

    double eval_node(int i, const EvalContext& ctx) const;
    friend class ExprParser;
    friend void check_periodicity(const ScalarExpr&);
};

/// Parsed coefficient: either a scalar entry (meaning a(y) * I) or a full
/// d x d matrix of entries.
struct CoefficientExpr {
    std::string source;
    int rows = 1, cols = 1;
    std::vector<ScalarExpr> entries;  // row-major

    bool is_scalar() const { return rows == 1 && cols == 1; }
    int n_args() const;  // number of y-slots referenced
    Mat eval_matrix(const EvalContext& ctx, int d) const;
};

/// Kernel-mode parse: matrix literal allowed at top level, periodicity
/// enforced. Throws ParseError / PeriodicityViolation.
CoefficientExpr parse_coefficient(const std::string& text);

/// Plain-mode parse for forcings, boundary data and family rules: any
/// variable may appear anywhere, sqrt is available, no matrix literals.
/// `names` lists the allowed named scalars (e.g. {"eps1"}).
ScalarExpr parse_scalar(const std::string& text, const std::vector<std::string>& names = {});

}  // namespace msh

#endif
