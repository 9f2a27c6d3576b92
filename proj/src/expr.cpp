#include "msh/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>

namespace msh {

double ScalarExpr::eval_node(int i, const EvalContext& ctx) const {
    const Node& n = nodes_[i];
    switch (n.kind) {
        case Node::kConst:
            return n.value;
        case Node::kVarY: {
            if (n.slot >= static_cast<int>(ctx.ys.size()))
                throw DimensionMismatch("expression references y" + std::to_string(n.slot + 1) +
                                        " but only " + std::to_string(ctx.ys.size()) +
                                        " arguments were supplied");
            const Vec& v = ctx.ys[n.slot];
            if (n.comp >= v.n)
                throw DimensionMismatch("component index exceeds argument dimension");
            return v[n.comp];
        }
        case Node::kVarX:
            if (!ctx.x) throw DimensionMismatch("expression uses x but no point was supplied");
            if (n.comp >= ctx.x->n)
                throw DimensionMismatch("x component index exceeds spatial dimension");
            return (*ctx.x)[n.comp];
        case Node::kVarNamed:
            if (n.slot >= static_cast<int>(ctx.named.size()))
                throw DimensionMismatch("named symbol not bound");
            return ctx.named[n.slot];
        case Node::kAdd:
            return eval_node(n.a, ctx) + eval_node(n.b, ctx);
        case Node::kSub:
            return eval_node(n.a, ctx) - eval_node(n.b, ctx);
        case Node::kMul:
            return eval_node(n.a, ctx) * eval_node(n.b, ctx);
        case Node::kDiv:
            return eval_node(n.a, ctx) / eval_node(n.b, ctx);
        case Node::kNeg:
            return -eval_node(n.a, ctx);
        case Node::kSin:
            return std::sin(eval_node(n.a, ctx));
        case Node::kCos:
            return std::cos(eval_node(n.a, ctx));
        case Node::kExp:
            return std::exp(eval_node(n.a, ctx));
        case Node::kSqrt:
            return std::sqrt(eval_node(n.a, ctx));
    }
    return 0.0;
}

double ScalarExpr::eval(const EvalContext& ctx) const { return eval_node(root_, ctx); }

int CoefficientExpr::n_args() const {
    int n = 0;
    for (const auto& e : entries) n = std::max(n, e.max_y_index());
    return n;
}

Mat CoefficientExpr::eval_matrix(const EvalContext& ctx, int d) const {
    if (is_scalar()) return Mat::identity(d, entries[0].eval(ctx));
    if (rows != d || cols != d)
        throw DimensionMismatch("matrix expression is " + std::to_string(rows) + "x" +
                                std::to_string(cols) + " but dimension is " + std::to_string(d));
    Mat m(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = entries[i * cols + j].eval(ctx);
    return m;
}

// ---------------------------------------------------------------------------
// Parser

class ExprParser {
  public:
    ExprParser(const std::string& text, bool kernel_mode, const std::vector<std::string>& names)
        : text_(text), kernel_mode_(kernel_mode), names_(names) {}

    ScalarExpr parse_expression() {
        ScalarExpr e;
        expr_ = &e;
        e.root_ = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

    CoefficientExpr parse_top() {
        CoefficientExpr c;
        c.source = text_;
        skip_ws();
        if (peek() == '[') {
            parse_matrix(c);
        } else {
            c.rows = c.cols = 1;
            c.entries.push_back(parse_expression());
        }
        return c;
    }

  private:
    const std::string& text_;
    std::size_t pos_ = 0;
    bool kernel_mode_;
    std::vector<std::string> names_;  // owned: callers may pass temporaries
    ScalarExpr* expr_ = nullptr;

    using Node = ScalarExpr::Node;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
    }

    int add_node(Node n) {
        expr_->nodes_.push_back(n);
        return static_cast<int>(expr_->nodes_.size()) - 1;
    }
    int leaf_const(double v) {
        Node n;
        n.kind = Node::kConst;
        n.value = v;
        return add_node(n);
    }
    int binary(Node::Kind k, int a, int b) {
        Node n;
        n.kind = k;
        n.a = a;
        n.b = b;
        return add_node(n);
    }
    int unary(Node::Kind k, int a) {
        Node n;
        n.kind = k;
        n.a = a;
        return add_node(n);
    }

    int parse_sum() {
        int lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = binary(Node::kAdd, lhs, parse_term());
            else if (accept('-'))
                lhs = binary(Node::kSub, lhs, parse_term());
            else
                return lhs;
        }
    }

    int parse_term() {
        int lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = binary(Node::kMul, lhs, parse_unary());
            else if (accept('/'))
                lhs = binary(Node::kDiv, lhs, parse_unary());
            else
                return lhs;
        }
    }

    int parse_unary() {
        bool neg = false;
        for (;;) {
            if (accept('-'))
                neg = !neg;
            else if (accept('+'))
                ;
            else
                break;
        }
        int p = parse_primary();
        return neg ? unary(Node::kNeg, p) : p;
    }

    int parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (c == '(') {
            ++pos_;
            int e = parse_sum();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    int parse_number() {
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("malformed number", pos_);
        pos_ += static_cast<std::size_t>(end - begin);
        return leaf_const(v);
    }

    int parse_identifier() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                       text_[pos_] == '_'))
            ++pos_;
        std::string id = text_.substr(start, pos_ - start);

        if (id == "pi") return leaf_const(kPi);
        if (id == "sin" || id == "cos" || id == "exp" || id == "sqrt") {
            if (id == "sqrt" && kernel_mode_)
                throw ParseError("sqrt is not available in coefficient kernels", start);
            expect('(');
            int arg = parse_sum();
            expect(')');
            Node::Kind k = id == "sin"   ? Node::kSin
                           : id == "cos" ? Node::kCos
                           : id == "exp" ? Node::kExp
                                         : Node::kSqrt;
            return unary(k, arg);
        }

        Node n;
        if (id == "x") {
            n.kind = Node::kVarX;
            expr_->uses_x_ = true;
        } else if (id.size() >= 2 && id[0] == 'y' && std::isdigit(static_cast<unsigned char>(id[1]))) {
            int slot = std::atoi(id.c_str() + 1);
            if (slot < 1 || slot > kMaxArgs)
                throw ParseError("y-variable index out of range", start);
            n.kind = Node::kVarY;
            n.slot = slot - 1;
            expr_->max_y_ = std::max(expr_->max_y_, slot);
        } else {
            for (std::size_t k = 0; k < names_.size(); ++k)
                if (names_[k] == id) {
                    n.kind = Node::kVarNamed;
                    n.slot = static_cast<int>(k);
                    n.comp = 0;
                    if (accept('[')) throw ParseError("named symbols are scalars", pos_);
                    return add_node(n);
                }
            throw ParseError("unknown identifier '" + id + "'", start);
        }

        n.comp = 0;
        if (accept('[')) {
            skip_ws();
            int comp = 0;
            std::size_t ip = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                comp = comp * 10 + (text_[pos_++] - '0');
            if (pos_ == ip || comp < 1 || comp > kMaxDim)
                throw ParseError("bad component index", ip);
            expect(']');
            n.comp = comp - 1;
        }
        return add_node(n);
    }

    void parse_matrix(CoefficientExpr& c) {
        expect('[');
        std::vector<std::vector<ScalarExpr>> rows;
        do {
            expect('[');
            std::vector<ScalarExpr> row;
            do {
                ScalarExpr e;
                expr_ = &e;
                e.root_ = parse_sum();
                row.push_back(std::move(e));
            } while (accept(','));
            expect(']');
            rows.push_back(std::move(row));
        } while (accept(','));
        expect(']');
        skip_ws();
        if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);

        c.rows = static_cast<int>(rows.size());
        c.cols = static_cast<int>(rows[0].size());
        if (c.rows > 2 || c.cols > 2 || c.rows != c.cols)
            throw ParseError("matrix literal must be 1x1 or 2x2", 0);
        for (auto& r : rows) {
            if (static_cast<int>(r.size()) != c.cols)
                throw ParseError("ragged matrix literal", 0);
            for (auto& e : r) c.entries.push_back(std::move(e));
        }
    }
};

// ---------------------------------------------------------------------------
// Periodicity-by-construction check for kernel-mode expressions.

void check_periodicity(const ScalarExpr& expr) {
    using N = ScalarExpr::Node;
    const auto& nodes = expr.nodes_;

    // does the subtree reference any y-variable?
    std::function<bool(int)> has_y = [&](int i) -> bool {
        const N& n = nodes[i];
        if (n.kind == N::kVarY) return true;
        if (n.a >= 0 && has_y(n.a)) return true;
        if (n.b >= 0 && has_y(n.b)) return true;
        return false;
    };

    // Matches c * yk[j] with constant factors in any arrangement. Returns the
    // folded constant; throws if the shape is anything else.
    struct Monomial {
        double coef = 1.0;
        bool var_seen = false;
    };
    std::function<Monomial(int)> match = [&](int i) -> Monomial {
        const N& n = nodes[i];
        Monomial m;
        switch (n.kind) {
            case N::kConst:
                m.coef = n.value;
                return m;
            case N::kVarY:
                m.var_seen = true;
                return m;
            case N::kNeg: {
                m = match(n.a);
                m.coef = -m.coef;
                return m;
            }
            case N::kMul: {
                Monomial a = match(n.a), b = match(n.b);
                if (a.var_seen && b.var_seen)
                    throw PeriodicityViolation(
                        "trigonometric argument multiplies two periodic variables");
                m.coef = a.coef * b.coef;
                m.var_seen = a.var_seen || b.var_seen;
                return m;
            }
            case N::kDiv: {
                Monomial a = match(n.a), b = match(n.b);
                if (b.var_seen)
                    throw PeriodicityViolation("trigonometric argument divides by a variable");
                m.coef = a.coef / b.coef;
                m.var_seen = a.var_seen;
                return m;
            }
            default:
                throw PeriodicityViolation(
                    "trigonometric argument must be an integer multiple of 2*pi times one "
                    "periodic coordinate");
        }
    };

    std::function<void(int)> walk = [&](int i) {
        const N& n = nodes[i];
        if (n.kind == N::kVarY)
            throw PeriodicityViolation(
                "periodic variable appears outside a compliant sin/cos argument");
        if (n.kind == N::kSin || n.kind == N::kCos) {
            if (has_y(n.a)) {
                Monomial m = match(n.a);
                double cycles = m.coef / (2.0 * kPi);
                if (std::abs(cycles - std::round(cycles)) > 1e-9)
                    throw PeriodicityViolation("trigonometric frequency " +
                                               std::to_string(m.coef) +
                                               " is not an integer multiple of 2*pi");
            } else {
                walk(n.a);
            }
            return;
        }
        if (n.a >= 0) walk(n.a);
        if (n.b >= 0) walk(n.b);
    };

    walk(expr.root_);
}

CoefficientExpr parse_coefficient(const std::string& text) {
    ExprParser p(text, /*kernel_mode=*/true, {});
    CoefficientExpr c = p.parse_top();
    for (const auto& e : c.entries) check_periodicity(e);
    return c;
}

ScalarExpr parse_scalar(const std::string& text, const std::vector<std::string>& names) {
    ExprParser p(text, /*kernel_mode=*/false, names);
    return p.parse_expression();
}

}  // namespace msh
