#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cycleguard/errors.hpp"
#include "cycleguard/rational.hpp"

namespace cycleguard {

enum class Var { X, Y };

namespace detail {

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    enum class Kind { Num, Variable, Neg, Add, Sub, Mul, Div, Pow, Func };
    enum class Fn { Exp, Sin, Cos, Sqrt, Abs };

    Kind kind{};
    Rat num;          // Kind::Num
    Var var{};        // Kind::Variable
    Fn fn{};          // Kind::Func
    long exponent{};  // Kind::Pow
    NodePtr a, b;
};

inline NodePtr make_num(Rat v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Num;
    n->num = std::move(v);
    return n;
}

inline NodePtr make_var(Var v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Variable;
    n->var = v;
    return n;
}

inline bool is_num(const NodePtr& n, const Rat& v) {
    return n->kind == ExprNode::Kind::Num && n->num == v;
}

inline NodePtr make_neg(NodePtr e) {
    if (e->kind == ExprNode::Kind::Num) return make_num(-e->num);
    if (e->kind == ExprNode::Kind::Neg) return e->a;
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Neg;
    n->a = std::move(e);
    return n;
}

inline NodePtr make_binary(ExprNode::Kind k, NodePtr a, NodePtr b) {
    using K = ExprNode::Kind;
    bool an = a->kind == K::Num, bn = b->kind == K::Num;
    if (an && bn) {
        switch (k) {
            case K::Add: return make_num(a->num + b->num);
            case K::Sub: return make_num(a->num - b->num);
            case K::Mul: return make_num(a->num * b->num);
            case K::Div:
                if (b->num != 0) return make_num(a->num / b->num);
                break;  // leave 1/0 in the tree; it fails at evaluation
            default: break;
        }
    }
    switch (k) {
        case K::Add:
            if (an && a->num == 0) return b;
            if (bn && b->num == 0) return a;
            break;
        case K::Sub:
            if (bn && b->num == 0) return a;
            if (an && a->num == 0) return make_neg(b);
            break;
        case K::Mul:
            if (is_num(a, 0) || is_num(b, 0)) return make_num(Rat(0));
            if (is_num(a, 1)) return b;
            if (is_num(b, 1)) return a;
            break;
        case K::Div:
            if (is_num(a, 0) && !is_num(b, 0)) return make_num(Rat(0));
            if (is_num(b, 1)) return a;
            break;
        default: break;
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

inline NodePtr make_pow(NodePtr base, long e) {
    if (e == 0) return make_num(Rat(1));
    if (e == 1) return base;
    if (base->kind == ExprNode::Kind::Num && (base->num != 0 || e > 0))
        return make_num(rat_pow(base->num, e));
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Pow;
    n->exponent = e;
    n->a = std::move(base);
    return n;
}

inline NodePtr make_func(ExprNode::Fn f, NodePtr arg) {
    if (f == ExprNode::Fn::Abs && arg->kind == ExprNode::Kind::Num)
        return make_num(abs(arg->num));
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Func;
    n->fn = f;
    n->a = std::move(arg);
    return n;
}

inline double eval_node(const ExprNode& n, double x, double y) {
    using K = ExprNode::Kind;
    switch (n.kind) {
        case K::Num: return to_double(n.num);
        case K::Variable: return n.var == Var::X ? x : y;
        case K::Neg: return -eval_node(*n.a, x, y);
        case K::Add: return eval_node(*n.a, x, y) + eval_node(*n.b, x, y);
        case K::Sub: return eval_node(*n.a, x, y) - eval_node(*n.b, x, y);
        case K::Mul: return eval_node(*n.a, x, y) * eval_node(*n.b, x, y);
        case K::Div: {
            double den = eval_node(*n.b, x, y);
            if (den == 0.0) throw EvalDomainError("division by zero");
            return eval_node(*n.a, x, y) / den;
        }
        case K::Pow: {
            double base = eval_node(*n.a, x, y);
            if (n.exponent < 0 && base == 0.0)
                throw EvalDomainError("zero raised to a negative power");
            return std::pow(base, static_cast<double>(n.exponent));
        }
        case K::Func: {
            double v = eval_node(*n.a, x, y);
            switch (n.fn) {
                case ExprNode::Fn::Exp: return std::exp(v);
                case ExprNode::Fn::Sin: return std::sin(v);
                case ExprNode::Fn::Cos: return std::cos(v);
                case ExprNode::Fn::Sqrt:
                    if (v < 0.0) throw EvalDomainError("sqrt of a negative value");
                    return std::sqrt(v);
                case ExprNode::Fn::Abs: return std::fabs(v);
            }
        }
    }
    throw Error("corrupt expression node");
}

inline NodePtr diff_node(const NodePtr& n, Var v) {
    using K = ExprNode::Kind;
    using F = ExprNode::Fn;
    switch (n->kind) {
        case K::Num: return make_num(Rat(0));
        case K::Variable: return make_num(Rat(n->var == v ? 1 : 0));
        case K::Neg: return make_neg(diff_node(n->a, v));
        case K::Add: return make_binary(K::Add, diff_node(n->a, v), diff_node(n->b, v));
        case K::Sub: return make_binary(K::Sub, diff_node(n->a, v), diff_node(n->b, v));
        case K::Mul:
            return make_binary(K::Add, make_binary(K::Mul, diff_node(n->a, v), n->b),
                               make_binary(K::Mul, n->a, diff_node(n->b, v)));
        case K::Div:
            return make_binary(
                K::Div,
                make_binary(K::Sub, make_binary(K::Mul, diff_node(n->a, v), n->b),
                            make_binary(K::Mul, n->a, diff_node(n->b, v))),
                make_pow(n->b, 2));
        case K::Pow:
            return make_binary(
                K::Mul, make_num(Rat(n->exponent)),
                make_binary(K::Mul, make_pow(n->a, n->exponent - 1), diff_node(n->a, v)));
        case K::Func: {
            NodePtr inner = diff_node(n->a, v);
            switch (n->fn) {
                case F::Exp: return make_binary(K::Mul, make_func(F::Exp, n->a), inner);
                case F::Sin: return make_binary(K::Mul, make_func(F::Cos, n->a), inner);
                case F::Cos:
                    return make_neg(make_binary(K::Mul, make_func(F::Sin, n->a), inner));
                case F::Sqrt:
                    return make_binary(
                        K::Div, inner,
                        make_binary(K::Mul, make_num(Rat(2)), make_func(F::Sqrt, n->a)));
                case F::Abs:
                    // |u|' = u' * |u|/u; evaluating at u = 0 divides by zero, as required.
                    return make_binary(K::Mul, inner,
                                       make_binary(K::Div, make_func(F::Abs, n->a), n->a));
            }
        }
    }
    throw Error("corrupt expression node");
}

inline const char* fn_name(ExprNode::Fn f) {
    switch (f) {
        case ExprNode::Fn::Exp: return "exp";
        case ExprNode::Fn::Sin: return "sin";
        case ExprNode::Fn::Cos: return "cos";
        case ExprNode::Fn::Sqrt: return "sqrt";
        case ExprNode::Fn::Abs: return "abs";
    }
    return "?";
}

inline void print_node(const ExprNode& n, std::string& out);

// Self-delimiting nodes render bare; everything else is parenthesized by its parent.
// Pow counts because it always prints its own parentheses.
inline bool is_atom(const ExprNode& n) {
    return n.kind == ExprNode::Kind::Variable || n.kind == ExprNode::Kind::Func ||
           n.kind == ExprNode::Kind::Pow || (n.kind == ExprNode::Kind::Num && n.num >= 0);
}

inline void print_wrapped(const ExprNode& n, std::string& out) {
    if (is_atom(n)) {
        print_node(n, out);
    } else {
        out += '(';
        print_node(n, out);
        out += ')';
    }
}

inline void print_node(const ExprNode& n, std::string& out) {
    using K = ExprNode::Kind;
    switch (n.kind) {
        case K::Num: out += rat_to_string(n.num); return;
        case K::Variable: out += (n.var == Var::X ? 'x' : 'y'); return;
        case K::Neg:
            out += '-';
            print_wrapped(*n.a, out);
            return;
        case K::Add:
        case K::Sub:
        case K::Mul:
        case K::Div: {
            const char* op = n.kind == K::Add   ? " + "
                             : n.kind == K::Sub ? " - "
                             : n.kind == K::Mul ? " * "
                                                : " / ";
            out += '(';
            print_node(*n.a, out);
            out += op;
            print_node(*n.b, out);
            out += ')';
            return;
        }
        case K::Pow:
            out += '(';
            print_wrapped(*n.a, out);
            out += '^';
            out += std::to_string(n.exponent);
            out += ')';
            return;
        case K::Func:
            out += fn_name(n.fn);
            out += '(';
            print_node(*n.a, out);
            out += ')';
            return;
    }
}

inline bool node_uses(const ExprNode& n, Var v) {
    switch (n.kind) {
        case ExprNode::Kind::Num: return false;
        case ExprNode::Kind::Variable: return n.var == v;
        default:
            if (n.a && node_uses(*n.a, v)) return true;
            return n.b && node_uses(*n.b, v);
    }
}

inline NodePtr substitute_node(const NodePtr& n, Var v, const NodePtr& repl) {
    using K = ExprNode::Kind;
    switch (n->kind) {
        case K::Num: return n;
        case K::Variable: return n->var == v ? repl : n;
        case K::Neg: return make_neg(substitute_node(n->a, v, repl));
        case K::Pow: return make_pow(substitute_node(n->a, v, repl), n->exponent);
        case K::Func: return make_func(n->fn, substitute_node(n->a, v, repl));
        default:
            return make_binary(n->kind, substitute_node(n->a, v, repl),
                               substitute_node(n->b, v, repl));
    }
}

inline bool node_equal(const ExprNode& a, const ExprNode& b) {
    if (a.kind != b.kind) return false;
    using K = ExprNode::Kind;
    switch (a.kind) {
        case K::Num: return a.num == b.num;
        case K::Variable: return a.var == b.var;
        case K::Pow: return a.exponent == b.exponent && node_equal(*a.a, *b.a);
        case K::Func: return a.fn == b.fn && node_equal(*a.a, *b.a);
        case K::Neg: return node_equal(*a.a, *b.a);
        default: return node_equal(*a.a, *b.a) && node_equal(*a.b, *b.b);
    }
}

} // namespace detail

/// Flat postfix tape for fast repeated evaluation of an expression.
/// Same domain-error semantics as tree evaluation.
class CompiledExpr {
public:
    double eval(double x, double y = 0.0) const {
        double stack[64];
        int sp = 0;
        for (const Op& op : ops_) {
            switch (op.code) {
                case Code::Num: stack[sp++] = op.value; break;
                case Code::X: stack[sp++] = x; break;
                case Code::Y: stack[sp++] = y; break;
                case Code::Neg: stack[sp - 1] = -stack[sp - 1]; break;
                case Code::Add: --sp; stack[sp - 1] += stack[sp]; break;
                case Code::Sub: --sp; stack[sp - 1] -= stack[sp]; break;
                case Code::Mul: --sp; stack[sp - 1] *= stack[sp]; break;
                case Code::Div:
                    --sp;
                    if (stack[sp] == 0.0) throw EvalDomainError("division by zero");
                    stack[sp - 1] /= stack[sp];
                    break;
                case Code::Pow: {
                    double base = stack[sp - 1];
                    long e = op.exponent;
                    if (e < 0 && base == 0.0)
                        throw EvalDomainError("zero raised to a negative power");
                    stack[sp - 1] = std::pow(base, static_cast<double>(e));
                    break;
                }
                case Code::Exp: stack[sp - 1] = std::exp(stack[sp - 1]); break;
                case Code::Sin: stack[sp - 1] = std::sin(stack[sp - 1]); break;
                case Code::Cos: stack[sp - 1] = std::cos(stack[sp - 1]); break;
                case Code::Sqrt:
                    if (stack[sp - 1] < 0.0) throw EvalDomainError("sqrt of a negative value");
                    stack[sp - 1] = std::sqrt(stack[sp - 1]);
                    break;
                case Code::Abs: stack[sp - 1] = std::fabs(stack[sp - 1]); break;
            }
        }
        return stack[0];
    }

private:
    friend class Expression;
    enum class Code { Num, X, Y, Neg, Add, Sub, Mul, Div, Pow, Exp, Sin, Cos, Sqrt, Abs };
    struct Op {
        Code code;
        double value = 0;
        long exponent = 0;
    };
    std::vector<Op> ops_;
};

/// Immutable scalar expression in variables x and y. Parsing folds constant
/// subtrees to exact rationals; evaluation is pure and thread-safe.
class Expression {
public:
    Expression() : root_(detail::make_num(Rat(0))) {}

    static Expression parse(const std::string& source);

    static Expression constant(Rat v) { return Expression(detail::make_num(std::move(v))); }
    static Expression variable(Var v) { return Expression(detail::make_var(v)); }

    double eval(double x, double y = 0.0) const { return detail::eval_node(*root_, x, y); }

    Expression differentiate(Var v) const { return Expression(detail::diff_node(root_, v)); }

    std::string print() const {
        std::string out;
        detail::print_node(*root_, out);
        return out;
    }

    bool uses(Var v) const { return detail::node_uses(*root_, v); }
    bool is_constant() const { return root_->kind == detail::ExprNode::Kind::Num; }
    const Rat& constant_value() const {
        if (!is_constant()) throw Error("expression is not a constant");
        return root_->num;
    }

    bool structurally_equal(const Expression& other) const {
        return detail::node_equal(*root_, *other.root_);
    }

    /// Replace every occurrence of variable v by the given expression.
    Expression substitute(Var v, const Expression& repl) const {
        return Expression(detail::substitute_node(root_, v, repl.root_));
    }

    CompiledExpr compile() const {
        CompiledExpr out;
        compile_node(*root_, out, 1);
        return out;
    }

    friend Expression operator-(const Expression& e) {
        return Expression(detail::make_neg(e.root_));
    }
    friend Expression operator+(const Expression& a, const Expression& b) {
        return Expression(detail::make_binary(detail::ExprNode::Kind::Add, a.root_, b.root_));
    }
    friend Expression operator-(const Expression& a, const Expression& b) {
        return Expression(detail::make_binary(detail::ExprNode::Kind::Sub, a.root_, b.root_));
    }
    friend Expression operator*(const Expression& a, const Expression& b) {
        return Expression(detail::make_binary(detail::ExprNode::Kind::Mul, a.root_, b.root_));
    }
    friend Expression operator/(const Expression& a, const Expression& b) {
        return Expression(detail::make_binary(detail::ExprNode::Kind::Div, a.root_, b.root_));
    }
    Expression pow(long e) const { return Expression(detail::make_pow(root_, e)); }

    const detail::ExprNode& node() const { return *root_; }

private:
    explicit Expression(detail::NodePtr n) : root_(std::move(n)) {}

    static void compile_node(const detail::ExprNode& n, CompiledExpr& out, int depth) {
        using K = detail::ExprNode::Kind;
        using C = CompiledExpr::Code;
        if (depth > 60) throw Error("expression too deep to compile");
        switch (n.kind) {
            case K::Num: out.ops_.push_back({C::Num, to_double(n.num), 0}); return;
            case K::Variable:
                out.ops_.push_back({n.var == Var::X ? C::X : C::Y, 0, 0});
                return;
            case K::Neg:
                compile_node(*n.a, out, depth + 1);
                out.ops_.push_back({C::Neg, 0, 0});
                return;
            case K::Pow:
                compile_node(*n.a, out, depth + 1);
                out.ops_.push_back({C::Pow, 0, n.exponent});
                return;
            case K::Func: {
                compile_node(*n.a, out, depth + 1);
                C c = C::Exp;
                switch (n.fn) {
                    case detail::ExprNode::Fn::Exp: c = C::Exp; break;
                    case detail::ExprNode::Fn::Sin: c = C::Sin; break;
                    case detail::ExprNode::Fn::Cos: c = C::Cos; break;
                    case detail::ExprNode::Fn::Sqrt: c = C::Sqrt; break;
                    case detail::ExprNode::Fn::Abs: c = C::Abs; break;
                }
                out.ops_.push_back({c, 0, 0});
                return;
            }
            default: {
                compile_node(*n.a, out, depth + 1);
                compile_node(*n.b, out, depth + 1);
                C c = n.kind == K::Add   ? C::Add
                      : n.kind == K::Sub ? C::Sub
                      : n.kind == K::Mul ? C::Mul
                                         : C::Div;
                out.ops_.push_back({c, 0, 0});
                return;
            }
        }
    }

    detail::NodePtr root_;
};

namespace detail {

struct Token {
    enum class Type { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
    Type type{};
    std::string text;
    Rat value;
    std::size_t offset{};
};

inline std::vector<Token> tokenize(const std::string& src) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        Token tok;
        tok.offset = i;
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < src.size() &&
             std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i;
            while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.'))
                ++j;
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    ++k;
                    while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
                    j = k;
                }
            }
            tok.type = Token::Type::Number;
            tok.text = src.substr(i, j - i);
            if (!rat_from_decimal(tok.text, tok.value))
                throw SyntaxError("malformed number '" + tok.text + "'", i);
            i = j;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            tok.type = Token::Type::Ident;
            tok.text = src.substr(i, j - i);
            i = j;
        } else {
            switch (c) {
                case '+': tok.type = Token::Type::Plus; break;
                case '-': tok.type = Token::Type::Minus; break;
                case '*': tok.type = Token::Type::Star; break;
                case '/': tok.type = Token::Type::Slash; break;
                case '^': tok.type = Token::Type::Caret; break;
                case '(': tok.type = Token::Type::LParen; break;
                case ')': tok.type = Token::Type::RParen; break;
                default: throw SyntaxError(std::string("unexpected character '") + c + "'", i);
            }
            tok.text = c;
            ++i;
        }
        out.push_back(std::move(tok));
    }
    Token end;
    end.type = Token::Type::End;
    end.offset = src.size();
    out.push_back(end);
    return out;
}

// Precedence-climbing parser. Precedence: ^ (right) > unary minus > * / > + -.
// No implicit multiplication: "2x" is a syntax error.
class Parser {
public:
    explicit Parser(const std::string& src) : toks_(tokenize(src)) {}

    NodePtr run() {
        NodePtr e = parse_sum();
        if (peek().type != Token::Type::End)
            throw SyntaxError("unexpected token '" + peek().text + "'", peek().offset);
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& advance() { return toks_[pos_++]; }
    bool accept(Token::Type t) {
        if (peek().type == t) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_sum() {
        NodePtr lhs = parse_product();
        for (;;) {
            if (accept(Token::Type::Plus))
                lhs = make_binary(ExprNode::Kind::Add, lhs, parse_product());
            else if (accept(Token::Type::Minus))
                lhs = make_binary(ExprNode::Kind::Sub, lhs, parse_product());
            else
                return lhs;
        }
    }

    NodePtr parse_product() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept(Token::Type::Star))
                lhs = make_binary(ExprNode::Kind::Mul, lhs, parse_unary());
            else if (accept(Token::Type::Slash))
                lhs = make_binary(ExprNode::Kind::Div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept(Token::Type::Minus)) return make_neg(parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (peek().type != Token::Type::Caret) return base;
        std::size_t caret_at = peek().offset;
        ++pos_;
        NodePtr expo = parse_unary();  // right-associative, binds tighter than unary minus
        if (expo->kind != ExprNode::Kind::Num || expo->num.get_den() != 1 ||
            !expo->num.get_num().fits_slong_p())
            throw SyntaxError("exponent must be an integer constant", caret_at);
        return make_pow(base, expo->num.get_num().get_si());
    }

    NodePtr parse_primary() {
        const Token& tok = advance();
        switch (tok.type) {
            case Token::Type::Number: return make_num(tok.value);
            case Token::Type::Ident: {
                if (tok.text == "x") return make_var(Var::X);
                if (tok.text == "y") return make_var(Var::Y);
                ExprNode::Fn fn;
                if (tok.text == "exp") fn = ExprNode::Fn::Exp;
                else if (tok.text == "sin") fn = ExprNode::Fn::Sin;
                else if (tok.text == "cos") fn = ExprNode::Fn::Cos;
                else if (tok.text == "sqrt") fn = ExprNode::Fn::Sqrt;
                else if (tok.text == "abs") fn = ExprNode::Fn::Abs;
                else throw UnknownIdentifierError(tok.text, tok.offset);
                if (!accept(Token::Type::LParen))
                    throw SyntaxError("expected '(' after '" + tok.text + "'", peek().offset);
                NodePtr arg = parse_sum();
                if (!accept(Token::Type::RParen))
                    throw SyntaxError("expected ')'", peek().offset);
                return make_func(fn, arg);
            }
            case Token::Type::LParen: {
                NodePtr e = parse_sum();
                if (!accept(Token::Type::RParen))
                    throw SyntaxError("expected ')'", peek().offset);
                return e;
            }
            case Token::Type::Minus:  // handled by parse_unary; reaching here means "--" etc.
            default:
                throw SyntaxError("unexpected token '" + tok.text + "'", tok.offset);
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline Expression Expression::parse(const std::string& source) {
    if (source.empty()) throw SyntaxError("empty expression", 0);
    detail::Parser p(source);
    return Expression(p.run());
}

} // namespace cycleguard
