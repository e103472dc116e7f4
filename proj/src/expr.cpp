#include "ifd6/expr.hpp"

#include "ifd6/error.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

namespace ifd6::expr {

namespace {

using NodePtr = std::shared_ptr<const Node>;

NodePtr make_leaf(NodeKind kind, double number = 0.0)
{
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->number = number;
    return n;
}

NodePtr make_node(NodeKind kind, NodePtr lhs, NodePtr rhs = nullptr)
{
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

bool depends(const Node& n)
{
    switch (n.kind) {
    case NodeKind::VarX:
    case NodeKind::VarY: return true;
    case NodeKind::Number:
    case NodeKind::Pi: return false;
    default: return (n.lhs && depends(*n.lhs)) || (n.rhs && depends(*n.rhs));
    }
}

// ---------------------------------------------------------------- evaluation

double apply(Function f, double a)
{
    switch (f) {
    case Function::Sin: return std::sin(a);
    case Function::Cos: return std::cos(a);
    case Function::Exp: {
        const double e = std::exp(a);
        if (!std::isfinite(e)) throw DomainError("exp: overflow");
        return e;
    }
    case Function::Sqrt:
        if (a < 0.0) throw DomainError("sqrt of negative number");
        return std::sqrt(a);
    case Function::Ln:
        if (a <= 0.0) throw DomainError("ln of non-positive number");
        return std::log(a);
    }
    throw std::logic_error("unknown function");
}

jets::Jet2 apply(Function f, const jets::Jet2& a)
{
    switch (f) {
    case Function::Sin: return jets::sin(a);
    case Function::Cos: return jets::cos(a);
    case Function::Exp: return jets::exp(a);
    case Function::Sqrt: return jets::sqrt(a);
    case Function::Ln: return jets::log(a);
    }
    throw std::logic_error("unknown function");
}

double divide(double a, double b)
{
    if (b == 0.0) throw DomainError("division by zero");
    return a / b;
}

jets::Jet2 divide(const jets::Jet2& a, const jets::Jet2& b) { return a / b; }

double power(double a, const Node& n, double exponent)
{
    switch (n.pow_mode) {
    case PowMode::Integer: return jets::ipow(a, static_cast<int>(n.number));
    case PowMode::Real:
        if (a < 0.0) throw DomainError("negative base with non-integer exponent");
        if (a == 0.0 && n.number < 0.0) throw DomainError("zero base with negative exponent");
        return std::pow(a, n.number);
    case PowMode::General: return apply(Function::Exp, exponent * apply(Function::Ln, a));
    }
    throw std::logic_error("unknown pow mode");
}

jets::Jet2 power(const jets::Jet2& a, const Node& n, const jets::Jet2& exponent)
{
    switch (n.pow_mode) {
    case PowMode::Integer: return jets::pow(a, static_cast<int>(n.number));
    case PowMode::Real: return jets::pow(a, n.number);
    case PowMode::General: return jets::exp(exponent * jets::log(a));
    }
    throw std::logic_error("unknown pow mode");
}

template <class T>
T constant_like(const T& like, double v)
{
    if constexpr (std::is_same_v<T, double>) {
        (void)like;
        return v;
    } else {
        return T(like.degree(), v);
    }
}

template <class T>
T evaluate(const Node& n, const T& x, const T& y)
{
    switch (n.kind) {
    case NodeKind::Number: return constant_like(x, n.number);
    case NodeKind::Pi: return constant_like(x, std::numbers::pi);
    case NodeKind::VarX: return x;
    case NodeKind::VarY: return y;
    case NodeKind::Neg: return -evaluate(*n.lhs, x, y);
    case NodeKind::Add: return evaluate(*n.lhs, x, y) + evaluate(*n.rhs, x, y);
    case NodeKind::Sub: return evaluate(*n.lhs, x, y) - evaluate(*n.rhs, x, y);
    case NodeKind::Mul: return evaluate(*n.lhs, x, y) * evaluate(*n.rhs, x, y);
    case NodeKind::Div: return divide(evaluate(*n.lhs, x, y), evaluate(*n.rhs, x, y));
    case NodeKind::Call: return apply(n.function, evaluate(*n.lhs, x, y));
    case NodeKind::Pow: {
        const T base = evaluate(*n.lhs, x, y);
        if (n.pow_mode == PowMode::General) return power(base, n, evaluate(*n.rhs, x, y));
        return power(base, n, base);
    }
    }
    throw std::logic_error("unknown node kind");
}

// ---------------------------------------------------------------- parsing

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse_all()
    {
        skip_space();
        if (pos_ >= text_.size()) throw SyntaxError("empty expression", pos_);
        NodePtr e = parse_expr();
        skip_space();
        if (pos_ < text_.size())
            throw SyntaxError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        return e;
    }

private:
    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) {
            if (pos_ >= text_.size())
                throw SyntaxError(std::string("expected '") + c + "' before end of input", pos_);
            throw SyntaxError(std::string("expected '") + c + "'", pos_);
        }
    }

    NodePtr parse_expr()
    {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+')) lhs = make_node(NodeKind::Add, lhs, parse_term());
            else if (accept('-')) lhs = make_node(NodeKind::Sub, lhs, parse_term());
            else return lhs;
        }
    }

    NodePtr parse_term()
    {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = make_node(NodeKind::Mul, lhs, parse_unary());
            else if (accept('/')) lhs = make_node(NodeKind::Div, lhs, parse_unary());
            else return lhs;
        }
    }

    NodePtr parse_unary()
    {
        if (accept('-')) return make_node(NodeKind::Neg, parse_unary());
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    NodePtr parse_power()
    {
        NodePtr base = parse_primary();
        if (!accept('^')) return base;
        NodePtr exponent = parse_unary();
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Pow;
        n->lhs = std::move(base);
        n->rhs = exponent;
        if (!depends(*exponent)) {
            const double p = evaluate(*exponent, 0.0, 0.0);
            n->number = p;
            n->pow_mode = (p == std::trunc(p) && std::fabs(p) <= 1024.0) ? PowMode::Integer : PowMode::Real;
        }
        return n;
    }

    NodePtr parse_primary()
    {
        skip_space();
        if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
    }

    NodePtr parse_number()
    {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t mantissa = digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            mantissa += digits();
        }
        if (mantissa == 0) throw SyntaxError("malformed number", start);
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (digits() == 0) throw SyntaxError("malformed exponent", start);
        }
        const std::string literal(text_.substr(start, pos_ - start));
        const double v = std::strtod(literal.c_str(), nullptr);
        if (!std::isfinite(v)) throw SyntaxError("number out of range", start);
        return make_leaf(NodeKind::Number, v);
    }

    NodePtr parse_identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name(text_.substr(start, pos_ - start));
        if (name == "x") return make_leaf(NodeKind::VarX);
        if (name == "y") return make_leaf(NodeKind::VarY);
        if (name == "pi") return make_leaf(NodeKind::Pi);

        Function f;
        if (name == "sin") f = Function::Sin;
        else if (name == "cos") f = Function::Cos;
        else if (name == "exp") f = Function::Exp;
        else if (name == "sqrt") f = Function::Sqrt;
        else if (name == "ln") f = Function::Ln;
        else throw UnknownIdentifier(name, start);

        skip_space();
        if (pos_ >= text_.size() || text_[pos_] != '(')
            throw SyntaxError("expected '(' after '" + name + "'", pos_);
        ++pos_;
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Call;
        n->function = f;
        n->lhs = parse_expr();
        expect(')');
        return n;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- printing

std::string format_number(double v)
{
    char buf[40];
    for (int precision : {15, 16, 17}) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

void print(const Node& n, std::string& out)
{
    auto binary = [&](const char* op) {
        out += '(';
        print(*n.lhs, out);
        out += op;
        print(*n.rhs, out);
        out += ')';
    };
    switch (n.kind) {
    case NodeKind::Number: out += format_number(n.number); return;
    case NodeKind::Pi: out += "pi"; return;
    case NodeKind::VarX: out += 'x'; return;
    case NodeKind::VarY: out += 'y'; return;
    case NodeKind::Neg:
        out += "(-";
        print(*n.lhs, out);
        out += ')';
        return;
    case NodeKind::Add: binary(" + "); return;
    case NodeKind::Sub: binary(" - "); return;
    case NodeKind::Mul: binary(" * "); return;
    case NodeKind::Div: binary(" / "); return;
    case NodeKind::Pow: binary("^"); return;
    case NodeKind::Call:
        out += function_name(n.function);
        out += '(';
        print(*n.lhs, out);
        out += ')';
        return;
    }
}

bool equal(const Node* a, const Node* b)
{
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    if (a->kind == NodeKind::Number && a->number != b->number) return false;
    if (a->kind == NodeKind::Call && a->function != b->function) return false;
    if (a->kind == NodeKind::Pow && (a->pow_mode != b->pow_mode || a->number != b->number)) return false;
    return equal(a->lhs.get(), b->lhs.get()) && equal(a->rhs.get(), b->rhs.get());
}

}  // namespace

const char* function_name(Function f)
{
    switch (f) {
    case Function::Sin: return "sin";
    case Function::Cos: return "cos";
    case Function::Exp: return "exp";
    case Function::Sqrt: return "sqrt";
    case Function::Ln: return "ln";
    }
    return "?";
}

Expr::Expr() : root_(make_leaf(NodeKind::Number, 0.0)) {}

Expr Expr::parse(std::string_view text) { return Expr(Parser(text).parse_all()); }

bool Expr::depends_on_xy() const { return depends(*root_); }

std::string Expr::to_string() const
{
    std::string out;
    print(*root_, out);
    return out;
}

double Expr::eval(double x, double y) const { return evaluate<double>(*root_, x, y); }

jets::Jet2 Expr::eval(const jets::Jet2& x, const jets::Jet2& y) const
{
    if (x.degree() != y.degree()) throw std::invalid_argument("eval: seed jets differ in degree");
    return evaluate<jets::Jet2>(*root_, x, y);
}

jets::Jet2 Expr::taylor(double x, double y, int degree) const
{
    return eval(jets::Jet2::seed(x, jets::Seed::X, degree), jets::Jet2::seed(y, jets::Seed::Y, degree));
}

bool operator==(const Expr& a, const Expr& b) { return equal(a.root_.get(), b.root_.get()); }

}  // namespace ifd6::expr
