#pragma once

#include "ifd6/jets.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace ifd6::expr {

enum class NodeKind { Number, VarX, VarY, Pi, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Function { Sin, Cos, Exp, Sqrt, Ln };

/// How a `Pow` node is evaluated. Constant exponents are folded at parse time.
enum class PowMode { Integer, Real, General };

struct Node {
    NodeKind kind = NodeKind::Number;
    double number = 0.0;  // literal value, or the folded exponent of a Pow node
    Function function = Function::Sin;
    PowMode pow_mode = PowMode::General;
    std::shared_ptr<const Node> lhs;  // operand of unary nodes and calls
    std::shared_ptr<const Node> rhs;
};

/// Immutable scalar function of (x, y). Grammar, loosest binding first:
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'x' | 'y' | 'pi' | func '(' expr ')' | '(' expr ')'
///   func    := 'sin' | 'cos' | 'exp' | 'sqrt' | 'ln'
///
/// so '^' is right associative and binds tighter than unary minus.
class Expr {
public:
    Expr();  // the constant 0

    static Expr parse(std::string_view text);

    const Node& root() const noexcept { return *root_; }
    bool depends_on_xy() const;

    /// Fully parenthesized form; parse(to_string()) reproduces the tree.
    std::string to_string() const;

    double eval(double x, double y) const;
    jets::Jet2 eval(const jets::Jet2& x, const jets::Jet2& y) const;

    /// Jet of degree `degree` about (x, y).
    jets::Jet2 taylor(double x, double y, int degree) const;

    friend bool operator==(const Expr& a, const Expr& b);

private:
    explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    std::shared_ptr<const Node> root_;
};

inline Expr parse(std::string_view text) { return Expr::parse(text); }
inline double eval_scalar(const Expr& e, double x, double y) { return e.eval(x, y); }
inline jets::Jet2 eval_jet2(const Expr& e, const jets::Jet2& x, const jets::Jet2& y) { return e.eval(x, y); }

const char* function_name(Function f);

}  // namespace ifd6::expr
