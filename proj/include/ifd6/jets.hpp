#pragma once

#include <array>
#include <cstddef>

namespace ifd6::jets {

/// Largest total degree a jet can carry. The scheme needs at most 8.
inline constexpr int kMaxDegree = 10;

/// Number of monomials x^m y^n with m + n <= degree.
constexpr int triangle_size(int degree) { return (degree + 1) * (degree + 2) / 2; }

/// Graded storage slot of x^m y^n: all degree-k monomials are contiguous and
/// ordered by increasing n, so a degree-D jet is a prefix of a degree-(D+1) one.
constexpr int triangle_index(int m, int n)
{
    const int k = m + n;
    return k * (k + 1) / 2 + n;
}

double factorial(int n);

enum class Seed { X, Y, Const };
enum class ArithOp { Add, Sub, Mul, Div, Neg };
enum class Elementary { Sin, Cos, Exp, Sqrt, Ln, PowInt, PowReal };

/// Truncated bivariate Taylor expansion about a fixed center: the coefficient
/// of x^m y^n for every m + n <= degree().
class Jet2 {
public:
    Jet2() = default;
    explicit Jet2(int degree, double constant = 0.0);

    static Jet2 seed(double center_value, Seed variable, int degree);

    int degree() const noexcept { return degree_; }
    double value() const noexcept { return c_[0]; }

    /// Coefficient of x^m y^n; zero above the truncation degree.
    double coeff(int m, int n) const;
    void set_coeff(int m, int n, double v);

    /// d^{m+n} / dx^m dy^n at the center = coeff(m, n) * m! * n!.
    double partial(int m, int n) const;

    Jet2 truncated(int degree) const;

    Jet2& operator+=(const Jet2& o);
    Jet2& operator-=(const Jet2& o);
    Jet2& operator*=(const Jet2& o);
    Jet2& operator/=(const Jet2& o);
    Jet2& operator+=(double v) { c_[0] += v; return *this; }
    Jet2& operator-=(double v) { c_[0] -= v; return *this; }
    Jet2& operator*=(double v);
    Jet2& operator/=(double v);
    Jet2 operator-() const;

    const double* data() const noexcept { return c_.data(); }
    std::size_t size() const noexcept { return static_cast<std::size_t>(triangle_size(degree_)); }

    friend Jet2 mul(const Jet2& a, const Jet2& b);
    friend Jet2 div(const Jet2& a, const Jet2& b);

private:
    int degree_ = 0;
    std::array<double, triangle_size(kMaxDegree)> c_{};
};

Jet2 operator+(Jet2 a, const Jet2& b);
Jet2 operator-(Jet2 a, const Jet2& b);
Jet2 operator*(const Jet2& a, const Jet2& b);
Jet2 operator/(const Jet2& a, const Jet2& b);
Jet2 operator+(Jet2 a, double b);
Jet2 operator+(double a, Jet2 b);
Jet2 operator-(Jet2 a, double b);
Jet2 operator-(double a, const Jet2& b);
Jet2 operator*(Jet2 a, double b);
Jet2 operator*(double a, Jet2 b);
Jet2 operator/(Jet2 a, double b);
Jet2 operator/(double a, const Jet2& b);

/// Operation-enum forms; `b` is ignored for Neg.
Jet2 arith(ArithOp op, const Jet2& a, const Jet2& b);
/// `exponent` is rounded to an integer for PowInt and ignored by the unary functions.
Jet2 elementary(Elementary fn, const Jet2& a, double exponent = 0.0);

Jet2 sin(const Jet2& a);
Jet2 cos(const Jet2& a);
Jet2 exp(const Jet2& a);
Jet2 sqrt(const Jet2& a);
Jet2 log(const Jet2& a);
Jet2 pow(const Jet2& a, int n);
Jet2 pow(const Jet2& a, double p);

/// Integer power by repeated squaring; the scalar evaluator uses the same
/// sequence of multiplications so degree-0 jets reproduce it bit for bit.
double ipow(double x, int n);

/// Truncated power series in one variable t.
class Jet1 {
public:
    Jet1() = default;
    explicit Jet1(int degree, double constant = 0.0);

    /// t itself: coefficients (0, 1, 0, ...).
    static Jet1 variable(int degree);

    int degree() const noexcept { return degree_; }
    double operator[](int p) const { return p <= degree_ ? c_[static_cast<std::size_t>(p)] : 0.0; }
    double& operator[](int p);
    double value() const noexcept { return c_[0]; }

    Jet1 truncated(int degree) const;
    /// d/dt, one degree lower (degree 0 stays degree 0 and becomes zero).
    Jet1 derivative() const;

    Jet1& operator+=(const Jet1& o);
    Jet1& operator-=(const Jet1& o);
    Jet1& operator*=(const Jet1& o);
    Jet1& operator*=(double v);
    Jet1 operator-() const;

private:
    int degree_ = 0;
    std::array<double, kMaxDegree + 1> c_{};
};

Jet1 operator+(Jet1 a, const Jet1& b);
Jet1 operator-(Jet1 a, const Jet1& b);
Jet1 operator*(const Jet1& a, const Jet1& b);
Jet1 operator*(Jet1 a, double b);
Jet1 operator*(double a, Jet1 b);
Jet1 operator/(const Jet1& a, const Jet1& b);
Jet1 sqrt(const Jet1& a);

/// Evaluates the polynomial held by `P` (its Taylor coefficients) at
/// (x, y) = (r(t), s(t)) as a t-series. Requires r(0) = s(0) = 0; the result
/// has degree min(r.degree(), s.degree()).
Jet1 compose(const Jet2& P, const Jet1& r, const Jet1& s);

}  // namespace ifd6::jets
