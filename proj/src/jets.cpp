#include "ifd6/jets.hpp"

#include "ifd6/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace ifd6::jets {

namespace {

void check_degree(int degree)
{
    if (degree < 0 || degree > kMaxDegree)
        throw std::invalid_argument("jet degree " + std::to_string(degree) + " outside [0, " +
                                    std::to_string(kMaxDegree) + "]");
}

void require_same_degree(int a, int b)
{
    if (a != b)
        throw std::invalid_argument("jet degree mismatch: " + std::to_string(a) + " vs " +
                                    std::to_string(b));
}

void require_finite(double c0, const char* fn)
{
    if (!std::isfinite(c0))
        throw DomainError(std::string(fn) + ": non-finite argument");
}

/// f(c0 + w) = sum_k taylor[k] w^k by Horner, where w = a - c0 has no constant term.
Jet2 compose_univariate(const Jet2& a, const std::vector<double>& taylor)
{
    const int D = a.degree();
    Jet2 w = a;
    w.set_coeff(0, 0, 0.0);
    Jet2 out(D, taylor[static_cast<std::size_t>(D)]);
    for (int k = D - 1; k >= 0; --k) {
        out *= w;
        out += taylor[static_cast<std::size_t>(k)];
    }
    return out;
}

std::vector<double> sin_cos_taylor(double c0, int D, bool cosine)
{
    const double s = std::sin(c0);
    const double c = std::cos(c0);
    const double cycle_sin[4] = {s, c, -s, -c};
    const double cycle_cos[4] = {c, -s, -c, s};
    std::vector<double> t(static_cast<std::size_t>(D) + 1);
    for (int k = 0; k <= D; ++k) {
        const double d = cosine ? cycle_cos[k % 4] : cycle_sin[k % 4];
        t[static_cast<std::size_t>(k)] = k == 0 ? d : d / factorial(k);
    }
    return t;
}

/// Generalized binomial series of c0^p: coefficients binom(p, k) c0^(p - k).
std::vector<double> power_taylor(double c0, double p, double first, int D)
{
    std::vector<double> t(static_cast<std::size_t>(D) + 1);
    t[0] = first;
    for (int k = 1; k <= D; ++k)
        t[static_cast<std::size_t>(k)] = t[static_cast<std::size_t>(k) - 1] * (p - (k - 1)) / (k * c0);
    return t;
}

}  // namespace

double factorial(int n)
{
    static const auto table = [] {
        std::array<double, 32> t{};
        t[0] = 1.0;
        for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * static_cast<double>(i);
        return t;
    }();
    if (n < 0 || n >= static_cast<int>(table.size()))
        throw std::invalid_argument("factorial argument out of range");
    return table[static_cast<std::size_t>(n)];
}

// ---------------------------------------------------------------- Jet2

Jet2::Jet2(int degree, double constant) : degree_(degree)
{
    check_degree(degree);
    c_[0] = constant;
}

Jet2 Jet2::seed(double center_value, Seed variable, int degree)
{
    Jet2 j(degree, center_value);
    if (degree >= 1) {
        if (variable == Seed::X) j.c_[triangle_index(1, 0)] = 1.0;
        if (variable == Seed::Y) j.c_[triangle_index(0, 1)] = 1.0;
    }
    return j;
}

double Jet2::coeff(int m, int n) const
{
    if (m < 0 || n < 0) throw std::invalid_argument("negative jet index");
    if (m + n > degree_) return 0.0;
    return c_[static_cast<std::size_t>(triangle_index(m, n))];
}

void Jet2::set_coeff(int m, int n, double v)
{
    if (m < 0 || n < 0 || m + n > degree_) throw std::invalid_argument("jet index outside truncation");
    c_[static_cast<std::size_t>(triangle_index(m, n))] = v;
}

double Jet2::partial(int m, int n) const { return coeff(m, n) * factorial(m) * factorial(n); }

Jet2 Jet2::truncated(int degree) const
{
    check_degree(degree);
    Jet2 out(degree);
    const int n = triangle_size(std::min(degree, degree_));
    std::copy_n(c_.begin(), n, out.c_.begin());
    return out;
}

Jet2& Jet2::operator+=(const Jet2& o)
{
    require_same_degree(degree_, o.degree_);
    for (int k = 0; k < triangle_size(degree_); ++k) c_[k] += o.c_[k];
    return *this;
}

Jet2& Jet2::operator-=(const Jet2& o)
{
    require_same_degree(degree_, o.degree_);
    for (int k = 0; k < triangle_size(degree_); ++k) c_[k] -= o.c_[k];
    return *this;
}

Jet2& Jet2::operator*=(const Jet2& o) { return *this = mul(*this, o); }
Jet2& Jet2::operator/=(const Jet2& o) { return *this = div(*this, o); }

Jet2& Jet2::operator*=(double v)
{
    for (int k = 0; k < triangle_size(degree_); ++k) c_[k] *= v;
    return *this;
}

Jet2& Jet2::operator/=(double v)
{
    if (v == 0.0) throw DomainError("division by zero");
    for (int k = 0; k < triangle_size(degree_); ++k) c_[k] /= v;
    return *this;
}

Jet2 Jet2::operator-() const
{
    Jet2 out = *this;
    for (int k = 0; k < triangle_size(degree_); ++k) out.c_[k] = -out.c_[k];
    return out;
}

Jet2 mul(const Jet2& a, const Jet2& b)
{
    require_same_degree(a.degree_, b.degree_);
    const int D = a.degree_;
    Jet2 out(D);
    for (int k = 0; k <= D; ++k) {
        for (int n = 0; n <= k; ++n) {
            const int m = k - n;
            double sum = 0.0;
            for (int i = 0; i <= m; ++i)
                for (int j = 0; j <= n; ++j)
                    sum += a.c_[triangle_index(i, j)] * b.c_[triangle_index(m - i, n - j)];
            out.c_[triangle_index(m, n)] = sum;
        }
    }
    return out;
}

Jet2 div(const Jet2& a, const Jet2& b)
{
    require_same_degree(a.degree_, b.degree_);
    const double b0 = b.c_[0];
    if (b0 == 0.0) throw DivisionByZeroConstantTerm("division by a jet with zero constant term");
    const int D = a.degree_;
    Jet2 q(D);
    for (int k = 0; k <= D; ++k) {
        for (int n = 0; n <= k; ++n) {
            const int m = k - n;
            double sum = a.c_[triangle_index(m, n)];
            for (int i = 0; i <= m; ++i)
                for (int j = 0; j <= n; ++j)
                    if (i + j > 0) sum -= b.c_[triangle_index(i, j)] * q.c_[triangle_index(m - i, n - j)];
            q.c_[triangle_index(m, n)] = sum / b0;
        }
    }
    return q;
}

Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
Jet2 operator*(const Jet2& a, const Jet2& b) { return mul(a, b); }
Jet2 operator/(const Jet2& a, const Jet2& b) { return div(a, b); }
Jet2 operator+(Jet2 a, double b) { return a += b; }
Jet2 operator+(double a, Jet2 b) { return b += a; }
Jet2 operator-(Jet2 a, double b) { return a -= b; }
Jet2 operator-(double a, const Jet2& b) { return (-b) += a; }
Jet2 operator*(Jet2 a, double b) { return a *= b; }
Jet2 operator*(double a, Jet2 b) { return b *= a; }
Jet2 operator/(Jet2 a, double b) { return a /= b; }
Jet2 operator/(double a, const Jet2& b) { return div(Jet2(b.degree(), a), b); }

Jet2 arith(ArithOp op, const Jet2& a, const Jet2& b)
{
    switch (op) {
    case ArithOp::Add: return a + b;
    case ArithOp::Sub: return a - b;
    case ArithOp::Mul: return a * b;
    case ArithOp::Div: return a / b;
    case ArithOp::Neg: return -a;
    }
    throw std::invalid_argument("unknown arithmetic op");
}

Jet2 sin(const Jet2& a)
{
    require_finite(a.value(), "sin");
    return compose_univariate(a, sin_cos_taylor(a.value(), a.degree(), false));
}

Jet2 cos(const Jet2& a)
{
    require_finite(a.value(), "cos");
    return compose_univariate(a, sin_cos_taylor(a.value(), a.degree(), true));
}

Jet2 exp(const Jet2& a)
{
    require_finite(a.value(), "exp");
    const double e = std::exp(a.value());
    if (!std::isfinite(e)) throw DomainError("exp: overflow");
    std::vector<double> t(static_cast<std::size_t>(a.degree()) + 1);
    t[0] = e;
    for (int k = 1; k <= a.degree(); ++k) t[static_cast<std::size_t>(k)] = e / factorial(k);
    return compose_univariate(a, t);
}

Jet2 sqrt(const Jet2& a)
{
    const double c0 = a.value();
    require_finite(c0, "sqrt");
    if (c0 < 0.0 || (c0 == 0.0 && a.degree() > 0))
        throw DomainError("sqrt: argument " + std::to_string(c0) + " outside the open domain");
    return compose_univariate(a, power_taylor(c0, 0.5, std::sqrt(c0), a.degree()));
}

Jet2 log(const Jet2& a)
{
    const double c0 = a.value();
    require_finite(c0, "ln");
    if (c0 <= 0.0) throw DomainError("ln: argument " + std::to_string(c0) + " is not positive");
    std::vector<double> t(static_cast<std::size_t>(a.degree()) + 1);
    t[0] = std::log(c0);
    double inv_pow = 1.0;
    for (int k = 1; k <= a.degree(); ++k) {
        inv_pow /= c0;
        t[static_cast<std::size_t>(k)] = ((k % 2 == 1) ? 1.0 : -1.0) * inv_pow / k;
    }
    return compose_univariate(a, t);
}

Jet2 pow(const Jet2& a, int n)
{
    if (n < 0) return 1.0 / pow(a, -n);
    Jet2 result(a.degree(), 1.0);
    Jet2 base = a;
    bool first = true;
    while (n > 0) {
        if (n & 1) {
            result = first ? base : result * base;
            first = false;
        }
        n >>= 1;
        if (n > 0) base = base * base;
    }
    return result;
}

Jet2 pow(const Jet2& a, double p)
{
    const double c0 = a.value();
    require_finite(c0, "pow");
    if (c0 < 0.0) throw DomainError("pow: negative base with real exponent");
    if (c0 == 0.0 && (p < 0.0 || a.degree() > 0))
        throw DomainError("pow: zero base outside the smooth domain");
    return compose_univariate(a, power_taylor(c0, p, std::pow(c0, p), a.degree()));
}

double ipow(double x, int n)
{
    if (n < 0) {
        const double d = ipow(x, -n);
        if (d == 0.0) throw DomainError("division by zero");
        return 1.0 / d;
    }
    double result = 1.0;
    double base = x;
    bool first = true;
    while (n > 0) {
        if (n & 1) {
            result = first ? base : result * base;
            first = false;
        }
        n >>= 1;
        if (n > 0) base = base * base;
    }
    return result;
}

Jet2 elementary(Elementary fn, const Jet2& a, double exponent)
{
    switch (fn) {
    case Elementary::Sin: return sin(a);
    case Elementary::Cos: return cos(a);
    case Elementary::Exp: return exp(a);
    case Elementary::Sqrt: return sqrt(a);
    case Elementary::Ln: return log(a);
    case Elementary::PowInt: return pow(a, static_cast<int>(std::lround(exponent)));
    case Elementary::PowReal: return pow(a, exponent);
    }
    throw std::invalid_argument("unknown elementary function");
}

// ---------------------------------------------------------------- Jet1

Jet1::Jet1(int degree, double constant) : degree_(degree)
{
    check_degree(degree);
    c_[0] = constant;
}

Jet1 Jet1::variable(int degree)
{
    Jet1 t(degree);
    if (degree >= 1) t.c_[1] = 1.0;
    return t;
}

double& Jet1::operator[](int p)
{
    if (p < 0 || p > degree_) throw std::invalid_argument("Jet1 index outside truncation");
    return c_[static_cast<std::size_t>(p)];
}

Jet1 Jet1::truncated(int degree) const
{
    check_degree(degree);
    Jet1 out(degree);
    for (int p = 0; p <= std::min(degree, degree_); ++p) out.c_[p] = c_[p];
    return out;
}

Jet1 Jet1::derivative() const
{
    Jet1 out(std::max(degree_ - 1, 0));
    for (int p = 1; p <= degree_; ++p) out.c_[p - 1] = p * c_[p];
    return out;
}

Jet1& Jet1::operator+=(const Jet1& o)
{
    require_same_degree(degree_, o.degree_);
    for (int p = 0; p <= degree_; ++p) c_[p] += o.c_[p];
    return *this;
}

Jet1& Jet1::operator-=(const Jet1& o)
{
    require_same_degree(degree_, o.degree_);
    for (int p = 0; p <= degree_; ++p) c_[p] -= o.c_[p];
    return *this;
}

Jet1& Jet1::operator*=(const Jet1& o) { return *this = *this * o; }

Jet1& Jet1::operator*=(double v)
{
    for (int p = 0; p <= degree_; ++p) c_[p] *= v;
    return *this;
}

Jet1 Jet1::operator-() const
{
    Jet1 out = *this;
    out *= -1.0;
    return out;
}

Jet1 operator+(Jet1 a, const Jet1& b) { return a += b; }
Jet1 operator-(Jet1 a, const Jet1& b) { return a -= b; }
Jet1 operator*(Jet1 a, double b) { return a *= b; }
Jet1 operator*(double a, Jet1 b) { return b *= a; }

Jet1 operator*(const Jet1& a, const Jet1& b)
{
    require_same_degree(a.degree(), b.degree());
    Jet1 out(a.degree());
    for (int p = 0; p <= a.degree(); ++p) {
        double sum = 0.0;
        for (int i = 0; i <= p; ++i) sum += a[i] * b[p - i];
        out[p] = sum;
    }
    return out;
}

Jet1 operator/(const Jet1& a, const Jet1& b)
{
    require_same_degree(a.degree(), b.degree());
    if (b[0] == 0.0) throw DivisionByZeroConstantTerm("division by a series with zero constant term");
    Jet1 q(a.degree());
    for (int p = 0; p <= a.degree(); ++p) {
        double sum = a[p];
        for (int i = 1; i <= p; ++i) sum -= b[i] * q[p - i];
        q[p] = sum / b[0];
    }
    return q;
}

Jet1 sqrt(const Jet1& a)
{
    if (!(a[0] > 0.0)) throw DomainError("sqrt of a series with non-positive constant term");
    Jet1 s(a.degree());
    s[0] = std::sqrt(a[0]);
    for (int p = 1; p <= a.degree(); ++p) {
        double sum = a[p];
        for (int i = 1; i < p; ++i) sum -= s[i] * s[p - i];
        s[p] = sum / (2.0 * s[0]);
    }
    return s;
}

Jet1 compose(const Jet2& P, const Jet1& r, const Jet1& s)
{
    if (r[0] != 0.0 || s[0] != 0.0)
        throw NonzeroCurveOrigin("curve series must vanish at t = 0");
    const int D = std::min(r.degree(), s.degree());
    const Jet1 rt = r.truncated(D);
    const Jet1 st = s.truncated(D);
    const int PD = P.degree();

    std::vector<Jet1> rpow(static_cast<std::size_t>(PD) + 1, Jet1(D, 1.0));
    std::vector<Jet1> spow(static_cast<std::size_t>(PD) + 1, Jet1(D, 1.0));
    for (int k = 1; k <= PD; ++k) {
        rpow[static_cast<std::size_t>(k)] = rpow[static_cast<std::size_t>(k) - 1] * rt;
        spow[static_cast<std::size_t>(k)] = spow[static_cast<std::size_t>(k) - 1] * st;
    }

    Jet1 out(D);
    for (int k = 0; k <= std::min(PD, D); ++k) {
        for (int n = 0; n <= k; ++n) {
            const int m = k - n;
            const double c = P.coeff(m, n);
            if (c == 0.0) continue;
            out += c * (rpow[static_cast<std::size_t>(m)] * spow[static_cast<std::size_t>(n)]);
        }
    }
    return out;
}

}  // namespace ifd6::jets
