#pragma once

#include "ifd6/expr.hpp"

#include <quadmath.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ifd6::testing {

/// Dense bivariate polynomial with double coefficients, keyed by (m, n).
struct Poly {
    std::map<std::pair<int, int>, double> c;

    static Poly random(std::mt19937_64& rng, int degree, double scale = 1.0)
    {
        std::uniform_real_distribution<double> u(-scale, scale);
        Poly p;
        for (int d = 0; d <= degree; ++d)
            for (int m = 0; m <= d; ++m) p.c[{m, d - m}] = u(rng);
        return p;
    }

    double eval(double x, double y) const
    {
        double s = 0;
        for (const auto& [mn, v] : c) s += v * std::pow(x, mn.first) * std::pow(y, mn.second);
        return s;
    }

    Poly dx() const
    {
        Poly r;
        for (const auto& [mn, v] : c)
            if (mn.first > 0) r.c[{mn.first - 1, mn.second}] += v * mn.first;
        return r;
    }
    Poly dy() const
    {
        Poly r;
        for (const auto& [mn, v] : c)
            if (mn.second > 0) r.c[{mn.first, mn.second - 1}] += v * mn.second;
        return r;
    }
    Poly operator+(const Poly& o) const
    {
        Poly r = *this;
        for (const auto& [mn, v] : o.c) r.c[mn] += v;
        return r;
    }
    Poly operator*(double a) const
    {
        Poly r = *this;
        for (auto& [mn, v] : r.c) v *= a;
        return r;
    }
    Poly operator-(const Poly& o) const { return *this + o * -1.0; }
    /// -Δp.
    Poly neg_laplacian() const { return (dx().dx() + dy().dy()) * -1.0; }

    std::string str() const
    {
        std::string s = "0";
        char buf[64];
        for (const auto& [mn, v] : c) {
            std::snprintf(buf, sizeof buf, " + (%.17g)*x^%d*y^%d", v, mn.first, mn.second);
            s += buf;
        }
        return s;
    }
};

/// Evaluates an expression tree in quad precision, independently of the library evaluator.
inline __float128 eval_quad(const expr::Node& n, __float128 x, __float128 y)
{
    using expr::NodeKind;
    switch (n.kind) {
    case NodeKind::Number: return n.number;
    case NodeKind::VarX: return x;
    case NodeKind::VarY: return y;
    case NodeKind::Pi: return M_PIq;
    case NodeKind::Neg: return -eval_quad(*n.lhs, x, y);
    case NodeKind::Add: return eval_quad(*n.lhs, x, y) + eval_quad(*n.rhs, x, y);
    case NodeKind::Sub: return eval_quad(*n.lhs, x, y) - eval_quad(*n.rhs, x, y);
    case NodeKind::Mul: return eval_quad(*n.lhs, x, y) * eval_quad(*n.rhs, x, y);
    case NodeKind::Div: return eval_quad(*n.lhs, x, y) / eval_quad(*n.rhs, x, y);
    case NodeKind::Pow: {
        const __float128 a = eval_quad(*n.lhs, x, y);
        if (n.pow_mode == expr::PowMode::General) return powq(a, eval_quad(*n.rhs, x, y));
        if (n.pow_mode == expr::PowMode::Integer) {
            __float128 r = 1;
            const int k = static_cast<int>(n.number);
            for (int i = 0; i < std::abs(k); ++i) r *= a;
            return k < 0 ? 1 / r : r;
        }
        return powq(a, static_cast<__float128>(n.number));
    }
    case NodeKind::Call: {
        const __float128 a = eval_quad(*n.lhs, x, y);
        switch (n.function) {
        case expr::Function::Sin: return sinq(a);
        case expr::Function::Cos: return cosq(a);
        case expr::Function::Exp: return expq(a);
        case expr::Function::Sqrt: return sqrtq(a);
        case expr::Function::Ln: return logq(a);
        }
    }
    }
    throw std::logic_error("eval_quad: unknown node");
}

/// Central finite-difference weights for the d-th derivative on nodes -K..K (Fornberg).
inline std::vector<__float128> fd_weights(int d, int K)
{
    const int n = 2 * K + 1;
    std::vector<__float128> z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = i - K;
    std::vector<std::vector<__float128>> c(static_cast<std::size_t>(n),
                                           std::vector<__float128>(static_cast<std::size_t>(d + 1), 0));
    __float128 c1 = 1, c4 = z[0];
    c[0][0] = 1;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, d);
        __float128 c2 = 1;
        const __float128 c5 = c4;
        c4 = z[static_cast<std::size_t>(i)];
        for (int j = 0; j < i; ++j) {
            const __float128 c3 = z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                        c1 * (k * c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k - 1)] -
                              c5 * c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)]) /
                        c2;
                c[static_cast<std::size_t>(i)][0] = -c1 * c5 * c[static_cast<std::size_t>(i - 1)][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] =
                    (c4 * c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] -
                     k * c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k - 1)]) /
                    c3;
            c[static_cast<std::size_t>(j)][0] = c4 * c[static_cast<std::size_t>(j)][0] / c3;
        }
        c1 = c2;
    }
    std::vector<__float128> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
    return w;
}

/// Samples of an expression on a (2K+1)^2 lattice around (x, y) in quad precision;
/// mixed partials up to order 6 follow by tensor finite differences with truncation
/// error about step^10 and rounding far below double precision.
class FdSamples {
public:
    static constexpr int K = 7;

    FdSamples(const expr::Expr& e, double x, double y, double step = 1e-2) : step_(step)
    {
        for (int a = -K; a <= K; ++a)
            for (int b = -K; b <= K; ++b)
                v_[a + K][b + K] = eval_quad(e.root(), x + a * static_cast<__float128>(step),
                                             y + b * static_cast<__float128>(step));
    }

    /// d^{m+n} / dx^m dy^n, m, n <= 6.
    double partial(int m, int n) const
    {
        const int kx = m / 2 + 4, ky = n / 2 + 4;
        const auto wx = fd_weights(m, kx), wy = fd_weights(n, ky);
        __float128 s = 0;
        for (int a = -kx; a <= kx; ++a)
            for (int b = -ky; b <= ky; ++b)
                s += wx[static_cast<std::size_t>(a + kx)] * wy[static_cast<std::size_t>(b + ky)] * v_[a + K][b + K];
        __float128 scale = 1;
        for (int i = 0; i < m + n; ++i) scale *= static_cast<__float128>(step_);
        return static_cast<double>(s / scale);
    }

    bool finite() const
    {
        for (const auto& row : v_)
            for (const auto& v : row)
                if (isnanq(v) || isinfq(v)) return false;
        return true;
    }

private:
    double step_;
    __float128 v_[2 * K + 1][2 * K + 1];
};

/// Every `key = expression` entry of a problem file except `format`.
inline std::vector<std::pair<std::string, expr::Expr>> file_expressions(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::pair<std::string, expr::Expr>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::istringstream key_stream(line.substr(0, eq));
        std::string key;
        key_stream >> key;
        if (key.empty() || key == "format") continue;
        out.emplace_back(key, expr::parse(line.substr(eq + 1)));
    }
    return out;
}

inline std::string problem_path(int k)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "/ex%02d.prob", k);
    return std::string(IFD6_PROBLEM_DIR) + buf;
}

}  // namespace ifd6::testing
