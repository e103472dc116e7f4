#pragma once

#include "ifd6/geometry.hpp"
#include "ifd6/jets.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace ifd6::scheme {

/// Orders the compact scheme supports.
inline constexpr int kMinOrder = 3;
inline constexpr int kMaxOrder = 6;
void validate_order(int M);

struct MN {
    int m = 0, n = 0;
    friend bool operator==(const MN&, const MN&) = default;
};

/// Ordered set of multi-indices, graded by (m + n, m).
class IndexSet {
public:
    /// All (m, n) with m + n <= K; empty when K < 0.
    static IndexSet full(int K);
    /// (0, k) for k <= K and (1, k) for k <= K - 1.
    static IndexSet low_x(int K);
    /// full(K) minus low_x(K).
    static IndexSet high_x(int K);

    int size() const noexcept { return static_cast<int>(members_.size()); }
    const MN& operator[](int p) const { return members_[static_cast<std::size_t>(p)]; }
    /// Position of (m, n), or -1.
    int find(int m, int n) const;
    bool contains(int m, int n) const { return find(m, n) >= 0; }

    auto begin() const { return members_.begin(); }
    auto end() const { return members_.end(); }

private:
    std::vector<MN> members_;
};

struct Rational {
    long long num = 0, den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Rational&, const Rational&) = default;
};

/// Bivariate polynomial with exact rational coefficients.
class PolyXY {
public:
    struct Term {
        int m, n;
        Rational c;
    };

    void add(int m, int n, Rational c);
    const std::vector<Term>& terms() const noexcept { return terms_; }
    /// Coefficient of x^m y^n (zero when absent).
    Rational coeff(int m, int n) const;

    PolyXY dx() const;
    PolyXY dy() const;

    double eval(double x, double y) const;
    /// Series of P(r(t), s(t)) from precomputed powers r^m and s^n.
    jets::Jet1 eval(const std::vector<jets::Jet1>& r_pow, const std::vector<jets::Jet1>& s_pow) const;

private:
    std::vector<Term> terms_;
};

/// Harmonic pieces of the local expansion: requires m in {0, 1}.
PolyXY gen_G(int m, int n);
/// Source pieces of the local expansion, homogeneous of degree m + n + 2.
PolyXY gen_H(int m, int n);

/// u^(m,n) = sign * u^(u) + sum of f_terms (coefficient, index) for a solution of -Δu = f.
struct Reduction {
    int sign = 1;
    MN u;
    std::vector<std::pair<int, MN>> f_terms;
};
Reduction reduce_derivative(int m, int n, int M);

/// Stencil weights C(k, l): center -20, edges 4, corners 1.
inline constexpr std::array<std::array<double, 3>, 3> kStencil = {{{1, 4, 1}, {4, -20, 4}, {1, 4, 1}}};
constexpr double stencil(int k, int l) { return kStencil[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(l + 1)]; }

/// Right-hand side at a point whose nine stencil nodes share one side; `f` is the
/// Taylor jet of the source about the center (degree >= 4 for M >= 5, >= 2 otherwise).
double regular_rhs(const jets::Jet2& f, double h, int M);

struct RankCheck {
    int rank_m6 = 0, rank_m7 = 0;
    std::array<double, 9> null_vector{};  // M = 6 null vector scaled to a center weight of -20; row-major (k, l)
};
RankCheck max_order_rank_check();

/// t-series of G, H, monomials and their normal-derivative variants along a chart.
struct CurveSeries {
    int M = 6;
    IndexSet low;     // low_x(M + 1): G family
    IndexSet src;     // full(M - 1): H family
    IndexSet jump;    // full(M + 1): value-jump monomials
    IndexSet flux;    // full(M): flux-jump monomials
    std::vector<jets::Jet1> g, g_t;  // over `low`; degrees M + 1 and M
    std::vector<jets::Jet1> h, h_t;  // over `src`
    std::vector<jets::Jet1> r;       // over `jump`, degree M + 1
    std::vector<jets::Jet1> r_t;     // over `flux`, degree M, includes the arclength factor and orientation
};
CurveSeries curve_series(const geometry::CurveChart& chart, int M);

/// Linear functional over the derivatives of the interface data at a base point:
/// f+ and f- over full(M - 1), g1 over full(M + 1), g over full(M), plus a constant.
class LinearForm {
public:
    enum class Block { FPlus = 0, FMinus = 1, Jump = 2, Flux = 3 };

    LinearForm() = default;
    explicit LinearForm(int M);

    int order() const noexcept { return M_; }
    std::size_t size() const noexcept { return c_.size(); }
    std::size_t offset(Block b) const { return offsets_[static_cast<std::size_t>(b)]; }
    std::size_t slot(Block b, int m, int n) const;

    double& at(Block b, int m, int n) { return c_[slot(b, m, n)]; }
    double at(Block b, int m, int n) const { return c_[slot(b, m, n)]; }
    double& constant() noexcept { return constant_; }
    double constant() const noexcept { return constant_; }
    const std::vector<double>& coefficients() const noexcept { return c_; }

    LinearForm& operator+=(const LinearForm& o);
    LinearForm& operator-=(const LinearForm& o);
    LinearForm& operator*=(double a);
    /// *this += a * o.
    LinearForm& axpy(double a, const LinearForm& o);

    /// Value at a basis vector laid out like coefficients().
    double apply(const std::vector<double>& basis) const;
    bool is_zero() const;

private:
    int M_ = 0;
    std::array<std::size_t, 4> offsets_{};
    std::vector<double> c_;
    double constant_ = 0.0;
};

/// Taylor jets of the interface data about a base point, degree >= M + 1.
struct InterfaceData {
    jets::Jet2 f_plus, f_minus, g1, g;
};
/// Partial derivatives laid out like LinearForm::coefficients().
std::vector<double> basis_values(const InterfaceData& d, int M);

/// U^(m,n) = u+^(m,n) - u-^(m,n) for (m, n) in low_x(M + 1), in that set's order.
std::vector<LinearForm> transmission(const CurveSeries& cs);
/// The 2x2 determinants of the recursion for p = 1..M+1 (entry p - 1).
std::vector<double> transmission_determinants(const CurveSeries& cs);

/// Coefficients of the data derivatives in the right-hand side at an irregular point.
/// (v0, w0) is the center minus the base point; `plus_mask` uses geometry::offset_bit.
LinearForm irregular_coefficients(const geometry::CurveChart& chart, std::uint16_t plus_mask, double v0, double w0,
                                  double h, int M);
double irregular_rhs(const geometry::CurveChart& chart, std::uint16_t plus_mask, double v0, double w0, double h,
                     const InterfaceData& data, int M);

}  // namespace ifd6::scheme
