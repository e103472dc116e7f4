#include "ifd6/scheme.hpp"

#include "ifd6/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ifd6::scheme {

void validate_order(int M)
{
    if (M < kMinOrder || M > kMaxOrder)
        throw std::invalid_argument("order must be between " + std::to_string(kMinOrder) + " and " +
                                    std::to_string(kMaxOrder) + ", got " + std::to_string(M));
}

// ---------------------------------------------------------------- index sets

IndexSet IndexSet::full(int K)
{
    IndexSet s;
    for (int d = 0; d <= K; ++d)
        for (int m = 0; m <= d; ++m) s.members_.push_back({m, d - m});
    return s;
}

IndexSet IndexSet::low_x(int K)
{
    IndexSet s;
    for (int d = 0; d <= K; ++d)
        for (int m = 0; m <= std::min(d, 1); ++m) s.members_.push_back({m, d - m});
    return s;
}

IndexSet IndexSet::high_x(int K)
{
    IndexSet s;
    for (int d = 0; d <= K; ++d)
        for (int m = 2; m <= d; ++m) s.members_.push_back({m, d - m});
    return s;
}

int IndexSet::find(int m, int n) const
{
    for (std::size_t p = 0; p < members_.size(); ++p)
        if (members_[p].m == m && members_[p].n == n) return static_cast<int>(p);
    return -1;
}

// ---------------------------------------------------------------- polynomials

namespace {

long long ifactorial(int n)
{
    long long f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

Rational reduced(long long num, long long den)
{
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return {num, den};
}

}  // namespace

void PolyXY::add(int m, int n, Rational c)
{
    for (auto& t : terms_) {
        if (t.m == m && t.n == n) {
            const long long g = std::gcd(t.c.den, c.den);
            t.c = reduced(t.c.num * (c.den / g) + c.num * (t.c.den / g), t.c.den / g * c.den);
            return;
        }
    }
    if (c.num != 0) terms_.push_back({m, n, reduced(c.num, c.den)});
}

Rational PolyXY::coeff(int m, int n) const
{
    for (const auto& t : terms_)
        if (t.m == m && t.n == n) return t.c;
    return {0, 1};
}

PolyXY PolyXY::dx() const
{
    PolyXY out;
    for (const auto& t : terms_)
        if (t.m > 0) out.add(t.m - 1, t.n, reduced(t.c.num * t.m, t.c.den));
    return out;
}

PolyXY PolyXY::dy() const
{
    PolyXY out;
    for (const auto& t : terms_)
        if (t.n > 0) out.add(t.m, t.n - 1, reduced(t.c.num * t.n, t.c.den));
    return out;
}

double PolyXY::eval(double x, double y) const
{
    double sum = 0.0;
    for (const auto& t : terms_) sum += t.c.value() * jets::ipow(x, t.m) * jets::ipow(y, t.n);
    return sum;
}

jets::Jet1 PolyXY::eval(const std::vector<jets::Jet1>& r_pow, const std::vector<jets::Jet1>& s_pow) const
{
    jets::Jet1 out(r_pow.front().degree());
    for (const auto& t : terms_)
        out += (r_pow[static_cast<std::size_t>(t.m)] * s_pow[static_cast<std::size_t>(t.n)]) * t.c.value();
    return out;
}

PolyXY gen_G(int m, int n)
{
    if (m != 0 && m != 1) throw std::invalid_argument("gen_G: m must be 0 or 1");
    if (n < 0) throw std::invalid_argument("gen_G: negative index");
    PolyXY p;
    for (int l = 0; l <= n / 2; ++l)
        p.add(m + 2 * l, n - 2 * l, reduced(l % 2 ? -1 : 1, ifactorial(m + 2 * l) * ifactorial(n - 2 * l)));
    return p;
}

PolyXY gen_H(int m, int n)
{
    if (m < 0 || n < 0) throw std::invalid_argument("gen_H: negative index");
    PolyXY p;
    for (int l = 1; l <= 1 + n / 2; ++l)
        p.add(m + 2 * l, n - 2 * l + 2, reduced(l % 2 ? -1 : 1, ifactorial(m + 2 * l) * ifactorial(n - 2 * l + 2)));
    return p;
}

namespace {

// Shared tables covering every order up to the rank check's M = 7.
struct Tables {
    std::vector<PolyXY> G[2], Gx[2], Gy[2];  // indexed by n
    std::vector<PolyXY> H, Hx, Hy;           // indexed by position in IndexSet::full(kMaxOrder - 1)
    IndexSet h_set = IndexSet::full(kMaxOrder - 1);

    Tables()
    {
        for (int m = 0; m < 2; ++m)
            for (int n = 0; n <= kMaxOrder + 2; ++n) {
                G[m].push_back(gen_G(m, n));
                Gx[m].push_back(G[m].back().dx());
                Gy[m].push_back(G[m].back().dy());
            }
        for (const auto& mn : h_set) {
            H.push_back(gen_H(mn.m, mn.n));
            Hx.push_back(H.back().dx());
            Hy.push_back(H.back().dy());
        }
    }
};

const Tables& tables()
{
    static const Tables t;
    return t;
}

}  // namespace

Reduction reduce_derivative(int m, int n, int M)
{
    if (m < 0 || n < 0 || m + n > M + 1) throw std::invalid_argument("reduce_derivative: index outside the range");
    Reduction r;
    const int odd = m % 2;
    r.sign = (m / 2) % 2 ? -1 : 1;
    r.u = {odd, n + m - odd};
    for (int l = 1; l <= m / 2; ++l) r.f_terms.push_back({l % 2 ? -1 : 1, MN{m - 2 * l, n + 2 * l - 2}});
    return r;
}

// ---------------------------------------------------------------- regular points

double regular_rhs(const jets::Jet2& f, double h, int M)
{
    validate_order(M);
    const bool sixth = M >= 5;
    if (f.degree() < (sixth ? 4 : 2)) throw std::invalid_argument("regular_rhs: source jet degree too low");
    const double h2 = h * h, h4 = h2 * h2;
    double rhs = -6.0 * h2 * f.partial(0, 0) - 0.5 * h4 * (f.partial(2, 0) + f.partial(0, 2));
    if (sixth) {
        const double h6 = h4 * h2;
        rhs -= h6 / 60.0 * (f.partial(4, 0) + f.partial(0, 4)) + h6 / 15.0 * f.partial(2, 2);
    }
    return rhs;
}

RankCheck max_order_rank_check()
{
    RankCheck out;
    const Tables& t = tables();
    auto matrix = [&](int M) {
        const IndexSet low = IndexSet::low_x(M + 1);
        Eigen::MatrixXd A(low.size(), 9);
        for (int row = 0; row < low.size(); ++row)
            for (int k = -1; k <= 1; ++k)
                for (int l = -1; l <= 1; ++l)
                    A(row, (k + 1) * 3 + (l + 1)) = t.G[low[row].m][static_cast<std::size_t>(low[row].n)].eval(k, l);
        return A;
    };
    auto rank = [](const Eigen::JacobiSVD<Eigen::MatrixXd>& svd) {
        const auto& sv = svd.singularValues();
        int r = 0;
        for (int p = 0; p < sv.size(); ++p)
            if (sv(p) > 1e-10 * sv(0)) ++r;
        return r;
    };
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd6(matrix(6), Eigen::ComputeFullV);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd7(matrix(7), Eigen::ComputeFullV);
    out.rank_m6 = rank(svd6);
    out.rank_m7 = rank(svd7);
    const Eigen::VectorXd v = svd6.matrixV().col(8);
    const double scale = -20.0 / v(4);
    for (int p = 0; p < 9; ++p) out.null_vector[static_cast<std::size_t>(p)] = v(p) * scale;
    return out;
}

// ---------------------------------------------------------------- curve series

CurveSeries curve_series(const geometry::CurveChart& chart, int M)
{
    validate_order(M);
    const int D = M + 1;
    if (chart.r.degree() < D || chart.s.degree() < D) throw std::invalid_argument("curve_series: chart degree too low");
    if (chart.r[0] != 0.0 || chart.s[0] != 0.0) throw NonzeroCurveOrigin("curve_series: chart does not start at the origin");

    CurveSeries cs;
    cs.M = M;
    cs.low = IndexSet::low_x(D);
    cs.src = IndexSet::full(M - 1);
    cs.jump = IndexSet::full(D);
    cs.flux = IndexSet::full(M);

    const jets::Jet1 r = chart.r.truncated(D), s = chart.s.truncated(D);
    const jets::Jet1 rd = r.derivative(), sd = s.derivative();  // degree M
    const jets::Jet1 rM = r.truncated(M), sM = s.truncated(M);

    std::vector<jets::Jet1> rp(static_cast<std::size_t>(D) + 1, jets::Jet1(D, 1.0)), sp = rp;
    std::vector<jets::Jet1> rpM(static_cast<std::size_t>(D) + 1, jets::Jet1(M, 1.0)), spM = rpM;
    for (std::size_t k = 1; k <= static_cast<std::size_t>(D); ++k) {
        rp[k] = rp[k - 1] * r;
        sp[k] = sp[k - 1] * s;
        rpM[k] = rpM[k - 1] * rM;
        spM[k] = spM[k - 1] * sM;
    }

    const Tables& t = tables();
    auto normal = [&](const PolyXY& px, const PolyXY& py) { return px.eval(rpM, spM) * sd - py.eval(rpM, spM) * rd; };

    for (const auto& mn : cs.low) {
        const auto n = static_cast<std::size_t>(mn.n);
        cs.g.push_back(t.G[mn.m][n].eval(rp, sp));
        cs.g_t.push_back(normal(t.Gx[mn.m][n], t.Gy[mn.m][n]));
    }
    for (const auto& mn : cs.src) {
        const auto p = static_cast<std::size_t>(t.h_set.find(mn.m, mn.n));
        cs.h.push_back(t.H[p].eval(rp, sp));
        cs.h_t.push_back(normal(t.Hx[p], t.Hy[p]));
    }
    for (const auto& mn : cs.jump)
        cs.r.push_back(rp[static_cast<std::size_t>(mn.m)] * sp[static_cast<std::size_t>(mn.n)]);
    const jets::Jet1 arc = jets::sqrt(rd * rd + sd * sd) * static_cast<double>(chart.orient);
    for (const auto& mn : cs.flux)
        cs.r_t.push_back(rpM[static_cast<std::size_t>(mn.m)] * spM[static_cast<std::size_t>(mn.n)] * arc);
    return cs;
}

// ---------------------------------------------------------------- linear forms

LinearForm::LinearForm(int M) : M_(M)
{
    const auto nf = static_cast<std::size_t>(jets::triangle_size(M - 1));
    const auto nj = static_cast<std::size_t>(jets::triangle_size(M + 1));
    const auto ng = static_cast<std::size_t>(jets::triangle_size(M));
    offsets_ = {0, nf, 2 * nf, 2 * nf + nj};
    c_.assign(2 * nf + nj + ng, 0.0);
}

std::size_t LinearForm::slot(Block b, int m, int n) const
{
    const int K = b == Block::Jump ? M_ + 1 : b == Block::Flux ? M_ : M_ - 1;
    if (m < 0 || n < 0 || m + n > K) throw std::out_of_range("LinearForm: index outside its basis block");
    const int d = m + n;
    return offset(b) + static_cast<std::size_t>(d * (d + 1) / 2 + m);
}

LinearForm& LinearForm::operator+=(const LinearForm& o) { return axpy(1.0, o); }
LinearForm& LinearForm::operator-=(const LinearForm& o) { return axpy(-1.0, o); }

LinearForm& LinearForm::operator*=(double a)
{
    for (double& c : c_) c *= a;
    constant_ *= a;
    return *this;
}

LinearForm& LinearForm::axpy(double a, const LinearForm& o)
{
    if (o.M_ != M_) throw std::invalid_argument("LinearForm: order mismatch");
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += a * o.c_[k];
    constant_ += a * o.constant_;
    return *this;
}

double LinearForm::apply(const std::vector<double>& basis) const
{
    if (basis.size() != c_.size()) throw std::invalid_argument("LinearForm: basis size mismatch");
    double sum = constant_;
    for (std::size_t k = 0; k < c_.size(); ++k) sum += c_[k] * basis[k];
    return sum;
}

bool LinearForm::is_zero() const
{
    return constant_ == 0.0 && std::all_of(c_.begin(), c_.end(), [](double c) { return c == 0.0; });
}

std::vector<double> basis_values(const InterfaceData& d, int M)
{
    validate_order(M);
    if (d.f_plus.degree() < M - 1 || d.f_minus.degree() < M - 1 || d.g1.degree() < M + 1 || d.g.degree() < M)
        throw std::invalid_argument("basis_values: data jet degree too low");
    LinearForm layout(M);
    std::vector<double> v(layout.size());
    using B = LinearForm::Block;
    for (const auto& mn : IndexSet::full(M - 1)) {
        v[layout.slot(B::FPlus, mn.m, mn.n)] = d.f_plus.partial(mn.m, mn.n);
        v[layout.slot(B::FMinus, mn.m, mn.n)] = d.f_minus.partial(mn.m, mn.n);
    }
    for (const auto& mn : IndexSet::full(M + 1)) v[layout.slot(B::Jump, mn.m, mn.n)] = d.g1.partial(mn.m, mn.n);
    for (const auto& mn : IndexSet::full(M)) v[layout.slot(B::Flux, mn.m, mn.n)] = d.g.partial(mn.m, mn.n);
    return v;
}

// ---------------------------------------------------------------- transmission

namespace {

struct System2 {
    double a11, a12, a21, a22;
    double det() const { return a11 * a22 - a12 * a21; }
};

System2 system_for(const CurveSeries& cs, int p)
{
    const auto i0 = static_cast<std::size_t>(cs.low.find(0, p));
    const auto i1 = static_cast<std::size_t>(cs.low.find(1, p - 1));
    return {cs.g[i0][p], cs.g[i1][p], cs.g_t[i0][p - 1], cs.g_t[i1][p - 1]};
}

}  // namespace

std::vector<double> transmission_determinants(const CurveSeries& cs)
{
    std::vector<double> dets;
    for (int p = 1; p <= cs.M + 1; ++p) dets.push_back(system_for(cs, p).det());
    return dets;
}

std::vector<LinearForm> transmission(const CurveSeries& cs)
{
    using B = LinearForm::Block;
    const int M = cs.M;
    std::vector<LinearForm> U(static_cast<std::size_t>(cs.low.size()), LinearForm(M));
    U[0].at(B::Jump, 0, 0) = 1.0;

    for (int p = 1; p <= M + 1; ++p) {
        LinearForm rhs1(M), rhs2(M);
        for (int k = 0; k < cs.src.size(); ++k) {
            const MN mn = cs.src[k];
            const auto kk = static_cast<std::size_t>(k);
            rhs1.at(B::FMinus, mn.m, mn.n) += cs.h[kk][p];
            rhs1.at(B::FPlus, mn.m, mn.n) -= cs.h[kk][p];
            rhs2.at(B::FMinus, mn.m, mn.n) += cs.h_t[kk][p - 1];
            rhs2.at(B::FPlus, mn.m, mn.n) -= cs.h_t[kk][p - 1];
        }
        for (int k = 0; k < cs.jump.size(); ++k) {
            const MN mn = cs.jump[k];
            rhs1.at(B::Jump, mn.m, mn.n) += cs.r[static_cast<std::size_t>(k)][p] / (jets::factorial(mn.m) * jets::factorial(mn.n));
        }
        for (int k = 0; k < cs.flux.size(); ++k) {
            const MN mn = cs.flux[k];
            rhs2.at(B::Flux, mn.m, mn.n) +=
                cs.r_t[static_cast<std::size_t>(k)][p - 1] / (jets::factorial(mn.m) * jets::factorial(mn.n));
        }
        for (int k = 0; k < cs.low.size(); ++k) {
            const MN mn = cs.low[k];
            if (mn.m + mn.n >= p) continue;
            const auto kk = static_cast<std::size_t>(k);
            rhs1.axpy(-cs.g[kk][p], U[kk]);
            rhs2.axpy(-cs.g_t[kk][p - 1], U[kk]);
        }

        const System2 a = system_for(cs, p);
        const double det = a.det();
        if (!(det > 0.0) || !std::isfinite(det))
            throw SingularTransmission("transmission system singular at order " + std::to_string(p));
        LinearForm u0 = rhs1;
        u0 *= a.a22 / det;
        u0.axpy(-a.a12 / det, rhs2);
        LinearForm u1 = rhs2;
        u1 *= a.a11 / det;
        u1.axpy(-a.a21 / det, rhs1);
        U[static_cast<std::size_t>(cs.low.find(0, p))] = std::move(u0);
        U[static_cast<std::size_t>(cs.low.find(1, p - 1))] = std::move(u1);
    }
    return U;
}

// ---------------------------------------------------------------- irregular points

LinearForm irregular_coefficients(const geometry::CurveChart& chart, std::uint16_t plus_mask, double v0, double w0,
                                  double h, int M)
{
    using B = LinearForm::Block;
    validate_order(M);
    const Tables& t = tables();
    const IndexSet low = IndexSet::low_x(M + 1);
    const IndexSet src = IndexSet::full(M - 1);

    LinearForm out(M);
    std::vector<double> i_minus(static_cast<std::size_t>(low.size()), 0.0);
    bool any_minus = false;
    for (int k = -1; k <= 1; ++k) {
        for (int l = -1; l <= 1; ++l) {
            const double C = stencil(k, l);
            const double X = v0 + k * h, Y = w0 + l * h;
            const bool plus = (plus_mask >> geometry::offset_bit(k, l)) & 1u;
            const B block = plus ? B::FPlus : B::FMinus;
            for (const auto& mn : src)
                out.at(block, mn.m, mn.n) += C * t.H[static_cast<std::size_t>(t.h_set.find(mn.m, mn.n))].eval(X, Y);
            if (plus) continue;
            any_minus = true;
            for (int q = 0; q < low.size(); ++q)
                i_minus[static_cast<std::size_t>(q)] += C * t.G[low[q].m][static_cast<std::size_t>(low[q].n)].eval(X, Y);
        }
    }
    if (!any_minus) return out;

    const std::vector<LinearForm> U = transmission(curve_series(chart, M));
    for (std::size_t q = 0; q < U.size(); ++q) out.axpy(-i_minus[q], U[q]);
    return out;
}

double irregular_rhs(const geometry::CurveChart& chart, std::uint16_t plus_mask, double v0, double w0, double h,
                     const InterfaceData& data, int M)
{
    return irregular_coefficients(chart, plus_mask, v0, w0, h, M).apply(basis_values(data, M));
}

}  // namespace ifd6::scheme
