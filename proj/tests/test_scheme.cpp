#include "ifd6/error.hpp"
#include "ifd6/expr.hpp"
#include "ifd6/geometry.hpp"
#include "ifd6/scheme.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>

using namespace ifd6;
using scheme::IndexSet;
using scheme::LinearForm;
using scheme::Rational;

namespace {

double stencil_sum(const std::function<double(int, int)>& u)
{
    double s = 0;
    for (int k = -1; k <= 1; ++k)
        for (int l = -1; l <= 1; ++l) s += scheme::stencil(k, l) * u(k, l);
    return s;
}

geometry::CurveChart random_chart(std::mt19937_64& rng, int M, double speed)
{
    std::uniform_real_distribution<double> u(-1, 1), angle(0, 2 * M_PI);
    geometry::CurveChart c;
    c.r = jets::Jet1(M + 1);
    c.s = jets::Jet1(M + 1);
    const double a = angle(rng);
    c.r[1] = speed * std::cos(a);
    c.s[1] = speed * std::sin(a);
    for (int p = 2; p <= M + 1; ++p) {
        c.r[p] = u(rng);
        c.s[p] = u(rng);
    }
    return c;
}

scheme::InterfaceData data_at(const char* fp, const char* fm, const char* g1, const char* g, double x, double y, int degree)
{
    return {expr::parse(fp).taylor(x, y, degree), expr::parse(fm).taylor(x, y, degree),
            expr::parse(g1).taylor(x, y, degree), expr::parse(g).taylor(x, y, degree)};
}

}  // namespace

TEST_CASE("index sets")
{
    const IndexSet f = IndexSet::full(2);
    REQUIRE(f.size() == 6);
    CHECK(f[0] == scheme::MN{0, 0});
    CHECK(f[1] == scheme::MN{0, 1});
    CHECK(f[2] == scheme::MN{1, 0});
    CHECK(f[3] == scheme::MN{0, 2});
    CHECK(f[5] == scheme::MN{2, 0});
    CHECK(IndexSet::full(-1).size() == 0);
    CHECK(IndexSet::low_x(7).size() == 15);
    CHECK(IndexSet::low_x(7).contains(1, 6));
    CHECK_FALSE(IndexSet::low_x(7).contains(1, 7));
    for (int M = 3; M <= 6; ++M) {
        CHECK(IndexSet::full(M + 1).size() == IndexSet::low_x(M + 1).size() + IndexSet::full(M - 1).size());
        const IndexSet hi = IndexSet::high_x(M + 1), lo = IndexSet::low_x(M + 1);
        for (const auto& mn : hi) CHECK_FALSE(lo.contains(mn.m, mn.n));
        CHECK(hi.size() + lo.size() == IndexSet::full(M + 1).size());
    }
}

TEST_CASE("harmonic and source polynomials")
{
    const auto g02 = scheme::gen_G(0, 2);
    CHECK(g02.coeff(0, 2) == Rational{1, 2});
    CHECK(g02.coeff(2, 0) == Rational{-1, 2});
    CHECK(g02.terms().size() == 2);

    const auto h00 = scheme::gen_H(0, 0);
    CHECK(h00.coeff(2, 0) == Rational{-1, 2});
    CHECK(h00.terms().size() == 1);

    const auto g16 = scheme::gen_G(1, 6);
    CHECK(g16.coeff(1, 6) == Rational{1, 720});
    CHECK(g16.coeff(7, 0) == Rational{-1, 5040});
    CHECK(g16.coeff(5, 2) == Rational{1, 240});
    CHECK(g16.coeff(3, 4) == Rational{-1, 144});
    CHECK(g16.terms().size() == 4);

    const auto h04 = scheme::gen_H(0, 4);
    CHECK(h04.coeff(6, 0) == Rational{-1, 720});
    CHECK(h04.coeff(2, 4) == Rational{-1, 48});
    CHECK(h04.coeff(4, 2) == Rational{1, 48});
    CHECK(scheme::gen_H(2, 0).coeff(4, 0) == Rational{-1, 24});
    CHECK(scheme::gen_H(2, 0).terms().size() == 1);
    const auto h22 = scheme::gen_H(2, 2);
    CHECK(h22.coeff(6, 0) == Rational{1, 720});
    CHECK(h22.coeff(4, 2) == Rational{-1, 48});
    CHECK(h22.terms().size() == 2);
    const auto h32 = scheme::gen_H(3, 2);
    CHECK(h32.coeff(7, 0) == Rational{1, 5040});
    CHECK(h32.coeff(5, 2) == Rational{-1, 240});
    CHECK(scheme::gen_H(5, 0).coeff(7, 0) == Rational{-1, 5040});
    CHECK(scheme::gen_H(1, 3).coeff(3, 3) == Rational{-1, 36});

    CHECK_THROWS(scheme::gen_G(2, 0));
}

TEST_CASE("G is harmonic and -ΔH is the scaled monomial")
{
    auto laplacian = [](const scheme::PolyXY& p) {
        std::map<std::pair<int, int>, double> out;
        const scheme::PolyXY xx = p.dx().dx(), yy = p.dy().dy();
        for (const auto& t : xx.terms()) out[{t.m, t.n}] += t.c.value();
        for (const auto& t : yy.terms()) out[{t.m, t.n}] += t.c.value();
        return out;
    };
    for (int n = 0; n <= 8; ++n)
        for (int m = 0; m <= 1; ++m)
            for (const auto& [mn, v] : laplacian(scheme::gen_G(m, n))) CHECK(v == doctest::Approx(0.0));
    for (int d = 0; d <= 6; ++d)
        for (int m = 0; m <= d; ++m) {
            const int n = d - m;
            for (const auto& [mn, v] : laplacian(scheme::gen_H(m, n))) {
                const double expect = mn == std::make_pair(m, n) ? -1.0 / (jets::factorial(m) * jets::factorial(n)) : 0.0;
                CHECK(v == doctest::Approx(expect));
            }
        }
}

TEST_CASE("homogeneity of G and H")
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> hs(0.01, 2.0), kl(-1, 1);
    for (int trial = 0; trial < 20; ++trial) {
        const double h = hs(rng), k = kl(rng), l = kl(rng);
        for (int d = 0; d <= 7; ++d) {
            for (int m = 0; m <= std::min(d, 1); ++m) {
                const auto G = scheme::gen_G(m, d - m);
                CHECK(G.eval(k * h, l * h) == doctest::Approx(std::pow(h, d) * G.eval(k, l)).epsilon(1e-12));
            }
            if (d > 5) continue;
            for (int m = 0; m <= d; ++m) {
                const auto H = scheme::gen_H(m, d - m);
                CHECK(H.eval(k * h, l * h) == doctest::Approx(std::pow(h, d + 2) * H.eval(k, l)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("derivative reduction")
{
    const auto r21 = scheme::reduce_derivative(2, 1, 6);
    CHECK(r21.sign == -1);
    CHECK(r21.u == scheme::MN{0, 3});
    REQUIRE(r21.f_terms.size() == 1);
    CHECK(r21.f_terms[0].first == -1);
    CHECK(r21.f_terms[0].second == scheme::MN{0, 1});

    const auto r05 = scheme::reduce_derivative(0, 5, 6);
    CHECK(r05.sign == 1);
    CHECK(r05.u == scheme::MN{0, 5});
    CHECK(r05.f_terms.empty());

    const auto r60 = scheme::reduce_derivative(6, 0, 6);
    CHECK(r60.sign == -1);
    CHECK(r60.u == scheme::MN{0, 6});
    std::set<std::tuple<int, int, int>> terms;
    for (const auto& [c, mn] : r60.f_terms) terms.insert({c, mn.m, mn.n});
    CHECK(terms == std::set<std::tuple<int, int, int>>{{-1, 4, 0}, {1, 2, 2}, {-1, 0, 4}});
}

TEST_CASE("derivative reduction holds for polynomial solutions")
{
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        const auto u = testing::Poly::random(rng, 9);
        const auto f = u.neg_laplacian();
        const auto U = expr::parse(u.str()).taylor(0.2, -0.3, 7);
        const auto F = expr::parse(f.str()).taylor(0.2, -0.3, 7);
        for (const auto& mn : IndexSet::full(7)) {
            const auto r = scheme::reduce_derivative(mn.m, mn.n, 6);
            double v = r.sign * U.partial(r.u.m, r.u.n);
            for (const auto& [c, fmn] : r.f_terms) v += c * F.partial(fmn.m, fmn.n);
            CHECK(v == doctest::Approx(U.partial(mn.m, mn.n)).epsilon(1e-9));
        }
    }
}

TEST_CASE("regular right-hand side")
{
    const double h = 0.1;
    CHECK(scheme::regular_rhs(jets::Jet2(4, 1.0), h, 6) == doctest::Approx(-6 * h * h));
    const auto r2 = expr::parse("x^2+y^2").taylor(0, 0, 4);
    CHECK(scheme::regular_rhs(r2, h, 6) == doctest::Approx(-2 * std::pow(h, 4)));

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> c(-2, 2);
    const auto u = expr::parse("x^7");
    const auto f = expr::parse("-42*x^5");
    for (int k = 0; k < 20; ++k) {
        const double x = c(rng), y = c(rng);
        const double lhs = stencil_sum([&](int a, int b) { return u.eval(x + a * h, y + b * h); });
        const double rhs = scheme::regular_rhs(f.taylor(x, y, 4), h, 6);
        CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, std::fabs(u.eval(x, y))));
    }

    const auto j = expr::parse("sin(x)*exp(y)+x^4*y^2").taylor(0.4, 0.3, 4);
    CHECK(scheme::regular_rhs(j, h, 3) == scheme::regular_rhs(j, h, 4));
    CHECK(scheme::regular_rhs(j, h, 5) == scheme::regular_rhs(j, h, 6));
    CHECK(scheme::regular_rhs(j, h, 4) != scheme::regular_rhs(j, h, 6));
    CHECK_THROWS_AS(scheme::regular_rhs(j, h, 7), std::invalid_argument);
    CHECK_THROWS_AS(scheme::regular_rhs(expr::parse("x").taylor(0, 0, 3), h, 6), std::invalid_argument);
}

TEST_CASE("stencil annihilates constants")
{
    CHECK(stencil_sum([](int, int) { return 1.0; }) == 0.0);
    CHECK(scheme::stencil(0, 0) == -20);
    CHECK(scheme::stencil(1, 0) == 4);
    CHECK(scheme::stencil(-1, 1) == 1);
}

TEST_CASE("sixth order is the maximum for a nine-point stencil")
{
    const auto rc = scheme::max_order_rank_check();
    CHECK(rc.rank_m6 == 8);
    CHECK(rc.rank_m7 == 9);
    for (int k = -1; k <= 1; ++k)
        for (int l = -1; l <= 1; ++l)
            CHECK(std::fabs(rc.null_vector[static_cast<std::size_t>(geometry::offset_bit(k, l))] - scheme::stencil(k, l)) <=
                  1e-10);
}

TEST_CASE("local truncation error decays like h^8")
{
    const auto u = expr::parse("sin(3*x+2*y)");
    const auto f = expr::parse("13*sin(3*x+2*y)");
    const double x = 0.3, y = 0.2;
    std::vector<double> err;
    for (double h = 0.2; h > 0.02; h /= 2) {
        const double lhs = stencil_sum([&](int a, int b) { return u.eval(x + a * h, y + b * h); });
        err.push_back(std::fabs(lhs - scheme::regular_rhs(f.taylor(x, y, 4), h, 6)));
    }
    for (std::size_t k = 1; k < err.size(); ++k) CHECK(std::log2(err[k - 1] / err[k]) >= 7.5);
}

TEST_CASE("curve series")
{
    std::mt19937_64 rng(37);
    const int M = 6;
    for (int trial = 0; trial < 20; ++trial) {
        const auto chart = random_chart(rng, M, 0.5 + trial * 0.1);
        const auto cs = scheme::curve_series(chart, M);
        for (int k = 0; k < cs.low.size(); ++k) {
            const auto& mn = cs.low[k];
            for (int p = 0; p < std::min(mn.m + mn.n, M + 2); ++p) CHECK(cs.g[static_cast<std::size_t>(k)][p] == 0.0);
        }
        for (int p = 1; p <= M + 1; ++p) {
            const auto i0 = static_cast<std::size_t>(cs.low.find(0, p));
            const auto i1 = static_cast<std::size_t>(cs.low.find(1, p - 1));
            CHECK(cs.g_t[i0][p - 1] == doctest::Approx(-p * cs.g[i1][p]).epsilon(1e-10));
            CHECK(cs.g_t[i1][p - 1] == doctest::Approx(p * cs.g[i0][p]).epsilon(1e-10));
        }
    }

    geometry::CurveChart line;
    const double c = 0.7;
    line.r = jets::Jet1::variable(M + 1);
    line.s = line.r * c;
    const auto cs = scheme::curve_series(line, M);
    for (int p = 1; p <= M + 1; ++p) {
        CHECK(cs.g[static_cast<std::size_t>(cs.low.find(0, p))][p] ==
              doctest::Approx(scheme::gen_G(0, p).eval(1, c)).epsilon(1e-13));
        CHECK(cs.g[static_cast<std::size_t>(cs.low.find(1, p - 1))][p] ==
              doctest::Approx(scheme::gen_G(1, p - 1).eval(1, c)).epsilon(1e-13));
    }

    geometry::CurveChart flipped = line;
    flipped.orient = -1;
    const auto fs = scheme::curve_series(flipped, M);
    for (std::size_t k = 0; k < cs.r_t.size(); ++k)
        for (int p = 0; p <= M; ++p) CHECK(fs.r_t[k][p] == -cs.r_t[k][p]);

    geometry::CurveChart shifted = line;
    shifted.r[0] = 0.1;
    CHECK_THROWS_AS(scheme::curve_series(shifted, M), NonzeroCurveOrigin);
}

TEST_CASE("transmission determinants")
{
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> logspeed(-2, 2);
    for (int trial = 0; trial < 200; ++trial) {
        const double speed = std::pow(10.0, logspeed(rng));
        const auto chart = random_chart(rng, 6, speed);
        const auto dets = scheme::transmission_determinants(scheme::curve_series(chart, 6));
        const double a = chart.r[1] * chart.r[1] + chart.s[1] * chart.s[1];
        for (int p = 1; p <= 7; ++p) {
            const double fp = jets::factorial(p);
            const double expect = p * std::pow(a, p) / (fp * fp);
            CHECK(std::fabs(dets[static_cast<std::size_t>(p - 1)] - expect) <= 1e-10 * expect);
        }
    }

    geometry::CurveChart stalled;
    stalled.r = jets::Jet1(7);
    stalled.s = jets::Jet1(7);
    stalled.r[2] = 1.0;
    CHECK_THROWS_AS(scheme::curve_series(stalled, 6), DomainError);
}

TEST_CASE("transmission of a constant jump")
{
    std::mt19937_64 rng(43);
    const int M = 6;
    const auto U = scheme::transmission(scheme::curve_series(random_chart(rng, M, 1.0), M));
    REQUIRE(U.size() == 15);
    scheme::InterfaceData d{jets::Jet2(7, 3.0), jets::Jet2(7, 3.0), jets::Jet2(7, -100.0), jets::Jet2(7, 0.0)};
    const auto basis = scheme::basis_values(d, M);
    CHECK(U[0].apply(basis) == doctest::Approx(-100.0));
    for (std::size_t q = 1; q < U.size(); ++q) CHECK(std::fabs(U[q].apply(basis)) <= 1e-10);
    for (const auto& form : U) CHECK(form.constant() == 0.0);
    CHECK(U[0].apply(std::vector<double>(basis.size(), 0.0)) == 0.0);
}

TEST_CASE("transmission reproduces a manufactured jump")
{
    // u+ = x^2 + y and u- = sin(x) + y^3 across the circle x^2 + y^2 = 2.
    const auto up = expr::parse("x^2+y"), um = expr::parse("sin(x)+y^3");
    const char* g = "((2*x-cos(x))*x + (1-3*y^2)*y)/sqrt(x^2+y^2)";
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> angle(0, 2 * M_PI);
    const int M = 6;
    for (int trial = 0; trial < 10; ++trial) {
        const double a = angle(rng), x = std::sqrt(2.0) * std::cos(a), y = std::sqrt(2.0) * std::sin(a);
        const auto chart = geometry::local_chart(expr::parse("x^2+y^2-2"), x, y, M);
        const auto U = scheme::transmission(scheme::curve_series(chart, M));
        const auto basis =
            scheme::basis_values(data_at("-2", "sin(x)-6*y", "x^2+y-sin(x)-y^3", g, x, y, M + 1), M);
        const auto jp = up.taylor(x, y, M + 1), jm = um.taylor(x, y, M + 1);
        const auto low = IndexSet::low_x(M + 1);
        for (int q = 0; q < low.size(); ++q) {
            const double expect = jp.partial(low[q].m, low[q].n) - jm.partial(low[q].m, low[q].n);
            CHECK(std::fabs(U[static_cast<std::size_t>(q)].apply(basis) - expect) <= 1e-9 * std::max(1.0, std::fabs(expect)));
        }
    }
}

TEST_CASE("irregular rows without minus nodes match the regular row")
{
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> off(-0.99, 0.99);
    const double h = 0.05;
    for (int trial = 0; trial < 10; ++trial) {
        const auto f = testing::Poly::random(rng, 5);
        const auto fe = expr::parse(f.str());
        const double bx = 0.3, by = -0.2, v0 = off(rng) * h, w0 = off(rng) * h;
        const auto chart = geometry::local_chart(expr::parse("x^2+y^2-0.13"), bx, by, 6);
        scheme::InterfaceData d{fe.taylor(bx, by, 7), fe.taylor(bx, by, 7), jets::Jet2(7, 1.0), jets::Jet2(7, 2.0)};
        const double irr = scheme::irregular_rhs(chart, geometry::kFullMask, v0, w0, h, d, 6);
        const double reg = scheme::regular_rhs(fe.taylor(bx + v0, by + w0, 4), h, 6);
        CHECK(std::fabs(irr - reg) <= 1e-12 * std::max(1.0, std::fabs(reg)));
    }
}

TEST_CASE("piecewise polynomials across a straight line are reproduced exactly")
{
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> angle(0, 2 * M_PI), unit(-1, 1);
    const double h = 0.1;
    std::set<std::uint16_t> masks;
    for (int trial = 0; trial < 40; ++trial) {
        const double th = angle(rng), nx = std::cos(th), ny = std::sin(th);
        char buf[160];
        std::snprintf(buf, sizeof buf, "(%.17g)*x + (%.17g)*y", nx, ny);
        const auto psi = expr::parse(buf);
        const auto up = testing::Poly::random(rng, 7), um = testing::Poly::random(rng, 7);
        const auto jump = up - um;
        const auto flux = jump.dx() * nx + jump.dy() * ny;
        const auto fp = expr::parse(up.neg_laplacian().str()), fm = expr::parse(um.neg_laplacian().str());
        const auto g1 = expr::parse(jump.str()), g = expr::parse(flux.str());

        for (int sample = 0; sample < 10; ++sample) {
            const double dist = unit(rng) * 1.5 * h;
            const double xc = dist * nx + unit(rng) * 0.3 * ny, yc = dist * ny - unit(rng) * 0.3 * nx;
            const auto grid = geometry::Grid::make(xc - 2 * h, xc + 2 * h, yc - 2 * h, yc + 2 * h, 4);
            const auto cls = geometry::classify(grid, psi);
            const auto& pc = cls.at(2, 2);
            if (!pc.irregular) continue;
            masks.insert(pc.plus_mask);
            const auto b = geometry::find_base_point(cls, psi, 2, 2);
            const auto chart = geometry::local_chart(psi, b.x, b.y, 6);
            const scheme::InterfaceData d{fp.taylor(b.x, b.y, 7), fm.taylor(b.x, b.y, 7), g1.taylor(b.x, b.y, 7),
                                          g.taylor(b.x, b.y, 7)};
            const double rhs = scheme::irregular_rhs(chart, pc.plus_mask, xc - b.x, yc - b.y, h, d, 6);
            double scale = 0;
            const double lhs = stencil_sum([&](int k, int l) {
                const double x = xc + k * h, y = yc + l * h;
                const double v = pc.in_plus(k, l) ? up.eval(x, y) : um.eval(x, y);
                scale += std::fabs(scheme::stencil(k, l) * v);
                return v;
            });
            CHECK(std::fabs(lhs - rhs) <= 1e-9 * scale);
        }
    }
    CHECK(masks.size() >= 40);
}

TEST_CASE("irregular coefficients are linear in the data")
{
    std::mt19937_64 rng(61);
    const auto chart = geometry::local_chart(expr::parse("y - cos(x)"), 0.2, std::cos(0.2), 6);
    const std::uint16_t mask = 0x1c0 | 0x38;
    const auto form = scheme::irregular_coefficients(chart, mask, 0.01, -0.02, 0.1, 6);
    const auto d = data_at("x*y", "exp(x)", "sin(y)", "x^3", 0.2, std::cos(0.2), 7);
    CHECK(form.apply(scheme::basis_values(d, 6)) == scheme::irregular_rhs(chart, mask, 0.01, -0.02, 0.1, d, 6));
    LinearForm twice = form;
    twice += form;
    const auto basis = scheme::basis_values(d, 6);
    CHECK(twice.apply(basis) == doctest::Approx(2 * form.apply(basis)));
    CHECK_THROWS_AS(form.slot(LinearForm::Block::FPlus, 5, 1), std::out_of_range);
    CHECK_NOTHROW(form.slot(LinearForm::Block::Jump, 0, 7));
}
