#include "ifd6/geometry.hpp"

#include "ifd6/error.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>

namespace ifd6::geometry {

Grid Grid::make(double l1, double l2, double l3, double l4, int n1)
{
    if (!(l2 > l1) || !(l4 > l3)) throw std::invalid_argument("grid: empty domain");
    if (n1 < 2) throw std::invalid_argument("grid: need at least two cells per direction");
    const double ratio = (l4 - l3) / (l2 - l1);
    const double n0 = std::round(ratio);
    if (n0 < 1.0 || std::fabs(ratio - n0) > 1e-9 * n0)
        throw std::invalid_argument("grid: l4 - l3 must be an integer multiple of l2 - l1");
    Grid g;
    g.l1 = l1;
    g.l2 = l2;
    g.l3 = l3;
    g.l4 = l4;
    g.n1 = n1;
    g.n2 = static_cast<int>(n0) * n1;
    g.h = (l2 - l1) / n1;
    return g;
}

Classification::Classification(Grid grid, std::vector<Side> node_sides)
    : grid_(grid), node_sides_(std::move(node_sides))
{
    points_.resize(static_cast<std::size_t>(grid_.unknowns()));
    for (int j = 1; j < grid_.n2; ++j) {
        for (int i = 1; i < grid_.n1; ++i) {
            PointClass pc;
            pc.side = node_side(i, j);
            for (int k = -1; k <= 1; ++k)
                for (int l = -1; l <= 1; ++l)
                    if (node_side(i + k, j + l) == Side::Plus) pc.plus_mask |= std::uint16_t(1u << offset_bit(k, l));
            pc.irregular = pc.plus_mask != 0 && pc.plus_mask != kFullMask;
            if (pc.irregular) ++irregular_count_;
            points_[static_cast<std::size_t>(grid_.index(i, j))] = pc;
        }
    }
}

Side node_side(const expr::Expr& psi, double x, double y, double h)
{
    const double v = psi.eval(x, y);
    if (v >= 0.0) return Side::Plus;
    if (-v > 1e-6) return Side::Minus;
    const jets::Jet2 p = psi.taylor(x, y, 1);
    const double scale = std::max(1.0, std::hypot(p.coeff(1, 0), p.coeff(0, 1)) * h);
    return -v <= kOnCurveTolerance * scale ? Side::Plus : Side::Minus;
}

Classification classify(const Grid& grid, const expr::Expr& psi)
{
    std::vector<Side> sides(static_cast<std::size_t>((grid.n1 + 1) * (grid.n2 + 1)));
    for (int j = 0; j <= grid.n2; ++j)
        for (int i = 0; i <= grid.n1; ++i)
            sides[static_cast<std::size_t>(j * (grid.n1 + 1) + i)] = node_side(psi, grid.x(i), grid.y(j), grid.h);
    return Classification(grid, std::move(sides));
}

namespace {

bool eight_connected(std::uint16_t mask)
{
    if (mask == 0) return true;
    int start = 0;
    while (!((mask >> start) & 1u)) ++start;
    std::uint16_t seen = std::uint16_t(1u << start);
    std::array<int, 9> stack{};
    int top = 0;
    stack[top++] = start;
    while (top > 0) {
        const int b = stack[--top];
        const int k = b / 3, l = b % 3;
        for (int dk = -1; dk <= 1; ++dk)
            for (int dl = -1; dl <= 1; ++dl) {
                const int kk = k + dk, ll = l + dl;
                if (kk < 0 || kk > 2 || ll < 0 || ll > 2) continue;
                const int nb = kk * 3 + ll;
                if (((mask >> nb) & 1u) && !((seen >> nb) & 1u)) {
                    seen |= std::uint16_t(1u << nb);
                    stack[top++] = nb;
                }
            }
    }
    return seen == mask;
}

}  // namespace

bool single_chart_compatible(std::uint16_t plus_mask)
{
    return eight_connected(plus_mask) || eight_connected(std::uint16_t(~plus_mask & kFullMask));
}

bool crossed_twice(std::uint16_t plus_mask)
{
    return !eight_connected(plus_mask) || !eight_connected(std::uint16_t(~plus_mask & kFullMask));
}

namespace {

struct Candidate {
    double x, y;
};

// Root of psi on the segment from node a (on side sa) to a node on the other side.
std::optional<Candidate> bracket_root(const expr::Expr& psi, double ax, double ay, Side sa, double bx, double by,
                                      double h)
{
    const double dx = bx - ax, dy = by - ay;
    auto at = [&](double t) { return psi.eval(ax + t * dx, ay + t * dy); };
    const double len = std::hypot(dx, dy);
    const double width = 1e-15 * h / len;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > width) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (side_of(at(mid)) == sa) lo = mid;
        else hi = mid;
    }
    double t = 0.5 * (lo + hi);
    if (at(lo) == 0.0) t = lo;
    else if (at(hi) == 0.0) t = hi;
    // Without a sign change (inconsistent sides) bisection ends at no root at all.
    const double ends = std::max(std::fabs(at(0.0)), std::fabs(at(1.0)));
    if (!(std::fabs(at(t)) <= 1e-8 * ends)) return std::nullopt;
    for (int it = 0; it < 5; ++it) {
        const jets::Jet2 p = psi.taylor(ax + t * dx, ay + t * dy, 1);
        const double v = p.value();
        if (v == 0.0) break;
        const double slope = p.coeff(1, 0) * dx + p.coeff(0, 1) * dy;
        if (slope == 0.0) break;
        const double tn = t - v / slope;
        if (!(tn >= lo - width && tn <= hi + width) || !std::isfinite(tn)) break;
        if (std::fabs(psi.eval(ax + tn * dx, ay + tn * dy)) > std::fabs(v)) break;
        t = tn;
    }
    return Candidate{ax + t * dx, ay + t * dy};
}

// Damped Newton projection of (x, y) onto the zero set; empty unless it converges.
std::optional<Candidate> project_to_curve(const expr::Expr& psi, double x, double y, double h)
{
    for (int it = 0; it < 20; ++it) {
        const jets::Jet2 p = psi.taylor(x, y, 1);
        const double v = p.value(), gx = p.coeff(1, 0), gy = p.coeff(0, 1);
        const double g2 = gx * gx + gy * gy;
        if (v == 0.0 || g2 == 0.0) break;
        double step = 1.0;
        bool moved = false;
        for (int d = 0; d < 30; ++d, step *= 0.5) {
            const double xn = x - step * v * gx / g2, yn = y - step * v * gy / g2;
            if (std::fabs(psi.eval(xn, yn)) < std::fabs(v)) {
                x = xn;
                y = yn;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    const jets::Jet2 p = psi.taylor(x, y, 1);
    const double scale = std::max(1.0, std::hypot(p.coeff(1, 0), p.coeff(0, 1)) * h);
    if (std::fabs(p.value()) > 1e-12 * scale) return std::nullopt;
    return Candidate{x, y};
}

}  // namespace

BasePoint find_base_point(const Classification& cls, const expr::Expr& psi, int i, int j)
{
    const Grid& g = cls.grid();
    const PointClass& pc = cls.at(i, j);
    if (!single_chart_compatible(pc.plus_mask)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "stencil at (%d, %d) is crossed more than once", i, j);
        throw BasePointAmbiguous(buf);
    }
    const double cx = g.x(i), cy = g.y(j), h = g.h;
    // When the curve crosses the square twice the roots inside it sit near opposite
    // corners; the point of the curve nearest the center keeps all nodes close.
    if (crossed_twice(pc.plus_mask)) {
        if (const auto c = project_to_curve(psi, cx, cy, h);
            c && std::fabs(c->x - cx) < kCrossedReach * h && std::fabs(c->y - cy) < kCrossedReach * h)
            return BasePoint{c->x, c->y};
    }
    auto inside = [&](const Candidate& c) { return std::fabs(c.x - cx) < h && std::fabs(c.y - cy) < h; };
    const double closed = h * (1.0 + 1e-12);
    auto on_square = [&](const Candidate& c) { return std::fabs(c.x - cx) <= closed && std::fabs(c.y - cy) <= closed; };

    // Roots on the boundary of the square are kept apart: they are used only when the
    // curve touches the square without entering it.
    std::optional<Candidate> best, edge;
    double best_dist = std::numeric_limits<double>::infinity();
    double edge_dist = best_dist;
    auto consider = [&](const std::optional<Candidate>& c) {
        if (!c) return;
        const double d = std::hypot(c->x - cx, c->y - cy);
        if (inside(*c)) {
            if (d < best_dist) {
                best_dist = d;
                best = c;
            }
        } else if (on_square(*c) && d < edge_dist) {
            edge_dist = d;
            edge = c;
        }
    };

    static constexpr int kAxis[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (const auto& a : kAxis) {
        if (pc.in_plus(a[0], a[1]) == pc.in_plus(0, 0)) continue;
        consider(bracket_root(psi, cx, cy, pc.side, g.x(i + a[0]), g.y(j + a[1]), h));
    }

    if (!best) {
        for (int p = 0; p < 9; ++p) {
            for (int q = p + 1; q < 9; ++q) {
                const int k1 = p / 3 - 1, l1 = p % 3 - 1, k2 = q / 3 - 1, l2 = q % 3 - 1;
                if (pc.in_plus(k1, l1) == pc.in_plus(k2, l2)) continue;
                // Segments along an edge of the square never enter its interior.
                if ((k1 == k2 && k1 != 0) || (l1 == l2 && l1 != 0)) continue;
                consider(bracket_root(psi, g.x(i + k1), g.y(j + l1), cls.node_side(i + k1, j + l1), g.x(i + k2),
                                      g.y(j + l2), h));
            }
        }
    }

    if (!best) consider(project_to_curve(psi, cx, cy, h));

    if (!best) best = edge;
    if (!best) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "no interface point near (%.17g, %.17g)", cx, cy);
        throw BasePointNotFound(buf);
    }
    return BasePoint{best->x, best->y};
}

CurveChart local_chart(const expr::Expr& psi, double x, double y, int M)
{
    const int degree = M + 1;
    const jets::Jet2 P = psi.taylor(x, y, degree);
    const double px = P.coeff(1, 0), py = P.coeff(0, 1);
    if (std::hypot(px, py) < 1e-12) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "level-set gradient vanishes at (%.17g, %.17g)", x, y);
        throw DegenerateGradient(buf);
    }
    // Drop the constant term: the chart describes the level set through (x, y).
    jets::Jet2 Q = P;
    Q.set_coeff(0, 0, 0.0);

    CurveChart c;
    c.x = x;
    c.y = y;
    c.t_is_x = std::fabs(py) >= std::fabs(px);
    const double dominant = c.t_is_x ? py : px;
    jets::Jet1 t = jets::Jet1::variable(degree);
    jets::Jet1 rho(degree);
    for (int p = 1; p <= degree; ++p) {
        const jets::Jet1 v = c.t_is_x ? jets::compose(Q, t, rho) : jets::compose(Q, rho, t);
        rho[p] = -v[p] / dominant;
    }
    c.r = c.t_is_x ? t : rho;
    c.s = c.t_is_x ? rho : t;
    const double dot = c.s[1] * px - c.r[1] * py;
    c.orient = dot > 0 ? 1 : -1;
    return c;
}

}  // namespace ifd6::geometry
