#pragma once

#include "ifd6/expr.hpp"
#include "ifd6/jets.hpp"

#include <cstdint>
#include <vector>

namespace ifd6::geometry {

/// Uniform grid on [l1, l2] x [l3, l4]. Node (i, j) sits at (l1 + i h, l3 + j h)
/// for 0 <= i <= n1, 0 <= j <= n2; interior unknowns are 1..n1-1 by 1..n2-1.
struct Grid {
    double l1 = 0, l2 = 1, l3 = 0, l4 = 1;
    int n1 = 2, n2 = 2;
    double h = 0.5;

    /// Requires l2 > l1 and l4 - l3 an integer multiple of l2 - l1.
    static Grid make(double l1, double l2, double l3, double l4, int n1);

    double x(int i) const { return l1 + i * h; }
    double y(int j) const { return l3 + j * h; }
    int interior_nx() const { return n1 - 1; }
    int interior_ny() const { return n2 - 1; }
    int unknowns() const { return (n1 - 1) * (n2 - 1); }
    /// Row-major unknown index, j outer and i inner.
    int index(int i, int j) const { return (j - 1) * (n1 - 1) + (i - 1); }
};

enum class Side : std::uint8_t { Plus, Minus };

inline Side side_of(double psi_value) { return psi_value >= 0.0 ? Side::Plus : Side::Minus; }

/// Relative size below which a negative psi at a node counts as zero.
inline constexpr double kOnCurveTolerance = 1e-13;

/// Side of a grid node. Values within kOnCurveTolerance * max(1, |grad psi| h) of
/// zero are rounding noise of a node on the curve and count as plus.
Side node_side(const expr::Expr& psi, double x, double y, double h);

/// Bit for stencil offset (k, l), k and l in {-1, 0, 1}.
constexpr int offset_bit(int k, int l) { return (k + 1) * 3 + (l + 1); }
inline constexpr std::uint16_t kFullMask = 0x1ff;

struct PointClass {
    Side side = Side::Plus;
    bool irregular = false;
    std::uint16_t plus_mask = 0;  // offsets of the 3x3 block lying in the plus region

    bool in_plus(int k, int l) const { return (plus_mask >> offset_bit(k, l)) & 1u; }
};

/// Sides of every grid node (boundary included) plus per-interior-point classes.
class Classification {
public:
    Classification() = default;
    Classification(Grid grid, std::vector<Side> node_sides);

    const Grid& grid() const noexcept { return grid_; }
    Side node_side(int i, int j) const { return node_sides_[static_cast<std::size_t>(j * (grid_.n1 + 1) + i)]; }
    const PointClass& at(int i, int j) const { return points_[static_cast<std::size_t>(grid_.index(i, j))]; }
    int irregular_count() const noexcept { return irregular_count_; }

private:
    Grid grid_;
    std::vector<Side> node_sides_;
    std::vector<PointClass> points_;
    int irregular_count_ = 0;
};

Classification classify(const Grid& grid, const expr::Expr& psi);

struct BasePoint {
    double x = 0, y = 0;
};

/// Largest |v0|, |w0| in units of h for the base point of a doubly crossed stencil.
inline constexpr double kCrossedReach = 1.5;

/// Root of psi inside the open square of half-width h around the interior node (i, j).
/// Axis segments from the center are tried first and the root nearest the center wins;
/// then any sign-changing segment between two of the nine nodes; then a damped Newton
/// projection from the center. A root on the boundary of the square is accepted only
/// when none lies inside.
///
/// If the nodes of one side split into two groups, the curve crosses the square twice
/// and the projection of the center comes first; it may lie up to kCrossedReach * h away.
BasePoint find_base_point(const Classification& cls, const expr::Expr& psi, int i, int j);

/// Local parameterization x = x* + r(t), y = y* + s(t) of the zero level set.
struct CurveChart {
    double x = 0, y = 0;  // base point
    jets::Jet1 r, s;      // degree M + 1, r(0) = s(0) = 0
    int orient = 1;       // orient * (s'(0), -r'(0)) points into the plus region
    bool t_is_x = true;   // r(t) = t when true, s(t) = t otherwise
};

CurveChart local_chart(const expr::Expr& psi, double x, double y, int M);

/// True when the nodes in `mask` (or its complement) form one 8-connected group
/// for at least one of the two sides.
bool single_chart_compatible(std::uint16_t plus_mask);

/// True when the nodes of one side split into groups, i.e. the curve crosses the 3x3 block twice.
bool crossed_twice(std::uint16_t plus_mask);

}  // namespace ifd6::geometry
