#pragma once

#include "ifd6/expr.hpp"
#include "ifd6/geometry.hpp"
#include "ifd6/solver.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ifd6::harness {

/// A problem instance. The domain is [l1, l2] x [l3, l4].
struct ProblemSpec {
    double l1 = 0, l2 = 1, l3 = 0, l4 = 1;
    solver::ProblemData data;
    std::optional<expr::Expr> u_plus, u_minus;  // both or neither

    bool has_exact() const { return u_plus.has_value(); }
    /// Exact solution on the given side at (x, y); requires has_exact().
    double exact(double x, double y, geometry::Side side) const;
};

/// Problem file: one `key = expression` per line, `#` starts a comment.
/// Keys: format (optional, must be 1), l1 l2 l3 l4 (constant expressions), psi,
/// f_plus, f_minus, g, g1, then either g0 or both g0_plus and g0_minus, and
/// optionally both u_plus and u_minus.
ProblemSpec parse_problem(std::string_view text);
ProblemSpec load_problem(const std::string& path);

/// Grid with 2^J cells across [l1, l2].
geometry::Grid level_grid(const ProblemSpec& spec, int J);

struct Solution {
    geometry::Grid grid;
    Eigen::VectorXd u;  // interior values, row-major with j outer
    int irregular = 0;
    geometry::Classification classes;
};

Solution solve_level(const ProblemSpec& spec, int J, int M, const solver::SolveOptions& opts = {});

struct ConvergenceRow {
    int J = 0;
    std::optional<double> e2_exact, order2_exact, einf_exact, orderinf_exact;
    std::optional<double> e2_succ, order2_succ, einf_succ, orderinf_succ;
    std::optional<double> kappa;
    std::optional<double> seconds;
};

struct RunOptions {
    int M = 6;
    solver::SolveOptions solve;
    bool kappa = false;
    bool timing = false;
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    std::string failure;  // empty on success; otherwise rows hold the levels that finished
    bool failure_is_numerical = false;
    bool ok() const { return failure.empty(); }
};

/// Solves J = jmin..jmax. Successive errors of level J use level J + 1, so the last
/// row carries exact errors only.
ConvergenceResult run_convergence(const ProblemSpec& spec, int jmin, int jmax, const RunOptions& opts);

struct ErrorPair {
    double rel_l2 = 0, linf = 0;
};
ErrorPair exact_error(const ProblemSpec& spec, const Solution& s);
/// Coarse solution against the fine one on the shared nodes.
ErrorPair successive_error(const Solution& coarse, const Solution& fine);

enum class TableFormat { Csv, Markdown };

/// Values as x.xxE+yy and orders with three decimals; undefined cells are empty.
std::string emit_table(const std::vector<ConvergenceRow>& rows, TableFormat format);
std::vector<ConvergenceRow> parse_csv_table(std::string_view csv);

/// Text dump: a comment line, then "n1 n2", then "l1 l2 l3 l4", then one interior
/// value per line in row-major order (j outer, i inner).
void write_solution(std::ostream& out, const Solution& s);

}  // namespace ifd6::harness
