#pragma once

#include "ifd6/expr.hpp"
#include "ifd6/geometry.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <memory>

namespace ifd6::solver {

/// Data of -Δu = f± away from the interface, u = g0 on the outer boundary, and
/// [u] = g1, [∇u·n] = g across the zero set of psi (n pointing to psi > 0).
/// g0 is taken per side so it may be discontinuous where the interface meets the boundary.
struct ProblemData {
    expr::Expr psi, f_plus, f_minus, g, g1, g0_plus, g0_minus;
};

/// The constant nine-point operator on the interior nodes with homogeneous
/// Dirichlet closure. It depends only on the grid dimensions.
class SystemOperator {
public:
    SystemOperator() = default;
    SystemOperator(int nx, int ny);

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    int size() const noexcept { return nx_ * ny_; }

    /// A x.
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    /// -A as a sparse matrix (symmetric positive definite).
    Eigen::SparseMatrix<double> negated_matrix() const;
    /// max column sum of |A|.
    double norm1() const;

    friend bool operator==(const SystemOperator& a, const SystemOperator& b)
    {
        return a.nx_ == b.nx_ && a.ny_ == b.ny_;
    }

private:
    int nx_ = 0, ny_ = 0;
};

struct System {
    geometry::Classification classes;
    SystemOperator op;
    Eigen::VectorXd rhs;
};

/// Builds the right-hand side row by row; boundary neighbors are moved to the
/// right-hand side using g0 on the side of the boundary node.
System assemble(const geometry::Grid& grid, const ProblemData& data, int M);

enum class Method { Auto, Direct, Cg };

struct SolveOptions {
    Method method = Method::Auto;
    double tol = 1e-14;  // relative residual target for CG
};

/// Sparse LDLT factorization of -A, reusable across right-hand sides.
class DirectSolver {
public:
    explicit DirectSolver(const SystemOperator& op);
    ~DirectSolver();
    DirectSolver(const DirectSolver&) = delete;
    DirectSolver& operator=(const DirectSolver&) = delete;

    /// Solves A x = b with iterative refinement to a residual of 1e-13 ||b||.
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    /// Solves -A x = b once, without refinement.
    Eigen::VectorXd solve_negated(const Eigen::VectorXd& b) const;

private:
    struct Impl;
    const SystemOperator& op_;
    std::unique_ptr<Impl> impl_;
};

/// Matrix-free conjugate gradients on -A; NonConvergence after 50 * (nx + 1) iterations.
Eigen::VectorXd solve_cg(const SystemOperator& op, const Eigen::VectorXd& b, double tol);

/// Direct for grids up to 256 cells per side, CG beyond, unless `opts` says otherwise.
Eigen::VectorXd solve(const SystemOperator& op, const Eigen::VectorXd& b, const SolveOptions& opts = {});

/// ||A||_1 ||A^-1||_1, with the inverse norm from the Hager-Higham estimator.
double condition_number(const SystemOperator& op);
/// lambda_max / lambda_min of -A from power and inverse iteration.
double spectral_condition_number(const SystemOperator& op);

}  // namespace ifd6::solver
