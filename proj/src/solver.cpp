#include "ifd6/solver.hpp"

#include "ifd6/error.hpp"
#include "ifd6/scheme.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace ifd6::solver {

SystemOperator::SystemOperator(int nx, int ny) : nx_(nx), ny_(ny)
{
    if (nx < 1 || ny < 1) throw std::invalid_argument("SystemOperator: empty grid");
}

Eigen::VectorXd SystemOperator::apply(const Eigen::VectorXd& x) const
{
    if (x.size() != size()) throw std::invalid_argument("SystemOperator::apply: size mismatch");
    Eigen::VectorXd y(size());
    for (int j = 0; j < ny_; ++j) {
        for (int i = 0; i < nx_; ++i) {
            double sum = 0.0;
            for (int l = -1; l <= 1; ++l) {
                const int jj = j + l;
                if (jj < 0 || jj >= ny_) continue;
                for (int k = -1; k <= 1; ++k) {
                    const int ii = i + k;
                    if (ii < 0 || ii >= nx_) continue;
                    sum += scheme::stencil(k, l) * x(jj * nx_ + ii);
                }
            }
            y(j * nx_ + i) = sum;
        }
    }
    return y;
}

Eigen::SparseMatrix<double> SystemOperator::negated_matrix() const
{
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(size()) * 9);
    for (int j = 0; j < ny_; ++j)
        for (int i = 0; i < nx_; ++i)
            for (int l = -1; l <= 1; ++l)
                for (int k = -1; k <= 1; ++k) {
                    const int ii = i + k, jj = j + l;
                    if (ii < 0 || ii >= nx_ || jj < 0 || jj >= ny_) continue;
                    t.emplace_back(j * nx_ + i, jj * nx_ + ii, -scheme::stencil(k, l));
                }
    Eigen::SparseMatrix<double> A(size(), size());
    A.setFromTriplets(t.begin(), t.end());
    return A;
}

double SystemOperator::norm1() const
{
    double best = 0.0;
    for (int j = 0; j < ny_; ++j)
        for (int i = 0; i < nx_; ++i) {
            double sum = 0.0;
            for (int l = -1; l <= 1; ++l)
                for (int k = -1; k <= 1; ++k) {
                    const int ii = i + k, jj = j + l;
                    if (ii >= 0 && ii < nx_ && jj >= 0 && jj < ny_) sum += std::fabs(scheme::stencil(k, l));
                }
            best = std::max(best, sum);
        }
    return best;
}

// ---------------------------------------------------------------- assembly

System assemble(const geometry::Grid& grid, const ProblemData& data, int M)
{
    scheme::validate_order(M);
    System sys;
    sys.classes = geometry::classify(grid, data.psi);
    sys.op = SystemOperator(grid.interior_nx(), grid.interior_ny());
    sys.rhs = Eigen::VectorXd::Zero(grid.unknowns());
    const int regular_degree = M >= 5 ? 4 : 2;

    for (int j = 1; j < grid.n2; ++j) {
        for (int i = 1; i < grid.n1; ++i) {
            const double x = grid.x(i), y = grid.y(j);
            const geometry::PointClass& pc = sys.classes.at(i, j);
            double rhs = 0.0;
            try {
                if (!pc.irregular) {
                    const expr::Expr& f = pc.side == geometry::Side::Plus ? data.f_plus : data.f_minus;
                    rhs = scheme::regular_rhs(f.taylor(x, y, regular_degree), grid.h, M);
                } else {
                    const geometry::BasePoint bp = geometry::find_base_point(sys.classes, data.psi, i, j);
                    const geometry::CurveChart chart = geometry::local_chart(data.psi, bp.x, bp.y, M);
                    scheme::InterfaceData d;
                    d.f_plus = data.f_plus.taylor(bp.x, bp.y, M - 1);
                    d.f_minus = data.f_minus.taylor(bp.x, bp.y, M - 1);
                    d.g1 = data.g1.taylor(bp.x, bp.y, M + 1);
                    d.g = data.g.taylor(bp.x, bp.y, M);
                    rhs = scheme::irregular_rhs(chart, pc.plus_mask, x - bp.x, y - bp.y, grid.h, d, M);
                }
                for (int l = -1; l <= 1; ++l) {
                    for (int k = -1; k <= 1; ++k) {
                        const int ii = i + k, jj = j + l;
                        if (ii > 0 && ii < grid.n1 && jj > 0 && jj < grid.n2) continue;
                        const expr::Expr& g0 =
                            sys.classes.node_side(ii, jj) == geometry::Side::Plus ? data.g0_plus : data.g0_minus;
                        rhs -= scheme::stencil(k, l) * g0.eval(grid.x(ii), grid.y(jj));
                    }
                }
            } catch (const Error& e) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "at grid point (%d, %d) = (%.17g, %.17g)", i, j, x, y);
                rethrow_with_context(e, buf);
            }
            sys.rhs(grid.index(i, j)) = rhs;
        }
    }
    return sys;
}

// ---------------------------------------------------------------- solvers

struct DirectSolver::Impl {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

DirectSolver::DirectSolver(const SystemOperator& op) : op_(op), impl_(std::make_unique<Impl>())
{
    impl_->ldlt.compute(op.negated_matrix());
    if (impl_->ldlt.info() != Eigen::Success) throw NonConvergence("sparse factorization failed");
}

DirectSolver::~DirectSolver() = default;

Eigen::VectorXd DirectSolver::solve_negated(const Eigen::VectorXd& b) const
{
    Eigen::VectorXd x = impl_->ldlt.solve(b);
    if (impl_->ldlt.info() != Eigen::Success) throw NonConvergence("sparse triangular solve failed");
    return x;
}

Eigen::VectorXd DirectSolver::solve(const Eigen::VectorXd& b) const
{
    // Refine while the residual keeps shrinking; the target 1e-13 ||b|| is usually met
    // after one step and the extra steps reach the rounding floor of A x.
    Eigen::VectorXd x = solve_negated(-b);
    Eigen::VectorXd r = b - op_.apply(x);
    double rnorm = r.norm();
    for (int it = 0; it < 5 && rnorm > 0.0; ++it) {
        const Eigen::VectorXd xn = x - solve_negated(r);
        const Eigen::VectorXd rn = b - op_.apply(xn);
        if (rn.norm() >= rnorm) break;
        x = xn;
        r = rn;
        rnorm = rn.norm();
    }
    return x;
}

Eigen::VectorXd solve_cg(const SystemOperator& op, const Eigen::VectorXd& b, double tol)
{
    if (!(tol > 0.0)) throw std::invalid_argument("CG tolerance must be positive");
    const int cap = 50 * (op.nx() + 1);
    // Work with -A, which is positive definite: (-A) x = -b.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
    Eigen::VectorXd r = -b;
    const double bnorm = b.norm();
    if (bnorm == 0.0) return x;
    Eigen::VectorXd p = r;
    double rr = r.squaredNorm();
    for (int it = 0; it < cap; ++it) {
        if (std::sqrt(rr) <= tol * bnorm) return x;
        const Eigen::VectorXd q = -op.apply(p);
        const double alpha = rr / p.dot(q);
        x += alpha * p;
        r -= alpha * q;
        const double rr_new = r.squaredNorm();
        p = r + (rr_new / rr) * p;
        rr = rr_new;
    }
    if (std::sqrt(rr) <= tol * bnorm) return x;
    char buf[96];
    std::snprintf(buf, sizeof buf, "CG stopped after %d iterations at relative residual %.3e", cap,
                  std::sqrt(rr) / bnorm);
    throw NonConvergence(buf);
}

Eigen::VectorXd solve(const SystemOperator& op, const Eigen::VectorXd& b, const SolveOptions& opts)
{
    Method m = opts.method;
    if (m == Method::Auto) m = op.nx() + 1 <= 256 ? Method::Direct : Method::Cg;
    if (m == Method::Cg) return solve_cg(op, b, opts.tol);
    return DirectSolver(op).solve(b);
}

// ---------------------------------------------------------------- conditioning

double condition_number(const SystemOperator& op)
{
    const DirectSolver ds(op);
    const int n = op.size();
    // Hager's estimate of ||B||_1 for B = (-A)^-1, which is symmetric.
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
    double est = 0.0;
    int last = -1;
    for (int it = 0; it < 5; ++it) {
        const Eigen::VectorXd y = ds.solve_negated(x);
        est = y.lpNorm<1>();
        const Eigen::VectorXd xi = y.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
        const Eigen::VectorXd z = ds.solve_negated(xi);
        int jmax = 0;
        const double zmax = z.cwiseAbs().maxCoeff(&jmax);
        if (zmax <= z.dot(x) || jmax == last) break;
        last = jmax;
        x.setZero();
        x(jmax) = 1.0;
    }
    return op.norm1() * est;
}

double spectral_condition_number(const SystemOperator& op)
{
    const int n = op.size();
    const int nx = op.nx();
    const int cap = 100000;
    auto rayleigh = [&](auto&& step, Eigen::VectorXd v, bool inverse) {
        v.normalize();
        double lambda = 0.0;
        for (int it = 0; it < cap; ++it) {
            Eigen::VectorXd w = step(v);
            const double mu = v.dot(w);
            const double est = inverse ? 1.0 / mu : mu;
            v = w.normalized();
            if (it > 0 && std::fabs(est - lambda) <= 1e-7 * std::fabs(est)) return est;
            lambda = est;
        }
        throw NonConvergence("eigenvalue iteration did not converge");
    };
    // Start near the extreme modes: alternating signs for the top, all ones for the bottom.
    Eigen::VectorXd top(n), bottom = Eigen::VectorXd::Ones(n);
    for (int p = 0; p < n; ++p) top(p) = ((p % nx) + (p / nx)) % 2 ? -1.0 : 1.0;
    const double lmax = rayleigh([&](const Eigen::VectorXd& v) { return Eigen::VectorXd(-op.apply(v)); }, top, false);
    const DirectSolver ds(op);
    const double lmin = rayleigh([&](const Eigen::VectorXd& v) { return ds.solve_negated(v); }, bottom, true);
    return lmax / lmin;
}

}  // namespace ifd6::solver
