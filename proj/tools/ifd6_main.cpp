// Command-line front end: single solves and refinement studies.
//
//   ifd6 solve    --problem FILE --J n [--order M] [--solver auto|direct|cg] [--tol t]
//                 [--out csv|md] [--kappa] [--timing] [--dump-solution FILE]
//   ifd6 converge --problem FILE --Jmin a --Jmax b [same options, no --dump-solution]
//
// Exit status: 0 on success, 1 on usage, input or I/O errors, 2 on numerical failure.

#include "ifd6/error.hpp"
#include "ifd6/harness.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>

namespace {

constexpr int kUsageError = 1;
constexpr int kNumericalError = 2;

struct Common {
    std::string problem;
    int order = 6;
    ifd6::solver::Method method = ifd6::solver::Method::Auto;
    double tol = 1e-14;
    ifd6::harness::TableFormat format = ifd6::harness::TableFormat::Csv;
    bool kappa = false;
    bool timing = false;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--problem", c.problem, "problem file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--order", c.order, "accuracy order M")->check(CLI::Range(3, 6))->capture_default_str();
    const std::map<std::string, ifd6::solver::Method> methods{
        {"auto", ifd6::solver::Method::Auto}, {"direct", ifd6::solver::Method::Direct}, {"cg", ifd6::solver::Method::Cg}};
    cmd->add_option("--solver", c.method, "linear solver")->transform(CLI::CheckedTransformer(methods));
    cmd->add_option("--tol", c.tol, "CG relative residual")->check(CLI::PositiveNumber)->capture_default_str();
    const std::map<std::string, ifd6::harness::TableFormat> formats{{"csv", ifd6::harness::TableFormat::Csv},
                                                                    {"md", ifd6::harness::TableFormat::Markdown}};
    cmd->add_option("--out", c.format, "table format")->transform(CLI::CheckedTransformer(formats));
    cmd->add_flag("--kappa", c.kappa, "report the 1-norm condition number of the matrix");
    cmd->add_flag("--timing", c.timing, "report wall time per level");
}

int fail(const std::exception& e)
{
    std::cerr << "ifd6: " << e.what() << '\n';
    if (const auto* err = dynamic_cast<const ifd6::Error*>(&e)) return err->is_numerical() ? kNumericalError : kUsageError;
    if (dynamic_cast<const std::invalid_argument*>(&e)) return kUsageError;
    return kNumericalError;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"High-order compact finite differences for Poisson interface problems"};
    app.require_subcommand(1);

    Common solve_opts;
    int level = 0;
    std::string dump;
    CLI::App* solve = app.add_subcommand("solve", "solve one refinement level");
    add_common(solve, solve_opts);
    solve->add_option("--J", level, "refinement level (2^J cells across)")->required()->check(CLI::Range(1, 12));
    solve->add_option("--dump-solution", dump, "write the grid solution to FILE");

    Common conv_opts;
    int jmin = 0, jmax = 0;
    CLI::App* converge = app.add_subcommand("converge", "refinement study over a range of levels");
    add_common(converge, conv_opts);
    converge->add_option("--Jmin", jmin, "first level")->required();
    converge->add_option("--Jmax", jmax, "last level")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (*solve) {
            const auto spec = ifd6::harness::load_problem(solve_opts.problem);
            ifd6::solver::SolveOptions so{solve_opts.method, solve_opts.tol};
            const auto t0 = std::chrono::steady_clock::now();
            const auto sol = ifd6::harness::solve_level(spec, level, solve_opts.order, so);
            ifd6::harness::ConvergenceRow row;
            row.J = level;
            if (spec.has_exact()) {
                const auto e = ifd6::harness::exact_error(spec, sol);
                row.e2_exact = e.rel_l2;
                row.einf_exact = e.linf;
            }
            if (solve_opts.kappa)
                row.kappa = ifd6::solver::condition_number(
                    ifd6::solver::SystemOperator(sol.grid.interior_nx(), sol.grid.interior_ny()));
            if (solve_opts.timing)
                row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (!dump.empty()) {
                std::ofstream out(dump);
                if (!out) throw ifd6::IoError("cannot write '" + dump + "'");
                ifd6::harness::write_solution(out, sol);
                if (!out) throw ifd6::IoError("failed writing '" + dump + "'");
            }
            std::cout << ifd6::harness::emit_table({row}, solve_opts.format);
            return 0;
        }

        const auto spec = ifd6::harness::load_problem(conv_opts.problem);
        ifd6::harness::RunOptions ro;
        ro.M = conv_opts.order;
        ro.solve = {conv_opts.method, conv_opts.tol};
        ro.kappa = conv_opts.kappa;
        ro.timing = conv_opts.timing;
        const auto res = ifd6::harness::run_convergence(spec, jmin, jmax, ro);
        std::cout << ifd6::harness::emit_table(res.rows, conv_opts.format);
        if (!res.ok()) {
            std::cerr << "ifd6: " << res.failure << '\n';
            return res.failure_is_numerical ? kNumericalError : kUsageError;
        }
        return 0;
    } catch (const std::exception& e) {
        return fail(e);
    }
}
