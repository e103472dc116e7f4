#include "ifd6/harness.hpp"

#include "ifd6/error.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ifd6::harness {

double ProblemSpec::exact(double x, double y, geometry::Side side) const
{
    if (!has_exact()) throw std::logic_error("problem has no exact solution");
    return side == geometry::Side::Plus ? u_plus->eval(x, y) : u_minus->eval(x, y);
}

// ---------------------------------------------------------------- problem files

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Entry {
    expr::Expr e;
    std::size_t line;
};

}  // namespace

ProblemSpec parse_problem(std::string_view text)
{
    static const char* const kKeys[] = {"format", "l1",      "l2",       "l3", "l4", "psi", "f_plus", "f_minus",
                                        "g",      "g1",      "g0",       "g0_plus", "g0_minus", "u_plus", "u_minus"};
    std::map<std::string, Entry> entries;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        if (trim(line).empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) throw SyntaxError("expected 'key = expression'", 0, line_no);
        const std::string key(trim(line.substr(0, eq)));
        bool known = false;
        for (const char* k : kKeys) known = known || key == k;
        if (!known) throw SyntaxError("unknown key '" + key + "'", 0, line_no);
        if (entries.count(key)) throw SyntaxError("duplicate key '" + key + "'", 0, line_no);

        const std::string_view rhs = line.substr(eq + 1);
        try {
            entries.emplace(key, Entry{expr::Expr::parse(rhs), line_no});
        } catch (const UnknownIdentifier& e) {
            throw UnknownIdentifier(e.name(), e.position() + eq + 1, line_no);
        } catch (const SyntaxError& e) {
            std::string msg = e.what();
            const auto at = msg.rfind(" (at offset");
            if (at != std::string::npos) msg.resize(at);
            throw SyntaxError(key + ": " + msg, e.position() + eq + 1, line_no);
        }
    }

    auto get = [&](const std::string& key) -> const Entry& {
        const auto it = entries.find(key);
        if (it == entries.end()) throw MissingKey(key);
        return it->second;
    };
    auto constant = [&](const std::string& key) {
        const Entry& en = get(key);
        if (en.e.depends_on_xy()) throw SyntaxError(key + " must be a constant", 0, en.line);
        return en.e.eval(0.0, 0.0);
    };

    ProblemSpec spec;
    if (entries.count("format") && constant("format") != 1.0)
        throw SyntaxError("unsupported format version", 0, get("format").line);
    spec.l1 = constant("l1");
    spec.l2 = constant("l2");
    spec.l3 = constant("l3");
    spec.l4 = constant("l4");
    spec.data.psi = get("psi").e;
    spec.data.f_plus = get("f_plus").e;
    spec.data.f_minus = get("f_minus").e;
    spec.data.g = get("g").e;
    spec.data.g1 = get("g1").e;

    const bool has_g0 = entries.count("g0") > 0;
    const bool has_split = entries.count("g0_plus") > 0 || entries.count("g0_minus") > 0;
    if (has_g0 && has_split) throw SyntaxError("give either g0 or g0_plus/g0_minus, not both", 0, get("g0").line);
    if (has_g0) {
        spec.data.g0_plus = spec.data.g0_minus = get("g0").e;
    } else if (has_split) {
        spec.data.g0_plus = get("g0_plus").e;
        spec.data.g0_minus = get("g0_minus").e;
    } else {
        throw MissingKey("g0");
    }

    const bool up = entries.count("u_plus") > 0, um = entries.count("u_minus") > 0;
    if (up != um) throw MissingKey(up ? "u_minus" : "u_plus");
    if (up) {
        spec.u_plus = get("u_plus").e;
        spec.u_minus = get("u_minus").e;
    }
    return spec;
}

ProblemSpec load_problem(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open problem file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("cannot read problem file '" + path + "'");
    return parse_problem(ss.str());
}

// ---------------------------------------------------------------- solving

geometry::Grid level_grid(const ProblemSpec& spec, int J)
{
    if (J < 1 || J > 12) throw std::invalid_argument("refinement level out of range");
    return geometry::Grid::make(spec.l1, spec.l2, spec.l3, spec.l4, 1 << J);
}

Solution solve_level(const ProblemSpec& spec, int J, int M, const solver::SolveOptions& opts)
{
    Solution s;
    s.grid = level_grid(spec, J);
    const solver::System sys = solver::assemble(s.grid, spec.data, M);
    s.irregular = sys.classes.irregular_count();
    s.classes = sys.classes;
    s.u = solver::solve(sys.op, sys.rhs, opts);
    return s;
}

ErrorPair exact_error(const ProblemSpec& spec, const Solution& s)
{
    const geometry::Grid& g = s.grid;
    double num = 0, den = 0, inf = 0;
    for (int j = 1; j < g.n2; ++j)
        for (int i = 1; i < g.n1; ++i) {
            const double u = spec.exact(g.x(i), g.y(j), s.classes.node_side(i, j));
            const double e = s.u(g.index(i, j)) - u;
            num += e * e;
            den += u * u;
            inf = std::max(inf, std::fabs(e));
        }
    return {den > 0 ? std::sqrt(num / den) : std::sqrt(num), inf};
}

ErrorPair successive_error(const Solution& coarse, const Solution& fine)
{
    const geometry::Grid& g = coarse.grid;
    const geometry::Grid& f = fine.grid;
    if (f.n1 != 2 * g.n1 || f.n2 != 2 * g.n2) throw std::invalid_argument("successive_error: grids are not nested");
    double num = 0, den = 0, inf = 0;
    for (int j = 1; j < g.n2; ++j)
        for (int i = 1; i < g.n1; ++i) {
            const double uf = fine.u(f.index(2 * i, 2 * j));
            const double e = coarse.u(g.index(i, j)) - uf;
            num += e * e;
            den += uf * uf;
            inf = std::max(inf, std::fabs(e));
        }
    return {den > 0 ? std::sqrt(num / den) : std::sqrt(num), inf};
}

ConvergenceResult run_convergence(const ProblemSpec& spec, int jmin, int jmax, const RunOptions& opts)
{
    if (jmin < 2 || jmax > 9 || jmin > jmax) throw std::invalid_argument("levels must satisfy 2 <= Jmin <= Jmax <= 9");
    ConvergenceResult res;
    std::optional<Solution> prev;
    auto order = [](const std::optional<double>& a, const std::optional<double>& b) -> std::optional<double> {
        if (!a || !b || *b <= 0.0 || *a <= 0.0) return std::nullopt;
        return std::log2(*a / *b);
    };

    for (int J = jmin; J <= jmax; ++J) {
        ConvergenceRow row;
        row.J = J;
        Solution s;
        try {
            const auto t0 = std::chrono::steady_clock::now();
            s = solve_level(spec, J, opts.M, opts.solve);
            if (opts.kappa) row.kappa = solver::condition_number(solver::SystemOperator(s.grid.interior_nx(), s.grid.interior_ny()));
            const auto t1 = std::chrono::steady_clock::now();
            if (opts.timing) row.seconds = std::chrono::duration<double>(t1 - t0).count();
        } catch (const Error& e) {
            res.failure = "level J=" + std::to_string(J) + ": " + e.what();
            res.failure_is_numerical = e.is_numerical();
            return res;
        } catch (const std::exception& e) {
            res.failure = "level J=" + std::to_string(J) + ": " + e.what();
            return res;
        }
        if (spec.has_exact()) {
            const ErrorPair e = exact_error(spec, s);
            row.e2_exact = e.rel_l2;
            row.einf_exact = e.linf;
            if (!res.rows.empty()) {
                row.order2_exact = order(res.rows.back().e2_exact, row.e2_exact);
                row.orderinf_exact = order(res.rows.back().einf_exact, row.einf_exact);
            }
        }
        if (prev) {
            ConvergenceRow& last = res.rows.back();
            const ErrorPair e = successive_error(*prev, s);
            last.e2_succ = e.rel_l2;
            last.einf_succ = e.linf;
            if (res.rows.size() >= 2) {
                const ConvergenceRow& before = res.rows[res.rows.size() - 2];
                last.order2_succ = order(before.e2_succ, last.e2_succ);
                last.orderinf_succ = order(before.einf_succ, last.einf_succ);
            }
        }
        res.rows.push_back(row);
        prev = std::move(s);
    }
    return res;
}

// ---------------------------------------------------------------- tables

namespace {

struct Column {
    const char* csv;
    const char* md;
    std::optional<double> ConvergenceRow::*field;
    const char* fmt;
};

const Column kColumns[] = {
    {"e2_exact", "rel. l2 error", &ConvergenceRow::e2_exact, "%.2E"},
    {"order2_exact", "order", &ConvergenceRow::order2_exact, "%.3f"},
    {"einf_exact", "linf error", &ConvergenceRow::einf_exact, "%.2E"},
    {"orderinf_exact", "order", &ConvergenceRow::orderinf_exact, "%.3f"},
    {"e2_succ", "rel. l2 successive", &ConvergenceRow::e2_succ, "%.2E"},
    {"order2_succ", "order", &ConvergenceRow::order2_succ, "%.3f"},
    {"einf_succ", "linf successive", &ConvergenceRow::einf_succ, "%.2E"},
    {"orderinf_succ", "order", &ConvergenceRow::orderinf_succ, "%.3f"},
    {"kappa", "kappa", &ConvergenceRow::kappa, "%.2E"},
    {"seconds", "seconds", &ConvergenceRow::seconds, "%.3f"},
};

std::string cell(const std::optional<double>& v, const char* fmt)
{
    if (!v) return {};
    char buf[32];
    std::snprintf(buf, sizeof buf, fmt, *v);
    return buf;
}

// Column groups (value + order) are shown when any row has the value.
std::vector<const Column*> visible_columns(const std::vector<ConvergenceRow>& rows)
{
    std::vector<const Column*> cols;
    const std::size_t n = std::size(kColumns);
    for (std::size_t c = 0; c < n;) {
        const std::size_t width = c < 8 ? 2 : 1;
        bool any = false;
        for (const auto& r : rows) any = any || (r.*(kColumns[c].field)).has_value();
        if (any)
            for (std::size_t k = 0; k < width; ++k) cols.push_back(&kColumns[c + k]);
        c += width;
    }
    return cols;
}

}  // namespace

std::string emit_table(const std::vector<ConvergenceRow>& rows, TableFormat format)
{
    const auto cols = visible_columns(rows);
    std::string out;
    if (format == TableFormat::Csv) {
        out += "J";
        for (const Column* c : cols) (out += ',') += c->csv;
        out += '\n';
        for (const auto& r : rows) {
            out += std::to_string(r.J);
            for (const Column* c : cols) (out += ',') += cell(r.*(c->field), c->fmt);
            out += '\n';
        }
        return out;
    }
    out += "| J |";
    for (const Column* c : cols) (out += ' ') += std::string(c->md) + " |";
    out += "\n|---|";
    for (std::size_t k = 0; k < cols.size(); ++k) out += "---|";
    out += '\n';
    for (const auto& r : rows) {
        out += "| " + std::to_string(r.J) + " |";
        for (const Column* c : cols) {
            const std::string v = cell(r.*(c->field), c->fmt);
            out += ' ' + (v.empty() ? std::string("-") : v) + " |";
        }
        out += '\n';
    }
    return out;
}

std::vector<ConvergenceRow> parse_csv_table(std::string_view csv)
{
    auto split = [](std::string_view line) {
        std::vector<std::string> f;
        std::size_t s = 0;
        for (;;) {
            const std::size_t c = line.find(',', s);
            f.emplace_back(trim(line.substr(s, c == std::string_view::npos ? std::string_view::npos : c - s)));
            if (c == std::string_view::npos) break;
            s = c + 1;
        }
        return f;
    };
    std::vector<std::string> lines;
    std::size_t s = 0;
    while (s < csv.size()) {
        std::size_t e = csv.find('\n', s);
        if (e == std::string_view::npos) e = csv.size();
        if (!trim(csv.substr(s, e - s)).empty()) lines.emplace_back(csv.substr(s, e - s));
        s = e + 1;
    }
    if (lines.empty()) throw SyntaxError("empty table", 0);
    const auto header = split(lines[0]);
    if (header.empty() || header[0] != "J") throw SyntaxError("table header must start with J", 0, 1);
    std::vector<const Column*> cols;
    for (std::size_t k = 1; k < header.size(); ++k) {
        const Column* found = nullptr;
        for (const Column& c : kColumns)
            if (header[k] == c.csv) found = &c;
        if (!found) throw SyntaxError("unknown column '" + header[k] + "'", 0, 1);
        cols.push_back(found);
    }
    std::vector<ConvergenceRow> rows;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const auto f = split(lines[ln]);
        if (f.size() != header.size()) throw SyntaxError("wrong number of fields", 0, ln + 1);
        ConvergenceRow r;
        char* end = nullptr;
        r.J = static_cast<int>(std::strtol(f[0].c_str(), &end, 10));
        if (f[0].empty() || *end) throw SyntaxError("bad level '" + f[0] + "'", 0, ln + 1);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const std::string& v = f[k + 1];
            if (v.empty()) continue;
            const double d = std::strtod(v.c_str(), &end);
            if (*end) throw SyntaxError("bad number '" + v + "'", 0, ln + 1);
            r.*(cols[k]->field) = d;
        }
        rows.push_back(r);
    }
    return rows;
}

void write_solution(std::ostream& out, const Solution& s)
{
    const geometry::Grid& g = s.grid;
    char buf[128];
    out << "# interior solution values, row-major (j outer, i inner)\n";
    out << g.n1 << ' ' << g.n2 << '\n';
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g\n", g.l1, g.l2, g.l3, g.l4);
    out << buf;
    for (Eigen::Index k = 0; k < s.u.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g\n", s.u(k));
        out << buf;
    }
}

}  // namespace ifd6::harness
