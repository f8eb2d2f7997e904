// qdirac command line: eigenvalue reports, eigenfunction tables, trig zero
// tables, Delta sampling, and the self-verification suite.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qdirac/config.hpp"
#include "qdirac/errors.hpp"
#include "qdirac/io.hpp"
#include "qdirac/qcore.hpp"
#include "qdirac/qtrig.hpp"
#include "qdirac/solver.hpp"
#include "qdirac/spectrum.hpp"
#include "qdirac/version.hpp"

namespace {

using namespace qdirac;

constexpr int kExitVerifyFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericFailure = 3;

struct CliOverrides {
    std::optional<double> q, a, k11, k12, k21, k22, refine_tol, solver_tol;
    std::optional<int> depth, count, precision_bits, extended_bits;
    std::optional<std::string> potential_p, potential_r, output, format;
    std::optional<bool> both_signs;
    bool no_escalation = false;
};

void apply_overrides(RunConfig& cfg, const CliOverrides& ov) {
    if (ov.q) cfg.q = *ov.q;
    if (ov.a) cfg.a = *ov.a;
    if (ov.depth) cfg.depth = *ov.depth;
    if (ov.k11) cfg.boundary.k11 = *ov.k11;
    if (ov.k12) cfg.boundary.k12 = *ov.k12;
    if (ov.k21) cfg.boundary.k21 = *ov.k21;
    if (ov.k22) cfg.boundary.k22 = *ov.k22;
    if (ov.potential_p) cfg.potential_p = *ov.potential_p;
    if (ov.potential_r) cfg.potential_r = *ov.potential_r;
    if (ov.count) cfg.count = *ov.count;
    if (ov.precision_bits) cfg.precision_bits = *ov.precision_bits;
    if (ov.extended_bits) cfg.extended_bits = *ov.extended_bits;
    if (ov.refine_tol) cfg.refine_tol = *ov.refine_tol;
    if (ov.solver_tol) cfg.solver_tol = *ov.solver_tol;
    if (ov.both_signs) cfg.both_signs = *ov.both_signs;
    if (ov.output) cfg.output = *ov.output;
    if (ov.format) cfg.format = *ov.format;
    if (ov.no_escalation) cfg.extended_bits = cfg.precision_bits;
}

void emit(const std::string& payload, const std::string& path) {
    if (path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << payload;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
    const auto dot = path.rfind('.');
    if (dot == std::string::npos || path.find('/', dot) != std::string::npos)
        return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
}

SpectrumOptions spectrum_options(const RunConfig& cfg) {
    SpectrumOptions opt;
    opt.refine_tol = cfg.refine_tol;
    opt.scan_points_per_octave = cfg.scan_points_per_octave;
    return opt;
}

int cmd_eigenvalues(const RunConfig& cfg) {
    Problem pb = make_problem(cfg);
    QTrigContext ctx = make_context(cfg);
    SpectrumReport rep =
        find_eigenvalues(pb, ctx, cfg.count, cfg.both_signs, spectrum_options(cfg));
    if (cfg.format == "json") {
        emit(spectrum_json(rep), cfg.output);
    } else {
        std::ostringstream main_csv;
        write_spectrum_csv(main_csv, rep);
        emit(main_csv.str(), cfg.output);
        std::ostringstream orth_csv;
        write_orthogonality_csv(orth_csv, rep);
        if (cfg.output.empty())
            std::cout << '\n' << orth_csv.str();
        else
            emit(orth_csv.str(), with_suffix(cfg.output, "_orthogonality"));
    }
    return 0;
}

int cmd_eigenfunction(const RunConfig& cfg, int m) {
    Problem pb = make_problem(cfg);
    QTrigContext ctx = make_context(cfg);
    const int count = std::max(cfg.count, std::abs(m));
    SpectrumReport rep =
        find_eigenvalues(pb, ctx, count, m < 0, spectrum_options(cfg));
    for (const auto& e : rep.eigenvalues) {
        if (e.index != m) continue;
        std::ostringstream y1_csv, y2_csv;
        write_lattice_fn_csv(y1_csv, e.phi.y1);
        write_lattice_fn_csv(y2_csv, e.phi.y2);
        if (cfg.output.empty()) {
            std::cout << y1_csv.str() << '\n' << y2_csv.str();
        } else {
            emit(y1_csv.str(), with_suffix(cfg.output, "_y1"));
            emit(y2_csv.str(), with_suffix(cfg.output, "_y2"));
        }
        return 0;
    }
    throw NumericError(NumericError::Kind::BracketFailure,
                       "eigenfunction: index " + std::to_string(m) +
                           " not among the located eigenvalues");
}

int cmd_zeros(const RunConfig& cfg, const std::string& kind, int count) {
    QTrigContext ctx = make_context(cfg);
    TrigKind k = TrigKind::Cos;
    if (kind == "cos") k = TrigKind::Cos;
    else if (kind == "sin") k = TrigKind::Sin;
    else throw ConfigError("zeros: --kind must be cos or sin");
    ZeroTable table = trig_zeros(ctx, k, count, cfg.refine_tol);
    std::ostringstream csv;
    write_zero_table_csv(csv, table);
    emit(csv.str(), cfg.output);
    return 0;
}

int cmd_delta(const RunConfig& cfg, double lo, double hi, int points) {
    if (!(hi > lo)) throw ConfigError("delta: need lambda_max > lambda_min");
    if (points < 2) throw ConfigError("delta: need at least 2 points");
    Problem pb = make_problem(cfg);
    QTrigContext ctx = make_context(cfg);
    std::ostringstream csv;
    csv << "lambda,delta\n";
    for (int i = 0; i < points; ++i) {
        const double lam = lo + (hi - lo) * i / (points - 1);
        csv << fmt_double(lam) << ',' << fmt_double(char_delta(pb, ctx, lam))
            << '\n';
    }
    emit(csv.str(), cfg.output);
    return 0;
}

struct VerifyState {
    bool ok = true;
    void line(const std::string& name, bool pass, double residual) {
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << name
                  << " (residual=" << fmt_double(residual) << ")\n";
        ok = ok && pass;
    }
};

int cmd_verify(const RunConfig& cfg) {
    Problem pb = make_problem(cfg);
    QTrigContext ctx = make_context(cfg);
    QLatticePtr lat = pb.lattice;
    VerifyState vs;

    // Wronskian of the free solutions
    {
        double worst = 0.0;
        for (double lam : {0.5, 2.0, 8.0}) {
            auto [s1, s2] = free_solutions(lat, ctx, lam);
            for (int n = 0; n <= lat->depth; ++n)
                worst = std::max(worst, std::fabs(wronskian(s1, s2, n) - 1.0));
        }
        vs.line("wronskian_identity", worst <= 1e-11, worst);
    }

    // Lagrange identity on propagated solutions
    {
        double worst = 0.0;
        const double l1 = 1.3, l2 = -2.1;
        auto sy = propagate(pb, l1);
        auto sz = propagate(pb, l2);
        const auto& y = sy.phi;
        const auto& z = sz.phi;
        std::vector<double> bracket(static_cast<std::size_t>(lat->depth) + 1);
        for (int n = 0; n <= lat->depth; ++n) {
            const double z2s = (n == 0) ? *z.y2.ext_value() : z.y2.value(n - 1);
            const double y2s = (n == 0) ? *y.y2.ext_value() : y.y2.value(n - 1);
            bracket[static_cast<std::size_t>(n)] =
                y.y1.value(n) * z2s - y2s * z.y1.value(n);
        }
        LatticeFn bfn(lat, bracket, std::nullopt, std::nullopt);
        for (int n = 0; n <= lat->depth - 1; ++n) {
            const double lhs = q_diff(bfn, n);
            const double rhs = (l1 - l2) * (y.y1.value(n) * z.y1.value(n) +
                                            y.y2.value(n) * z.y2.value(n));
            // residual on the local quotient scale t_n (1-q)
            worst = std::max(worst, std::fabs(lhs - rhs) * lat->node(n) *
                                        (1.0 - lat->q));
        }
        vs.line("lagrange_identity", worst <= 1e-10, worst);
    }

    // recursion vs integral-equation solutions
    {
        double worst = 0.0;
        for (double lam : {0.7, 1.9, 4.2}) {
            auto sa = successive_approx(pb, ctx, lam, cfg.solver_tol * 1e-2, 400);
            auto pr = propagate(pb, lam);
            double sup = 1.0;
            for (int n = 0; n <= lat->depth; ++n)
                sup = std::max({sup, std::fabs(pr.phi.y1.value(n)),
                                std::fabs(pr.phi.y2.value(n))});
            for (int n = 0; n <= lat->depth; ++n)
                worst = std::max(
                    {worst,
                     std::fabs(sa.phi.y1.value(n) - pr.phi.y1.value(n)) / sup,
                     std::fabs(sa.phi.y2.value(n) - pr.phi.y2.value(n)) / sup});
        }
        vs.line("oracle_equivalence", worst <= 1e-9, worst);
    }

    // spectrum checks
    {
        SpectrumReport rep = find_eigenvalues(pb, ctx, cfg.count, cfg.both_signs,
                                              spectrum_options(cfg));
        vs.line("reality", rep.flags.reality_ok,
                rep.flags.missed_eigenvalue_warning ? 1.0 : 0.0);
        vs.line("orthogonality", rep.flags.orthogonality_ok,
                rep.flags.orthogonality_max);
        vs.line("simplicity", rep.flags.simplicity_ok,
                rep.flags.simplicity_max_defect);
        vs.line("asymptotic_ratios", rep.flags.asymptotics_ok,
                rep.flags.asymptotic_max_dev);
        vs.line("precision", !rep.flags.precision_loss,
                rep.flags.precision_loss ? 1.0 : 0.0);
    }

    return vs.ok ? 0 : kExitVerifyFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"q-Dirac spectral solver on the q-geometric lattice"};
    app.set_version_flag("--version", std::string("qdirac ") + kVersion);

    std::string config_path;
    CliOverrides ov;
    app.add_option("--config", config_path, "flat key = value config file");
    app.add_option("--q", ov.q, "grid ratio in (0,1)");
    app.add_option("--a", ov.a, "right endpoint");
    app.add_option("--depth", ov.depth, "lattice truncation depth");
    app.add_option("--k11", ov.k11, "boundary coefficient k11");
    app.add_option("--k12", ov.k12, "boundary coefficient k12");
    app.add_option("--k21", ov.k21, "boundary coefficient k21");
    app.add_option("--k22", ov.k22, "boundary coefficient k22");
    app.add_option("--potential-p", ov.potential_p,
                   "zero | constant:<c> | linear:<c> | csv:<path>");
    app.add_option("--potential-r", ov.potential_r,
                   "zero | constant:<c> | linear:<c> | csv:<path>");
    app.add_option("--count", ov.count, "number of eigenvalues");
    app.add_option("--precision-bits", ov.precision_bits, "working precision");
    app.add_option("--extended-bits", ov.extended_bits,
                   "escalation precision (>= precision-bits)");
    app.add_flag("--no-escalation", ov.no_escalation,
                 "disable extended-precision escalation");
    app.add_option("--refine-tol", ov.refine_tol, "root refinement tolerance");
    app.add_option("--solver-tol", ov.solver_tol, "integral-equation tolerance");
    app.add_option("--output", ov.output, "output path (default stdout)");
    app.add_option("--format", ov.format, "csv | json");
    auto* bs = app.add_flag("--both-signs,!--positive-only",
                            "scan both spectral half-axes");

    auto* sub_eig = app.add_subcommand("eigenvalues", "locate eigenvalues");
    int m_index = 1;
    auto* sub_fn = app.add_subcommand("eigenfunction", "emit one eigenfunction");
    sub_fn->add_option("--m", m_index, "eigenvalue index")->required();
    std::string zero_kind = "cos";
    int zero_count = 8;
    auto* sub_zeros = app.add_subcommand("zeros", "positive trig zeros");
    sub_zeros->add_option("--kind", zero_kind, "cos | sin");
    sub_zeros->add_option("--count", zero_count, "number of zeros");
    auto* sub_verify = app.add_subcommand("verify", "run the property suite");
    double lam_lo = 0.0, lam_hi = 10.0;
    int delta_points = 101;
    auto* sub_delta = app.add_subcommand("delta", "sample Delta(lambda)");
    sub_delta->add_option("--lambda-min", lam_lo, "grid start")->required();
    sub_delta->add_option("--lambda-max", lam_hi, "grid end")->required();
    sub_delta->add_option("--points", delta_points, "grid size");

    app.require_subcommand(1);
    for (auto* sub : {sub_eig, sub_fn, sub_zeros, sub_verify, sub_delta})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << qdirac::error_json(kExitConfigError, e.what(), "argv");
        return kExitConfigError;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config_file(config_path);
        if (bs->count() > 0) ov.both_signs = bs->as<bool>();
        apply_overrides(cfg, ov);
        validate_config(cfg);

        if (*sub_eig) return cmd_eigenvalues(cfg);
        if (*sub_fn) return cmd_eigenfunction(cfg, m_index);
        if (*sub_zeros) return cmd_zeros(cfg, zero_kind, zero_count);
        if (*sub_verify) return cmd_verify(cfg);
        if (*sub_delta) return cmd_delta(cfg, lam_lo, lam_hi, delta_points);
        std::cerr << qdirac::error_json(kExitConfigError, "no subcommand", "argv");
        return kExitConfigError;
    } catch (const ConfigError& e) {
        std::cerr << qdirac::error_json(kExitConfigError, e.what(), "config");
        return kExitConfigError;
    } catch (const std::domain_error& e) {
        std::cerr << qdirac::error_json(kExitConfigError, e.what(), "config");
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << qdirac::error_json(kExitConfigError, e.what(), "config");
        return kExitConfigError;
    } catch (const NumericError& e) {
        std::cerr << qdirac::error_json(kExitNumericFailure, e.what(),
                                        e.kind_name());
        return kExitNumericFailure;
    }
}
