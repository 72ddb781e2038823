/**
 * @file srtight.cpp
 * @brief Command-line front end: validate, jacobi, analyze, compare.
 *
 * Exit codes: 0 ok, 1 validation failure, 2 usage, 3 numeric failure.
 */
#include "srtight/riem_compare.hpp"
#include "srtight/tightness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>

using namespace srtight;

namespace {

constexpr int kOk = 0, kValidation = 1, kUsage = 2, kNumeric = 3;

struct ModelArgs {
    std::string model;
    ModelParams params;
    double scale_reeb = 1.0;
};

void add_model_args(CLI::App* cmd, ModelArgs& m) {
    cmd->add_option("model", m.model,
                    "heisenberg | overtwisted | kcontact | radial | perturbed, or a .json/.toml structure file")
        ->required();
    cmd->add_option("--kappa", m.params.kappa, "curvature of the K-contact model");
    cmd->add_option("--alpha", m.params.alpha, "alpha profile of the radial model");
    cmd->add_option("--beta", m.params.beta, "beta profile of the radial model");
    cmd->add_option("--eps", m.params.eps, "perturbation size of the perturbed model");
}

Model resolve(const ModelArgs& a) {
    const bool file = a.model.find('.') != std::string::npos || a.model.find('/') != std::string::npos;
    Model m = file ? load_model_file(a.model) : builtin_model(a.model, a.params);
    if (a.scale_reeb != 1.0) m.structure = scale_reeb(m.structure, a.scale_reeb);
    return m;
}

/// Probes around the orbit base: radii 0..2, eight angles, three heights; inside the domain only.
std::vector<Vec3d> probes_for(const Model& m) {
    std::vector<Vec3d> out;
    const Vec3d c = m.orbit.curve ? m.orbit.curve(0.0) : m.orbit.base;
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; j < 8; ++j)
            for (int k = -1; k <= 1; ++k) {
                const double r = 0.1 + 0.475 * i, th = std::numbers::pi * j / 4;
                const Vec3d q{c[0] + r * std::cos(th), c[1] + r * std::sin(th), c[2] + 0.5 * k};
                if (m.structure.domain.contains(q)) out.push_back(q);
            }
    return out;
}

int exit_code_for(const Error& e) {
    switch (e.kind()) {
    case ErrorKind::ContactViolation:
    case ErrorKind::FrameSingular: return kValidation;
    case ErrorKind::InvalidInput:
    case ErrorKind::Parse: return kUsage;
    default: return kNumeric;
    }
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw Error(ErrorKind::InvalidInput, "cannot write '" + path + "'");
    return file;
}

int cmd_validate(const ModelArgs& a, double threshold) {
    const Model m = resolve(a);
    const auto rep = validate_normalization(m.structure, probes_for(m));
    std::cout << "structure " << m.id << ", " << rep.probes << " probes\n";
    for (const auto& c : rep.checks)
        std::cout << "  " << c.identity << ": max violation " << c.max_violation << " at (" << c.worst_probe[0] << ", "
                  << c.worst_probe[1] << ", " << c.worst_probe[2] << ")\n";
    const bool ok = rep.ok(threshold);
    std::cout << (ok ? "OK" : "VIOLATION") << " (threshold " << threshold << ")\n";
    return ok ? kOk : kValidation;
}

int cmd_jacobi(const ModelArgs& a, double z, double theta, double r_max, int stride, const std::string& out,
               const IntegratorConfig& cfg) {
    const Model m = resolve(a);
    const JacobiTrace t = jacobi_trace(m.structure, m.orbit, z, theta, r_max, cfg);
    std::ofstream f;
    write_trace_csv(open_out(out, f), t, stride);
    const auto jet = check_initial_jet(t);
    std::cerr << "initial jet (w_th, w_th', w_th'', w_th''', w_z, w_z'):";
    for (double v : jet.measured) std::cerr << ' ' << v;
    std::cerr << "\nmax deviation from (0,0,1,0,1,0): " << jet.max_deviation << '\n';
    const auto ro = first_singular_radius(t);
    const auto rf = first_focal_radius(t);
    std::cerr << "first singular radius: " << (ro.found() ? std::to_string(*ro.r) : "NotFound")
              << "\nfirst focal radius: " << (rf.found() ? std::to_string(*rf.r) : "NotFound") << '\n';
    return kOk;
}

int cmd_analyze(const ModelArgs& a, AnalysisOptions opt, bool r_max_set, const std::string& out,
                const std::string& disk_out, double disk_z, int disk_n) {
    const Model m = resolve(a);
    if (!r_max_set && m.r_inj && std::isfinite(*m.r_inj)) opt.r_max = std::max(opt.r_max, *m.r_inj + 0.25);
    const auto rep = analyze_orbit(m, opt);
    std::ofstream f;
    open_out(out, f) << report_to_json(rep).dump(2) << '\n';
    if (!disk_out.empty()) {
        const auto d = disk_boundary(m, disk_z, disk_n, opt);
        std::ofstream df;
        write_disk_csv(open_out(disk_out, df), d);
    }
    return rep.failures == rep.samples.size() ? kNumeric : kOk;
}

int cmd_compare(const std::string& table, const std::string& format, const AnalysisOptions& opt) {
    std::vector<ComparisonRow> rows;
    if (table == "kleft") rows = kleft_table(opt);
    else rows.push_back(ot_table(opt));
    if (format == "csv") write_table_csv(std::cout, rows);
    else write_table_markdown(std::cout, rows);
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tightness radii of Reeb orbits in contact sub-Riemannian structures"};
    app.require_subcommand(1);

    ModelArgs ma;
    IntegratorConfig cfg;
    auto add_tol = [&](CLI::App* c) {
        c->add_option("--rtol", cfg.rtol, "relative tolerance")->check(CLI::PositiveNumber);
        c->add_option("--atol", cfg.atol, "absolute tolerance")->check(CLI::PositiveNumber);
    };

    auto* val = app.add_subcommand("validate", "check the frame normalization identities");
    add_model_args(val, ma);
    double threshold = 1e-8;
    val->add_option("--threshold", threshold, "largest accepted violation");
    val->add_option("--scale-reeb", ma.scale_reeb, "multiply f0 by this factor before checking");

    auto* jac = app.add_subcommand("jacobi", "trace the contact Jacobi curve of one geodesic");
    add_model_args(jac, ma);
    add_tol(jac);
    double z = 0.0, theta = 0.0, rmax_j = 3.0;
    int stride = 16;
    std::string out;
    jac->add_option("--z", z, "orbit time");
    jac->add_option("--theta", theta, "covector angle");
    jac->add_option("--rmax", rmax_j, "horizon")->check(CLI::PositiveNumber);
    jac->add_option("--stride", stride, "write every n-th sample")->check(CLI::PositiveNumber);
    jac->add_option("-o,--out", out, "CSV output (default stdout)");

    auto* ana = app.add_subcommand("analyze", "tightness report over a grid of covectors");
    add_model_args(ana, ma);
    add_tol(ana);
    AnalysisOptions opt;
    std::string disk_out;
    double disk_z = 0.0;
    int disk_n = 64;
    auto* rmax_opt = ana->add_option("--rmax", opt.r_max, "horizon")->check(CLI::PositiveNumber);
    ana->add_option("--nz", opt.n_z, "orbit samples")->check(CLI::PositiveNumber);
    ana->add_option("--ntheta", opt.n_theta, "angle samples")->check(CLI::PositiveNumber);
    ana->add_option("--threads", opt.threads, "worker threads (default TIGHTNESS_THREADS or all cores)");
    ana->add_option("-o,--out", out, "JSON output (default stdout)");
    ana->add_option("--disk", disk_out, "also write the overtwisted disk boundary CSV here");
    ana->add_option("--disk-z", disk_z, "orbit time of the disk");
    ana->add_option("--disk-n", disk_n, "angles on the disk boundary")->check(CLI::PositiveNumber);

    auto* cmp = app.add_subcommand("compare", "comparison table of the three estimates");
    std::string table, format = "md";
    cmp->add_option("--table", table, "kleft | ot")->required()->check(CLI::IsMember({"kleft", "ot"}));
    cmp->add_option("--format", format, "md | csv")->check(CLI::IsMember({"md", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        opt.cfg = cfg;
        if (*val) return cmd_validate(ma, threshold);
        if (*jac) return cmd_jacobi(ma, z, theta, rmax_j, stride, out, cfg);
        if (*ana) return cmd_analyze(ma, opt, rmax_opt->count() > 0, out, disk_out, disk_z, disk_n);
        if (*cmp) {
            AnalysisOptions copt;
            copt.n_z = 2;
            copt.n_theta = 8;
            return cmd_compare(table, format, copt);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return kUsage;
}
