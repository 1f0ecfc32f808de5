#include "commands.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "helmscat/boundary_ops.hpp"
#include "helmscat/impedance_opt.hpp"
#include "helmscat/io.hpp"
#include "helmscat/mie.hpp"
#include "helmscat/specfun.hpp"

namespace helmscat::cli {

namespace {

using nlohmann::json;

std::string out_path(const Invocation& inv, const std::string& name) {
    std::filesystem::create_directories(inv.out_dir);
    return (std::filesystem::path(inv.out_dir) / name).string();
}

void write_json(const Invocation& inv, const std::string& name, const json& j) {
    const std::string path = out_path(inv, name);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open for writing: " + path);
    f << j.dump(2) << '\n';
    f.flush();
    if (!f) throw ConfigError("write failed: " + path);
}

void note(const Invocation& inv, const std::string& msg) {
    if (inv.verbose) std::cout << msg << '\n';
}

DomainSpec domain(const Invocation& inv) {
    DomainSpec spec;
    spec.obstacle = build_geometry(inv.cfg, inv.config_dir);
    spec.ball_radius = inv.cfg.ball_radius;
    spec.wavenumber = cplx(inv.cfg.k, 0.0);
    return spec;
}

struct Problem {
    DomainSpec spec;
    TransmissionMesh mesh;
    DtNForm dtn;
};

Problem setup(const Invocation& inv) {
    Problem p;
    p.spec = domain(inv);
    const ValidationReport rep = validate_domain(p.spec);
    if (!rep.pass())
        throw PreconditionError("invalid domain:\n" + rep.summary());
    p.mesh = triangulate(p.spec, inv.cfg.h);
    const int M = inv.cfg.mode_cutoff >= 0
                      ? inv.cfg.mode_cutoff
                      : default_mode_cutoff(inv.cfg.k, inv.cfg.ball_radius);
    p.dtn = assemble_dtn(p.mesh, inv.cfg.k, M);
    return p;
}

IncidentField incident(const RunConfig& cfg) {
    const double th = cfg.incidence_deg * pi / 180.0;
    return IncidentField{{std::cos(th), std::sin(th)}, cfg.k};
}

json intervals_json(const RunConfig& cfg) {
    json arr = json::array();
    if (cfg.theta_intervals_deg.empty()) {
        arr.push_back({0.0, 360.0});
    } else {
        for (const auto& [lo, hi] : cfg.theta_intervals_deg)
            arr.push_back({lo, hi});
    }
    return arr;
}

std::vector<std::pair<double, double>> window(const RunConfig& cfg) {
    if (cfg.theta_intervals.empty()) return {{0.0, 2.0 * pi}};
    return cfg.theta_intervals;
}

struct Check {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass() const { return std::isfinite(measured) && measured <= tolerance; }
};

} // namespace

int cmd_geom(const Invocation& inv) {
    const DomainSpec spec = domain(inv);
    write_polyline_csv(out_path(inv, "geometry.csv"), spec.obstacle);
    const ValidationReport rep = validate_domain(spec);
    const json j{{"id", inv.cfg.id},
                 {"kind", inv.cfg.geometry_kind},
                 {"vertices", spec.obstacle.vertices.size()},
                 {"closed_ok", rep.closed_ok},
                 {"orientation_ok", rep.orientation_ok},
                 {"containment_ok", rep.containment_ok},
                 {"origin_inside", rep.origin_inside},
                 {"no_self_intersection", rep.no_self_intersection},
                 {"no_repeated_vertices", rep.no_repeated_vertices},
                 {"clearance", rep.clearance},
                 {"min_edge_length", rep.min_edge_length},
                 {"signed_area", rep.signed_area},
                 {"pass", rep.pass()}};
    write_json(inv, "geometry_report.json", j);
    note(inv, rep.summary());
    std::cout << (rep.pass() ? "geometry valid" : "geometry INVALID") << " ("
              << spec.obstacle.vertices.size() << " vertices)\n";
    return rep.pass() ? 0 : 1;
}

int cmd_mesh(const Invocation& inv) {
    const DomainSpec spec = domain(inv);
    const ValidationReport vrep = validate_domain(spec);
    if (!vrep.pass())
        throw PreconditionError("invalid domain:\n" + vrep.summary());
    const TransmissionMesh mesh = triangulate(spec, inv.cfg.h);
    write_mesh_vtk(out_path(inv, "mesh.vtk"), mesh);
    const MetricsReport m = mesh_metrics(mesh);
    const json j{{"id", inv.cfg.id},
                 {"h", inv.cfg.h},
                 {"nodes", m.nodes},
                 {"interior_triangles", m.interior_triangles},
                 {"exterior_triangles", m.exterior_triangles},
                 {"interface_dofs", m.interface_dofs},
                 {"min_angle_deg", m.min_angle_deg},
                 {"max_angle_deg", m.max_angle_deg},
                 {"interior_area", m.interior_area},
                 {"exterior_area", m.exterior_area}};
    write_json(inv, "mesh_report.json", j);
    note(inv, m.summary());
    std::cout << "mesh: " << m.nodes << " nodes, "
              << m.interior_triangles + m.exterior_triangles
              << " triangles, min angle " << m.min_angle_deg << " deg\n";
    return 0;
}

int cmd_operators(const Invocation& inv) {
    const Problem p = setup(inv);
    const TransmissionSolver solver =
        TransmissionSolver::helmholtz(p.mesh, inv.cfg.k, p.dtn);
    note(inv, "building boundary operators (" +
                  std::to_string(2 * p.mesh.interface_count()) + " solves)");
    const BoundaryOperatorSet ops = build_operators(solver);
    write_matrix_csv(out_path(inv, "V.csv"), ops.V);
    write_matrix_csv(out_path(inv, "K.csv"), ops.K);
    write_matrix_csv(out_path(inv, "Kstar.csv"), ops.Kstar);
    write_matrix_csv(out_path(inv, "W.csv"), ops.W);
    const CalderonReport rep = calderon_residuals(ops);
    const json j{{"id", inv.cfg.id},
                 {"k", inv.cfg.k},
                 {"h", inv.cfg.h},
                 {"interface_dofs", p.mesh.interface_count()},
                 {"jump_relation_error", ops.jump_relation_error},
                 {"quarter_k", rep.quarter_k},
                 {"quarter_kstar", rep.quarter_kstar},
                 {"commute_kv", rep.commute_kv},
                 {"commute_wk", rep.commute_wk},
                 {"projector", rep.projector},
                 {"worst", rep.worst()}};
    write_json(inv, "calderon_report.json", j);
    std::cout << "calderon residuals: quarter_k " << rep.quarter_k
              << ", quarter_kstar " << rep.quarter_kstar << ", commute_kv "
              << rep.commute_kv << ", commute_wk " << rep.commute_wk << '\n';
    if (!std::isfinite(rep.worst()) || !std::isfinite(ops.jump_relation_error))
        throw SolverError("non-finite Calderon residuals");
    return 0;
}

int cmd_scatter(const Invocation& inv) {
    const Problem p = setup(inv);
    const IncidentField inc = incident(inv.cfg);

    ExteriorSolution us;
    if (inv.cfg.bc == ScatterBc::robin) {
        const ImpedanceSpec L = ImpedanceSpec::constant(inv.cfg.lambda);
        const Eigen::MatrixXd S = steklov_matrix(p.mesh);
        us = scattered_field(inc, inv.cfg.bc, p.mesh, p.dtn, &L, &S);
    } else {
        us = scattered_field(inc, inv.cfg.bc, p.mesh, p.dtn);
    }
    write_field_vtk(out_path(inv, "field.vtk"), p.mesh, us.field);

    const FarFieldRoute route = inv.cfg.route == "density"
                                    ? FarFieldRoute::density
                                    : FarFieldRoute::dtn_modes;
    const FarFieldContext ctx = far_field_context(us, p.mesh, p.dtn, route);
    const FarField ff = far_field(ctx, inv.cfg.n_angles);
    write_far_field_csv(out_path(inv, "far_field.csv"), ff);

    const double Q = far_field_power(ff, window(inv.cfg));
    const json j{{"Q", Q},
                 {"theta_intervals", intervals_json(inv.cfg)},
                 {"route", inv.cfg.route},
                 {"k", inv.cfg.k},
                 {"geometry_id", inv.cfg.id}};
    write_json(inv, "power.json", j);
    std::cout << "Q = " << Q << " (route " << inv.cfg.route << ", solve residual "
              << us.report.residual << ")\n";
    return 0;
}

int cmd_optimize(const Invocation& inv) {
    const Problem p = setup(inv);
    const Eigen::MatrixXd S = steklov_matrix(p.mesh);
    const RobinPowerObjective objective(p.mesh, p.dtn, S, incident(inv.cfg),
                                        window(inv.cfg), inv.cfg.n_angles);
    ImpedanceClass cls;
    cls.re_lo = inv.cfg.opt_re_lo;
    cls.re_hi = inv.cfg.opt_re_hi;
    cls.im_lo = inv.cfg.opt_im_lo;
    cls.im_hi = inv.cfg.opt_im_hi;
    cls.breakpoints = inv.cfg.opt_breakpoints;
    OptSettings st;
    st.grid_points = inv.cfg.opt_grid_points;
    st.max_iterations = inv.cfg.opt_max_iterations;
    st.tolerance = inv.cfg.opt_tolerance;

    const OptimisationResult r = optimize(cls, objective, st);

    json best = json::array();
    for (Eigen::Index i = 0; i < r.best_lambda.size(); ++i)
        best.push_back({{"re", r.best_lambda(i).real()},
                        {"im", r.best_lambda(i).imag()}});
    json trace = json::array();
    for (const OptIterate& it : r.trace) {
        json lam = json::array();
        for (Eigen::Index i = 0; i < it.lambda.size(); ++i)
            lam.push_back({{"re", it.lambda(i).real()},
                           {"im", it.lambda(i).imag()}});
        trace.push_back({{"lambda", lam},
                         {"Q", it.Q},
                         {"margin", it.margin},
                         {"phase", it.phase}});
    }
    const json j{{"geometry_id", inv.cfg.id},
                 {"k", inv.cfg.k},
                 {"theta_intervals", intervals_json(inv.cfg)},
                 {"class",
                  {{"re", {cls.re_lo, cls.re_hi}},
                   {"im", {cls.im_lo, cls.im_hi}},
                   {"breakpoints", cls.breakpoints},
                   {"segments", cls.segment_count()}}},
                 {"settings",
                  {{"grid_points", st.grid_points},
                   {"max_iterations", st.max_iterations},
                   {"tolerance", st.tolerance}}},
                 {"best_lambda", best},
                 {"best_Q", r.best_Q},
                 {"best_margin", r.best_margin},
                 {"termination", r.termination},
                 {"evaluations", r.trace.size()},
                 {"trace", trace}};
    write_json(inv, "optimisation.json", j);

    // CSV trace export: iter,phase,re_0,im_0,...,Q,margin
    {
        const std::string path = out_path(inv, "trace.csv");
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ConfigError("cannot open for writing: " + path);
        f << "iter,phase";
        for (int s = 0; s < cls.segment_count(); ++s)
            f << ",re_" << s << ",im_" << s;
        f << ",Q,margin\n";
        for (std::size_t i = 0; i < r.trace.size(); ++i) {
            const OptIterate& it = r.trace[i];
            f << i << ',' << it.phase;
            for (Eigen::Index s = 0; s < it.lambda.size(); ++s)
                f << ',' << format_double(it.lambda(s).real()) << ','
                  << format_double(it.lambda(s).imag());
            f << ',' << format_double(it.Q) << ',' << format_double(it.margin)
              << '\n';
        }
        f.flush();
        if (!f) throw ConfigError("write failed: " + path);
    }

    std::cout << "best Q = " << r.best_Q << " (" << r.termination << ", "
              << r.trace.size() << " evaluations)\n";
    return 0;
}

int cmd_validate(const Invocation& inv) {
    if (inv.cfg.geometry_kind != "disk")
        throw ConfigError(
            "validate needs a disk geometry (the analytic oracle is the disk)");

    std::vector<Check> checks;

    // special functions certify themselves first: Wronskian of J and Y
    {
        double worst = 0.0;
        for (const double x : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0}) {
            const auto cp = cyl_bessel_upto(20, x);
            const double exact = 2.0 / (pi * x);
            for (const CylPair& c : cp)
                worst = std::max(
                    worst, std::abs(c.j * c.yp - c.jp * c.y - exact) / exact);
        }
        checks.push_back({"bessel_wronskian", worst, 1e-11});
    }

    // the Mie oracle certifies itself by residual substitution
    const double a = inv.cfg.disk_radius;
    const MieBc mie_bc = inv.cfg.bc == ScatterBc::dirichlet ? MieBc::dirichlet
                         : inv.cfg.bc == ScatterBc::neumann
                             ? MieBc::neumann
                             : MieBc::robin_intrinsic;
    const double theta_d = inv.cfg.incidence_deg * pi / 180.0;
    const MieSolution mie =
        mie_coefficients(mie_bc, a, inv.cfg.k, inv.cfg.lambda, theta_d);
    checks.push_back({"mie_bc_residual", mie_bc_residual(mie), 1e-12});

    const Problem p = setup(inv);
    const IncidentField inc = incident(inv.cfg);
    note(inv, "solving the exterior problem");
    ExteriorSolution us;
    Eigen::MatrixXd S;
    if (inv.cfg.bc == ScatterBc::robin) {
        const ImpedanceSpec L = ImpedanceSpec::constant(inv.cfg.lambda);
        S = steklov_matrix(p.mesh);
        us = scattered_field(inc, inv.cfg.bc, p.mesh, p.dtn, &L, &S);
    } else {
        us = scattered_field(inc, inv.cfg.bc, p.mesh, p.dtn);
    }

    // scattered trace on the truncation circle vs the series
    {
        double num = 0.0, den = 0.0;
        for (const int v : p.mesh.outer_ring) {
            const cplx exact = mie_scattered(mie, p.mesh.nodes[v]);
            num += std::norm(us.field.values(v) - exact);
            den += std::norm(exact);
        }
        checks.push_back({"ring_trace_vs_mie", std::sqrt(num / den), 0.02});
    }

    // far field, both routes, vs the series, plus mutual agreement
    {
        const FarFieldContext ca =
            far_field_context(us, p.mesh, p.dtn, FarFieldRoute::density);
        const FarFieldContext cb =
            far_field_context(us, p.mesh, p.dtn, FarFieldRoute::dtn_modes);
        const FarField fa = far_field(ca, inv.cfg.n_angles);
        const FarField fb = far_field(cb, inv.cfg.n_angles);
        double na = 0.0, nb = 0.0, nd = 0.0, den = 0.0;
        for (std::size_t i = 0; i < fa.theta.size(); ++i) {
            const cplx exact = mie_far_field(mie, fa.theta[i]);
            na += std::norm(fa.amplitude(i) - exact);
            nb += std::norm(fb.amplitude(i) - exact);
            nd += std::norm(fa.amplitude(i) - fb.amplitude(i));
            den += std::norm(exact);
        }
        checks.push_back({"far_field_density_vs_mie", std::sqrt(na / den), 0.02});
        checks.push_back({"far_field_modes_vs_mie", std::sqrt(nb / den), 0.02});
        checks.push_back({"far_field_route_agreement", std::sqrt(nd / den), 0.02});
    }

    // DtN dissipativity: Re(v^H T v) <= 0 up to rounding, 100 random vectors
    {
        std::mt19937 rng(static_cast<unsigned>(inv.cfg.seed) + 7u);
        std::normal_distribution<double> gauss;
        const int nr = static_cast<int>(p.dtn.ring.size());
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            Eigen::VectorXcd v(nr);
            for (int i = 0; i < nr; ++i) v(i) = cplx(gauss(rng), gauss(rng));
            const double re = (v.dot(p.dtn.T * v)).real();
            worst = std::max(worst, re / v.squaredNorm());
        }
        checks.push_back({"dtn_sign", worst, 1e-12});
    }

    // layer-potential certificates and Green's third identity
    {
        note(inv, "checking layer potentials");
        const TransmissionSolver solver =
            TransmissionSolver::helmholtz(p.mesh, inv.cfg.k, p.dtn);
        std::mt19937 rng(static_cast<unsigned>(inv.cfg.seed) + 11u);
        std::normal_distribution<double> gauss;
        const int nb = p.mesh.interface_count();
        TraceVector f;
        CotraceVector g;
        f.v.resize(nb);
        g.v.resize(nb);
        for (int i = 0; i < nb; ++i) {
            f.v(i) = cplx(gauss(rng), gauss(rng));
            g.v(i) = cplx(gauss(rng), gauss(rng));
        }
        const TransmissionField Sg = single_layer(solver, g);
        const TransmissionField Df = double_layer(solver, f);
        const TransmissionField Gu = solver.solve(f, g);
        const double jump = std::max(
            std::max(Sg.trace_jump_error, Sg.flux_jump_error),
            std::max(Df.trace_jump_error, Df.flux_jump_error));
        checks.push_back({"layer_potential_jumps", jump, 1e-10});
        const double green =
            (Gu.field.values - (Sg.field.values - Df.field.values)).norm() /
            Gu.field.values.norm();
        checks.push_back({"green_third_identity", green, 1e-10});
    }

    bool all = true;
    json items = json::array();
    for (const Check& c : checks) {
        all = all && c.pass();
        std::cout << (c.pass() ? "PASS " : "FAIL ") << c.name << ": measured "
                  << c.measured << " (tolerance " << c.tolerance << ")\n";
        items.push_back({{"name", c.name},
                         {"measured", c.measured},
                         {"tolerance", c.tolerance},
                         {"pass", c.pass()}});
    }
    const json j{{"geometry_id", inv.cfg.id},
                 {"k", inv.cfg.k},
                 {"h", inv.cfg.h},
                 {"bc", inv.cfg.bc == ScatterBc::dirichlet  ? "dirichlet"
                        : inv.cfg.bc == ScatterBc::neumann ? "neumann"
                                                           : "robin"},
                 {"checks", items},
                 {"pass", all}};
    write_json(inv, "validation.json", j);
    std::cout << (all ? "validation passed" : "validation FAILED") << '\n';
    return all ? 0 : 1;
}

} // namespace helmscat::cli
