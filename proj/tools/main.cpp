#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "muentropy/blowup_cp2.hpp"
#include "muentropy/estimates.hpp"
#include "muentropy/functionals.hpp"
#include "muentropy/io.hpp"
#include "muentropy/optimizer.hpp"
#include "muentropy/thermo.hpp"

using namespace muentropy;
using nlohmann::json;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitGeometry = 3;
constexpr int kExitSolver = 4;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::vector<double> parse_grid(const std::string& text) {
    // "a:b:step" or comma list
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        double a, b, step;
        if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &a, &b, &step) != 3 || step <= 0)
            throw Error("bad grid spec: " + text);
        for (double t = a; t <= b + 1e-12 * (1.0 + std::abs(b)); t += step) grid.push_back(t);
        return grid;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) grid.push_back(std::stod(item));
    if (grid.empty()) throw Error("empty grid spec");
    return grid;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

RunManifest make_manifest(const std::string& command, const std::string& spec_text,
                          const std::string& config, std::uint64_t seed) {
    RunManifest m;
    m.command = command;
    m.spec_hash = fnv1a_hex(spec_text);
    m.config = config;
    m.seed = seed;
    return m;
}

json report_json(const FunctionalReport& r) {
    json j;
    j["T"] = r.T;
    j["lambda"] = r.lambda;
    j["S"] = r.S;
    j["U"] = r.U;
    j["F"] = r.F;
    j["na_mu"] = r.na_mu;
    j["sigma"] = r.sigma;
    j["na_mu_lambda"] = r.na_mu_lambda;
    return j;
}

std::vector<double> report_row(const FunctionalReport& r) {
    return {r.T, r.lambda, r.S, r.U, r.F, r.na_mu, r.sigma, r.na_mu_lambda};
}

const std::vector<std::string> kReportHeader = {"T",  "lambda", "S",     "U",
                                                "F",  "na_mu",  "sigma", "na_mu_lambda"};

int cmd_validate(const std::string& spec_path, const std::string& emit_path) {
    ToricSystem sys = read_system_spec(spec_path);
    auto [vol, bdry] = total_measures(sys);
    std::printf("dim=%d vertices=%d facets=%zu simple=%s vol=%s bdry=%s\n", sys.dim(),
                sys.polytope.vertex_count(), sys.polytope.facets().size(),
                sys.polytope.is_simple() ? "true" : "false", format_g17(vol).c_str(),
                format_g17(bdry).c_str());
    for (int v = 0; v < sys.polytope.vertex_count(); ++v) {
        std::printf("vertex %d:", v);
        for (int d = 0; d < sys.dim(); ++d)
            std::printf(" %s", format_g17(sys.polytope.vertex(v)(d)).c_str());
        std::printf("\n");
    }
    if (!emit_path.empty()) write_text_file(emit_path, system_spec_text(sys));
    return 0;
}

int cmd_example_blowup(const std::string& out_dir) {
    Timer timer;
    std::filesystem::create_directories(out_dir);
    ToricSystem sys = blowup_cp2_system();
    Vec eta = blowup_cp2_eta();
    RunManifest manifest = make_manifest("example blowup-cp2", system_spec_text(sys), "", 0);

    // (a) curve of na_mu / sigma by quadrature and by the closed forms
    std::vector<std::vector<double>> rows;
    QuadratureConfig tight;
    tight.rel_tol = 1e-12;
    for (int i = -300; i <= 300; ++i) {
        double x = i * 0.01;
        PiecewiseAffineConvex q = linear_from_vector(x * eta);
        FunctionalReport r = functional_report(sys, 0.0, q, tight);
        double mu_q = r.na_mu;
        double sig_q = r.sigma;
        double mu_c = blowup_cp2_na_mu(x);
        double sig_c = blowup_cp2_sigma(x);
        double disc = std::max(std::abs(mu_q - mu_c) / std::max(std::abs(mu_c), 1e-300),
                               std::abs(sig_q - sig_c) / std::max(std::abs(sig_c), 1e-300));
        rows.push_back({x, mu_q, mu_c, sig_q, sig_c, disc});
    }
    write_csv(out_dir + "/curve.csv", manifest,
              {"x", "na_mu_quadrature", "na_mu_closed_form", "sigma_quadrature",
               "sigma_closed_form", "max_rel_discrepancy"},
              rows);

    // (b) lambda(x) by direct criticality
    rows.clear();
    for (int i = -300; i <= 300; ++i) {
        double x = i * 0.01;
        if (std::abs(x) < 5e-3) continue;  // criticality ratio degenerates at 0
        rows.push_back({x, blowup_cp2_lambda_of_x(x) / (2.0 * M_PI)});
    }
    write_csv(out_dir + "/lambda_curve.csv", manifest, {"x", "lambda_over_2pi"}, rows);

    // (c) x_lambda table
    rows.clear();
    for (double frac : {0.0, -0.25, -0.5, -1.0}) {
        double lambda = 2.0 * M_PI * frac;
        rows.push_back({frac, blowup_cp2_optimal_x(lambda)});
    }
    manifest.wall_seconds = timer.seconds();
    write_csv(out_dir + "/xlambda.csv", manifest, {"lambda_over_2pi", "x_lambda"}, rows);
    std::printf("wrote %s/{curve,lambda_curve,xlambda}.csv\n", out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"toric free-energy / non-archimedean mu-entropy toolkit"};
    app.require_subcommand(1);

    std::string spec_path, out_path = "out.csv", q_path, grid_text = "1",
                reservoir_path, n_list_text = "1,2,4,8,16,32", emit_path;
    double T = 0.0, lambda_opt = 0.0, U_target = 0.0, T_R = 1.0, exponent = 2.0;
    std::uint64_t seed = 0;
    SolverConfig solver;
    int trials = 200, samples = 64, fn_samples = 60;

    auto add_solver_flags = [&](CLI::App* cmd) {
        cmd->add_option("--pieces", solver.pieces, "max affine pieces");
        cmd->add_option("--starts", solver.starts, "random multi-starts");
        cmd->add_option("--seed", seed, "rng seed");
        cmd->add_option("--f-tol", solver.f_tol, "objective tolerance");
        cmd->add_option("--max-iters", solver.max_iters, "iteration cap per stage");
        cmd->add_option("--mesh-refine", solver.mesh_refine, "surrogate mesh refinement");
    };

    auto* validate = app.add_subcommand("validate", "check a system spec");
    validate->add_option("spec", spec_path)->required();
    validate->add_option("--emit", emit_path, "write the normalized spec here");

    auto* report = app.add_subcommand("report", "functional report rows for a fixed q");
    report->add_option("--system", spec_path)->required();
    report->add_option("--q", q_path, "PA function JSON (default: zero)");
    report->add_option("--T-grid", grid_text, "temperatures a:b:step or list");
    report->add_option("--out", out_path);

    auto* optimize = app.add_subcommand("optimize", "minimize F(T, .) over PA states");
    optimize->add_option("--system", spec_path)->required();
    auto* t_opt = optimize->add_option("--T", T, "temperature");
    auto* lambda_flag =
        optimize->add_option("--lambda", lambda_opt, "slope parameter lambda = -2 pi T");
    t_opt->excludes(lambda_flag);
    optimize->add_option("--out", out_path);
    add_solver_flags(optimize);

    auto* sweep = app.add_subcommand("sweep", "optimizer sweep over a temperature grid");
    sweep->add_option("--system", spec_path)->required();
    sweep->add_option("--T-grid", grid_text)->required();
    sweep->add_option("--out", out_path);
    add_solver_flags(sweep);

    auto* thermo = app.add_subcommand("thermo", "thermodynamic experiments");
    thermo->require_subcommand(1);
    auto* family = thermo->add_subcommand("family", "canonical family over a T grid");
    family->add_option("--system", spec_path)->required();
    family->add_option("--T-grid", grid_text)->required();
    family->add_option("--out", out_path);
    add_solver_flags(family);
    auto* equilibrium = thermo->add_subcommand("equilibrium", "equilibrium of a given energy");
    equilibrium->add_option("--system", spec_path)->required();
    equilibrium->add_option("--U", U_target)->required();
    equilibrium->add_option("--out", out_path);
    add_solver_flags(equilibrium);
    auto* heatbath = thermo->add_subcommand("heat-bath", "reservoir composition limit");
    heatbath->add_option("--system", spec_path)->required();
    heatbath->add_option("--reservoir", reservoir_path)->required();
    heatbath->add_option("--U", U_target)->required();
    heatbath->add_option("--T-R", T_R)->required();
    heatbath->add_option("--N", n_list_text, "comma list of reservoir copies");
    heatbath->add_option("--out", out_path);
    add_solver_flags(heatbath);

    auto* estimates = app.add_subcommand("estimates", "convex-geometry estimate probes");
    estimates->require_subcommand(1);
    auto* poincare = estimates->add_subcommand("poincare", "Poincare ratio probe");
    poincare->add_option("--system", spec_path)->required();
    poincare->add_option("--trials", trials);
    poincare->add_option("--exponent", exponent);
    poincare->add_option("--seed", seed);
    poincare->add_option("--out", out_path);
    auto* rellich = estimates->add_subcommand("rellich", "empirical boundary majorant");
    rellich->add_option("--system", spec_path)->required();
    rellich->add_option("--samples", samples, "interior sample points");
    rellich->add_option("--fn-samples", fn_samples);
    rellich->add_option("--seed", seed);
    rellich->add_option("--out", out_path);
    auto* meanvalue = estimates->add_subcommand("meanvalue", "mean value inequality battery");
    meanvalue->add_option("--system", spec_path)->required();
    meanvalue->add_option("--trials", trials);
    meanvalue->add_option("--seed", seed);
    meanvalue->add_option("--out", out_path);

    auto* example = app.add_subcommand("example", "built-in worked examples");
    example->require_subcommand(1);
    auto* blowup = example->add_subcommand("blowup-cp2", "anticanonical blow-up of CP^2");
    blowup->add_option("--out", out_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitParse;  // usage problems count as parse errors
    }

    // the manifest records the invocation, minus the output destination so
    // that identical runs to different paths stay byte-identical
    std::string command_line;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--out") {
            ++i;
            continue;
        }
        if (arg.rfind("--out=", 0) == 0) continue;
        if (!command_line.empty()) command_line += " ";
        command_line += arg;
    }

    try {
        Timer timer;
        if (validate->parsed()) return cmd_validate(spec_path, emit_path);
        if (blowup->parsed()) return cmd_example_blowup(out_path);

        std::string spec_text = read_text_file(spec_path);
        ToricSystem sys = system_from_spec_text(spec_text);
        solver.seed = seed;
        std::ostringstream config;
        config << "pieces=" << solver.pieces << " starts=" << solver.starts
               << " f_tol=" << solver.f_tol << " mesh_refine=" << solver.mesh_refine;

        if (report->parsed()) {
            PiecewiseAffineConvex q = q_path.empty()
                                          ? linear_from_vector(Vec::Zero(sys.dim()))
                                          : read_pa(q_path, sys.dim());
            RunManifest manifest = make_manifest(command_line, spec_text, config.str(), seed);
            std::vector<std::vector<double>> rows;
            for (double t : parse_grid(grid_text))
                rows.push_back(report_row(functional_report(sys, t, q)));
            manifest.wall_seconds = timer.seconds();
            write_csv(out_path, manifest, kReportHeader, rows);
        } else if (optimize->parsed()) {
            double temp =
                lambda_flag->count() > 0 ? temperature_from_lambda(lambda_opt) : T;
            OptResult res = canonical_distribution(sys, temp, solver);
            RunManifest manifest = make_manifest(command_line, spec_text, config.str(), seed);
            manifest.wall_seconds = timer.seconds();
            json j;
            j["manifest"] = json::parse(manifest.json_text());
            j["q_star"] = json::parse(pa_text(res.q_star));
            j["report"] = report_json(res.report);
            j["diagnostics"] = {{"converged", res.converged},
                                {"iterations", res.iterations},
                                {"starts_agreement", res.starts_agreement},
                                {"surrogate_value", res.surrogate_value}};
            write_text_file(out_path, j.dump(2) + "\n");
            if (!res.converged) return kExitSolver;
        } else if (sweep->parsed()) {
            RunManifest manifest = make_manifest(command_line, spec_text, config.str(), seed);
            std::vector<double> grid = parse_grid(grid_text);
            std::vector<std::vector<double>> rows;
            SolverConfig stage = solver;
            for (double t : grid) {
                OptResult res = canonical_distribution(sys, t, stage);
                rows.push_back(report_row(res.report));
                stage.warm_starts = {res.q_star};
            }
            manifest.wall_seconds = timer.seconds();
            write_csv(out_path, manifest, kReportHeader, rows);
        } else if (family->parsed()) {
            RunManifest manifest = make_manifest(command_line, spec_text, config.str(), seed);
            CanonicalFamily fam = canonical_family(sys, parse_grid(grid_text), solver);
            std::vector<std::vector<double>> rows;
            for (const auto& p : fam.points) rows.push_back({p.T, p.U, p.S, p.F});
            manifest.wall_seconds = timer.seconds();
            write_csv(out_path, manifest, {"T", "U", "S", "F"}, rows);
            std::printf("worst_U_decrease=%s worst_S_decrease=%s worst_F_convexity=%s\n",
                        format_g17(fam.worst_U_decrease).c_str(),
                        format_g17(fam.worst_S_decrease).c_str(),
                        format_g17(fam.worst_F_convexity).c_str());
        } else if (equilibrium->parsed()) {
            RunManifest manifest =
                make_manifest(command_line, spec_text, config.str(), seed);
            EquilibriumResult eq = equilibrium_of_energy(sys, U_target, solver);
            manifest.wall_seconds = timer.seconds();
            json j;
            j["manifest"] = json::parse(manifest.json_text());
            j["U_target"] = eq.U_target;
            j["T_interval"] = {eq.T_lo, eq.T_hi};
            j["report"] = report_json(eq.report);
            write_text_file(out_path, j.dump(2) + "\n");
        } else if (heatbath->parsed()) {
            RunManifest manifest =
                make_manifest(command_line, spec_text, config.str(), seed);
            ToricSystem res_sys = read_system_spec(reservoir_path);
            EquilibriumResult probe = equilibrium_of_energy(sys, U_target, solver);
            HeatBathTable table = heat_bath_experiment(sys, res_sys, U_target, T_R,
                                                       parse_int_list(n_list_text),
                                                       probe.u_eq, solver);
            std::vector<std::vector<double>> rows;
            for (const auto& r : table.rows)
                rows.push_back({double(r.N), r.T_N, r.dS_N});
            manifest.wall_seconds = timer.seconds();
            write_csv(out_path, manifest, {"N", "T_N", "dS_N"}, rows);
            std::printf("limit=%s\n", format_g17(table.limit).c_str());
        } else if (poincare->parsed()) {
            RunManifest manifest =
                make_manifest(command_line, spec_text, config.str(), seed);
            EstimateProbe probe = poincare_probe(sys, exponent, trials, seed);
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < probe.ratios.size(); ++i)
                rows.push_back({double(i), probe.ratios[i]});
            manifest.wall_seconds = timer.seconds();
            write_csv(out_path, manifest, {"trial", "ratio"}, rows);
            write_text_file(out_path + ".witness.json", pa_text(probe.witness));
        } else if (rellich->parsed()) {
            RunManifest manifest =
                make_manifest(command_line, spec_text, config.str(), seed);
            Rng rng(seed);
            std::vector<Vec> points;
            for (int i = 0; i < samples; ++i) points.push_back(sample_point(sys.polytope, rng));
            auto vals = rellich_majorant_probe(sys, points, fn_samples, seed);
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < points.size(); ++i) {
                std::vector<double> row{double(i)};
                for (int d = 0; d < sys.dim(); ++d) row.push_back(points[i](d));
                row.push_back(vals[i]);
                rows.push_back(std::move(row));
            }
            std::vector<std::string> header{"point"};
            for (int d = 0; d < sys.dim(); ++d) header.push_back("x" + std::to_string(d));
            header.push_back("majorant");
            manifest.wall_seconds = timer.seconds();
            write_csv(out_path, manifest, header, rows);
        } else if (meanvalue->parsed()) {
            RunManifest manifest =
                make_manifest(command_line, spec_text, config.str(), seed);
            Rng rng(seed);
            std::vector<std::vector<double>> rows;
            for (int t = 0; t < trials; ++t) {
                Rng sub = rng.split(std::uint64_t(t));
                PiecewiseAffineConvex u = random_nonneg_convex(sys.polytope, sub);
                Vec x = sample_point(sys.polytope, sub);
                if (sys.polytope.inradius_at(x) < 1e-6) continue;
                auto [lhs, rhs] = mean_value_check(sys, u, x);
                rows.push_back({double(t), lhs, rhs});
            }
            manifest.wall_seconds = timer.seconds();
            write_csv(out_path, manifest, {"trial", "lhs", "rhs"}, rows);
        }
        return 0;
    } catch (const EmptyOrUnboundedError& e) {
        std::fprintf(stderr, "geometry error: %s\n", e.what());
        return kExitGeometry;
    } catch (const DegenerateError& e) {
        std::fprintf(stderr, "geometry error: %s\n", e.what());
        return kExitGeometry;
    } catch (const IrrationalNormalError& e) {
        std::fprintf(stderr, "geometry error: %s\n", e.what());
        return kExitGeometry;
    } catch (const OutOfRangeError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return kExitSolver;
    } catch (const NegativeHeatCapacityError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return kExitSolver;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitParse;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitParse;
    }
}
