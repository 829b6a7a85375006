// slecg command-line interface: identity checks, simulation and Monte Carlo
// verification with JSON/CSV artifacts.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "slecg/config.hpp"
#include "slecg/sampling.hpp"

namespace fs = std::filesystem;
using namespace slecg;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out_dir = ".";
};

json load_config(const GlobalOpts& g) {
    if (g.config_path.empty()) return json::object();
    std::ifstream in(g.config_path);
    if (!in) throw divisor_error("cannot open config file: " + g.config_path);
    json j;
    in >> j;
    return j;
}

void write_json(const GlobalOpts& g, const std::string& name, const json& j) {
    fs::create_directories(g.out_dir);
    const fs::path p = fs::path(g.out_dir) / name;
    std::ofstream out(p);
    out << j.dump(2) << "\n";
}

int run_check_coulomb(const GlobalOpts& g, int n_random) {
    PathRng rng(g.seed, 0);
    double worst_mod = 0.0, worst_phase = 0.0;
    for (int i = 0; i < n_random; ++i) {
        const double b = sampling::uniform(rng, -1.0, 1.0);
        const int n = 3 + static_cast<int>(sampling::uniform(rng, 0.0, 3.999));
        const Divisor d = sampling::neutral_plane_divisor(rng, n, b);
        const MoebiusMap m = sampling::random_moebius(rng);
        bool bad_map = false;
        for (const auto& e : d.entries)
            if (m.sends_to_infinity(e.point, 1e-3)) bad_map = true;
        if (bad_map) {
            --i;
            continue;
        }
        const LogCorrelation direct = log_correlation_plane(d);
        const LogCorrelation moved = moebius_transport(d, m);
        worst_mod = std::max(worst_mod, std::abs(direct.log_modulus - moved.log_modulus));
        const double dphi = std::remainder(direct.phase - moved.phase, 2.0 * pi());
        worst_phase = std::max(worst_phase, std::abs(dphi));
    }
    const bool pass = worst_mod < 1e-9 && worst_phase < 1e-9;
    json rep{{"trials", n_random},
             {"worst_log_modulus_defect", worst_mod},
             {"worst_phase_defect_mod_2pi", worst_phase},
             {"pass", pass}};
    write_json(g, "check_coulomb.json", rep);
    std::cout << "check-coulomb: " << (pass ? "PASS" : "FAIL") << "  trials=" << n_random
              << "  |dlogM|=" << worst_mod << "  |dphase|=" << worst_phase << "\n";
    return pass ? 0 : 1;
}

int run_check_nullvector(const GlobalOpts& g, double kappa, const std::string& geometry,
                         int trials) {
    PathRng rng(g.seed, 1);
    const SleParams p = SleParams::forward(kappa);
    const Geometry geo = geometry == "radial" ? Geometry::Radial : Geometry::Chordal;
    double worst = 0.0;
    for (int i = 0; i < trials; ++i) {
        double resid;
        if (geo == Geometry::Chordal) {
            const double xi = sampling::uniform(rng, -0.5, 0.5);
            const Divisor beta = sampling::symmetric_chordal_beta(rng, p, xi, 2, 1);
            resid = null_vector_residual(beta, xi, p, geo);
        } else {
            const double theta = sampling::uniform(rng, 0.0, 2.0 * pi());
            const Divisor beta = sampling::symmetric_radial_beta(rng, p, theta, 2, 0.0);
            resid = null_vector_residual(beta, theta, p, geo);
        }
        worst = std::max(worst, resid);
    }
    const bool pass = worst < 1e-7;
    json rep{{"kappa", kappa}, {"geometry", geometry}, {"trials", trials},
             {"worst_residual", worst}, {"pass", pass}};
    write_json(g, "check_nullvector.json", rep);
    std::cout << "check-nullvector: " << (pass ? "PASS" : "FAIL") << "  kappa=" << kappa << " "
              << geometry << "  residual=" << worst << "\n";
    return pass ? 0 : 1;
}

int run_check_bpz_cardy(const GlobalOpts& g, double kappa, const std::string& geometry,
                        int trials) {
    PathRng rng(g.seed, 2);
    const SleParams p = SleParams::forward(kappa);
    const Geometry geo = geometry == "radial" ? Geometry::Radial : Geometry::Chordal;
    const Uniformization chart =
        geo == Geometry::Chordal ? Uniformization::HalfPlane : Uniformization::Disc;
    double worst = 0.0;
    for (int i = 0; i < trials; ++i) {
        const bool spin_pair = (i % 2) == 0;
        const Divisor tau = sampling::vertex_tau(rng, chart, p.b, spin_pair);
        double resid;
        if (geo == Geometry::Chordal) {
            const double xi = sampling::uniform(rng, -0.5, 0.5);
            const Divisor beta = sampling::symmetric_chordal_beta(rng, p, xi, 2, 0);
            resid = bpz_cardy_residual(beta, tau, xi, p, geo);
        } else {
            const double theta = sampling::uniform(rng, 0.0, 2.0 * pi());
            const Divisor beta = sampling::symmetric_radial_beta(rng, p, theta, 2, 0.0);
            resid = bpz_cardy_residual(beta, tau, theta, p, geo);
        }
        worst = std::max(worst, resid);
    }
    const bool pass = worst < 1e-7;
    json rep{{"kappa", kappa}, {"geometry", geometry}, {"trials", trials},
             {"worst_residual", worst}, {"pass", pass}};
    write_json(g, "check_bpz_cardy.json", rep);
    std::cout << "check-bpz-cardy: " << (pass ? "PASS" : "FAIL") << "  kappa=" << kappa << " "
              << geometry << "  residual=" << worst << "\n";
    return pass ? 0 : 1;
}

int run_simulate(const GlobalOpts& g, const json& cfg_json) {
    DrivingConfig cfg = driving_config_from_json(cfg_json);
    if (cfg_json.contains("seed")) cfg.seed = cfg_json.at("seed").get<std::uint64_t>();
    std::vector<cplx> tracked;
    if (cfg_json.contains("tracked")) {
        for (const auto& t : cfg_json.at("tracked"))
            tracked.push_back({t.value("re", 0.0), t.value("im", 0.0)});
    } else {
        tracked.push_back(cfg.geometry == Geometry::Chordal ? cplx{0.0, 1.0} : cplx{0.3, 0.2});
    }
    const PathRecord rec = generate_path(cfg, 0, tracked);
    fs::create_directories(g.out_dir);
    const fs::path p = fs::path(g.out_dir) / "path.csv";
    std::ofstream out(p);
    out << "t,driving";
    for (std::size_t i = 0; i < tracked.size(); ++i)
        out << ",g" << i << "_re,g" << i << "_im,g" << i << "1_re,g" << i << "1_im,alive" << i;
    out << "\n";
    out.precision(15);
    for (std::size_t n = 0; n < rec.t.size(); ++n) {
        out << rec.t[n] << "," << rec.driving[n];
        for (std::size_t i = 0; i < tracked.size(); ++i) {
            out << "," << rec.tracked_g[n][i].real() << "," << rec.tracked_g[n][i].imag() << ","
                << rec.tracked_g1[n][i].real() << "," << rec.tracked_g1[n][i].imag() << ","
                << (rec.tracked_alive[n][i] ? 1 : 0);
        }
        out << "\n";
    }
    std::cout << "simulate: wrote " << rec.t.size() << " rows to " << p.string()
              << (rec.truncated ? " (truncated: force point swallowed)" : "") << "\n";
    return 0;
}

int run_verify_martingale(const GlobalOpts& g, const json& j) {
    const std::string kind = j.value("observable", std::string("schramm_sheffield_chordal"));
    const double kappa = j.value("kappa", 2.0);
    const bool backward = kind == "sheffield_neumann";
    DrivingConfig cfg;
    cfg.params = backward ? SleParams::backward(kappa) : SleParams::forward(kappa);
    cfg.geometry = (kind == "schramm_sheffield_chordal" || kind == "sheffield_neumann")
                       ? Geometry::Chordal
                       : Geometry::Radial;
    cfg.seed = j.value("seed", g.seed);
    cfg.dt = j.value("dt", 1e-4);
    cfg.t_end = j.value("t_end", 0.5);
    cplx z = cfg.geometry == Geometry::Chordal ? cplx{0.4, 0.9} : cplx{0.2, 0.3};
    if (j.contains("z")) z = {j.at("z").value("re", 0.0), j.at("z").value("im", 0.0)};
    McOptions opt;
    opt.n_paths = j.value("n_paths", 50000);
    opt.threads = g.threads;
    opt.rel_tol = j.value("rel_tol", 0.02);
    opt.r_stop = j.value("r_stop", 0.15);
    const std::vector<double> cps = j.value("checkpoints", std::vector<double>{0.1, 0.25, 0.5});
    const SleParams p = cfg.params;
    const MartingaleReport rep = martingale_test(
        cfg, [&] { return make_observable(kind, z, p); }, kind, cps, opt);
    write_json(g, "martingale_" + kind + ".json", martingale_report_to_json(rep));
    std::cout << "verify-martingale " << kind << " kappa=" << kappa << ": "
              << (rep.pass ? "PASS" : "FAIL");
    for (const auto& c : rep.checkpoints) std::cout << "  z(t=" << c.t << ")=" << c.z_score;
    std::cout << "\n";
    return rep.pass ? 0 : 1;
}

int run_verify_exponent(const GlobalOpts& g, const json& j) {
    const double kappa = j.value("kappa", 6.0);
    const double h = j.value("h", 0.0);
    const double theta = j.value("theta", pi());
    const std::vector<double> grid =
        j.value("t_grid", std::vector<double>{0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0});
    const std::size_t n_paths = j.value("n_paths", 100000);
    const double dt = j.value("dt", 1e-4);
    const ExponentReport rep =
        exponent_regression(kappa, h, theta, grid, n_paths, dt, j.value("seed", g.seed),
                            g.threads, j.value("rel_tol", 0.10));
    write_json(g, "exponent.json", exponent_report_to_json(rep));
    std::cout << "verify-exponent kappa=" << kappa << " h=" << h << ": "
              << (rep.pass ? "PASS" : "FAIL") << "  slope=" << rep.slope
              << " expected=" << rep.expected_slope << "\n";
    return rep.pass ? 0 : 1;
}

int run_verify_restriction(const GlobalOpts& g, const json& j) {
    VerticalSlit slit;
    slit.x0 = j.value("x0", 1.0);
    slit.height = j.value("h", 0.3);
    const std::size_t n_paths = j.value("n_paths", 200000);
    const double t_end = j.value("t_end", 4.0);
    const double dt = j.value("dt", 5e-4);
    const RestrictionReport rep = restriction_probability_test(
        slit, n_paths, t_end, dt, j.value("seed", g.seed), g.threads, j.value("rel_tol", 0.05),
        j.value("n_samples", 16));
    write_json(g, "restriction.json", restriction_report_to_json(rep));
    std::cout << "verify-restriction: " << (rep.pass ? "PASS" : "FAIL") << "  p_mc=" << rep.p_mc
              << " p_formula=" << rep.p_formula << " bias=" << rep.truncation_bias << "\n";
    return rep.pass ? 0 : 1;
}

int run_virasoro(const GlobalOpts& g, std::vector<double> angles, double kappa) {
    const cplx r = virasoro_npoint_recursion(angles, kappa);
    json rep{{"angles", angles}, {"kappa", kappa}, {"re", r.real()}, {"im", r.imag()}};
    if (angles.size() == 1) {
        const cplx closed = virasoro_one_point(std::exp(cplx{0.0, angles[0]}), kappa);
        rep["closed_form_re"] = closed.real();
        rep["closed_form_im"] = closed.imag();
        rep["defect"] = std::abs(r - closed);
    }
    write_json(g, "virasoro.json", rep);
    std::cout << "virasoro-recursion n=" << angles.size() << ": R = " << r.real();
    if (std::abs(r.imag()) > 1e-12) std::cout << " + " << r.imag() << "i";
    std::cout << "\n";
    return 0;
}

int run_export(const GlobalOpts& g, const json& j) {
    json out;
    if (j.contains("beta")) {
        const Divisor beta = divisor_from_json(j.at("beta"));
        out["beta"] = divisor_to_json(beta);
        out["total_charge_re"] = beta.total_charge().real();
        out["total_charge_im"] = beta.total_charge().imag();
        out["nc_b"] = check_neutrality(beta, NeutralityLevel::NCb, 1e-9);
        json dims = json::array();
        for (const auto& e : beta.entries) {
            const cplx lam = lambda_b(e.charge, beta.b);
            dims.push_back({{"re", e.point.coord.real()},
                            {"im", e.point.coord.imag()},
                            {"lambda_re", lam.real()},
                            {"lambda_im", lam.imag()}});
        }
        out["dims"] = dims;
    }
    if (j.contains("kappa")) {
        const double kappa = j.at("kappa").get<double>();
        out["forward"] = sle_params_to_json(SleParams::forward(kappa));
        out["backward"] = sle_params_to_json(SleParams::backward(kappa));
    }
    write_json(g, "export.json", out);
    std::cout << "export: wrote export.json\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coulomb gas correlations, SLE[beta] Loewner flows and martingale checks"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON config file");
    app.add_option("--seed", g.seed, "base RNG seed");
    app.add_option("--threads", g.threads, "worker threads (0 = auto)");
    app.add_option("--out", g.out_dir, "output directory");

    int n_random = 500;
    auto* coulomb = app.add_subcommand("check-coulomb", "Moebius invariance property suite");
    coulomb->add_option("--random", n_random, "number of random configurations");

    double kappa = 4.0;
    std::string geometry = "chordal";
    int trials = 200;
    auto* nullv = app.add_subcommand("check-nullvector", "null-vector equation residuals");
    nullv->add_option("--kappa", kappa);
    nullv->add_option("--geometry", geometry)->check(CLI::IsMember({"chordal", "radial"}));
    nullv->add_option("--trials", trials);

    double kappa_bpz = 2.0;
    std::string geometry_bpz = "chordal";
    int trials_bpz = 200;
    auto* bpz = app.add_subcommand("check-bpz-cardy", "BPZ-Cardy residuals on vertex observables");
    bpz->add_option("--kappa", kappa_bpz);
    bpz->add_option("--geometry", geometry_bpz)->check(CLI::IsMember({"chordal", "radial"}));
    bpz->add_option("--trials", trials_bpz);

    auto* sim = app.add_subcommand("simulate", "generate one driving path and map data (CSV)");
    auto* vm = app.add_subcommand("verify-martingale", "Monte Carlo martingale test");
    auto* ve = app.add_subcommand("verify-exponent", "LSW derivative exponent regression");
    auto* vr = app.add_subcommand("verify-restriction", "restriction probability comparison");

    std::vector<double> angles;
    double kappa_fw = 8.0 / 3.0;
    auto* vira = app.add_subcommand("virasoro-recursion", "n-point recursion value");
    vira->add_option("--angles", angles, "angles theta_j (radians)")->required();
    vira->add_option("--kappa", kappa_fw);

    auto* expo = app.add_subcommand("export", "normalized config and derived quantities");

    for (auto* sub : {coulomb, nullv, bpz, sim, vm, ve, vr, vira, expo}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const json cfg = load_config(g);
        if (coulomb->parsed()) return run_check_coulomb(g, n_random);
        if (nullv->parsed()) return run_check_nullvector(g, kappa, geometry, trials);
        if (bpz->parsed()) return run_check_bpz_cardy(g, kappa_bpz, geometry_bpz, trials_bpz);
        if (sim->parsed()) return run_simulate(g, cfg);
        if (vm->parsed()) return run_verify_martingale(g, cfg);
        if (ve->parsed()) return run_verify_exponent(g, cfg);
        if (vr->parsed()) return run_verify_restriction(g, cfg);
        if (vira->parsed()) return run_virasoro(g, angles, kappa_fw);
        if (expo->parsed()) return run_export(g, cfg);
    } catch (const divisor_error& e) {
        json err{{"error", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
