#include "slecg/config.hpp"

#include <cmath>

namespace slecg {

namespace {

std::string side_name(Side s) {
    switch (s) {
        case Side::Boundary:
            return "boundary";
        case Side::Interior:
            return "interior";
        case Side::ReflectedInterior:
            return "reflected-interior";
    }
    return "boundary";
}

Side side_from_name(const std::string& s) {
    if (s == "boundary") return Side::Boundary;
    if (s == "interior") return Side::Interior;
    if (s == "reflected-interior") return Side::ReflectedInterior;
    throw divisor_error("unknown side: " + s);
}

}  // namespace

void require_keys(const json& j, const std::vector<std::string>& allowed,
                  const std::string& where) {
    if (!j.is_object()) throw divisor_error(where + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const auto& a : allowed)
            if (key == a) ok = true;
        if (!ok) throw divisor_error(where + ": unknown key '" + key + "'");
    }
}

json divisor_to_json(const Divisor& d) {
    json entries = json::array();
    for (const auto& e : d.entries) {
        entries.push_back({{"re", e.point.coord.real()},
                           {"im", e.point.coord.imag()},
                           {"at_infinity", e.point.at_infinity},
                           {"side", side_name(e.point.side)},
                           {"charge_re", e.charge.real()},
                           {"charge_im", e.charge.imag()}});
    }
    return json{{"b_re", d.b.real()}, {"b_im", d.b.imag()}, {"entries", entries}};
}

Divisor divisor_from_json(const json& j) {
    require_keys(j, {"b_re", "b_im", "entries"}, "divisor");
    Divisor d;
    d.b = cplx{j.at("b_re").get<double>(), j.value("b_im", 0.0)};
    for (const auto& e : j.at("entries")) {
        require_keys(e, {"re", "im", "at_infinity", "side", "charge_re", "charge_im"},
                     "divisor entry");
        Point p;
        p.coord = cplx{e.value("re", 0.0), e.value("im", 0.0)};
        p.at_infinity = e.value("at_infinity", false);
        p.side = side_from_name(e.value("side", std::string("boundary")));
        d.entries.push_back(
            {p, cplx{e.value("charge_re", 0.0), e.value("charge_im", 0.0)}});
    }
    return d;
}

json log_correlation_to_json(const LogCorrelation& lc) {
    json dims = json::array();
    for (const auto& de : lc.dims) {
        dims.push_back({{"re", de.point.coord.real()},
                        {"im", de.point.coord.imag()},
                        {"at_infinity", de.point.at_infinity},
                        {"lambda_plus_re", de.lambda_plus.real()},
                        {"lambda_plus_im", de.lambda_plus.imag()},
                        {"lambda_minus_re", de.lambda_minus.real()},
                        {"lambda_minus_im", de.lambda_minus.imag()}});
    }
    return json{{"log_modulus", lc.log_modulus}, {"phase", lc.phase}, {"dims", dims}};
}

json sle_params_to_json(const SleParams& p) {
    return json{{"kappa", p.kappa},
                {"a", p.a},
                {"b", p.b},
                {"mode", p.mode == FlowDirection::Forward ? "forward" : "backward"},
                {"central_charge", p.central_charge()}};
}

SleParams sle_params_from_json(const json& j) {
    require_keys(j, {"kappa", "mode", "sign"}, "sle_params");
    const double kappa = j.at("kappa").get<double>();
    const std::string mode = j.value("mode", std::string("forward"));
    const int sign = j.value("sign", 1);
    if (mode == "forward") return SleParams::forward(kappa, sign);
    if (mode == "backward") return SleParams::backward(kappa, sign);
    throw divisor_error("sle_params: unknown mode " + mode);
}

json martingale_report_to_json(const MartingaleReport& rep) {
    json cps = json::array();
    for (const auto& c : rep.checkpoints) {
        cps.push_back({{"t", c.t},
                       {"n_alive", c.n_alive},
                       {"n_swallowed", c.n_swallowed},
                       {"mean_re", c.mean.real()},
                       {"mean_im", c.mean.imag()},
                       {"std_err", c.std_err},
                       {"m0_re", c.m0.real()},
                       {"m0_im", c.m0.imag()},
                       {"z_score", c.z_score},
                       {"pass", c.pass}});
    }
    return json{{"observable", rep.observable_id}, {"seed", rep.seed},
                {"paths", rep.paths},              {"rel_tol", rep.rel_tol},
                {"checkpoints", cps},              {"inconclusive", rep.inconclusive},
                {"pass", rep.pass}};
}

json exponent_report_to_json(const ExponentReport& rep) {
    return json{{"slope", rep.slope},
                {"expected_slope", rep.expected_slope},
                {"slope_stderr", rep.slope_stderr},
                {"t_grid", rep.t_grid},
                {"means", rep.means},
                {"std_errs", rep.std_errs},
                {"paths", rep.paths},
                {"pass", rep.pass}};
}

json restriction_report_to_json(const RestrictionReport& rep) {
    return json{{"p_mc", rep.p_mc},
                {"p_raw", rep.p_raw},
                {"p_formula", rep.p_formula},
                {"ci", rep.ci},
                {"truncation_bias", rep.truncation_bias},
                {"paths", rep.paths},
                {"pass", rep.pass}};
}

DrivingConfig driving_config_from_json(const json& j) {
    require_keys(j,
                 {"kappa", "geometry", "direction", "drift_mode", "beta", "rho", "eta", "dt",
                  "t_end", "n_paths", "seed", "driving0", "noise_scale", "tracked"},
                 "driving config");
    DrivingConfig cfg;
    const double kappa = j.at("kappa").get<double>();
    const std::string direction = j.value("direction", std::string("forward"));
    cfg.params = direction == "backward" ? SleParams::backward(kappa) : SleParams::forward(kappa);
    const std::string geometry = j.value("geometry", std::string("chordal"));
    if (geometry == "chordal")
        cfg.geometry = Geometry::Chordal;
    else if (geometry == "radial")
        cfg.geometry = Geometry::Radial;
    else
        throw divisor_error("driving config: unknown geometry " + geometry);
    const std::string mode = j.value("drift_mode", std::string("standard"));
    if (mode == "standard")
        cfg.drift_mode = DriftMode::Standard;
    else if (mode == "rho_sum")
        cfg.drift_mode = DriftMode::RhoSum;
    else if (mode == "partition_gradient")
        cfg.drift_mode = DriftMode::PartitionGradient;
    else
        throw divisor_error("driving config: unknown drift_mode " + mode);
    cfg.seed = j.value("seed", 1ull);
    cfg.dt = j.value("dt", 1e-4);
    cfg.t_end = j.value("t_end", 1.0);
    cfg.driving0 = j.value("driving0", 0.0);
    cfg.noise_scale = j.value("noise_scale", 1.0);
    cfg.eta = j.value("eta", 0.0);
    if (j.contains("rho")) {
        for (const auto& fp : j.at("rho")) {
            require_keys(fp, {"re", "im", "angle", "rho"}, "force point");
            cplx q;
            if (fp.contains("angle")) {
                const double ang = fp.at("angle").get<double>();
                q = std::exp(cplx{0.0, ang});
            } else {
                q = cplx{fp.value("re", 0.0), fp.value("im", 0.0)};
            }
            cfg.force_points.push_back({q, fp.at("rho").get<double>()});
        }
    }
    std::vector<std::pair<double, double>> fps;
    for (const auto& [q, rho] : cfg.force_points) {
        if (cfg.geometry == Geometry::Chordal)
            fps.push_back({q.real(), rho});
        else
            fps.push_back({std::arg(q), rho});
    }
    if (j.contains("beta")) {
        cfg.beta = divisor_from_json(j.at("beta"));
    } else if (cfg.geometry == Geometry::Chordal) {
        cfg.beta = chordal_beta_rho(cfg.params, cfg.driving0, fps);
    } else {
        cfg.beta = radial_beta(cfg.params, cfg.driving0, fps, cfg.eta);
    }
    return cfg;
}

}  // namespace slecg
