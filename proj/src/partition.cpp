#include "slecg/partition.hpp"

#include <cmath>

namespace slecg {

namespace {
const cplx kI{0.0, 1.0};
}

SleParams SleParams::forward(double kappa, int sign) {
    SleParams p;
    p.kappa = kappa;
    p.a = sign * std::sqrt(2.0 / kappa);
    p.b = p.a * (kappa / 4.0 - 1.0);
    p.mode = FlowDirection::Forward;
    return p;
}

SleParams SleParams::backward(double kappa, int sign) {
    SleParams p;
    p.kappa = kappa;
    p.a = sign * std::sqrt(2.0 / kappa);
    p.b = -p.a * (kappa / 4.0 + 1.0);
    p.mode = FlowDirection::Backward;
    return p;
}

double SleParams::central_charge() const {
    return mode == FlowDirection::Forward ? 1.0 - 12.0 * b * b : 1.0 + 12.0 * b * b;
}

void SleParams::validate(double tol) const {
    if (!(kappa > 0)) throw divisor_error("SleParams: kappa must be positive");
    const double target = mode == FlowDirection::Forward ? 1.0 : -1.0;
    if (std::abs(2.0 * a * (a + b) - target) > tol)
        throw divisor_error("SleParams: 2a(a+b) relation violated");
}

double h12(const SleParams& p) { return 0.5 * p.a * p.a - p.a * p.b; }

double h012(const SleParams& p) { return p.a * p.a / 8.0 - p.b * p.b / 2.0; }

Divisor standard_chordal_beta(const SleParams& p, double xi) {
    Divisor beta;
    beta.b = p.b;
    add_entry(beta, make_boundary_point(xi), p.a);
    add_entry(beta, make_infinity_point(), 2.0 * p.b - p.a);
    return beta;
}

Divisor chordal_beta_rho(const SleParams& p, double xi,
                         const std::vector<std::pair<double, double>>& force_points_rhos) {
    Divisor beta;
    beta.b = p.b;
    add_entry(beta, make_boundary_point(xi), p.a);
    double sum = 0.0;
    const double s2k = std::sqrt(2.0 * p.kappa);
    for (const auto& [q, rho] : force_points_rhos) {
        if (std::abs(q - xi) < 1e-6)
            throw divisor_error("pole error: force point coincides with the driving point");
        const double bk = rho / s2k;
        add_entry(beta, make_boundary_point(q), bk);
        sum += bk;
    }
    add_entry(beta, make_infinity_point(), 2.0 * p.b - p.a - sum);
    return beta;
}

Divisor radial_beta(const SleParams& p, double theta,
                    const std::vector<std::pair<double, double>>& force_angles_rhos,
                    double eta) {
    Divisor beta;
    beta.b = p.b;
    cplx zeta = std::exp(kI * theta);
    Point drive{zeta, false, Side::Boundary};
    add_entry(beta, drive, p.a);
    double sum = 0.0;
    const double s2k = std::sqrt(2.0 * p.kappa);
    for (const auto& [ang, rho] : force_angles_rhos) {
        if (std::abs(std::remainder(ang - theta, 2.0 * pi())) < 1e-6)
            throw divisor_error("pole error: force point coincides with the driving point");
        const double bk = rho / s2k;
        Point q{std::exp(kI * ang), false, Side::Boundary};
        add_entry(beta, q, bk);
        sum += bk;
    }
    const double delta = eta * p.a;
    const cplx bq = p.b - 0.5 * cplx{p.a + sum, delta};
    add_entry(beta, make_interior_point({0.0, 0.0}), bq);
    Point zero_star = make_infinity_point(Side::ReflectedInterior);
    add_entry(beta, zero_star, std::conj(bq));
    return beta;
}

namespace {

// backward mode reuses the forward machinery under (b, beta) -> (-ib, -i beta)
Divisor effective_divisor(const Divisor& beta, const SleParams& params) {
    if (params.mode == FlowDirection::Forward) return beta;
    Divisor out = scale_charges(beta, -kI);
    out.b = -kI * cplx{params.b, 0.0};
    return out;
}

CorrelationContext context_for(const Divisor& beta, Uniformization chart) {
    if (chart == Uniformization::Sphere) return CorrelationContext::from_plane_divisor(beta);
    return CorrelationContext::from_double_divisor(pair_form(beta, chart), chart);
}

std::size_t find_driving(const CorrelationContext& ctx, const cplx& where) {
    for (std::size_t j = 0; j < ctx.nodes.size(); ++j)
        if (!ctx.nodes[j].at_inf && std::abs(ctx.nodes[j].z - where) <= 1e-9)
            return j;
    throw divisor_error("driving charge not found at the requested location");
}

}  // namespace

double z_beta(const Divisor& beta, Uniformization chart, const SleParams& params) {
    if (!symmetrize_check(beta, chart == Uniformization::Sphere ? Uniformization::HalfPlane : chart,
                          1e-9))
        throw divisor_error("z_beta requires a symmetric background charge");
    if (!check_neutrality(beta, NeutralityLevel::NCb, 1e-9))
        throw divisor_error("z_beta requires NC_b");
    const Divisor eff = effective_divisor(beta, params);
    const CorrelationContext ctx = context_for(eff, chart);
    return std::exp(ctx.log_value().real());
}

cplx DrivingContext::s1_chordal() const { return ctx.dlog(driving); }

cplx DrivingContext::s2_chordal() const { return ctx.d2log(driving); }

cplx DrivingContext::s1_radial() const { return ctx.dlog(driving); }

cplx DrivingContext::s2_radial() const { return ctx.d2log(driving); }

DrivingContext make_driving_context(const Divisor& beta, double xi_or_theta,
                                    const SleParams& params, Geometry geometry) {
    const Divisor eff = effective_divisor(beta, params);
    DrivingContext dc;
    if (geometry == Geometry::Chordal) {
        dc.ctx = context_for(eff, Uniformization::HalfPlane);
        dc.driving = find_driving(dc.ctx, cplx{xi_or_theta, 0.0});
    } else {
        dc.ctx = context_for(eff, Uniformization::Disc);
        dc.driving = find_driving(dc.ctx, std::exp(kI * xi_or_theta));
    }
    return dc;
}

double drift_chordal(const Divisor& beta, double xi, const SleParams& params) {
    const DrivingContext dc = make_driving_context(beta, xi, params, Geometry::Chordal);
    return params.kappa * dc.s1_chordal().real();
}

double drift_radial(const Divisor& beta, double theta, const SleParams& params) {
    const DrivingContext dc = make_driving_context(beta, theta, params, Geometry::Radial);
    const cplx zeta = dc.ctx.nodes[dc.driving].z;
    return params.kappa * (kI * zeta * dc.s1_radial()).real();
}

namespace {

double normalized_residual(cplx lhs, cplx rhs) {
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    return std::abs(lhs - rhs) / scale;
}

}  // namespace

double null_vector_residual(const Divisor& beta, double xi_or_theta, const SleParams& params,
                            Geometry geometry) {
    if (params.mode != FlowDirection::Forward)
        throw divisor_error("null_vector_residual requires forward parameters");
    const DrivingContext dc = make_driving_context(beta, xi_or_theta, params, geometry);
    const double a2 = params.a * params.a;
    if (geometry == Geometry::Chordal) {
        // (1/2a^2) Z''/Z with Z = exp(Re log C): Z''/Z = Re(logC)'' + (Re(logC)')^2
        const double u1 = dc.s1_chordal().real();
        const double u2 = dc.s2_chordal().real() + u1 * u1;
        const cplx lhs = u2 / (2.0 * a2);
        const VectorField k = chordal_field(xi_or_theta);
        const cplx rhs = lie_derivative_log(k, dc.ctx, dc.driving).real();
        return normalized_residual(lhs, rhs);
    }
    const cplx zeta = dc.ctx.nodes[dc.driving].z;
    const cplx s1 = dc.s1_radial();
    const cplx s2 = dc.s2_radial();
    const cplx f1 = kI * zeta * s1;  // d/dtheta log C
    // (log C)'' = -zeta s1 - zeta^2 s2, and C''/C = (log C)'' + ((log C)')^2
    const cplx c2_over_c = -zeta * s1 - zeta * zeta * s2 + f1 * f1;
    const double h = h12(params);
    const cplx lhs = -params.kappa * (0.5 * c2_over_c + kI * h * f1) + h;
    const VectorField v = radial_field(zeta);
    const cplx rhs = lie_derivative_log(v, dc.ctx, dc.driving);
    return normalized_residual(lhs, rhs);
}

double bpz_cardy_residual(const Divisor& beta, const Divisor& tau, double xi_or_theta,
                          const SleParams& params, Geometry geometry) {
    if (std::abs(tau.total_charge()) > 1e-9)
        throw divisor_error("bpz_cardy_residual: tau must satisfy NC_0");
    Divisor tau_b = tau;
    tau_b.b = beta.b;
    const Divisor merged = add(beta, tau_b);

    const DrivingContext num = make_driving_context(merged, xi_or_theta, params, geometry);
    const DrivingContext den = make_driving_context(beta, xi_or_theta, params, geometry);
    const double a2 = params.a * params.a;
    const double sign = params.mode == FlowDirection::Forward ? 1.0 : -1.0;

    if (geometry == Geometry::Chordal) {
        const cplx g1 = num.s1_chordal();
        const cplx g2 = num.s2_chordal();
        const cplx h1 = den.s1_chordal();
        const cplx h2 = den.s2_chordal();
        const cplx d1 = g1 - h1;
        const cplx d2 = g2 - h2;
        const cplx lhs = sign * (d2 + d1 * d1 + 2.0 * h1.real() * d1) / (2.0 * a2);
        const VectorField k = chordal_field(xi_or_theta);
        const cplx rhs =
            lie_derivative_log(k, num.ctx, num.driving) - lie_derivative_log(k, den.ctx, den.driving);
        return normalized_residual(lhs, rhs);
    }

    const cplx zeta = num.ctx.nodes[num.driving].z;
    const cplx g1 = num.s1_radial();
    const cplx g2 = num.s2_radial();
    const cplx h1 = den.s1_radial();
    const cplx h2 = den.s2_radial();
    // theta-derivatives of log(C_num/C_den)
    const cplx d1 = kI * zeta * (g1 - h1);
    const cplx d2 = -zeta * (g1 - h1) - zeta * zeta * (g2 - h2);
    const double dlogz = (kI * zeta * h1).real();  // d/dtheta log Z
    const cplx lhs = sign * (-2.0 / a2) * (0.5 * (d2 + d1 * d1) + dlogz * d1);
    const VectorField v = radial_field(zeta);
    const cplx rhs =
        lie_derivative_log(v, num.ctx, num.driving) - lie_derivative_log(v, den.ctx, den.driving);
    return normalized_residual(lhs, rhs);
}

}  // namespace slecg
