#include "slecg/loewner.hpp"

#include <cmath>

#include "slecg/coulomb.hpp"

namespace slecg {

namespace {

const cplx kI{0.0, 1.0};

// Loewner vector field data: V(g) and its g-derivatives up to third order.
struct FieldJet {
    cplx v, v1, v2, v3;
};

FieldJet chordal_jet(cplx g, double xi, double sign) {
    const cplx d = g - xi;
    const cplx inv = 1.0 / d;
    const cplx inv2 = inv * inv;
    return {sign * 2.0 * inv, -sign * 2.0 * inv2, sign * 4.0 * inv2 * inv,
            -sign * 12.0 * inv2 * inv2};
}

FieldJet radial_jet(cplx g, cplx zeta, double sign) {
    const cplx d = zeta - g;
    const cplx inv = 1.0 / d;
    const cplx inv2 = inv * inv;
    const cplx v = g * (zeta + g) * inv;
    const cplx v1 = (zeta * zeta + 2.0 * zeta * g - g * g) * inv2;
    const cplx v2 = 4.0 * zeta * zeta * inv2 * inv;
    const cplx v3 = 12.0 * zeta * zeta * inv2 * inv2;
    return {sign * v, sign * v1, sign * v2, sign * v3};
}

struct PointJet {
    cplx g, g1, g2, g3;
};

PointJet rhs(const PointJet& p, double driving, Geometry geometry, double sign, int order) {
    const FieldJet f = (geometry == Geometry::Chordal)
                           ? chordal_jet(p.g, driving, sign)
                           : radial_jet(p.g, std::exp(kI * driving), sign);
    PointJet d{f.v, {0, 0}, {0, 0}, {0, 0}};
    if (order >= 1) d.g1 = f.v1 * p.g1;
    if (order >= 2) d.g2 = f.v2 * p.g1 * p.g1 + f.v1 * p.g2;
    if (order >= 3) d.g3 = f.v3 * p.g1 * p.g1 * p.g1 + 3.0 * f.v2 * p.g1 * p.g2 + f.v1 * p.g3;
    return d;
}

PointJet axpy(const PointJet& p, const PointJet& d, double h) {
    return {p.g + h * d.g, p.g1 + h * d.g1, p.g2 + h * d.g2, p.g3 + h * d.g3};
}

PointJet rk4(const PointJet& p, double d0, double d1, double dt, Geometry geo, double sign,
             int order) {
    const double dm = 0.5 * (d0 + d1);
    const PointJet k1 = rhs(p, d0, geo, sign, order);
    const PointJet k2 = rhs(axpy(p, k1, dt / 2), dm, geo, sign, order);
    const PointJet k3 = rhs(axpy(p, k2, dt / 2), dm, geo, sign, order);
    const PointJet k4 = rhs(axpy(p, k3, dt), d1, geo, sign, order);
    PointJet out = p;
    out.g += dt / 6.0 * (k1.g + 2.0 * k2.g + 2.0 * k3.g + k4.g);
    out.g1 += dt / 6.0 * (k1.g1 + 2.0 * k2.g1 + 2.0 * k3.g1 + k4.g1);
    out.g2 += dt / 6.0 * (k1.g2 + 2.0 * k2.g2 + 2.0 * k3.g2 + k4.g2);
    out.g3 += dt / 6.0 * (k1.g3 + 2.0 * k2.g3 + 2.0 * k3.g3 + k4.g3);
    return out;
}

double dist_to_driving(cplx g, double driving, Geometry geo) {
    if (geo == Geometry::Chordal) return std::abs(g - driving);
    return std::abs(g - std::exp(kI * driving));
}

// signed gap of a boundary image from the driving value
double boundary_gap(cplx g, double driving, Geometry geo) {
    if (geo == Geometry::Chordal) return g.real() - driving;
    return std::remainder(std::arg(g) - driving, 2.0 * pi());
}

// Integrates one point over [t, t+dt] with driving interpolated linearly
// between d0 and d1; halves the step near the singularity. Returns false if
// the point is swallowed (forward mode) during the step.
bool integrate_point(PointJet& p, double d0, double d1, double dt, Geometry geo, double sign,
                     double t0, double* tau_out, int order) {
    // resolve the approach: the ODE moves g by about 2 dt / |g - xi|, so a
    // safe step keeps dt well under |g - xi|^2.
    // iterative halving; process sequentially from the left
    double s = 0.0;
    PointJet q = p;
    while (s < 1.0 - 1e-15) {
        double span = 1.0 - s;
        // choose the largest power-of-two fraction that is stable
        for (;;) {
            const double da = d0 + (d1 - d0) * s;
            const double db = d0 + (d1 - d0) * (s + span);
            const double dist = dist_to_driving(q.g, da, geo);
            if (sign > 0 && dist < kSwallowEps) {
                if (tau_out) *tau_out = t0 + s * dt;
                p = q;
                return false;
            }
            const double h = span * dt;
            const double safe = 0.1 * dist * dist;
            if (h <= safe || h <= kDtMin) {
                PointJet trial = rk4(q, da, db, h, geo, sign, order);
                const double dist_after = dist_to_driving(trial.g, db, geo);
                if (sign > 0 && dist_after < kSwallowEps) {
                    if (tau_out) *tau_out = t0 + (s + span) * dt;
                    p = trial;
                    return false;
                }
                if (sign < 0 && dist_after < kSwallowEps && h <= kDtMin)
                    throw divisor_error("backward flow: pole proximity at minimal step");
                q = trial;
                s += span;
                break;
            }
            span *= 0.5;
        }
    }
    p = q;
    return true;
}

void step_impl(LoewnerState& state, double driving_next, double dt, Geometry geo, double sign) {
    if (dt < 0) throw divisor_error("step: dt must be >= 0");
    if (dt == 0.0) {
        state.driving = driving_next;
        return;
    }
    const double d0 = state.driving;
    for (auto& tp : state.tracked) {
        if (!tp.alive) continue;
        const double gap_before =
            tp.boundary ? boundary_gap(tp.g, d0, geo) : 0.0;
        PointJet p{tp.g, tp.g1, tp.g2, tp.g3};
        double tau = -1.0;
        const bool ok =
            integrate_point(p, d0, driving_next, dt, geo, sign, state.t, &tau, state.jet_order);
        tp.g = p.g;
        tp.g1 = p.g1;
        tp.g2 = p.g2;
        tp.g3 = p.g3;
        if (!ok) {
            tp.alive = false;
            tp.tau = tau;
        } else if (tp.boundary && sign > 0) {
            // the driving jumped across the boundary image: point swallowed
            const double gap_after = boundary_gap(tp.g, driving_next, geo);
            if (gap_before * gap_after < 0.0 &&
                std::abs(gap_before) + std::abs(gap_after) < 0.5 * pi()) {
                tp.alive = false;
                tp.tau = state.t + dt;
            }
        }
    }
    for (auto& fp : state.force_points) {
        if (!fp.alive) continue;
        PointJet p{fp.image, {0, 0}, {0, 0}, {0, 0}};
        double tau = -1.0;
        const bool ok = integrate_point(p, d0, driving_next, dt, geo, sign, state.t, &tau, 0);
        fp.image = p.g;
        if (fp.boundary) {
            // boundary is invariant under the flow; remove integrator drift
            if (geo == Geometry::Chordal)
                fp.image = cplx{fp.image.real(), 0.0};
            else
                fp.image /= std::abs(fp.image);
        }
        if (!ok) {
            fp.alive = false;
            state.truncated = true;
        }
    }
    state.t += dt;
    state.driving = driving_next;
}

}  // namespace

cplx LoewnerState::driving_point() const {
    if (geometry == Geometry::Chordal) return {driving, 0.0};
    return std::exp(kI * driving);
}

void LoewnerState::track(cplx z0) {
    TrackedPoint tp;
    tp.z0 = z0;
    tp.g = z0;
    tp.boundary = (geometry == Geometry::Chordal)
                      ? std::abs(z0.imag()) <= kPointTol
                      : std::abs(std::abs(z0) - 1.0) <= 1e-9;
    tracked.push_back(tp);
}

void LoewnerState::add_force_point(cplx q, bool boundary) {
    ForcePointState fp;
    fp.q0 = q;
    fp.image = q;
    fp.boundary = boundary;
    force_points.push_back(fp);
}

LoewnerState make_state(Geometry geometry, FlowDirection direction, double driving0) {
    LoewnerState s;
    s.geometry = geometry;
    s.direction = direction;
    s.driving = driving0;
    return s;
}

void step_chordal(LoewnerState& state, double xi_next, double dt) {
    step_impl(state, xi_next, dt, Geometry::Chordal, +1.0);
}

void step_radial(LoewnerState& state, double theta_next, double dt) {
    step_impl(state, theta_next, dt, Geometry::Radial, +1.0);
}

void step_backward(LoewnerState& state, double driving_next, double dt, Geometry geometry) {
    step_impl(state, driving_next, dt, geometry, -1.0);
}

void step(LoewnerState& state, double driving_next, double dt) {
    const double sign = state.direction == FlowDirection::Forward ? +1.0 : -1.0;
    step_impl(state, driving_next, dt, state.geometry, sign);
}

std::optional<double> swallow_time(const LoewnerState& state, cplx z0) {
    for (const auto& tp : state.tracked) {
        if (std::abs(tp.z0 - z0) <= kPointTol) {
            if (tp.tau >= 0.0) return tp.tau;
            return std::nullopt;
        }
    }
    throw divisor_error("swallow_time: point is not tracked");
}

}  // namespace slecg
