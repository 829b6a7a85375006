// sampling.hpp
// Random configuration generators shared by the CLI property checks and the
// test suites.
#pragma once

#include "slecg/driver.hpp"

namespace slecg {
namespace sampling {

inline double uniform(PathRng& rng, double lo, double hi) {
    return lo + (hi - lo) * rng.next_unit();
}

// Random neutral divisor in the plane: n-1 free charges plus a balancing one,
// all points separated by at least min_sep.
inline Divisor neutral_plane_divisor(PathRng& rng, int n_points, double b,
                                     double charge_range = 2.0, double min_sep = 0.25) {
    Divisor d;
    d.b = b;
    std::vector<cplx> pts;
    while (static_cast<int>(pts.size()) < n_points) {
        const cplx z{uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0)};
        bool ok = true;
        for (const auto& p : pts)
            if (std::abs(p - z) < min_sep) ok = false;
        if (ok) pts.push_back(z);
    }
    cplx total{0.0, 0.0};
    for (int i = 0; i < n_points - 1; ++i) {
        const cplx q{uniform(rng, -charge_range, charge_range), 0.0};
        add_entry(d, make_interior_point(pts[i]), q);
        total += q;
    }
    add_entry(d, make_interior_point(pts[n_points - 1]), 2.0 * b - total);
    return d;
}

inline MoebiusMap random_moebius(PathRng& rng) {
    for (;;) {
        MoebiusMap m;
        m.a = {uniform(rng, -1.5, 1.5), uniform(rng, -1.5, 1.5)};
        m.b = {uniform(rng, -1.5, 1.5), uniform(rng, -1.5, 1.5)};
        m.c = {uniform(rng, -1.5, 1.5), uniform(rng, -1.5, 1.5)};
        m.d = {uniform(rng, -1.5, 1.5), uniform(rng, -1.5, 1.5)};
        if (std::abs(m.det()) > 0.3) return m;
    }
}

// Symmetric chordal background charge: driving a at xi, real boundary force
// charges, optional conjugate interior pair, balancing charge at infinity.
inline Divisor symmetric_chordal_beta(PathRng& rng, const SleParams& p, double xi,
                                      int n_boundary, int n_interior) {
    Divisor beta;
    beta.b = p.b;
    add_entry(beta, make_boundary_point(xi), p.a);
    cplx total = p.a;
    for (int i = 0; i < n_boundary; ++i) {
        double q;
        do {
            q = uniform(rng, -3.0, 3.0);
        } while (std::abs(q - xi) < 0.5 || beta.has_entry_at(make_boundary_point(q), 0.4));
        const double c = uniform(rng, -0.8, 0.8);
        add_entry(beta, make_boundary_point(q), c);
        total += c;
    }
    for (int i = 0; i < n_interior; ++i) {
        const cplx z{uniform(rng, -2.0, 2.0), uniform(rng, 0.5, 2.0)};
        const cplx c{uniform(rng, -0.6, 0.6), uniform(rng, -0.6, 0.6)};
        add_entry(beta, make_interior_point(z), c);
        Point zs{std::conj(z), false, Side::ReflectedInterior};
        add_entry(beta, zs, std::conj(c));
        total += 2.0 * c.real();
    }
    add_entry(beta, make_infinity_point(), 2.0 * p.b - total);
    return beta;
}

// Symmetric radial background charge: driving a at e^{i theta}, real circle
// force charges, spin eta, balancing pair at 0 and 0*.
inline Divisor symmetric_radial_beta(PathRng& rng, const SleParams& p, double theta,
                                     int n_boundary, double eta) {
    std::vector<std::pair<double, double>> forces;
    const double s2k = std::sqrt(2.0 * p.kappa);
    for (int i = 0; i < n_boundary; ++i) {
        double ang;
        bool ok;
        do {
            ang = uniform(rng, 0.3, 2.0 * pi() - 0.3);
            ok = std::abs(std::remainder(ang - theta, 2.0 * pi())) > 0.4;
            for (const auto& [a0, r0] : forces)
                if (std::abs(std::remainder(ang - a0, 2.0 * pi())) < 0.4) ok = false;
        } while (!ok);
        forces.push_back({ang, uniform(rng, -0.8, 0.8) * s2k});
    }
    return radial_beta(p, theta, forces, eta);
}

// NC_0 divisor of vertex-observable type: a conjugate-symmetric interior pair
// (non-chiral vertex) or two plus-charges with opposite charges.
inline Divisor vertex_tau(PathRng& rng, Uniformization chart, double b, bool spin_pair) {
    Divisor tau;
    tau.b = b;
    if (chart == Uniformization::HalfPlane) {
        const cplx z1{uniform(rng, -1.5, 1.5), uniform(rng, 0.6, 1.8)};
        const double s = uniform(rng, 0.2, 0.9);
        if (spin_pair) {
            add_entry(tau, make_interior_point(z1), s);
            Point zs{std::conj(z1), false, Side::ReflectedInterior};
            add_entry(tau, zs, -s);
        } else {
            cplx z2;
            do {
                z2 = cplx{uniform(rng, -1.5, 1.5), uniform(rng, 0.6, 1.8)};
            } while (std::abs(z2 - z1) < 0.4);
            add_entry(tau, make_interior_point(z1), s);
            add_entry(tau, make_interior_point(z2), -s);
        }
        return tau;
    }
    const double r1 = uniform(rng, 0.2, 0.7);
    const double a1 = uniform(rng, 0.0, 2.0 * pi());
    const cplx z1 = r1 * std::exp(cplx{0.0, a1});
    const double s = uniform(rng, 0.2, 0.9);
    if (spin_pair) {
        add_entry(tau, make_interior_point(z1), s);
        Point zs{1.0 / std::conj(z1), false, Side::ReflectedInterior};
        add_entry(tau, zs, -s);
        return tau;
    }
    cplx z2;
    do {
        const double r2 = uniform(rng, 0.2, 0.7);
        const double a2 = uniform(rng, 0.0, 2.0 * pi());
        z2 = r2 * std::exp(cplx{0.0, a2});
    } while (std::abs(z2 - z1) < 0.3);
    add_entry(tau, make_interior_point(z1), s);
    add_entry(tau, make_interior_point(z2), -s);
    return tau;
}

}  // namespace sampling
}  // namespace slecg
