#include "slecg/restriction.hpp"

#include <cmath>

namespace slecg {

cplx VerticalSlit::map(cplx z) const {
    const cplx zeta = z - x0;
    // branch ~ zeta at infinity, cut along the slit
    const cplx w = std::sqrt(zeta * zeta + height * height);
    // select the sheet continuous on H \ slit: w aligned with zeta
    const cplx out = (w.real() * zeta.real() + w.imag() * zeta.imag() >= 0.0) ? w : -w;
    const double r = std::sqrt(x0 * x0 + height * height);
    return out + r;  // Psi(0) = 0: phi(-x0) = -r
}

cplx VerticalSlit::dmap(cplx z) const {
    const cplx zeta = z - x0;
    const cplx w = std::sqrt(zeta * zeta + height * height);
    const cplx phi = (w.real() * zeta.real() + w.imag() * zeta.imag() >= 0.0) ? w : -w;
    return zeta / phi;
}

double VerticalSlit::d1(double x) const {
    const double zeta = x - x0;
    const double phi = (zeta >= 0 ? 1.0 : -1.0) * std::sqrt(zeta * zeta + height * height);
    return zeta / phi;
}

double VerticalSlit::d2(double x) const {
    const double zeta = x - x0;
    const double phi = (zeta >= 0 ? 1.0 : -1.0) * std::sqrt(zeta * zeta + height * height);
    return height * height / (phi * phi * phi);
}

double VerticalSlit::d3(double x) const {
    const double zeta = x - x0;
    const double phi = (zeta >= 0 ? 1.0 : -1.0) * std::sqrt(zeta * zeta + height * height);
    return -3.0 * height * height * zeta / std::pow(phi, 5);
}

double VerticalSlit::d4(double x) const {
    const double zeta = x - x0;
    const double phi = (zeta >= 0 ? 1.0 : -1.0) * std::sqrt(zeta * zeta + height * height);
    return -3.0 * height * height * (phi * phi - 5.0 * zeta * zeta) / std::pow(phi, 7);
}

void RestrictionJet::init(const VerticalSlit& slit, double xi0) {
    xi_img = slit.map(cplx{xi0, 0.0}).real();
    y = slit.d1(xi0);
    s2 = slit.d2(xi0);
    s3 = slit.d3(xi0);
    s4 = slit.d4(xi0);
    max_imag = 0.0;
    broken = false;
}

// One step of the boundary jet of h_t = gtilde_t o Psi o g_t^{-1} at the
// driving point. Split into a re-expansion at the moved driving value and the
// pathwise flow of h,
//   dh(z)/dt = 2 h'(xi)^2/(h(z) - h(xi)) - 2 h'(z)/(z - xi),
// whose expansion at z = xi gives closed ODEs for (xi_img, y, s2, s3); the
// s4 equation is truncated (it would need the fifth derivative). The shift
// is subdivided when it is not small against the jet's own convergence
// radius estimate (the expansion degrades as the curve nears the hull).
void RestrictionJet::step(double xi_old, double dxi, double dt) {
    (void)xi_old;
    if (broken) return;
    double radius = 1e30;
    const auto ratio = [&radius](double num, double den) {
        if (std::abs(den) > 0.0) radius = std::min(radius, std::abs(num / den));
    };
    ratio(2.0 * y, s2);
    ratio(3.0 * s2, s3);
    ratio(4.0 * s3, s4);
    int m = 1;
    if (std::abs(dxi) > 0.05 * radius)
        m = static_cast<int>(std::ceil(std::abs(dxi) / (0.05 * radius)));
    if (m > 4096) {
        broken = true;  // expansion radius collapsed onto the hull
        return;
    }
    const double du = dxi / m;
    const double dtau = dt / m;
    for (int k = 0; k < m; ++k) {
        // re-expand the jet at the shifted driving value
        const double u = du;
        xi_img += y * u + s2 * u * u / 2.0 + s3 * u * u * u / 6.0 + s4 * u * u * u * u / 24.0;
        y += s2 * u + s3 * u * u / 2.0 + s4 * u * u * u / 6.0;
        s2 += s3 * u + s4 * u * u / 2.0;
        s3 += s4 * u;
        if (!(y > 0.0) || !std::isfinite(y)) {
            broken = true;
            return;
        }
        // flow
        const double y0 = y, a2 = s2, a3 = s3, a4 = s4;
        xi_img += -3.0 * a2 * dtau;
        y += (a2 * a2 / (2.0 * y0) - 4.0 / 3.0 * a3) * dtau;
        s2 += (-a2 * a2 * a2 / (2.0 * y0 * y0) + 2.0 / 3.0 * a2 * a3 / y0 - 5.0 / 6.0 * a4) *
              dtau;
        s3 += (0.75 * a2 * a2 * a2 * a2 / (y0 * y0 * y0) - 1.5 * a2 * a2 * a3 / (y0 * y0) +
               a3 * a3 / (3.0 * y0) + 0.5 * a2 * a4 / y0) *
              dtau;
        if (!(y > 0.0) || !std::isfinite(y) || !std::isfinite(s4)) {
            broken = true;
            return;
        }
    }
}

void RestrictionPath::init(const VerticalSlit& hull, const SleParams& params, int pairs) {
    slit = hull;
    n_pairs = pairs;
    state = make_state(Geometry::Chordal, FlowDirection::Forward, 0.0);
    state.jet_order = 0;
    lambda = h12(params);
    // optional probe pairs (diagnostics only; the estimator rests on the jet)
    for (int i = 0; i < n_pairs; ++i) {
        const double y = hull.height * (0.125 + 0.8 * i / std::max(1, n_pairs - 1));
        state.track(cplx{slit.x0 - probe_eps, y});
        state.track(cplx{slit.x0 + probe_eps, y});
    }
    jet.init(hull, 0.0);
    mart = std::pow(jet.y, lambda);
    mart_frozen = false;
    hit = false;
}

void RestrictionPath::advance(double xi_next, double dt) {
    const double xi_old = state.driving;
    step_chordal(state, xi_next, dt);
    if (!mart_frozen) {
        jet.step(xi_old, xi_next - xi_old, dt);
        if (jet.broken) {
            mart_frozen = true;  // freeze at the last healthy value
        } else {
            mart = std::pow(jet.y, lambda);
            if (jet.y < y_stop) mart_frozen = true;  // optional stopping
        }
    }
    for (const auto& tp : state.tracked)
        if (!tp.alive) hit = true;  // probe ran into the singularity
}

bool RestrictionPath::decided_hit() const {
    if (hit) return true;
    const double xi = state.driving;
    for (int i = 0; i < n_pairs; ++i) {
        const auto& left = state.tracked[2 * i];
        const auto& right = state.tracked[2 * i + 1];
        const double sl = left.g.real() - xi;
        const double sr = right.g.real() - xi;
        if (sl * sr < 0.0) return true;  // pair separated by the curve
    }
    return false;
}

double restriction_m0(const VerticalSlit& slit, double xi,
                      const std::vector<std::pair<double, double>>& force_points_rhos,
                      const SleParams& params) {
    const double s2k = std::sqrt(2.0 * params.kappa);
    double logm = h12(params) * std::log(slit.d1(xi));
    const double psi_xi = slit.map(cplx{xi, 0.0}).real();
    std::vector<double> bk, psi_q, q;
    for (const auto& [qj, rho] : force_points_rhos) {
        bk.push_back(rho / s2k);
        q.push_back(qj);
        psi_q.push_back(slit.map(cplx{qj, 0.0}).real());
    }
    for (std::size_t j = 0; j < q.size(); ++j) {
        const double lam = (lambda_b(cplx{bk[j], 0.0}, cplx{params.b, 0.0})).real();
        logm += lam * std::log(slit.d1(q[j]));
        logm += params.a * bk[j] * std::log(std::abs((psi_xi - psi_q[j]) / (xi - q[j])));
        for (std::size_t k = j + 1; k < q.size(); ++k)
            logm += bk[j] * bk[k] * std::log(std::abs((psi_q[j] - psi_q[k]) / (q[j] - q[k])));
    }
    return std::exp(logm);
}

}  // namespace slecg
