// restriction.hpp
// Chordal restriction machinery for a vertical-slit hull: the closed-form
// hull map, and the co-evolved map h_t = gtilde_t o Psi_K o g_t^{-1} tracked
// through its boundary jet at the driving point.
#pragma once

#include "slecg/driver.hpp"

namespace slecg {

// Vertical slit [x0, x0 + i h] attached to the real line; Psi maps H minus
// the slit onto H fixing 0 and infinity with Psi'(infinity) = 1.
struct VerticalSlit {
    double x0 = 1.0;
    double height = 0.3;

    cplx map(cplx z) const;
    cplx dmap(cplx z) const;
    // derivatives of Psi at a real point x away from the slit base
    double d1(double x) const;
    double d2(double x) const;
    double d3(double x) const;
    double d4(double x) const;
};

// Boundary jet of h_t at the driving point: value (image driving), first four
// derivatives. Updated per step by tilted-slit composition.
struct RestrictionJet {
    double xi_img = 0.0;
    double y = 1.0;   // h'(xi)
    double s2 = 0.0;  // h''(xi)
    double s3 = 0.0;  // h'''
    double s4 = 0.0;  // h''''
    double max_imag = 0.0;  // truncation health: largest imaginary leak seen
    bool broken = false;

    void init(const VerticalSlit& slit, double xi0);
    // advance under the original-chain step (driving xi -> xi + dxi, time dt)
    void step(double xi_old, double dxi, double dt);
};

// Full runner for one path of chordal SLE(kappa) against a slit hull.
//
// The avoidance probability is estimated by optional stopping of the
// restriction martingale M_t = h_t'(xi_t)^lambda: M is frozen the first time
// h'(xi) falls below y_stop (the curve has come conformally close to the
// slit) or at the configured horizon; E[M_{tau and T}] = M_0 = P(avoid) for
// every stopping rule, so early stopping keeps the boundary jet inside its
// reliable regime without biasing the estimate.
struct RestrictionPath {
    VerticalSlit slit;
    LoewnerState state;
    RestrictionJet jet;
    double lambda = 5.0 / 8.0;
    double mart = 1.0;
    bool mart_frozen = false;
    bool hit = false;  // a probe ran into the driving singularity
    double probe_eps = 1e-3;
    double y_stop = 0.3;
    int n_pairs = 0;

    void init(const VerticalSlit& hull, const SleParams& params, int pairs = 0);
    void advance(double xi_next, double dt);
    bool decided_hit() const;  // probe-pair side heuristic (diagnostics)
    double martingale() const { return mart; }
};

// M_0 of the restriction observable with force points (paper display at t=0):
// Psi'(xi)^lambda prod_j Psi'(q_j)^{lambda_j} ((Psi(xi)-Psi(q_j))/(xi-q_j))^{a beta_j}
// prod_{j<k} ((Psi(q_j)-Psi(q_k))/(q_j-q_k))^{beta_j beta_k}.
double restriction_m0(const VerticalSlit& slit, double xi,
                      const std::vector<std::pair<double, double>>& force_points_rhos,
                      const SleParams& params);

}  // namespace slecg
