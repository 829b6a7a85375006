// partition.hpp
// Partition functions Z_beta, their logarithmic derivatives (SLE drifts), and
// residual checkers for the null-vector and BPZ-Cardy equations, forward
// (Dirichlet) and backward (Neumann) variants.
#pragma once

#include "slecg/coulomb.hpp"

namespace slecg {

enum class FlowDirection { Forward, Backward };
enum class Geometry { Chordal, Radial };

struct SleParams {
    double kappa = 0.0;
    double a = 0.0;
    double b = 0.0;
    FlowDirection mode = FlowDirection::Forward;

    // forward: a = sign*sqrt(2/kappa), b = a(kappa/4 - 1), 2a(a+b) = 1
    static SleParams forward(double kappa, int sign = +1);
    // backward: b = -a(kappa/4 + 1), 2a(a+b) = -1
    static SleParams backward(double kappa, int sign = +1);

    double central_charge() const;
    void validate(double tol = 1e-12) const;
};

// Effective charge/dimension helpers for the one-leg operator.
double h12(const SleParams& p);    // (6-kappa)/(2 kappa) = a^2/2 - a b
double h012(const SleParams& p);   // (kappa-2)(6-kappa)/(16 kappa) = a^2/8 - b^2/2

// Standard background charges.
Divisor standard_chordal_beta(const SleParams& p, double xi);
// Radial driving charge a at e^{i theta}, force charges beta_k at circle
// points, spin parameter eta; balancing symmetric pair at 0 and 0*.
Divisor radial_beta(const SleParams& p, double theta,
                    const std::vector<std::pair<double, double>>& force_angles_rhos,
                    double eta);
// Chordal with force points: rho_k at boundary q_k, balancing charge at infinity.
Divisor chordal_beta_rho(const SleParams& p, double xi,
                         const std::vector<std::pair<double, double>>& force_points_rhos);

// Z_beta = |C_(b)[beta]|; backward mode maps (b, beta) -> (-ib, -i beta).
// beta is a divisor on the double; must be symmetric and NC_b.
double z_beta(const Divisor& beta, Uniformization chart, const SleParams& params);

// Internal evaluation context around a boundary driving node.
struct DrivingContext {
    CorrelationContext ctx;
    std::size_t driving = 0;

    // d log C / d xi and the second derivative (chordal, identity chart of H)
    cplx s1_chordal() const;
    cplx s2_chordal() const;
    // d log C / d zeta and derivative (radial, identity chart of D)
    cplx s1_radial() const;
    cplx s2_radial() const;
};

// Builds the context, locating the driving entry at xi (chordal boundary
// point) or e^{i theta} (radial); applies the backward substitution when
// params.mode is Backward. Throws when the driving entry is missing.
DrivingContext make_driving_context(const Divisor& beta, double xi_or_theta,
                                    const SleParams& params, Geometry geometry);

// kappa * d/dxi log Z_{beta_xi}; beta carries charge a at boundary xi.
double drift_chordal(const Divisor& beta, double xi, const SleParams& params);
// kappa * d/dtheta log Z_{beta_zeta}, zeta = e^{i theta}.
double drift_radial(const Divisor& beta, double theta, const SleParams& params);

// Null-vector residuals, normalized by max(1, |LHS|, |RHS|).
// chordal: (1/2a^2) d^2_xi Z = L-check_{k_xi} Z  (real equation on Z = |C|)
// radial:  L(zeta) C = L-check_{v_zeta} C with
//          L(e^{i theta}) = -kappa((1/2) d^2_theta + i h d_theta) + h.
double null_vector_residual(const Divisor& beta, double xi_or_theta,
                            const SleParams& params, Geometry geometry);

// BPZ-Cardy residual on vertex observables: E-hat_xi X = C[beta_xi + tau] /
// C[beta_xi], tau NC_0. Normalized as above.
double bpz_cardy_residual(const Divisor& beta, const Divisor& tau, double xi_or_theta,
                          const SleParams& params, Geometry geometry);

}  // namespace slecg
