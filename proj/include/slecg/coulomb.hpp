// coulomb.hpp
// Coulomb gas correlation functions as differentials: log-form evaluation,
// conformal dimensions, Moebius transport, OPE exponential expectations and
// Lie derivatives of non-random differentials.
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "slecg/charges.hpp"

namespace slecg {

double pi();

// lambda_b(sigma) = sigma^2/2 - sigma*b
cplx lambda_b(cplx sigma, cplx b);

struct DimEntry {
    Point point;
    cplx lambda_plus{0.0, 0.0};
    cplx lambda_minus{0.0, 0.0};
};

// A correlation value held in log form: value = exp(log_modulus + i*phase)
// when finite. Phase is the per-factor principal-branch sum in stored entry
// order. dims lists the conformal dimensions at every input point.
struct LogCorrelation {
    double log_modulus = 0.0;
    double phase = 0.0;
    std::vector<DimEntry> dims;

    cplx log_value() const { return cplx{log_modulus, phase}; }
    cplx value() const { return std::exp(log_value()); }
};

// One node of a pair-structured charge configuration in a fixed chart.
// sp is the charge at z, sm the charge at z* (the Schottky-double mirror).
struct ChargedNode {
    cplx z{0.0, 0.0};
    bool at_inf = false;
    bool boundary = false;
    cplx sp{0.0, 0.0};
    cplx sm{0.0, 0.0};
};

// Charge configuration bound to a chart; all correlation formulas, node
// derivatives of log C and Lie derivative sums live here.
struct CorrelationContext {
    Uniformization chart = Uniformization::Sphere;
    cplx b{0.0, 0.0};
    std::vector<ChargedNode> nodes;

    static CorrelationContext from_plane_divisor(const Divisor& d);
    static CorrelationContext from_double_divisor(const DoubleDivisor& dd,
                                                  Uniformization chart);

    cplx log_value() const;          // log C, per-factor principal branches
    cplx dlog(std::size_t j) const;  // d/dz_j log C
    cplx dbarlog(std::size_t j) const;  // d/d(conj z_j) log C
    cplx d2log(std::size_t j) const;    // d^2/dz_j^2 log C (diagonal)
    cplx lambda_plus(std::size_t j) const { return lambda_b(nodes[j].sp, b); }
    cplx lambda_minus(std::size_t j) const { return lambda_b(nodes[j].sm, b); }

    std::vector<DimEntry> dims() const;
};

// Holomorphic vector field with derivative; at_infinity_* give the pushforward
// value/derivative at infinity in the chart z -> -1/z.
struct VectorField {
    std::function<cplx(cplx)> v;
    std::function<cplx(cplx)> dv;
    cplx v_at_infinity{0.0, 0.0};
    cplx dv_at_infinity{0.0, 0.0};
};

// Chordal Loewner field k_xi(z) = 1/(xi - z); vanishes at infinity.
VectorField chordal_field(double xi);
// Radial Loewner field v_zeta(z) = z(zeta+z)/(zeta-z).
VectorField radial_field(cplx zeta);
// User rational field from callables (no infinity data; nodes must be finite).
VectorField rational_field(std::function<cplx(cplx)> v, std::function<cplx(cplx)> dv);

// (L_v C)/C over the node set, skipping `exclude` (driving point) when given.
// Includes dimension terms and both holomorphic and conjugate parts.
cplx lie_derivative_log(const VectorField& field, const CorrelationContext& ctx,
                        std::optional<std::size_t> exclude = std::nullopt);

// --- operations -----------------------------------------------------------

// C over the sphere (identity chart, -1/z at infinity); the charge at
// infinity contributes dimensions but no product factors.
LogCorrelation log_correlation_plane(const Divisor& d);

// C_H[sigma+, sigma-] and C_D[sigma+, sigma-] in the identity charts.
LogCorrelation correlation_halfplane(const DoubleDivisor& dd);
LogCorrelation correlation_disc(const DoubleDivisor& dd);

struct MoebiusMap {
    cplx a{1.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{1.0, 0.0};

    cplx det() const { return a * d - b * c; }
    bool sends_to_infinity(const Point& p, double tol = 1e-13) const;
    // Image of a point with infinity bookkeeping.
    Point apply(const Point& p) const;
    // log of the chart-correct Jacobian at p (principal branch).
    cplx log_jacobian(const Point& p) const;
};

// C(tau z) * prod tau'(z_j)^{lambda_j} as a LogCorrelation. log_modulus is
// evaluated factor by factor on the image configuration (the content of the
// Moebius invariance theorem); the phase is branch-coherent: each pair factor
// is anchored to the source branch so the transported phase agrees with
// log_correlation_plane(d) exactly modulo 2*pi.
LogCorrelation moebius_transport(const Divisor& d, const MoebiusMap& map);

// Same transported value with per-factor principal phases on the image
// configuration (modulus identical; phase may differ by branch windings).
LogCorrelation moebius_image_correlation(const Divisor& d, const MoebiusMap& map);

// E O_beta[tau] = C[beta+tau]/C[beta]; beta NC_b, tau NC_0 (tol 1e-9),
// coincident points merge charges in the numerator. Divisors live on the
// double of the given chart.
LogCorrelation expectation_vertex(const Divisor& beta, const Divisor& tau,
                                  Uniformization chart);

// Finite-difference advection oracle for tests: sum_j v(z_j) d_j log C
// approximated by flowing every node by +/- eps * v.
cplx advection_log_fd(const VectorField& field, const CorrelationContext& ctx,
                      double eps, std::optional<std::size_t> exclude = std::nullopt);

}  // namespace slecg
