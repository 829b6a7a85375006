#include "slecg/coulomb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace slecg {

double pi() { return std::numbers::pi; }

cplx lambda_b(cplx sigma, cplx b) { return 0.5 * sigma * sigma - sigma * b; }

namespace {

constexpr double kDegenerateTol = 1e-12;

bool negligible(const cplx& w) { return std::abs(w) == 0.0; }

// adds e * Log(base) with the principal branch; zero exponents are skipped
// (the 0^0 := 1 convention), zero bases with live exponent are degenerate.
void accumulate_factor(cplx& acc, const cplx& e, const cplx& base) {
    if (negligible(e)) return;
    if (std::abs(base) <= kDegenerateTol)
        throw divisor_error("degenerate configuration: vanishing correlation factor");
    acc += e * std::log(base);
}

}  // namespace

CorrelationContext CorrelationContext::from_plane_divisor(const Divisor& d) {
    CorrelationContext ctx;
    ctx.chart = Uniformization::Sphere;
    ctx.b = d.b;
    ctx.nodes.reserve(d.entries.size());
    for (const auto& e : d.entries) {
        ChargedNode n;
        n.z = e.point.coord;
        n.at_inf = e.point.at_infinity;
        n.boundary = (e.point.side == Side::Boundary);
        n.sp = e.charge;
        ctx.nodes.push_back(n);
    }
    return ctx;
}

CorrelationContext CorrelationContext::from_double_divisor(const DoubleDivisor& dd,
                                                           Uniformization chart) {
    validate_double_divisor(dd);
    CorrelationContext ctx;
    ctx.chart = chart;
    ctx.b = dd.plus.b;
    for (const auto& e : dd.plus.entries) {
        ChargedNode n;
        n.z = e.point.coord;
        n.at_inf = e.point.at_infinity;
        n.boundary = (e.point.side == Side::Boundary);
        n.sp = e.charge;
        ctx.nodes.push_back(n);
    }
    for (const auto& e : dd.minus.entries) {
        bool merged = false;
        for (auto& n : ctx.nodes) {
            if (n.at_inf == e.point.at_infinity &&
                (n.at_inf || std::abs(n.z - e.point.coord) <= kPointTol)) {
                n.sm += e.charge;
                merged = true;
                break;
            }
        }
        if (!merged) {
            ChargedNode n;
            n.z = e.point.coord;
            n.at_inf = e.point.at_infinity;
            n.boundary = false;
            n.sm = e.charge;
            ctx.nodes.push_back(n);
        }
    }
    return ctx;
}

cplx CorrelationContext::log_value() const {
    cplx acc{0.0, 0.0};
    const std::size_t n = nodes.size();
    for (std::size_t j = 0; j < n; ++j) {
        const auto& nj = nodes[j];
        if (nj.at_inf) continue;
        for (std::size_t k = j + 1; k < n; ++k) {
            const auto& nk = nodes[k];
            if (nk.at_inf) continue;
            accumulate_factor(acc, nj.sp * nk.sp, nj.z - nk.z);
            if (chart != Uniformization::Sphere)
                accumulate_factor(acc, nj.sm * nk.sm, std::conj(nj.z) - std::conj(nk.z));
        }
    }
    if (chart == Uniformization::HalfPlane) {
        for (std::size_t j = 0; j < n; ++j) {
            if (nodes[j].at_inf) continue;
            for (std::size_t k = 0; k < n; ++k) {
                if (nodes[k].at_inf) continue;
                accumulate_factor(acc, nodes[j].sp * nodes[k].sm,
                                  nodes[j].z - std::conj(nodes[k].z));
            }
        }
    } else if (chart == Uniformization::Disc) {
        for (std::size_t j = 0; j < n; ++j) {
            if (nodes[j].at_inf) continue;
            for (std::size_t k = 0; k < n; ++k) {
                if (nodes[k].at_inf) continue;
                accumulate_factor(acc, nodes[j].sp * nodes[k].sm,
                                  1.0 - nodes[j].z * std::conj(nodes[k].z));
            }
        }
    }
    return acc;
}

cplx CorrelationContext::dlog(std::size_t j) const {
    const auto& nj = nodes[j];
    if (nj.at_inf) return {0.0, 0.0};
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const auto& nk = nodes[k];
        if (nk.at_inf) continue;
        if (k != j && !negligible(nj.sp * nk.sp)) acc += nj.sp * nk.sp / (nj.z - nk.z);
        if (chart == Uniformization::HalfPlane) {
            if (!negligible(nj.sp * nk.sm)) acc += nj.sp * nk.sm / (nj.z - std::conj(nk.z));
        } else if (chart == Uniformization::Disc) {
            if (!negligible(nj.sp * nk.sm))
                acc += nj.sp * nk.sm * (-std::conj(nk.z)) / (1.0 - nj.z * std::conj(nk.z));
        }
    }
    return acc;
}

cplx CorrelationContext::dbarlog(std::size_t j) const {
    const auto& nj = nodes[j];
    if (nj.at_inf || chart == Uniformization::Sphere) return {0.0, 0.0};
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const auto& nk = nodes[k];
        if (nk.at_inf) continue;
        if (k != j && !negligible(nj.sm * nk.sm))
            acc += nj.sm * nk.sm / (std::conj(nj.z) - std::conj(nk.z));
        if (chart == Uniformization::HalfPlane) {
            if (!negligible(nj.sm * nk.sp)) acc += nj.sm * nk.sp / (std::conj(nj.z) - nk.z);
        } else {
            if (!negligible(nj.sm * nk.sp))
                acc += nj.sm * nk.sp * (-nk.z) / (1.0 - nk.z * std::conj(nj.z));
        }
    }
    return acc;
}

cplx CorrelationContext::d2log(std::size_t j) const {
    const auto& nj = nodes[j];
    if (nj.at_inf) return {0.0, 0.0};
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const auto& nk = nodes[k];
        if (nk.at_inf) continue;
        if (k != j && !negligible(nj.sp * nk.sp)) {
            const cplx d = nj.z - nk.z;
            acc -= nj.sp * nk.sp / (d * d);
        }
        if (chart == Uniformization::HalfPlane) {
            if (!negligible(nj.sp * nk.sm)) {
                const cplx d = nj.z - std::conj(nk.z);
                acc -= nj.sp * nk.sm / (d * d);
            }
        } else if (chart == Uniformization::Disc) {
            if (!negligible(nj.sp * nk.sm)) {
                const cplx d = 1.0 - nj.z * std::conj(nk.z);
                const cplx w = std::conj(nk.z);
                acc -= nj.sp * nk.sm * w * w / (d * d);
            }
        }
    }
    return acc;
}

std::vector<DimEntry> CorrelationContext::dims() const {
    std::vector<DimEntry> out;
    out.reserve(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        DimEntry de;
        de.point.coord = nodes[j].z;
        de.point.at_infinity = nodes[j].at_inf;
        de.point.side = nodes[j].boundary ? Side::Boundary : Side::Interior;
        de.lambda_plus = lambda_plus(j);
        de.lambda_minus = lambda_minus(j);
        out.push_back(de);
    }
    return out;
}

VectorField chordal_field(double xi) {
    VectorField f;
    f.v = [xi](cplx z) { return 1.0 / (xi - z); };
    f.dv = [xi](cplx z) {
        const cplx d = xi - z;
        return 1.0 / (d * d);
    };
    f.v_at_infinity = {0.0, 0.0};
    f.dv_at_infinity = {0.0, 0.0};
    return f;
}

VectorField radial_field(cplx zeta) {
    VectorField f;
    f.v = [zeta](cplx z) { return z * (zeta + z) / (zeta - z); };
    f.dv = [zeta](cplx z) {
        const cplx d = zeta - z;
        return (zeta * zeta + 2.0 * zeta * z - z * z) / (d * d);
    };
    // pushforward w |-> v(-1/w) w^2 = w(1 - zeta w)/(1 + zeta w)
    f.v_at_infinity = {0.0, 0.0};
    f.dv_at_infinity = {1.0, 0.0};
    return f;
}

VectorField rational_field(std::function<cplx(cplx)> v, std::function<cplx(cplx)> dv) {
    VectorField f;
    f.v = std::move(v);
    f.dv = std::move(dv);
    return f;
}

cplx lie_derivative_log(const VectorField& field, const CorrelationContext& ctx,
                        std::optional<std::size_t> exclude) {
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j < ctx.nodes.size(); ++j) {
        if (exclude && *exclude == j) continue;
        const auto& n = ctx.nodes[j];
        const cplx lp = ctx.lambda_plus(j);
        const cplx lm = ctx.lambda_minus(j);
        if (n.at_inf) {
            acc += lp * field.dv_at_infinity;
            continue;
        }
        const cplx vz = field.v(n.z);
        const cplx dvz = field.dv(n.z);
        if (!std::isfinite(std::abs(vz)) || !std::isfinite(std::abs(dvz)))
            throw divisor_error("lie_derivative_log: vector field pole at a node");
        acc += vz * ctx.dlog(j) + lp * dvz;
        if (!negligible(n.sm) || !negligible(lm))
            acc += std::conj(vz) * ctx.dbarlog(j) + lm * std::conj(dvz);
    }
    return acc;
}

LogCorrelation log_correlation_plane(const Divisor& d) {
    validate_points_distinct(d);
    CorrelationContext ctx = CorrelationContext::from_plane_divisor(d);
    const cplx lv = ctx.log_value();
    LogCorrelation out;
    out.log_modulus = lv.real();
    out.phase = lv.imag();
    for (const auto& e : d.entries)
        out.dims.push_back(DimEntry{e.point, lambda_b(e.charge, d.b), {0.0, 0.0}});
    return out;
}

namespace {

LogCorrelation correlation_pair(const DoubleDivisor& dd, Uniformization chart) {
    CorrelationContext ctx = CorrelationContext::from_double_divisor(dd, chart);
    // coincident points within a layer are degenerate
    for (std::size_t i = 0; i < ctx.nodes.size(); ++i)
        for (std::size_t j = i + 1; j < ctx.nodes.size(); ++j)
            if (!ctx.nodes[i].at_inf && !ctx.nodes[j].at_inf &&
                std::abs(ctx.nodes[i].z - ctx.nodes[j].z) <= kPointTol)
                throw divisor_error("degenerate configuration: coincident points");
    const cplx lv = ctx.log_value();
    LogCorrelation out;
    out.log_modulus = lv.real();
    out.phase = lv.imag();
    out.dims = ctx.dims();
    return out;
}

}  // namespace

LogCorrelation correlation_halfplane(const DoubleDivisor& dd) {
    return correlation_pair(dd, Uniformization::HalfPlane);
}

LogCorrelation correlation_disc(const DoubleDivisor& dd) {
    return correlation_pair(dd, Uniformization::Disc);
}

bool MoebiusMap::sends_to_infinity(const Point& p, double tol) const {
    if (p.at_infinity) return std::abs(c) <= tol;
    return std::abs(c * p.coord + d) <= tol;
}

Point MoebiusMap::apply(const Point& p) const {
    Point out;
    if (p.at_infinity) {
        if (std::abs(c) == 0.0) {
            out.at_infinity = true;
        } else {
            out.coord = a / c;
        }
        return out;
    }
    const cplx den = c * p.coord + d;
    if (std::abs(den) <= 1e-300) throw divisor_error("chart error: point maps to infinity");
    out.coord = (a * p.coord + b) / den;
    return out;
}

cplx MoebiusMap::log_jacobian(const Point& p) const {
    const cplx det_ = det();
    if (p.at_infinity) {
        if (std::abs(c) == 0.0) return std::log(d / a);  // infinity fixed
        return std::log(det_ / (c * c));                 // infinity -> a/c
    }
    const cplx den = c * p.coord + d;
    return std::log(det_ / (den * den));
}

namespace {

struct TransportCore {
    double log_modulus = 0.0;
    double phase_image = 0.0;     // per-factor principal on the image
    double phase_coherent = 0.0;  // pair-anchored to the source branch
    bool coherent_valid = true;
};

TransportCore transport_core(const Divisor& d, const MoebiusMap& map) {
    if (std::abs(map.det()) <= 1e-300) throw divisor_error("degenerate Moebius map");
    for (const auto& e : d.entries)
        if (!e.point.at_infinity && map.sends_to_infinity(e.point))
            throw divisor_error("chart error: point maps to infinity");

    const std::size_t n = d.entries.size();
    std::vector<Point> imgs(n);
    bool has_infinity_charge = false;
    for (std::size_t j = 0; j < n; ++j) {
        imgs[j] = map.apply(d.entries[j].point);
        if (d.entries[j].point.at_infinity && std::abs(d.entries[j].charge) > 0.0)
            has_infinity_charge = true;
    }

    TransportCore out;
    out.coherent_valid = !has_infinity_charge;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            const cplx e = d.entries[j].charge * d.entries[k].charge;
            if (negligible(e)) continue;
            if (imgs[j].at_infinity || imgs[k].at_infinity) continue;
            const cplx diff = imgs[j].coord - imgs[k].coord;
            if (std::abs(diff) <= kDegenerateTol)
                throw divisor_error("degenerate configuration after transport");
            const cplx term = e * std::log(diff);
            out.log_modulus += term.real();
            out.phase_image += term.imag();
            if (out.coherent_valid) {
                // both sources finite here (infinite sources carry charge 0)
                const cplx src = d.entries[j].point.coord - d.entries[k].point.coord;
                const cplx jj = std::exp(map.log_jacobian(d.entries[j].point));
                const cplx jk = std::exp(map.log_jacobian(d.entries[k].point));
                const cplx ratio = (diff * diff) / (src * src * jj * jk);
                out.phase_coherent += (e * (std::log(src) + 0.5 * std::log(ratio))).imag();
            }
        }
        const cplx lam = lambda_b(d.entries[j].charge, d.b);
        if (!negligible(lam)) {
            const cplx jl = lam * map.log_jacobian(d.entries[j].point);
            out.log_modulus += jl.real();
            out.phase_image += jl.imag();
        }
    }
    if (!out.coherent_valid) out.phase_coherent = out.phase_image;
    return out;
}

std::vector<DimEntry> source_dims(const Divisor& d) {
    std::vector<DimEntry> dims;
    dims.reserve(d.entries.size());
    for (const auto& e : d.entries)
        dims.push_back(DimEntry{e.point, lambda_b(e.charge, d.b), {0.0, 0.0}});
    return dims;
}

}  // namespace

LogCorrelation moebius_transport(const Divisor& d, const MoebiusMap& map) {
    if (!check_neutrality(d, NeutralityLevel::NCb, 1e-9))
        throw divisor_error("moebius_transport requires a neutral (NC_b) divisor");
    const TransportCore core = transport_core(d, map);
    LogCorrelation out;
    out.log_modulus = core.log_modulus;
    out.phase = core.phase_coherent;
    out.dims = source_dims(d);
    return out;
}

LogCorrelation moebius_image_correlation(const Divisor& d, const MoebiusMap& map) {
    const TransportCore core = transport_core(d, map);
    LogCorrelation out;
    out.log_modulus = core.log_modulus;
    out.phase = core.phase_image;
    out.dims = source_dims(d);
    return out;
}

LogCorrelation expectation_vertex(const Divisor& beta, const Divisor& tau,
                                  Uniformization chart) {
    if (!check_neutrality(beta, NeutralityLevel::NCb, 1e-9))
        throw divisor_error("expectation_vertex: beta must satisfy NC_b");
    Divisor tau_b = tau;
    tau_b.b = beta.b;
    if (std::abs(tau.total_charge()) > 1e-9)
        throw divisor_error("expectation_vertex: tau must satisfy NC_0");

    const Divisor merged = add(beta, tau_b);

    auto make_ctx = [chart](const Divisor& d) {
        if (chart == Uniformization::Sphere) return CorrelationContext::from_plane_divisor(d);
        return CorrelationContext::from_double_divisor(pair_form(d, chart), chart);
    };
    const cplx log_num = make_ctx(merged).log_value();
    const cplx log_den = make_ctx(beta).log_value();

    LogCorrelation out;
    out.log_modulus = log_num.real() - log_den.real();
    out.phase = log_num.imag() - log_den.imag();

    const DoubleDivisor tau_pair =
        (chart == Uniformization::Sphere) ? DoubleDivisor{tau_b, {}} : pair_form(tau_b, chart);
    const DoubleDivisor beta_pair =
        (chart == Uniformization::Sphere) ? DoubleDivisor{beta, {}} : pair_form(beta, chart);

    auto charge_at = [](const Divisor& d, const Point& p) -> cplx {
        for (const auto& e : d.entries)
            if (same_point(e.point, p)) return e.charge;
        return {0.0, 0.0};
    };
    // collect tau's support in pair form
    std::vector<Point> support;
    auto add_support = [&support](const Divisor& d) {
        for (const auto& e : d.entries) {
            bool seen = false;
            for (const auto& p : support)
                if (same_point(p, e.point)) seen = true;
            if (!seen) support.push_back(e.point);
        }
    };
    add_support(tau_pair.plus);
    add_support(tau_pair.minus);
    for (const auto& p : support) {
        const cplx tp = charge_at(tau_pair.plus, p);
        const cplx tm = charge_at(tau_pair.minus, p);
        const cplx bp = charge_at(beta_pair.plus, p);
        const cplx bm = charge_at(beta_pair.minus, p);
        DimEntry de;
        de.point = p;
        de.lambda_plus = lambda_b(bp + tp, beta.b) - lambda_b(bp, beta.b);
        de.lambda_minus = lambda_b(bm + tm, beta.b) - lambda_b(bm, beta.b);
        out.dims.push_back(de);
    }
    return out;
}

cplx advection_log_fd(const VectorField& field, const CorrelationContext& ctx, double eps,
                      std::optional<std::size_t> exclude) {
    CorrelationContext fwd = ctx;
    CorrelationContext bwd = ctx;
    for (std::size_t j = 0; j < ctx.nodes.size(); ++j) {
        if (exclude && *exclude == j) continue;
        if (ctx.nodes[j].at_inf) continue;
        const cplx shift = eps * field.v(ctx.nodes[j].z);
        fwd.nodes[j].z += shift;
        bwd.nodes[j].z -= shift;
    }
    return (fwd.log_value() - bwd.log_value()) / (2.0 * eps);
}

}  // namespace slecg
