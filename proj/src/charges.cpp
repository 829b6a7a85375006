#include "slecg/charges.hpp"

#include <algorithm>
#include <cmath>

namespace slecg {

bool same_point(const Point& a, const Point& b, double tol) {
    if (a.at_infinity != b.at_infinity) return false;
    if (a.at_infinity) return true;
    return std::abs(a.coord - b.coord) <= tol;
}

Side classify_side(const cplx& z, Uniformization chart, double tol) {
    switch (chart) {
        case Uniformization::HalfPlane:
            if (std::abs(z.imag()) <= tol) return Side::Boundary;
            return z.imag() > 0 ? Side::Interior : Side::ReflectedInterior;
        case Uniformization::Disc: {
            const double r = std::abs(z);
            if (std::abs(r - 1.0) <= tol) return Side::Boundary;
            return r < 1.0 ? Side::Interior : Side::ReflectedInterior;
        }
        case Uniformization::Sphere:
            return Side::Interior;
    }
    return Side::Interior;
}

Point make_boundary_point(double x) { return Point{cplx(x, 0.0), false, Side::Boundary}; }

Point make_interior_point(cplx z) { return Point{z, false, Side::Interior}; }

Point make_infinity_point(Side side) { return Point{cplx(0.0, 0.0), true, side}; }

cplx Divisor::total_charge() const {
    cplx sum{0.0, 0.0};
    for (const auto& e : entries) sum += e.charge;
    return sum;
}

bool Divisor::has_entry_at(const Point& p, double tol) const {
    return std::any_of(entries.begin(), entries.end(),
                       [&](const ChargeEntry& e) { return same_point(e.point, p, tol); });
}

void add_entry(Divisor& d, const Point& p, cplx charge, double tol) {
    for (auto& e : d.entries) {
        if (same_point(e.point, p, tol)) {
            e.charge += charge;
            return;
        }
    }
    d.entries.push_back(ChargeEntry{p, charge});
}

Divisor add(const Divisor& lhs, const Divisor& rhs, double tol) {
    if (std::abs(lhs.b - rhs.b) > tol)
        throw divisor_error("divisor sum with mismatched background parameter b");
    Divisor out = lhs;
    for (const auto& e : rhs.entries) add_entry(out, e.point, e.charge, tol);
    return out;
}

Divisor scale_charges(const Divisor& d, cplx factor) {
    Divisor out = d;
    for (auto& e : out.entries) e.charge *= factor;
    return out;
}

cplx total_charge(const Divisor& d) { return d.total_charge(); }

bool check_neutrality(const Divisor& d, NeutralityLevel level, double tol) {
    if (tol < 0) throw divisor_error("neutrality tolerance must be >= 0");
    const cplx target = (level == NeutralityLevel::NCb) ? 2.0 * d.b : cplx{0.0, 0.0};
    return std::abs(d.total_charge() - target) <= tol;
}

Point star_point(const Point& p, Uniformization chart) {
    Point out = p;
    if (p.side == Side::Interior)
        out.side = Side::ReflectedInterior;
    else if (p.side == Side::ReflectedInterior)
        out.side = Side::Interior;

    switch (chart) {
        case Uniformization::HalfPlane:
            if (!p.at_infinity) out.coord = std::conj(p.coord);
            return out;
        case Uniformization::Disc:
            if (p.at_infinity) {
                out.at_infinity = false;
                out.coord = cplx{0.0, 0.0};
            } else if (std::abs(p.coord) <= kPointTol) {
                out.at_infinity = true;
                out.coord = cplx{0.0, 0.0};
            } else if (p.side == Side::Boundary) {
                // fixed point of the involution; keep the coordinate exact
            } else {
                out.coord = 1.0 / std::conj(p.coord);
            }
            return out;
        case Uniformization::Sphere:
            throw divisor_error("star requires the H or D uniformization");
    }
    return out;
}

Divisor star(const Divisor& d, Uniformization chart) {
    Divisor out;
    out.b = d.b;
    out.entries.reserve(d.entries.size());
    for (const auto& e : d.entries) out.entries.push_back({star_point(e.point, chart), e.charge});
    return out;
}

bool symmetrize_check(const Divisor& d, Uniformization chart, double tol) {
    const Divisor s = star(d, chart);
    if (s.entries.size() != d.entries.size()) return false;
    for (const auto& se : s.entries) {
        bool matched = false;
        for (const auto& de : d.entries) {
            if (same_point(de.point, se.point, std::max(tol, kPointTol))) {
                if (std::abs(de.charge - std::conj(se.charge)) > tol) return false;
                matched = true;
                break;
            }
        }
        if (!matched) return false;
    }
    return true;
}

void validate_points_distinct(const Divisor& d, double tol) {
    for (std::size_t i = 0; i < d.entries.size(); ++i)
        for (std::size_t j = i + 1; j < d.entries.size(); ++j)
            if (same_point(d.entries[i].point, d.entries[j].point, tol))
                throw divisor_error("degenerate configuration: coincident points");
}

void validate_double_divisor(const DoubleDivisor& dd) {
    for (const auto& e : dd.minus.entries)
        if (e.point.side == Side::Boundary && std::abs(e.charge) > 0.0)
            throw divisor_error("minus divisor must not carry boundary charge");
}

Divisor flatten(const DoubleDivisor& dd, Uniformization chart) {
    validate_double_divisor(dd);
    Divisor out = dd.plus;
    out.b = dd.plus.b;
    for (const auto& e : dd.minus.entries) {
        Point refl = star_point(e.point, chart);
        add_entry(out, refl, e.charge);
    }
    return out;
}

DoubleDivisor pair_form(const Divisor& on_double, Uniformization chart) {
    DoubleDivisor dd;
    dd.plus.b = on_double.b;
    dd.minus.b = on_double.b;
    for (const auto& e : on_double.entries) {
        Side side = e.point.side;
        if (!e.point.at_infinity) {
            // trust the stored flag but recompute for plain-coordinate input
            Side geo = classify_side(e.point.coord, chart);
            if (geo != Side::Boundary) side = geo;
        } else if (chart == Uniformization::Disc) {
            side = Side::ReflectedInterior;  // infinity = 0* in the D chart
        }
        if (side == Side::ReflectedInterior) {
            Point back = star_point(e.point, chart);
            add_entry(dd.minus, back, e.charge);
        } else {
            Point p = e.point;
            p.side = side;
            add_entry(dd.plus, p, e.charge);
        }
    }
    return dd;
}

}  // namespace slecg
