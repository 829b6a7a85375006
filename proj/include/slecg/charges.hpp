// charges.hpp
// Divisor and background-charge algebra on the Schottky double of H or D.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace slecg {

using cplx = std::complex<double>;

inline constexpr double kPointTol = 1e-12;

enum class Uniformization { Sphere, HalfPlane, Disc };

enum class Side { Boundary, Interior, ReflectedInterior };

// Point of the double; at_infinity means the node sits at infinity and is
// evaluated in the chart z -> -1/z.
struct Point {
    cplx coord{0.0, 0.0};
    bool at_infinity = false;
    Side side = Side::Boundary;
};

bool same_point(const Point& a, const Point& b, double tol = kPointTol);

// Classifies a coordinate against the boundary of the uniformized domain.
Side classify_side(const cplx& z, Uniformization chart, double tol = kPointTol);

Point make_boundary_point(double x);
Point make_interior_point(cplx z);
Point make_infinity_point(Side side = Side::Boundary);

struct ChargeEntry {
    Point point;
    cplx charge{0.0, 0.0};
};

enum class NeutralityLevel { NC0, NCb };

// Finite point-charge assignment plus the background parameter b used by
// neutrality checks and conformal dimensions. Immutable by convention: all
// operations return new values.
struct Divisor {
    std::vector<ChargeEntry> entries;
    cplx b{0.0, 0.0};

    cplx total_charge() const;
    bool has_entry_at(const Point& p, double tol = kPointTol) const;
};

// Adds an entry, merging with an existing coincident point (charge sum).
void add_entry(Divisor& d, const Point& p, cplx charge, double tol = kPointTol);

// Divisor sum with point-merge semantics; throws on mismatched b.
Divisor add(const Divisor& lhs, const Divisor& rhs, double tol = kPointTol);

Divisor scale_charges(const Divisor& d, cplx factor);

cplx total_charge(const Divisor& d);

bool check_neutrality(const Divisor& d, NeutralityLevel level, double tol);

// Canonical involution z -> z* of the Schottky double: conj(z) for H,
// 1/conj(z) for D (0 <-> infinity). Charges are unchanged; boundary points
// are fixed; interior/reflected-interior swap.
Point star_point(const Point& p, Uniformization chart);
Divisor star(const Divisor& d, Uniformization chart);

// True iff d equals the conjugated-charge star of itself (entry matching by
// point identity).
bool symmetrize_check(const Divisor& d, Uniformization chart, double tol);

void validate_points_distinct(const Divisor& d, double tol = kPointTol);

// Double divisor (sigma^+, sigma^-): plus supported on D and its boundary,
// minus supported on D only; minus charges at z_j stand for charges at z_j*.
struct DoubleDivisor {
    Divisor plus;
    Divisor minus;
};

void validate_double_divisor(const DoubleDivisor& dd);

// Divisor on the double <-> (plus, minus) pair form.
Divisor flatten(const DoubleDivisor& dd, Uniformization chart);
DoubleDivisor pair_form(const Divisor& on_double, Uniformization chart);

struct divisor_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace slecg
