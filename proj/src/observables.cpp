#include "slecg/observables.hpp"

#include <cmath>

namespace slecg {

namespace {
const cplx kI{0.0, 1.0};
}

double PhaseTracker::update(cplx v) {
    if (!started) {
        arg = std::arg(v);
        prev = v;
        started = true;
        return arg;
    }
    const double d = std::arg(v / prev);
    if (std::abs(d) > 0.9 * pi()) wrap_suspect = true;
    arg += d;
    prev = v;
    return arg;
}

cplx PhaseTracker::log_of(cplx v) { return {std::log(std::abs(v)), update(v)}; }

// --- Schramm-Sheffield ------------------------------------------------------

void SchrammSheffieldChordal::init(const LoewnerState& s) { m0_ = eval(s); }

cplx SchrammSheffieldChordal::eval(const LoewnerState& s) {
    const auto& tp = s.tracked[0];
    const cplx w = tp.g - s.driving;
    const cplx wp = tp.g1;
    return 2.0 * p_.a * tw_.update(w) - 2.0 * p_.b * twp_.update(wp);
}

void SchrammSheffieldRadial::init(const LoewnerState& s) { m0_ = eval(s); }

cplx SchrammSheffieldRadial::eval(const LoewnerState& s) {
    const auto& tp = s.tracked[0];
    const cplx zeta = s.driving_point();
    const cplx w = tp.g / zeta;
    return 2.0 * p_.a * t1w_.update(1.0 - w) - p_.a * tw_.update(w) -
           2.0 * p_.b * twpw_.update(tp.g1 / tp.g);
}

// --- 1-point vertex ---------------------------------------------------------

VertexRadial::VertexRadial(cplx z, cplx tau_p, cplx tau_m, cplx tauq_p, cplx tauq_m,
                           const SleParams& p)
    : z_(z), tau_p_(tau_p), tau_m_(tau_m), tauq_p_(tauq_p), tauq_m_(tauq_m), p_(p) {
    const cplx b = p.b;
    h_p_ = lambda_b(tau_p_, b);
    h_m_ = lambda_b(tau_m_, b);
    hq_p_ = 0.5 * tauq_p_ * (tauq_p_ - p.a);
    hq_m_ = 0.5 * tauq_m_ * (tauq_m_ - p.a);
    nu_p_ = tau_p_ * (tauq_p_ + b - 0.5 * p.a);
    nu_m_ = tau_m_ * (tauq_m_ + b - 0.5 * p.a);
}

cplx VertexRadial::log_value(const LoewnerState& s) {
    const auto& tp = s.tracked[0];
    const double theta = s.driving;
    const cplx zeta = s.driving_point();
    const cplx w = tp.g / zeta;
    const cplx wp = tp.g1 / zeta;
    const cplx lw = tw_.log_of(w);
    const cplx lwp = twp_.log_of(wp);
    const cplx l1w = t1w_.log_of(1.0 - w);
    const double one_m_ww = 1.0 - std::norm(w);
    cplx acc = hq_p_ * cplx{s.t, -theta} + hq_m_ * cplx{s.t, theta};
    acc += h_p_ * lwp + h_m_ * std::conj(lwp);
    acc += nu_p_ * lw + nu_m_ * std::conj(lw);
    acc += p_.a * tau_p_ * l1w + p_.a * tau_m_ * std::conj(l1w);
    acc += tau_p_ * tau_m_ * std::log(one_m_ww);
    return acc;
}

void VertexRadial::init(const LoewnerState& s) { m0_ = eval(s); }

cplx VertexRadial::eval(const LoewnerState& s) { return std::exp(log_value(s)); }

// --- LSW kappa = 6 ----------------------------------------------------------

void LswKappa6::init(const LoewnerState& s) { m0_ = eval(s); }

cplx LswKappa6::eval(const LoewnerState& s) {
    const auto& tp = s.tracked[0];
    const cplx zeta = s.driving_point();
    const cplx w = tp.g / zeta;
    const cplx lw = tw_.log_of(w);
    const cplx l1w = t1w_.log_of(1.0 - w);
    return std::exp(cplx{s.t / 4.0, 0.0} + l1w / 3.0 - lw / 6.0);
}

// --- LSW boundary exponents ---------------------------------------------------

LswBoundary::LswBoundary(double theta, double h, const SleParams& p)
    : theta_(theta), h_(h), p_(p) {
    const double k = p.kappa;
    sigma_ = p.a / 4.0 * (k - 4.0 + std::sqrt((k - 4.0) * (k - 4.0) + 16.0 * k * h));
    hq_ = sigma_ * sigma_ / 8.0 + p.a * sigma_ / 4.0;
}

std::vector<cplx> LswBoundary::tracked_points() const { return {std::exp(kI * theta_)}; }

void LswBoundary::init(const LoewnerState& s) { m0_ = eval(s); }

cplx LswBoundary::eval(const LoewnerState& s) {
    const auto& tp = s.tracked[0];
    const cplx zeta = s.driving_point();
    const double theta_t = tw_.update(tp.g / zeta);
    const double s2 = std::sin(0.5 * theta_t);
    const double wp = std::abs(tp.g1);
    return std::exp(2.0 * hq_ * s.t) * std::pow(wp, h_) *
           std::pow(s2 * s2, 0.5 * p_.a * sigma_);
}

// --- backward Sheffield -------------------------------------------------------

void SheffieldNeumann::init(const LoewnerState& s) { m0_ = eval(s); }

cplx SheffieldNeumann::eval(const LoewnerState& s) {
    const auto& tp = s.tracked[0];
    const double d = std::abs(tp.g - s.driving);
    return -2.0 * p_.a * std::log(d) + 2.0 * p_.b * std::log(std::abs(tp.g1));
}

// --- SLE(0) invariants --------------------------------------------------------

double Sle0Invariants::first(const LoewnerState& s, std::size_t idx) {
    const auto& tp = s.tracked[idx];
    const cplx zeta = s.driving_point();
    const cplx w = tp.g / zeta;
    const cplx wp = tp.g1 / zeta;
    // arg((1-w) w^{-3/2} w') with continuous branches
    return t1w.update(1.0 - w) - 1.5 * tw.update(w) + twp.update(wp);
}

cplx Sle0Invariants::second(const LoewnerState& s, std::size_t idx) {
    const auto& tp = s.tracked[idx];
    const cplx zeta = s.driving_point();
    const cplx w = tp.g / zeta;
    const cplx wp = tp.g1 / zeta;
    const cplx wpp = tp.g2 / zeta;
    const cplx wppp = tp.g3 / zeta;
    const cplx sw = wppp / wp - 1.5 * (wpp / wp) * (wpp / wp);
    const cplx r = wp / w;
    const cplx omw = 1.0 - w;
    return sw + 0.375 * r * r * (1.0 - 4.0 * w / (omw * omw));
}

// --- Green's functions --------------------------------------------------------

double eval_greens(GreensKind kind, cplx z, cplx w) {
    if (std::abs(z - w) <= kPointTol) throw divisor_error("eval_greens: coincident points");
    switch (kind) {
        case GreensKind::DirichletH:
            return std::log(std::abs((z - std::conj(w)) / (z - w)));
        case GreensKind::DirichletD:
            return std::log(std::abs((1.0 - z * std::conj(w)) / (z - w)));
        case GreensKind::NeumannH:
            return -std::log(std::abs((z - w) * (z - std::conj(w))));
    }
    return 0.0;
}

double hadamard_dirichlet_rate(cplx w1, cplx w2) {
    const auto factor = [](cplx w) { return ((1.0 + w) / (1.0 - w)).real(); };
    return -factor(w1) * factor(w2);
}

double hadamard_neumann_rate(cplx f1, cplx f2, double xi) {
    const auto factor = [xi](cplx f) { return (1.0 / (f - xi)).real(); };
    return -4.0 * factor(f1) * factor(f2);
}

// --- Friedrich-Werner recursion ----------------------------------------------

namespace {

// R(z_1..z_n) with z held at 1; generic complex arguments so that Cauchy
// derivatives can be taken on circles.
cplx recursion_r(const std::vector<cplx>& zs, const SleParams& p);

cplx recursion_r_derivative(const std::vector<cplx>& zs, std::size_t j, const SleParams& p) {
    // Cauchy integral derivative on a circle around z_j, trapezoid rule.
    double rho = 2.0;
    const cplx zj = zs[j];
    rho = std::min(rho, 0.5 * std::abs(zj));            // keep away from 0
    rho = std::min(rho, 0.5 * std::abs(zj - 1.0));      // and from the seed
    for (std::size_t k = 0; k < zs.size(); ++k)
        if (k != j) rho = std::min(rho, 0.5 * std::abs(zj - zs[k]));
    const double r = 0.3 * rho;
    constexpr int M = 24;
    cplx acc{0.0, 0.0};
    std::vector<cplx> pts = zs;
    for (int m = 0; m < M; ++m) {
        const double th = 2.0 * pi() * m / M;
        const cplx e = std::exp(kI * th);
        pts[j] = zj + r * e;
        acc += recursion_r(pts, p) / e;
    }
    return acc / (static_cast<double>(M) * r);
}

cplx recursion_r(const std::vector<cplx>& zs, const SleParams& p) {
    if (zs.empty()) return {1.0, 0.0};
    const cplx z = zs.front();
    std::vector<cplx> rest(zs.begin() + 1, zs.end());
    const double n = static_cast<double>(rest.size());
    const double lam = h12(p);
    const double mu = p.a * p.a / 4.0 - p.b * p.b;
    const double c = p.central_charge();

    const cplx omz = 1.0 - z;
    const cplx pref = 1.0 / (2.0 * z * z);
    const cplx rval = recursion_r(rest, p);

    cplx acc = (2.0 * n * (1.0 + z) / omz + 2.0 * lam * z / (omz * omz) + mu) * rval;
    for (std::size_t j = 0; j < rest.size(); ++j) {
        const cplx zj = rest[j];
        const cplx dj = recursion_r_derivative(rest, j, p);
        acc += (1.0 + z) / omz * zj * dj;
        acc += zj * (z + zj) / (z - zj) * dj;
        acc += 2.0 * (z * z + 2.0 * z * zj - zj * zj) / ((z - zj) * (z - zj)) * rval;
    }
    cplx out = pref * acc;
    if (c != 0.0) {
        for (std::size_t j = 0; j < rest.size(); ++j) {
            std::vector<cplx> rest_minus;
            for (std::size_t k = 0; k < rest.size(); ++k)
                if (k != j) rest_minus.push_back(rest[k]);
            const cplx d = z - rest[j];
            out += 0.5 * c * recursion_r(rest_minus, p) / (d * d * d * d);
        }
    }
    return out;
}

}  // namespace

cplx virasoro_npoint_recursion(const std::vector<double>& angles, double kappa) {
    const SleParams p = SleParams::forward(kappa);
    std::vector<cplx> zs;
    zs.reserve(angles.size());
    for (double th : angles) {
        const double m = std::fmod(th, 2.0 * pi());
        if (std::abs(m) <= 1e-12 || std::abs(std::abs(m) - 2.0 * pi()) <= 1e-12)
            throw divisor_error("recursion angles must be nonzero mod 2 pi");
        zs.push_back(std::exp(kI * th));
    }
    for (std::size_t i = 0; i < zs.size(); ++i)
        for (std::size_t j = i + 1; j < zs.size(); ++j)
            if (std::abs(zs[i] - zs[j]) <= 1e-12)
                throw divisor_error("recursion angles must be distinct");
    return recursion_r(zs, p);
}

cplx virasoro_one_point(cplx z, double kappa) {
    const SleParams p = SleParams::forward(kappa);
    const double lam = h12(p);
    const double mu2 = 0.5 * (p.a * p.a / 4.0 - p.b * p.b);  // h_{0,1/2}
    const cplx omz = 1.0 - z;
    return lam / (z * omz * omz) + mu2 / (z * z);
}

std::unique_ptr<Observable> make_observable(const std::string& kind, cplx z,
                                            const SleParams& p) {
    if (kind == "schramm_sheffield_chordal")
        return std::make_unique<SchrammSheffieldChordal>(z, p);
    if (kind == "schramm_sheffield_radial")
        return std::make_unique<SchrammSheffieldRadial>(z, p);
    if (kind == "poisson_vertex")
        return std::make_unique<VertexRadial>(z, -p.a, -p.a, p.a, p.a, p);
    if (kind == "lsw_kappa6") return std::make_unique<LswKappa6>(z);
    if (kind == "sheffield_neumann") return std::make_unique<SheffieldNeumann>(z, p);
    throw divisor_error("unknown observable kind: " + kind);
}

}  // namespace slecg
