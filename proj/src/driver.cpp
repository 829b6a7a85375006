#include "slecg/driver.hpp"

#include <cmath>

namespace slecg {

namespace {

const cplx kI{0.0, 1.0};

inline void philox_round(std::uint32_t ctr[4], const std::uint32_t key[2]) {
    constexpr std::uint64_t M0 = 0xD2511F53ull;
    constexpr std::uint64_t M1 = 0xCD9E8D57ull;
    const std::uint64_t p0 = M0 * ctr[0];
    const std::uint64_t p1 = M1 * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t out0 = hi1 ^ ctr[1] ^ key[0];
    const std::uint32_t out2 = hi0 ^ ctr[3] ^ key[1];
    ctr[0] = out0;
    ctr[1] = lo1;
    ctr[2] = out2;
    ctr[3] = lo0;
}

}  // namespace

PathRng::PathRng(std::uint64_t seed, std::uint64_t path_index) {
    key_[0] = static_cast<std::uint32_t>(seed);
    key_[1] = static_cast<std::uint32_t>(seed >> 32);
    counter_[0] = 0;
    counter_[1] = 0;
    counter_[2] = static_cast<std::uint32_t>(path_index);
    counter_[3] = static_cast<std::uint32_t>(path_index >> 32);
}

void PathRng::refill() {
    std::uint32_t ctr[4] = {counter_[0], counter_[1], counter_[2], counter_[3]};
    std::uint32_t key[2] = {key_[0], key_[1]};
    for (int r = 0; r < 10; ++r) {
        philox_round(ctr, key);
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
    }
    out_[0] = ctr[0];
    out_[1] = ctr[1];
    out_[2] = ctr[2];
    out_[3] = ctr[3];
    if (++counter_[0] == 0) ++counter_[1];
    pos_ = 0;
}

std::uint32_t PathRng::next_u32() {
    if (pos_ >= 4) refill();
    return out_[pos_++];
}

double PathRng::next_unit() {
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    const std::uint64_t mant = ((hi << 32) | lo) >> 11;
    return (static_cast<double>(mant) + 1.0) * 0x1.0p-53;
}

double PathRng::next_normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double c = std::cos(2.0 * pi() * u2);
    const double s = std::sin(2.0 * pi() * u2);
    spare_ = r * s;
    have_spare_ = true;
    return r * c;
}

double rho_sum_drift(const DrivingConfig& cfg, const LoewnerState& state) {
    double drift = 0.0;
    if (cfg.geometry == Geometry::Chordal) {
        const double xi = state.driving;
        for (const auto& fp : state.force_points) {
            if (!fp.alive) continue;
            // rho recovered from the q0 pairing in cfg.force_points
            double rho = 0.0;
            for (const auto& [q, r] : cfg.force_points)
                if (std::abs(q - fp.q0) <= kPointTol) rho = r;
            drift += rho * (1.0 / (xi - fp.image)).real();
        }
        return drift;
    }
    drift = cfg.eta;
    const double theta = state.driving;
    for (const auto& fp : state.force_points) {
        if (!fp.alive) continue;
        double rho = 0.0;
        for (const auto& [q, r] : cfg.force_points)
            if (std::abs(q - fp.q0) <= kPointTol) rho = r;
        const double vartheta = std::arg(fp.image);
        drift += 0.5 * rho / std::tan(0.5 * (theta - vartheta));
    }
    return drift;
}

Divisor evolved_beta(const DrivingConfig& cfg, const LoewnerState& state) {
    const SleParams& p = cfg.params;
    const double s2k = std::sqrt(2.0 * p.kappa);
    Divisor beta;
    beta.b = p.b;
    double sum = 0.0;
    std::vector<std::pair<Point, double>> entries;
    for (const auto& fp : state.force_points) {
        if (!fp.alive) continue;
        double rho = 0.0;
        for (const auto& [q, r] : cfg.force_points)
            if (std::abs(q - fp.q0) <= kPointTol) rho = r;
        const double bk = rho / s2k;
        sum += bk;
        Point pt{fp.image, false, fp.boundary ? Side::Boundary : Side::Interior};
        entries.push_back({pt, bk});
    }
    if (cfg.geometry == Geometry::Chordal) {
        add_entry(beta, make_boundary_point(state.driving), p.a);
        for (auto& [pt, bk] : entries) add_entry(beta, pt, bk);
        add_entry(beta, make_infinity_point(), 2.0 * p.b - p.a - sum);
        return beta;
    }
    Point drive{std::exp(kI * state.driving), false, Side::Boundary};
    add_entry(beta, drive, p.a);
    for (auto& [pt, bk] : entries) add_entry(beta, pt, bk);
    const double delta = cfg.eta * p.a;
    const cplx bq = p.b - 0.5 * cplx{p.a + sum, delta};
    add_entry(beta, make_interior_point({0.0, 0.0}), bq);
    add_entry(beta, make_infinity_point(Side::ReflectedInterior), std::conj(bq));
    return beta;
}

double partition_drift(const DrivingConfig& cfg, const LoewnerState& state) {
    const Divisor beta = evolved_beta(cfg, state);
    if (cfg.geometry == Geometry::Chordal)
        return drift_chordal(beta, state.driving, cfg.params);
    return drift_radial(beta, state.driving, cfg.params);
}

double drift_value(const DrivingConfig& cfg, const LoewnerState& state) {
    switch (cfg.drift_mode) {
        case DriftMode::Standard:
            return 0.0;
        case DriftMode::RhoSum:
            return rho_sum_drift(cfg, state);
        case DriftMode::PartitionGradient:
            return partition_drift(cfg, state);
    }
    return 0.0;
}

std::size_t run_path(const DrivingConfig& cfg, std::uint64_t path_index, LoewnerState& state,
                     const std::function<void(const LoewnerState&)>& observer) {
    PathRng rng(cfg.seed, path_index);
    const double sqrt_k_dt = std::sqrt(cfg.params.kappa * cfg.dt) * cfg.noise_scale;
    const std::size_t n_steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
    if (observer) observer(state);
    std::size_t taken = 0;
    for (std::size_t n = 0; n < n_steps; ++n) {
        const double lambda = drift_value(cfg, state);
        const double next = state.driving + sqrt_k_dt * rng.next_normal() + lambda * cfg.dt;
        step(state, next, cfg.dt);
        ++taken;
        if (observer) observer(state);
        if (state.truncated) break;
    }
    return taken;
}

PathRecord generate_path(const DrivingConfig& cfg, std::uint64_t path_index,
                         const std::vector<cplx>& tracked_points) {
    LoewnerState state = make_state(cfg.geometry, cfg.params.mode, cfg.driving0);
    for (const auto& z : tracked_points) state.track(z);
    for (const auto& [q, rho] : cfg.force_points) {
        const bool boundary = (cfg.geometry == Geometry::Chordal)
                                  ? std::abs(q.imag()) <= kPointTol
                                  : std::abs(std::abs(q) - 1.0) <= kPointTol;
        state.add_force_point(q, boundary);
    }
    PathRecord rec;
    auto snapshot = [&](const LoewnerState& s) {
        rec.t.push_back(s.t);
        rec.driving.push_back(s.driving);
        std::vector<cplx> g, g1, q;
        std::vector<bool> alive;
        for (const auto& tp : s.tracked) {
            g.push_back(tp.g);
            g1.push_back(tp.g1);
            alive.push_back(tp.alive);
        }
        for (const auto& fp : s.force_points) q.push_back(fp.image);
        rec.tracked_g.push_back(std::move(g));
        rec.tracked_g1.push_back(std::move(g1));
        rec.tracked_alive.push_back(std::move(alive));
        rec.force_images.push_back(std::move(q));
    };
    run_path(cfg, path_index, state, snapshot);
    rec.truncated = state.truncated;
    return rec;
}

}  // namespace slecg
