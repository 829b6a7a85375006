#include "slecg/verify.hpp"

#include <cmath>
#include <thread>

namespace slecg {

void KahanSum::add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
}

void KahanSum::merge(const KahanSum& o) {
    add(o.sum);
    add(-o.comp);
}

void MomentAccumulator::add(cplx v) {
    re.add(v.real());
    im.add(v.imag());
    re2.add(v.real() * v.real());
    im2.add(v.imag() * v.imag());
    ++count;
}

void MomentAccumulator::merge(const MomentAccumulator& o) {
    re.merge(o.re);
    im.merge(o.im);
    re2.merge(o.re2);
    im2.merge(o.im2);
    count += o.count;
}

cplx MomentAccumulator::mean() const {
    if (count == 0) return {0.0, 0.0};
    return {re.value() / count, im.value() / count};
}

double MomentAccumulator::std_err() const {
    if (count < 2) return 0.0;
    const double n = static_cast<double>(count);
    const cplx m = mean();
    const double var_re = std::max(0.0, re2.value() / n - m.real() * m.real());
    const double var_im = std::max(0.0, im2.value() / n - m.imag() * m.imag());
    return std::sqrt((var_re + var_im) / n);
}

namespace {

// Within-step hitting probability of the absorbing point for the boundary
// gap process. Near zero the gap is a Bessel process of dimension
// 1 + 4/kappa (repulsion cot(x/2) ~ 2/x), so the bridge from gap a to gap b
// over one step hits zero with probability 1 - I_mu(z)/I_{-mu}(z),
// z = a b/(kappa dt), mu = 1/2 - 2/kappa. For kappa <= 4 the dimension is
// >= 2 and the point is never absorbed.
double bessel_bridge_hit(double a, double b, double kappa, double dt) {
    const double mu = 0.5 - 2.0 / kappa;
    if (mu <= 0.0) return 0.0;
    const double z = a * b / (kappa * dt);
    if (z > 20.0) return 0.0;  // 2 sin(mu pi) e^{-2z} below double noise
    // I_alpha(z) = sum_m (z/2)^{2m+alpha} / (m! Gamma(m+alpha+1))
    auto iser = [&](double alpha) {
        double term = 1.0 / std::tgamma(alpha + 1.0);
        double sum = term;
        const double q = 0.25 * z * z;
        for (int m = 1; m < 80; ++m) {
            term *= q / (m * (m + alpha));
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return sum;
    };
    const double ratio = std::pow(0.5 * z, 2.0 * mu) * iser(mu) / iser(-mu);
    return std::max(0.0, 1.0 - ratio);
}

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

struct CheckpointPlan {
    std::vector<std::size_t> step_index;
    std::size_t n_steps = 0;
};

CheckpointPlan plan_checkpoints(const std::vector<double>& checkpoints, double dt) {
    CheckpointPlan plan;
    for (double t : checkpoints) {
        const auto idx = static_cast<std::size_t>(std::llround(t / dt));
        plan.step_index.push_back(idx);
        plan.n_steps = std::max(plan.n_steps, idx);
    }
    return plan;
}

template <typename PathFn>
void run_parallel(std::size_t n_paths, int threads, PathFn&& fn) {
    const int t = resolve_threads(threads);
    if (t <= 1) {
        fn(0, 0, n_paths);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_paths + t - 1) / t;
    for (int i = 0; i < t; ++i) {
        const std::size_t lo = i * chunk;
        const std::size_t hi = std::min(n_paths, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, i, lo, hi] { fn(i, lo, hi); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

MartingaleReport martingale_test(const DrivingConfig& cfg, const ObservableFactory& make_obs,
                                 const std::string& observable_id,
                                 const std::vector<double>& checkpoints, const McOptions& opt) {
    const CheckpointPlan plan = plan_checkpoints(checkpoints, cfg.dt);
    const int n_threads = resolve_threads(opt.threads);
    const std::size_t n_cp = checkpoints.size();

    struct Local {
        std::vector<MomentAccumulator> acc;
        std::vector<std::size_t> swallowed;
    };
    std::vector<Local> locals(static_cast<std::size_t>(n_threads));
    for (auto& l : locals) {
        l.acc.resize(n_cp);
        l.swallowed.assign(n_cp, 0);
    }

    cplx m0{0.0, 0.0};
    {
        // M0 from a t=0 state (path-independent)
        auto obs = make_obs();
        LoewnerState s0 = make_state(cfg.geometry, cfg.params.mode, cfg.driving0);
        for (const auto& z : obs->tracked_points()) s0.track(z);
        obs->init(s0);
        m0 = obs->m0();
    }

    run_parallel(opt.n_paths, n_threads, [&](int tid, std::size_t lo, std::size_t hi) {
        Local& local = locals[static_cast<std::size_t>(tid)];
        for (std::size_t path = lo; path < hi; ++path) {
            auto obs = make_obs();
            LoewnerState state = make_state(cfg.geometry, cfg.params.mode, cfg.driving0);
            for (const auto& z : obs->tracked_points()) state.track(z);
            state.jet_order = 1;
            for (const auto& [q, rho] : cfg.force_points) {
                const bool boundary = (cfg.geometry == Geometry::Chordal)
                                          ? std::abs(q.imag()) <= kPointTol
                                          : std::abs(std::abs(q) - 1.0) <= kPointTol;
                state.add_force_point(q, boundary);
            }
            obs->init(state);
            PathRng rng(cfg.seed, path);
            const double noise = std::sqrt(cfg.params.kappa * cfg.dt) * cfg.noise_scale;
            const std::size_t primary = obs->primary_index();

            cplx value = obs->m0();
            double dist_prev = 1e30;
            bool frozen = false;
            bool was_swallowed = false;
            std::size_t next_cp = 0;
            for (std::size_t cp = 0; cp < n_cp && plan.step_index[cp] == 0; ++cp) {
                local.acc[cp].add(value);
                ++next_cp;
            }
            for (std::size_t n = 1; n <= plan.n_steps; ++n) {
                if (!frozen) {
                    const double lambda = drift_value(cfg, state);
                    const double next =
                        state.driving + noise * rng.next_normal() + lambda * cfg.dt;
                    step(state, next, cfg.dt);
                    const auto& tp = state.tracked[primary];
                    if (!tp.alive) {
                        frozen = true;  // keep the last evaluated value
                        was_swallowed = true;
                    } else {
                        const double dist = std::abs(tp.g - state.driving_point());
                        const cplx after = obs->eval(state);
                        if (dist < opt.r_stop) {
                            // freeze at the stopping radius: interpolate the
                            // crossing step to remove first-passage overshoot
                            const double span = dist_prev - dist;
                            const double frac =
                                span > 0 ? std::clamp((dist_prev - opt.r_stop) / span, 0.0, 1.0)
                                         : 1.0;
                            value = value + frac * (after - value);
                            frozen = true;
                        } else {
                            value = after;
                            dist_prev = dist;
                        }
                    }
                }
                while (next_cp < n_cp && plan.step_index[next_cp] == n) {
                    local.acc[next_cp].add(value);
                    if (was_swallowed) ++local.swallowed[next_cp];
                    ++next_cp;
                }
            }
        }
    });

    MartingaleReport rep;
    rep.observable_id = observable_id;
    rep.seed = cfg.seed;
    rep.paths = opt.n_paths;
    rep.rel_tol = opt.rel_tol;
    bool all_pass = true;
    for (std::size_t cp = 0; cp < n_cp; ++cp) {
        MomentAccumulator acc;
        std::size_t swallowed = 0;
        for (const auto& l : locals) {
            acc.merge(l.acc[cp]);
            swallowed += l.swallowed[cp];
        }
        CheckpointStats st;
        st.t = checkpoints[cp];
        st.n_swallowed = swallowed;
        st.n_alive = acc.count - swallowed;
        st.mean = acc.mean();
        st.std_err = acc.std_err();
        st.m0 = m0;
        const double dev = std::abs(st.mean - m0);
        st.z_score = st.std_err > 0 ? dev / st.std_err : 0.0;
        st.pass = dev < std::max(3.0 * st.std_err, rep.rel_tol * std::abs(m0));
        all_pass = all_pass && st.pass;
        if (acc.count == 0) rep.inconclusive = true;
        rep.checkpoints.push_back(st);
    }
    rep.pass = all_pass && !rep.inconclusive;
    return rep;
}

ExponentReport exponent_regression(double kappa, double h, double theta,
                                   const std::vector<double>& t_grid, std::size_t n_paths,
                                   double dt, std::uint64_t seed, int threads, double rel_tol) {
    if (t_grid.size() < 2) throw divisor_error("exponent_regression: need at least 2 grid points");
    const SleParams params = SleParams::forward(kappa);
    const CheckpointPlan plan = plan_checkpoints(t_grid, dt);
    const int n_threads = resolve_threads(threads);
    const std::size_t n_cp = t_grid.size();
    const cplx z0 = std::exp(cplx{0.0, theta});

    std::vector<std::vector<MomentAccumulator>> locals(static_cast<std::size_t>(n_threads));
    for (auto& l : locals) l.resize(n_cp);

    run_parallel(n_paths, n_threads, [&](int tid, std::size_t lo, std::size_t hi) {
        auto& local = locals[static_cast<std::size_t>(tid)];
        for (std::size_t path = lo; path < hi; ++path) {
            LoewnerState state = make_state(Geometry::Radial, FlowDirection::Forward, 0.0);
            state.track(z0);
            state.jet_order = 1;
            PathRng rng(seed, path);
            const double noise = std::sqrt(kappa * dt);
            std::size_t next_cp = 0;
            for (std::size_t cp = 0; cp < n_cp && plan.step_index[cp] == 0; ++cp) {
                local[cp].add(cplx{1.0, 0.0});
                ++next_cp;
            }
            bool alive = true;
            for (std::size_t n = 1; n <= plan.n_steps; ++n) {
                if (alive) {
                    const double gap_before =
                        std::remainder(std::arg(state.tracked[0].g) - state.driving,
                                       2.0 * pi());
                    const double next = state.driving + noise * rng.next_normal();
                    step(state, next, dt);
                    alive = state.tracked[0].alive;
                    if (alive) {
                        // Brownian-bridge correction for within-step hits of the
                        // driving on the boundary image
                        const double gap_after =
                            std::remainder(std::arg(state.tracked[0].g) - state.driving,
                                           2.0 * pi());
                        if (gap_before * gap_after > 0.0) {
                            const double p_hit = bessel_bridge_hit(
                                std::abs(gap_before), std::abs(gap_after), kappa, dt);
                            if (rng.next_unit() < p_hit) alive = false;
                        } else if (std::abs(gap_before) + std::abs(gap_after) < pi()) {
                            alive = false;  // crossed through zero within the step
                        }
                    }
                }
                while (next_cp < n_cp && plan.step_index[next_cp] == n) {
                    const auto& q = state.tracked[0];
                    const double w =
                        alive ? (h == 0.0 ? 1.0 : std::pow(std::abs(q.g1), h)) : 0.0;
                    local[next_cp].add(cplx{w, 0.0});
                    ++next_cp;
                }
            }
        }
    });

    ExponentReport rep;
    rep.paths = n_paths;
    rep.t_grid = t_grid;
    const SleParams p6 = params;
    LswBoundary ref(theta, h, p6);
    rep.expected_slope = -2.0 * ref.hq();

    std::vector<double> logs, weights, ts;
    for (std::size_t cp = 0; cp < n_cp; ++cp) {
        MomentAccumulator acc;
        for (const auto& l : locals) acc.merge(l[cp]);
        const double m = acc.mean().real();
        const double se = acc.std_err();
        rep.means.push_back(m);
        rep.std_errs.push_back(se);
        // shrink the grid: drop starved trailing points (mean below ~100/N)
        if (m <= 100.0 / static_cast<double>(n_paths)) break;
        ts.push_back(t_grid[cp]);
        logs.push_back(std::log(m));
        weights.push_back(m * m / std::max(se * se, 1e-300));  // var(log m) = (se/m)^2
    }
    if (ts.size() < 2)
        throw divisor_error("exponent_regression: insufficient surviving paths");
    // weighted least squares for log m = c0 + slope * t
    double sw = 0, swt = 0, swt2 = 0, swy = 0, swty = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double w = weights[i];
        sw += w;
        swt += w * ts[i];
        swt2 += w * ts[i] * ts[i];
        swy += w * logs[i];
        swty += w * ts[i] * logs[i];
    }
    const double det = sw * swt2 - swt * swt;
    rep.slope = (sw * swty - swt * swy) / det;
    rep.slope_stderr = std::sqrt(sw / det);
    rep.pass = std::abs(rep.slope - rep.expected_slope) <
               rel_tol * std::abs(rep.expected_slope);
    return rep;
}

RestrictionReport restriction_probability_test(const VerticalSlit& slit, std::size_t n_paths,
                                               double t_end, double dt, std::uint64_t seed,
                                               int threads, double rel_tol, int n_samples) {
    (void)n_samples;
    const SleParams params = SleParams::forward(8.0 / 3.0);
    const int n_threads = resolve_threads(threads);
    const auto n_steps = static_cast<std::size_t>(std::llround(t_end / dt));

    struct Local {
        KahanSum survive, mart, mart2;
        std::size_t count = 0;
    };
    std::vector<Local> locals(static_cast<std::size_t>(n_threads));

    run_parallel(n_paths, n_threads, [&](int tid, std::size_t lo, std::size_t hi) {
        Local& local = locals[static_cast<std::size_t>(tid)];
        for (std::size_t path = lo; path < hi; ++path) {
            RestrictionPath rp;
            rp.init(slit, params, 0);
            PathRng rng(seed, path);
            const double noise = std::sqrt(params.kappa * dt);
            for (std::size_t n = 0; n < n_steps && !rp.mart_frozen; ++n) {
                const double next = rp.state.driving + noise * rng.next_normal();
                rp.advance(next, dt);
            }
            const double m = rp.martingale();
            local.survive.add(rp.mart_frozen ? 0.0 : 1.0);
            local.mart.add(m);
            local.mart2.add(m * m);
            ++local.count;
        }
    });

    RestrictionReport rep;
    rep.paths = n_paths;
    KahanSum survive, mart, mart2;
    std::size_t count = 0;
    for (const auto& l : locals) {
        survive.merge(l.survive);
        mart.merge(l.mart);
        mart2.merge(l.mart2);
        count += l.count;
    }
    const double n = static_cast<double>(count);
    // survival-extrapolated avoidance estimate: mean of the stopped martingale
    rep.p_mc = mart.value() / n;
    rep.p_raw = survive.value() / n;  // raw share of unstopped paths
    rep.truncation_bias = rep.p_raw - rep.p_mc;
    const double var = std::max(0.0, mart2.value() / n - rep.p_mc * rep.p_mc);
    rep.ci = std::sqrt(var / n);
    rep.p_formula = std::pow(slit.d1(0.0), h12(params));
    rep.pass = std::abs(rep.p_mc - rep.p_formula) < rel_tol * rep.p_formula;
    return rep;
}

}  // namespace slecg
