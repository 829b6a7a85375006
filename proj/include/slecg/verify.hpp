// verify.hpp
// Statistical and deterministic verification: Monte Carlo martingale tests,
// exponent regressions, restriction probability comparison.
#pragma once

#include <functional>
#include <string>

#include "slecg/observables.hpp"
#include "slecg/restriction.hpp"

namespace slecg {

// Compensated (Kahan) accumulator; merge order does not affect results beyond
// floating-point associativity of the final combine.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x);
    void merge(const KahanSum& o);
    double value() const { return sum; }
};

struct MomentAccumulator {
    KahanSum re, im, re2, im2;
    std::size_t count = 0;

    void add(cplx v);
    void merge(const MomentAccumulator& o);
    cplx mean() const;
    double std_err() const;  // sqrt((var_re + var_im)/n)
};

struct CheckpointStats {
    double t = 0.0;
    std::size_t n_alive = 0;
    std::size_t n_swallowed = 0;
    cplx mean{0.0, 0.0};
    double std_err = 0.0;
    cplx m0{0.0, 0.0};
    double z_score = 0.0;
    bool pass = false;
};

struct MartingaleReport {
    std::string observable_id;
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    double rel_tol = 0.02;
    std::vector<CheckpointStats> checkpoints;
    bool inconclusive = false;
    bool pass = false;
};

struct McOptions {
    std::size_t n_paths = 50000;
    double r_stop = 0.15;  // freeze the observable at this driving distance
    double rel_tol = 0.02;
    int threads = 0;  // 0 = hardware concurrency
};

using ObservableFactory = std::function<std::unique_ptr<Observable>()>;

// E[M_{t and tau_stop}] estimated with optional stopping at swallowing or at
// the stopping radius; pass iff |mean - M0| < max(3 SE, rel_tol |M0|) at every
// checkpoint.
MartingaleReport martingale_test(const DrivingConfig& cfg, const ObservableFactory& make_obs,
                                 const std::string& observable_id,
                                 const std::vector<double>& checkpoints, const McOptions& opt);

struct ExponentReport {
    double slope = 0.0;
    double expected_slope = 0.0;
    double slope_stderr = 0.0;
    std::vector<double> t_grid;
    std::vector<double> means;      // E[|w'|^h 1_{tau > t}]
    std::vector<double> std_errs;
    std::size_t paths = 0;
    bool pass = false;
};

// Log-linear regression of the boundary derivative moment against t for
// radial standard SLE; expected slope -2 h_q.
ExponentReport exponent_regression(double kappa, double h, double theta,
                                   const std::vector<double>& t_grid, std::size_t n_paths,
                                   double dt, std::uint64_t seed, int threads = 0,
                                   double rel_tol = 0.10);

struct RestrictionReport {
    // survival-extrapolated avoidance estimate: the mean of the restriction
    // martingale stopped at the conformal-proximity time or the horizon
    double p_mc = 0.0;
    double p_raw = 0.0;  // raw share of never-stopped paths (finite-horizon biased)
    double p_formula = 0.0;
    double ci = 0.0;  // standard error of p_mc
    double truncation_bias = 0.0;  // p_raw - p_mc
    std::size_t paths = 0;
    bool pass = false;
};

RestrictionReport restriction_probability_test(const VerticalSlit& slit, std::size_t n_paths,
                                               double t_end, double dt, std::uint64_t seed,
                                               int threads = 0, double rel_tol = 0.05,
                                               int n_samples = 16);

}  // namespace slecg
