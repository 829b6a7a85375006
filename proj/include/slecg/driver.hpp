// driver.hpp
// Driving-process generation for SLE[beta]: forward/backward x chordal/radial,
// with force-point co-evolution and counter-based per-path RNG streams.
#pragma once

#include <cstdint>
#include <functional>

#include "slecg/loewner.hpp"

namespace slecg {

// Philox4x32-10 counter-based generator; streams are indexed by
// (seed, path_index) so path generation is embarrassingly parallel.
class PathRng {
  public:
    PathRng(std::uint64_t seed, std::uint64_t path_index);

    std::uint32_t next_u32();
    double next_unit();    // uniform in (0, 1]
    double next_normal();  // standard normal, Box-Muller

  private:
    void refill();
    std::uint32_t key_[2];
    std::uint32_t counter_[4];
    std::uint32_t out_[4];
    int pos_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

enum class DriftMode { Standard, RhoSum, PartitionGradient };

struct DrivingConfig {
    SleParams params;
    Geometry geometry = Geometry::Chordal;
    Divisor beta;  // symmetric, NC_b, charge a at the initial driving point
    DriftMode drift_mode = DriftMode::Standard;
    std::uint64_t seed = 1;
    double dt = 1e-4;
    double t_end = 1.0;
    double driving0 = 0.0;
    double noise_scale = 1.0;  // 0 disables noise (deterministic controls)
    // force points (chordal: boundary reals / interior; radial: circle angles)
    std::vector<std::pair<cplx, double>> force_points;  // (position, rho)
    double eta = 0.0;                                   // radial spin drift
};

// Explicit rho-sum drift from the current force-point images.
double rho_sum_drift(const DrivingConfig& cfg, const LoewnerState& state);
// kappa d log Z drift computed from the evolved background charge.
double partition_drift(const DrivingConfig& cfg, const LoewnerState& state);
// Drift per the configured mode.
double drift_value(const DrivingConfig& cfg, const LoewnerState& state);

// Divisor of the evolved background charge at the state's current data
// (driving charge a at the driving value, force charges at current images,
// balancing charge at q).
Divisor evolved_beta(const DrivingConfig& cfg, const LoewnerState& state);

struct PathSample {
    double t;
    double driving;
};

// Runs one path; observer is called after every step (and once at t=0).
// Returns the number of steps taken (may stop early on truncation).
std::size_t run_path(const DrivingConfig& cfg, std::uint64_t path_index, LoewnerState& state,
                     const std::function<void(const LoewnerState&)>& observer = nullptr);

struct PathRecord {
    std::vector<double> t;
    std::vector<double> driving;
    std::vector<std::vector<cplx>> tracked_g;
    std::vector<std::vector<cplx>> tracked_g1;
    std::vector<std::vector<bool>> tracked_alive;
    std::vector<std::vector<cplx>> force_images;
    bool truncated = false;
};

// Full series for CSV export; tracked seeds are installed before running.
PathRecord generate_path(const DrivingConfig& cfg, std::uint64_t path_index,
                         const std::vector<cplx>& tracked_points);

}  // namespace slecg
