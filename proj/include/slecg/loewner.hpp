// loewner.hpp
// Numerical Loewner evolution: forward/backward, chordal/radial; tracks point
// images, derivatives up to third order, force points and swallowing times.
#pragma once

#include <optional>
#include <vector>

#include "slecg/partition.hpp"

namespace slecg {

inline constexpr double kSwallowEps = 1e-4;
inline constexpr double kDtMin = 1e-9;

struct TrackedPoint {
    cplx z0{0.0, 0.0};
    cplx g{0.0, 0.0};
    cplx g1{1.0, 0.0};
    cplx g2{0.0, 0.0};
    cplx g3{0.0, 0.0};
    bool alive = true;
    bool boundary = false;  // swallowing detected by gap sign crossing
    double tau = -1.0;      // swallowing time; < 0 means none
};

struct ForcePointState {
    cplx q0{0.0, 0.0};
    cplx image{0.0, 0.0};
    bool boundary = true;
    bool alive = true;
};

struct LoewnerState {
    Geometry geometry = Geometry::Chordal;
    FlowDirection direction = FlowDirection::Forward;
    double t = 0.0;
    double driving = 0.0;  // xi_t (chordal) or theta_t (radial)
    int jet_order = 3;     // highest tracked derivative (1..3)
    std::vector<TrackedPoint> tracked;
    std::vector<ForcePointState> force_points;
    bool truncated = false;  // set when a force point collides with the driving

    cplx driving_point() const;  // xi on R, or e^{i theta}
    void track(cplx z0);
    void add_force_point(cplx q, bool boundary);
};

LoewnerState make_state(Geometry geometry, FlowDirection direction, double driving0 = 0.0);

// One step with linear driving interpolation between the current value and
// driving_next; RK4 on the image and variational ODEs with automatic
// substepping near the singularity.
void step_chordal(LoewnerState& state, double xi_next, double dt);
void step_radial(LoewnerState& state, double theta_next, double dt);
void step_backward(LoewnerState& state, double driving_next, double dt, Geometry geometry);

// Dispatch on the state's own geometry/direction.
void step(LoewnerState& state, double driving_next, double dt);

std::optional<double> swallow_time(const LoewnerState& state, cplx z0);

}  // namespace slecg
