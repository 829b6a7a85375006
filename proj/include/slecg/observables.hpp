// observables.hpp
// Martingale-observable catalog: closed-form evaluators composed of
// differential weights times M(w_t(z)) over a Loewner state, with per-path
// phase unwrapping for multivalued quantities.
#pragma once

#include <memory>

#include "slecg/driver.hpp"

namespace slecg {

// Continuous branch tracking: accumulates arg along a path; increments are
// principal-branch and must stay below pi per update.
struct PhaseTracker {
    cplx prev{1.0, 0.0};
    double arg = 0.0;
    bool started = false;
    bool wrap_suspect = false;

    double update(cplx v);
    cplx log_of(cplx v);  // log|v| + i * unwrapped arg
};

class Observable {
  public:
    virtual ~Observable() = default;
    // Points the observable needs tracked, in order (installed before t=0).
    virtual std::vector<cplx> tracked_points() const = 0;
    virtual void init(const LoewnerState& s) = 0;
    // Called after every step; returns the current observable value.
    virtual cplx eval(const LoewnerState& s) = 0;
    cplx m0() const { return m0_; }
    // Index of the tracked point whose swallowing stops the observable.
    virtual std::size_t primary_index() const { return 0; }

  protected:
    cplx m0_{0.0, 0.0};
};

// phi = 2a arg w - 2b arg w', w = g - xi (forward chordal).
class SchrammSheffieldChordal : public Observable {
  public:
    SchrammSheffieldChordal(cplx z, const SleParams& p) : z_(z), p_(p) {}
    std::vector<cplx> tracked_points() const override { return {z_}; }
    void init(const LoewnerState& s) override;
    cplx eval(const LoewnerState& s) override;

  private:
    cplx z_;
    SleParams p_;
    PhaseTracker tw_, twp_;
};

// phi = 2a arg(1-w) - a arg w - 2b arg(w'/w), w = g/zeta (forward radial).
class SchrammSheffieldRadial : public Observable {
  public:
    SchrammSheffieldRadial(cplx z, const SleParams& p) : z_(z), p_(p) {}
    std::vector<cplx> tracked_points() const override { return {z_}; }
    void init(const LoewnerState& s) override;
    cplx eval(const LoewnerState& s) override;

  private:
    cplx z_;
    SleParams p_;
    PhaseTracker t1w_, tw_, twpw_;
};

// 1-point vertex observable in the radial geometry,
// M = (wq')^{hq+}(conj wq')^{hq-}(w')^{h+}(conj w')^{h-} w^{nu+} wbar^{nu-}
//     (1-w)^{a tau+}(1-wbar)^{a tau-}(1-|w|^2)^{tau+ tau-}.
class VertexRadial : public Observable {
  public:
    VertexRadial(cplx z, cplx tau_p, cplx tau_m, cplx tauq_p, cplx tauq_m, const SleParams& p);
    std::vector<cplx> tracked_points() const override { return {z_}; }
    void init(const LoewnerState& s) override;
    cplx eval(const LoewnerState& s) override;

    cplx hq_plus() const { return hq_p_; }
    cplx hq_minus() const { return hq_m_; }

  private:
    cplx log_value(const LoewnerState& s);
    cplx z_, tau_p_, tau_m_, tauq_p_, tauq_m_;
    SleParams p_;
    cplx h_p_, h_m_, hq_p_, hq_m_, nu_p_, nu_m_;
    PhaseTracker tw_, twp_, t1w_;
};

// M_t = e^{t/4} (1-w)^{1/3} w^{-1/6} (radial, kappa = 6).
class LswKappa6 : public Observable {
  public:
    explicit LswKappa6(cplx z) : z_(z) {}
    std::vector<cplx> tracked_points() const override { return {z_}; }
    void init(const LoewnerState& s) override;
    cplx eval(const LoewnerState& s) override;

  private:
    cplx z_;
    PhaseTracker tw_, t1w_;
};

// Boundary derivative observable
// M_t = e^{2 hq t} |w'|^h (sin^2(theta_t/2))^{a sigma / 2} at e^{i theta}.
class LswBoundary : public Observable {
  public:
    LswBoundary(double theta, double h, const SleParams& p);
    std::vector<cplx> tracked_points() const override;
    void init(const LoewnerState& s) override;
    cplx eval(const LoewnerState& s) override;
    double sigma() const { return sigma_; }
    double hq() const { return hq_; }

  private:
    double theta_, h_;
    SleParams p_;
    double sigma_ = 0.0, hq_ = 0.0;
    PhaseTracker tw_;
};

// n_t(z) = -2a log|f_t(z) - xi_t| + 2b log|f_t'(z)| (backward chordal).
class SheffieldNeumann : public Observable {
  public:
    SheffieldNeumann(cplx z, const SleParams& p) : z_(z), p_(p) {}
    std::vector<cplx> tracked_points() const override { return {z_}; }
    void init(const LoewnerState& s) override;
    cplx eval(const LoewnerState& s) override;

  private:
    cplx z_;
    SleParams p_;
};

// SLE(0) integrals of motion along the deterministic radial flow:
// arg((1-w) w^{-3/2} w') and S_w + (3/8)(w'/w)^2 (1 - 4w/(1-w)^2).
struct Sle0Invariants {
    PhaseTracker tw, t1w, twp;
    bool started = false;

    double first(const LoewnerState& s, std::size_t idx);
    static cplx second(const LoewnerState& s, std::size_t idx);
};

// --- Green's functions and Hadamard variation ------------------------------

enum class GreensKind { DirichletH, DirichletD, NeumannH };

double eval_greens(GreensKind kind, cplx z, cplx w);

// d/dt G_{D_t}(z1,z2) along the radial flow, arguments w_i = w_t(z_i).
double hadamard_dirichlet_rate(cplx w1, cplx w2);
// d/dt G_N(f_t(z1), f_t(z2)) along backward chordal, xi the driving value.
double hadamard_neumann_rate(cplx f1, cplx f2, double xi);

// --- Friedrich-Werner recursion --------------------------------------------

// R(1; e^{i theta_1}, ..., e^{i theta_n}) by the Ward-equation recursion with
// base R() = 1. Angles must be distinct and nonzero mod 2 pi.
cplx virasoro_npoint_recursion(const std::vector<double>& angles, double kappa = 8.0 / 3.0);

// Closed form of the n=1 value: h12/(z(1-z)^2) + h012/z^2 with z = e^{i theta}.
cplx virasoro_one_point(cplx z, double kappa);

// --- factory ----------------------------------------------------------------

std::unique_ptr<Observable> make_observable(const std::string& kind, cplx z,
                                            const SleParams& p);

}  // namespace slecg
