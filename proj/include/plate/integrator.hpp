#pragma once

// Time integration of y' = A y + b(t).
//
// The default method is the implicit trapezoidal rule with step-doubling
// error control. Step sizes live on a geometric ladder dt = base * 2^level so
// that sparse LU factorizations of (I - dt/2 A) can be cached per level.
// Classical RK4 on the same controller is available as an explicit
// cross-check. Output at the requested sample times uses cubic Hermite
// interpolation between accepted steps.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "plate/mesh.hpp"
#include "plate/operator.hpp"

namespace plate {

struct TimeGrid {
    double t0 = 0.0;
    double tf = 1.0;
    int ns = 101;

    void validate() const;
    /// Exact sample time k: t0 + k (tf - t0) / (ns - 1).
    double time(int k) const noexcept;
    double interval() const noexcept { return (tf - t0) / (ns - 1); }
};

enum class Method { ImplicitTrapezoidal, ExplicitRK4 };

const char* to_string(Method m) noexcept;

struct IntegratorConfig {
    Method method = Method::ImplicitTrapezoidal;
    double rel_tol = 1e-6;
    double abs_tol = 1e-9;
    /// Largest internal step; 0 means one output interval.
    double max_step = 0.0;
    /// First step to try; 0 picks max_step / 16.
    double initial_step = 0.0;
    std::size_t max_steps = 10'000'000;

    void validate() const;
};

struct SolverStats {
    std::size_t steps = 0;
    std::size_t rejections = 0;
    std::size_t linear_solves = 0;
    std::size_t factorizations = 0;
    double min_step = 0.0;
    double max_step = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    SolverStats stats;
};

/// Integration stopped before reaching the final time. Carries the samples
/// produced so far.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double t_reached,
                     std::shared_ptr<const Trajectory> partial = nullptr)
        : std::runtime_error(what), t_reached_(t_reached), partial_(std::move(partial)) {}
    double t_reached() const noexcept { return t_reached_; }
    const std::shared_ptr<const Trajectory>& partial() const noexcept { return partial_; }

private:
    double t_reached_;
    std::shared_ptr<const Trajectory> partial_;
};

/// The factor (I - dt/2 A) was numerically singular for this dt.
class SingularStepError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Trapezoidal stepper with one cached sparse LU factorization per step size.
class TrapezoidalStepper {
public:
    explicit TrapezoidalStepper(const SemiDiscreteSystem& sys) : sys_(sys) {}

    /// (I - dt/2 A) y+ = (I + dt/2 A) y + dt/2 (b(t) + b(t + dt)).
    Eigen::VectorXd step(const Eigen::VectorXd& y, double t, double dt);

    std::size_t factorizations() const noexcept { return factorizations_; }
    std::size_t solves() const noexcept { return solves_; }

private:
    using Solver = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;
    Solver& factor(double dt);

    const SemiDiscreteSystem& sys_;
    std::map<double, std::unique_ptr<Solver>> cache_;
    std::size_t factorizations_ = 0;
    std::size_t solves_ = 0;
};

/// One trapezoidal step with a fresh factorization.
Eigen::VectorXd step_implicit(const SemiDiscreteSystem& sys, const Eigen::VectorXd& y, double t,
                              double dt);

/// One classical fourth-order Runge-Kutta step.
Eigen::VectorXd step_rk4(const SemiDiscreteSystem& sys, const Eigen::VectorXd& y, double t,
                         double dt);

Trajectory integrate(const SemiDiscreteSystem& sys, const Eigen::VectorXd& y0,
                     const TimeGrid& grid, const IntegratorConfig& cfg = {});

using NodalFunction = std::function<double(double x, double y)>;

/// Samples w and v initial data at the unknown nodes; empty functions mean 0.
Eigen::VectorXd initial_state(const GridSpec& grid, const NodalFunction& winit,
                              const NodalFunction& vinit);

}  // namespace plate
