#include "plate/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace plate {

void TimeGrid::validate() const {
    if (!std::isfinite(t0) || !std::isfinite(tf) || !(tf > t0))
        throw std::invalid_argument("time grid: tf must be greater than t0");
    if (ns < 2) throw std::invalid_argument("time grid: ns must be at least 2");
}

double TimeGrid::time(int k) const noexcept {
    if (k == ns - 1) return tf;
    return t0 + k * (tf - t0) / (ns - 1);
}

const char* to_string(Method m) noexcept {
    return m == Method::ImplicitTrapezoidal ? "trapezoidal" : "rk4";
}

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw std::invalid_argument("integrator: tolerances must be positive");
    if (max_step < 0.0 || initial_step < 0.0)
        throw std::invalid_argument("integrator: step sizes must be non-negative");
}

// ---------------------------------------------------------------------------

TrapezoidalStepper::Solver& TrapezoidalStepper::factor(double dt) {
    auto it = cache_.find(dt);
    if (it != cache_.end()) return *it->second;

    const Eigen::Index n = sys_.size();
    SparseMatrix id(n, n);
    id.setIdentity();
    SparseMatrix lhs = id - (0.5 * dt) * sys_.A();
    lhs.makeCompressed();
    auto solver = std::make_unique<Solver>();
    solver->compute(lhs);
    ++factorizations_;
    if (solver->info() != Eigen::Success)
        throw SingularStepError("trapezoidal factor is singular for dt = " + std::to_string(dt));
    return *cache_.emplace(dt, std::move(solver)).first->second;
}

Eigen::VectorXd TrapezoidalStepper::step(const Eigen::VectorXd& y, double t, double dt) {
    Solver& lu = factor(dt);
    Eigen::VectorXd rhs = y + (0.5 * dt) * (sys_.A() * y);
    if (!sys_.is_homogeneous()) rhs += (0.5 * dt) * (sys_.b(t) + sys_.b(t + dt));
    ++solves_;
    return lu.solve(rhs);
}

Eigen::VectorXd step_implicit(const SemiDiscreteSystem& sys, const Eigen::VectorXd& y, double t,
                              double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_implicit: dt must be positive");
    TrapezoidalStepper stepper(sys);
    return stepper.step(y, t, dt);
}

Eigen::VectorXd step_rk4(const SemiDiscreteSystem& sys, const Eigen::VectorXd& y, double t,
                         double dt) {
    const Eigen::VectorXd k1 = sys.evaluate(y, t);
    const Eigen::VectorXd k2 = sys.evaluate(y + 0.5 * dt * k1, t + 0.5 * dt);
    const Eigen::VectorXd k3 = sys.evaluate(y + 0.5 * dt * k2, t + 0.5 * dt);
    const Eigen::VectorXd k4 = sys.evaluate(y + dt * k3, t + dt);
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// ---------------------------------------------------------------------------

namespace {

constexpr int kMinLevel = -60;

double error_norm(const Eigen::VectorXd& coarse, const Eigen::VectorXd& fine,
                  const Eigen::VectorXd& y, double divisor, const IntegratorConfig& cfg) {
    const Eigen::Index n = y.size();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y(i)), std::abs(fine(i)));
        const double e = (fine(i) - coarse(i)) / divisor / scale;
        sum += e * e;
    }
    return n ? std::sqrt(sum / static_cast<double>(n)) : 0.0;
}

// Cubic Hermite interpolant on [t0, t0 + h].
Eigen::VectorXd hermite(const Eigen::VectorXd& y0, const Eigen::VectorXd& f0,
                        const Eigen::VectorXd& y1, const Eigen::VectorXd& f1, double h,
                        double s) {
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * y0 + (h10 * h) * f0 + h01 * y1 + (h11 * h) * f1;
}

}  // namespace

Trajectory integrate(const SemiDiscreteSystem& sys, const Eigen::VectorXd& y0,
                     const TimeGrid& grid, const IntegratorConfig& cfg) {
    grid.validate();
    cfg.validate();
    if (y0.size() != sys.size())
        throw std::invalid_argument("integrate: initial state has length " +
                                    std::to_string(y0.size()) + ", expected " +
                                    std::to_string(sys.size()));
    if (!y0.allFinite()) throw std::invalid_argument("integrate: non-finite initial state");

    const bool implicit = cfg.method == Method::ImplicitTrapezoidal;
    const int order = implicit ? 2 : 4;
    const double divisor = std::pow(2.0, order) - 1.0;
    const double grow_below = std::pow(2.0, -(order + 1)) * 0.5;

    const double base = cfg.max_step > 0.0 ? cfg.max_step : grid.interval();
    int level = cfg.initial_step > 0.0
                    ? std::min(0, static_cast<int>(std::floor(std::log2(cfg.initial_step / base))))
                    : -4;

    Trajectory traj;
    traj.times.reserve(static_cast<std::size_t>(grid.ns));
    traj.states.reserve(static_cast<std::size_t>(grid.ns));
    traj.times.push_back(grid.time(0));
    traj.states.push_back(y0);

    TrapezoidalStepper stepper(sys);
    auto advance = [&](const Eigen::VectorXd& y, double t, double h) {
        return implicit ? stepper.step(y, t, h) : step_rk4(sys, y, t, h);
    };

    double t = grid.t0;
    Eigen::VectorXd y = y0;
    Eigen::VectorXd fy = sys.evaluate(y, t);
    int next = 1;
    auto& st = traj.stats;
    auto fail = [&](const std::string& msg, double at) {
        st.linear_solves = stepper.solves();
        st.factorizations = stepper.factorizations();
        throw IntegrationError(msg, at, std::make_shared<const Trajectory>(traj));
    };

    while (next < grid.ns) {
        if (level < kMinLevel)
            fail("step size underflow at t = " + std::to_string(t), t);
        if (st.steps + st.rejections >= cfg.max_steps)
            fail("step limit reached at t = " + std::to_string(t), t);

        const double h = std::ldexp(base, level);
        Eigen::VectorXd coarse, fine;
        try {
            coarse = advance(y, t, h);
            const Eigen::VectorXd mid = advance(y, t, 0.5 * h);
            fine = advance(mid, t + 0.5 * h, 0.5 * h);
        } catch (const SingularStepError&) {
            --level;
            ++st.rejections;
            continue;
        }
        if (!fine.allFinite() || !coarse.allFinite()) {
            --level;
            ++st.rejections;
            continue;
        }

        const double err = error_norm(coarse, fine, y, divisor, cfg);
        if (!(err <= 1.0)) {
            const int drop = std::max(1, static_cast<int>(std::ceil(std::log2(err) / (order + 1))));
            level -= drop;
            ++st.rejections;
            continue;
        }

        const double t_new = t + h;
        const Eigen::VectorXd f_new = sys.evaluate(fine, t_new);
        while (next < grid.ns && grid.time(next) <= t_new) {
            const double s = (grid.time(next) - t) / h;
            traj.times.push_back(grid.time(next));
            traj.states.push_back(hermite(y, fy, fine, f_new, h, s));
            if (!traj.states.back().allFinite()) {
                traj.times.pop_back();
                traj.states.pop_back();
                fail("non-finite state at t = " + std::to_string(grid.time(next)), grid.time(next));
            }
            ++next;
        }

        ++st.steps;
        st.min_step = st.steps == 1 ? h : std::min(st.min_step, h);
        st.max_step = std::max(st.max_step, h);
        t = t_new;
        y = std::move(fine);
        fy = f_new;
        if (err < grow_below && level < 0) ++level;
    }

    st.linear_solves = stepper.solves();
    st.factorizations = stepper.factorizations();
    return traj;
}

Eigen::VectorXd initial_state(const GridSpec& grid, const NodalFunction& winit,
                              const NodalFunction& vinit) {
    const auto n = static_cast<Eigen::Index>(grid.unknowns());
    Eigen::VectorXd y = Eigen::VectorXd::Zero(2 * n);
    Eigen::Index k = 0;
    for (int j = 0; j < grid.ny(); ++j)
        for (int i = 1; i < grid.nx(); ++i, ++k) {
            if (winit) y(k) = winit(grid.x(i), grid.y(j));
            if (vinit) y(n + k) = vinit(grid.x(i), grid.y(j));
        }
    if (!y.allFinite()) throw std::invalid_argument("initial_state: non-finite sample");
    return y;
}

}  // namespace plate
