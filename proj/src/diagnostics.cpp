#include "plate/diagnostics.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

namespace plate {

double quadrature_weight(const GridSpec& grid, int i, int j) noexcept {
    const double wx = (i == 0 || i == grid.nx() - 1) ? 0.5 : 1.0;
    const double wy = (j == 0 || j == grid.ny() - 1) ? 0.5 : 1.0;
    return wx * wy * grid.dx() * grid.dy();
}

double potential_energy(const ExtendedField& w, double D, double nu) {
    w.require_ghosts("potential_energy");
    const GridSpec& g = w.grid();
    const double cx = 1.0 / (g.dx() * g.dx());
    const double cy = 1.0 / (g.dy() * g.dy());
    // nu (lap w)^2 + (1 - nu)(w_xx^2 + w_yy^2) at the nodes, trapezoidal rule
    double nodal = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const double o = w(i, j);
            const double wxx = cx * (w(i - 1, j) - 2.0 * o + w(i + 1, j));
            const double wyy = cy * (w(i, j - 1) - 2.0 * o + w(i, j + 1));
            const double lap = wxx + wyy;
            nodal += quadrature_weight(g, i, j) * (nu * lap * lap + (1.0 - nu) * (wxx * wxx + wyy * wyy));
        }
    // 2 (1 - nu) w_xy^2 at cell centres, midpoint rule. This pairing makes the
    // discrete energy the exact quadratic form of the 13-point operator.
    const double cxy = 1.0 / (g.dx() * g.dy());
    double twist = 0.0;
    for (int j = 0; j + 1 < g.ny(); ++j)
        for (int i = 0; i + 1 < g.nx(); ++i) {
            const double wxy = cxy * (w(i + 1, j + 1) - w(i, j + 1) - w(i + 1, j) + w(i, j));
            twist += wxy * wxy;
        }
    twist *= 2.0 * (1.0 - nu) * g.dx() * g.dy();
    return 0.5 * D * (nodal + twist);
}

double kinetic_energy(std::span<const double> v, const GridSpec& grid) {
    if (v.size() != grid.unknowns()) throw ContractViolation("kinetic_energy: wrong length");
    double sum = 0.0;
    std::size_t k = 0;
    for (int j = 0; j < grid.ny(); ++j)
        for (int i = 1; i < grid.nx(); ++i, ++k) sum += quadrature_weight(grid, i, j) * v[k] * v[k];
    return 0.5 * sum;
}

EnergySample state_energy(const PlateModel& model, const Eigen::VectorXd& y, double t) {
    const auto n = static_cast<std::size_t>(model.grid().unknowns());
    if (static_cast<std::size_t>(y.size()) != 2 * n)
        throw ContractViolation("state_energy: state has wrong length");
    const ExtendedField wf = model.displacement_field(std::span<const double>(y.data(), n));
    EnergySample s;
    s.t = t;
    s.U = potential_energy(wf, model.params().D, model.params().nu);
    s.K = kinetic_energy(std::span<const double>(y.data() + n, n), model.grid());
    s.E = s.U + s.K;
    return s;
}

std::vector<EnergySample> energy_series(const Trajectory& traj, const PlateModel& model) {
    std::vector<EnergySample> out;
    out.reserve(traj.states.size());
    for (std::size_t k = 0; k < traj.states.size(); ++k)
        out.push_back(state_energy(model, traj.states[k], traj.times[k]));
    return out;
}

double max_relative_drift(const std::vector<EnergySample>& series) {
    if (series.empty() || series.front().E == 0.0) return 0.0;
    const double e0 = series.front().E;
    double worst = 0.0;
    for (const auto& s : series) worst = std::max(worst, std::abs(s.E - e0) / e0);
    return worst;
}

// ---------------------------------------------------------------------------

namespace {

SpectralResult dense_abscissa(const SparseMatrix& a) {
    const Eigen::MatrixXd dense(a);
    Eigen::EigenSolver<Eigen::MatrixXd> es(dense, false);
    SpectralResult r;
    r.method = "dense";
    if (es.info() != Eigen::Success) {
        r.converged = false;
        r.abscissa = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    const auto& ev = es.eigenvalues();
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < ev.size(); ++k)
        if (ev(k).real() > ev(best).real()) best = k;
    r.abscissa = ev(best).real();
    r.dominant = ev(best);
    return r;
}

// Shift-invert Arnoldi about zero: Ritz values of A^{-1} with the largest
// modulus are the eigenvalues of A nearest the origin, i.e. the low modes
// where flow-induced coalescence happens.
SpectralResult arnoldi_abscissa(const SparseMatrix& a, int krylov_dim) {
    SpectralResult r;
    r.method = "shift-invert-arnoldi";
    const Eigen::Index n = a.rows();
    const int m = static_cast<int>(std::min<Eigen::Index>(krylov_dim, n));

    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) {
        r.converged = false;
        r.abscissa = 0.0;  // singular A has a zero eigenvalue
        return r;
    }

    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, m + 1);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd v0 = Eigen::VectorXd::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) v0(i) += 0.1 * std::sin(1.0 + 3.0 * static_cast<double>(i));
    V.col(0) = v0.normalized();
    int used = m;
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXd w = lu.solve(V.col(j));
        for (int pass = 0; pass < 2; ++pass)
            for (int i = 0; i <= j; ++i) {
                const double h = V.col(i).dot(w);
                H(i, j) += h;
                w -= h * V.col(i);
            }
        H(j + 1, j) = w.norm();
        if (H(j + 1, j) < 1e-14) {
            used = j + 1;
            break;
        }
        V.col(j + 1) = w / H(j + 1, j);
    }

    const Eigen::MatrixXd Hm = H.topLeftCorner(used, used);
    Eigen::EigenSolver<Eigen::MatrixXd> es(Hm, true);
    const auto theta = es.eigenvalues();
    const auto S = es.eigenvectors();
    const double beta = used < m || used == n ? 0.0 : H(used, used - 1);

    double best = -std::numeric_limits<double>::infinity();
    bool best_converged = false;
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
        if (std::abs(theta(k)) == 0.0) continue;
        const std::complex<double> lambda = 1.0 / theta(k);
        const double resid = beta * std::abs(S(used - 1, k)) / std::abs(theta(k));
        const bool ok = resid <= 1e-8;
        if (!ok) continue;
        if (lambda.real() > best) {
            best = lambda.real();
            r.dominant = lambda;
            best_converged = ok;
        }
    }
    r.converged = best_converged;
    r.abscissa = best;
    return r;
}

}  // namespace

SpectralResult spectral_abscissa(const SemiDiscreteSystem& sys, const SpectralOptions& opts) {
    if (sys.size() == 0) throw std::invalid_argument("spectral_abscissa: empty system");
    if (sys.size() <= opts.dense_limit) return dense_abscissa(sys.A());
    return arnoldi_abscissa(sys.A(), opts.krylov_dim);
}

const char* to_string(FlowAxis a) noexcept { return a == FlowAxis::A1 ? "a1" : "a2"; }

namespace {

std::string show(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

StabilityReport find_critical_flow(const PlateParams& base, const GridSpec& grid, FlowAxis axis,
                                   double lo, double hi, const BoundaryLoads& loads,
                                   double rel_width, const SpectralOptions& opts) {
    if (!(hi > lo)) throw std::invalid_argument("bracket must satisfy lo < hi");
    if (!(rel_width > 0.0)) throw std::invalid_argument("relative width must be positive");

    StabilityReport rep{.grid = grid, .params = base};
    rep.axis = axis;
    auto abscissa_at = [&](double value) {
        PlateParams p = base;
        (axis == FlowAxis::A1 ? p.a1 : p.a2) = value;
        const SemiDiscreteSystem sys = assemble(grid, p, loads);
        rep.norm_A = sys.norm_inf();
        const SpectralResult r = spectral_abscissa(sys, opts);
        if (!r.converged) rep.warnings.push_back("eigensolver did not converge at " + show(value));
        return r.abscissa;
    };

    rep.abscissa_lo = abscissa_at(lo);
    rep.abscissa_hi = abscissa_at(hi);
    rep.history.push_back({lo, rep.abscissa_lo, hi - lo});
    rep.history.push_back({hi, rep.abscissa_hi, hi - lo});
    if (!(rep.abscissa_lo < 0.0 && rep.abscissa_hi > 0.0))
        throw std::invalid_argument("no sign change: abscissa(" + show(lo) + ") = " +
                                    show(rep.abscissa_lo) + ", abscissa(" + show(hi) +
                                    ") = " + show(rep.abscissa_hi));

    double a = lo, b = hi;
    double prev = rep.abscissa_lo;
    const double target = rel_width * (hi - lo);
    while (b - a > target) {
        const double mid = 0.5 * (a + b);
        const double alpha = abscissa_at(mid);
        ++rep.iterations;
        if (alpha < prev - 1e-9 * rep.norm_A)
            rep.warnings.push_back("non-monotone abscissa near " + show(mid));
        if (alpha < 0.0) {
            a = mid;
            prev = alpha;
        } else {
            b = mid;
        }
        rep.history.push_back({mid, alpha, b - a});
    }
    rep.critical = 0.5 * (a + b);
    rep.final_width = b - a;
    rep.abscissa_at_critical = abscissa_at(rep.critical);
    rep.params = base;
    (axis == FlowAxis::A1 ? rep.params.a1 : rep.params.a2) = rep.critical;
    return rep;
}

}  // namespace plate
