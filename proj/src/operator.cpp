#include "plate/operator.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace plate {

void PlateParams::validate() const {
    if (!(D > 0.0) || !std::isfinite(D)) throw std::invalid_argument("D must be positive");
    if (!(nu > 0.0 && nu < 0.5))
        throw std::invalid_argument("nu (Poisson ratio) must lie in (0, 1/2), got " +
                                    std::to_string(nu));
    if (!(k0 >= 0.0) || !std::isfinite(k0)) throw std::invalid_argument("k0 must be >= 0");
    if (!(k1 >= 0.0) || !std::isfinite(k1)) throw std::invalid_argument("k1 must be >= 0");
    if (!std::isfinite(a1) || !std::isfinite(a2))
        throw std::invalid_argument("flow parameters a1, a2 must be finite");
}

std::vector<double> apply_biharmonic(const ExtendedField& w) {
    w.require_ghosts("apply_biharmonic");
    const GridSpec& g = w.grid();
    const double dx2 = g.dx() * g.dx();
    const double dy2 = g.dy() * g.dy();
    const double cx = 1.0 / (dx2 * dx2);
    const double cy = 1.0 / (dy2 * dy2);
    const double cxy = 2.0 / (dx2 * dy2);
    std::vector<double> out(g.unknowns());
    std::size_t k = 0;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 1; i < g.nx(); ++i) {
            const double o = w(i, j);
            const double xxxx = w(i - 2, j) - 4.0 * w(i - 1, j) + 6.0 * o - 4.0 * w(i + 1, j) + w(i + 2, j);
            const double yyyy = w(i, j - 2) - 4.0 * w(i, j - 1) + 6.0 * o - 4.0 * w(i, j + 1) + w(i, j + 2);
            const double xxyy = w(i + 1, j + 1) + w(i - 1, j + 1) + w(i + 1, j - 1) + w(i - 1, j - 1) -
                                2.0 * (w(i + 1, j) + w(i - 1, j) + w(i, j + 1) + w(i, j - 1)) + 4.0 * o;
            out[k++] = cx * xxxx + cy * yyyy + cxy * xxyy;
        }
    }
    return out;
}

std::vector<double> apply_laplacian(const ExtendedField& w) {
    w.require_ghosts("apply_laplacian");
    const GridSpec& g = w.grid();
    const double cx = 1.0 / (g.dx() * g.dx());
    const double cy = 1.0 / (g.dy() * g.dy());
    std::vector<double> out(g.unknowns());
    std::size_t k = 0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 1; i < g.nx(); ++i) {
            const double o = w(i, j);
            out[k++] = cx * (w(i - 1, j) - 2.0 * o + w(i + 1, j)) +
                       cy * (w(i, j - 1) - 2.0 * o + w(i, j + 1));
        }
    return out;
}

std::vector<double> apply_flow(const ExtendedField& w, double a1, double a2) {
    w.require_ghosts("apply_flow");
    const GridSpec& g = w.grid();
    std::vector<double> out(g.unknowns(), 0.0);
    if (a1 == 0.0 && a2 == 0.0) return out;
    const double cx = a1 / (2.0 * g.dx());
    const double cy = a2 / (2.0 * g.dy());
    std::size_t k = 0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 1; i < g.nx(); ++i)
            out[k++] = cx * (w(i + 1, j) - w(i - 1, j)) + cy * (w(i, j + 1) - w(i, j - 1));
    return out;
}

// ---------------------------------------------------------------------------

PlateModel::PlateModel(const GridSpec& grid, const PlateParams& params, BoundaryLoads loads,
                       ForcingSpec forcing)
    : grid_(grid),
      params_(params),
      loads_(std::move(loads)),
      forcing_(std::move(forcing)),
      ghosts_((params.validate(), grid), params.nu) {}

std::vector<double> PlateModel::forcing_samples(double t) const {
    std::vector<double> out(grid_.unknowns(), 0.0);
    if (forcing_.is_zero()) return out;
    std::size_t k = 0;
    for (int j = 0; j < grid_.ny(); ++j)
        for (int i = 1; i < grid_.nx(); ++i) out[k++] = forcing_.f(grid_.x(i), grid_.y(j), t);
    return out;
}

ExtendedField PlateModel::displacement_field(std::span<const double> w, bool with_loads) const {
    ExtendedField field(grid_);
    field.set_unknowns(w);
    ghosts_.fill_all(field, with_loads ? loads_ : BoundaryLoads{});
    return field;
}

Eigen::VectorXd PlateModel::evaluate(const Eigen::VectorXd& y, double t, bool with_loads,
                                     bool with_forcing) const {
    const auto n = static_cast<Eigen::Index>(grid_.unknowns());
    if (y.size() != 2 * n)
        throw ContractViolation("rhs: state has length " + std::to_string(y.size()) +
                                ", expected " + std::to_string(2 * n));
    if (!y.allFinite()) throw std::domain_error("rhs: non-finite state entry");

    const std::span<const double> w(y.data(), static_cast<std::size_t>(n));
    const std::span<const double> v(y.data() + n, static_cast<std::size_t>(n));

    const ExtendedField wf = displacement_field(w, with_loads);
    const auto bih = apply_biharmonic(wf);
    const auto flow = apply_flow(wf, params_.a1, params_.a2);

    std::vector<double> lap_v;
    if (params_.k1 != 0.0) {
        // velocity ghosts always use homogeneous boundary data
        ExtendedField vf(grid_);
        vf.set_unknowns(v);
        ghosts_.fill_all(vf, BoundaryLoads{});
        lap_v = apply_laplacian(vf);
    }
    const auto f = with_forcing ? forcing_samples(t) : std::vector<double>(static_cast<std::size_t>(n), 0.0);

    Eigen::VectorXd out(2 * n);
    out.head(n) = y.tail(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto u = static_cast<std::size_t>(k);
        double acc = f[u] - params_.D * bih[u] - flow[u] - params_.k0 * v[u];
        if (!lap_v.empty()) acc += params_.k1 * lap_v[u];
        out(n + k) = acc;
    }
    return out;
}

Eigen::VectorXd PlateModel::rhs(const Eigen::VectorXd& y, double t) const {
    return evaluate(y, t, true, true);
}

Eigen::VectorXd PlateModel::linear_rhs(const Eigen::VectorXd& y) const {
    return evaluate(y, 0.0, false, false);
}

Eigen::VectorXd PlateModel::load_offset() const {
    return evaluate(Eigen::VectorXd::Zero(state_size()), 0.0, true, false);
}

// ---------------------------------------------------------------------------

SemiDiscreteSystem::SemiDiscreteSystem(SparseMatrix a, Eigen::VectorXd b_static, TimePart time_part)
    : a_(std::move(a)), b_static_(std::move(b_static)), time_part_(std::move(time_part)) {
    if (a_.rows() != a_.cols()) throw std::invalid_argument("system matrix must be square");
    if (b_static_.size() == 0) b_static_ = Eigen::VectorXd::Zero(a_.rows());
    if (b_static_.size() != a_.rows()) throw std::invalid_argument("b has wrong length");
    homogeneous_ = !time_part_ && (b_static_.array() == 0.0).all();
}

Eigen::VectorXd SemiDiscreteSystem::b(double t) const {
    Eigen::VectorXd out = b_static_;
    if (time_part_) time_part_(t, out);
    return out;
}

double SemiDiscreteSystem::norm_inf() const {
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(a_.rows());
    for (int c = 0; c < a_.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(a_, c); it; ++it) rows(it.row()) += std::abs(it.value());
    return rows.size() ? rows.maxCoeff() : 0.0;
}

SemiDiscreteSystem assemble(std::shared_ptr<const PlateModel> model) {
    const Eigen::Index m = model->state_size();
    const Eigen::Index n = m / 2;

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(m) * 16);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    for (Eigen::Index c = 0; c < m; ++c) {
        e(c) = 1.0;
        const Eigen::VectorXd col = model->linear_rhs(e);
        e(c) = 0.0;
        for (Eigen::Index r = 0; r < m; ++r)
            if (col(r) != 0.0) triplets.emplace_back(static_cast<int>(r), static_cast<int>(c), col(r));
    }
    SparseMatrix a(m, m);
    a.setFromTriplets(triplets.begin(), triplets.end());
    a.makeCompressed();

    Eigen::VectorXd b_static = Eigen::VectorXd::Zero(m);
    if (!model->loads().is_zero()) b_static = model->load_offset();
    SemiDiscreteSystem::TimePart time_part;
    if (!model->forcing().is_zero()) {
        time_part = [model, n](double t, Eigen::VectorXd& b) {
            const auto f = model->forcing_samples(t);
            for (Eigen::Index k = 0; k < n; ++k) b(n + k) += f[static_cast<std::size_t>(k)];
        };
    }
    SemiDiscreteSystem sys(std::move(a), std::move(b_static), std::move(time_part));
    sys.set_model(std::move(model));
    return sys;
}

SemiDiscreteSystem assemble(const GridSpec& grid, const PlateParams& params,
                            const BoundaryLoads& loads, const ForcingSpec& forcing) {
    return assemble(std::make_shared<const PlateModel>(grid, params, loads, forcing));
}

void write_triplets(const SparseMatrix& a, std::ostream& out) {
    char buf[64];
    for (int c = 0; c < a.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(a, c); it; ++it) {
            std::snprintf(buf, sizeof buf, "%.17g", it.value());
            out << it.row() << ' ' << it.col() << ' ' << buf << '\n';
        }
}

}  // namespace plate
