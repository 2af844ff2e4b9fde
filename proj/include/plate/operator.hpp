#pragma once

// Spatial discretization of the plate equation
//
//   w_tt + D lap^2 w + k0 w_t - k1 lap w_t + a1 w_x + a2 w_y = f
//
// and its reduction to the first-order system y' = A y + b(t) with
// y = [w; v], v = w_t, over the unknown nodes.

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "plate/ghost.hpp"
#include "plate/mesh.hpp"

namespace plate {

struct PlateParams {
    double D = 1.0;
    double nu = 0.3;
    double k0 = 0.0;
    double k1 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;

    /// Throws std::invalid_argument naming the offending coefficient.
    void validate() const;
};

/// Distributed load f(x, y, t); an empty function means f = 0.
struct ForcingSpec {
    std::function<double(double x, double y, double t)> f;

    bool is_zero() const noexcept { return !f; }
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

// Interior operators. Each takes a ghost-filled field and returns one value
// per unknown node in GridSpec::flatten order.
std::vector<double> apply_biharmonic(const ExtendedField& w);
std::vector<double> apply_laplacian(const ExtendedField& w);
std::vector<double> apply_flow(const ExtendedField& w, double a1, double a2);

/// Matrix-free right-hand side of the semi-discrete plate system.
class PlateModel {
public:
    PlateModel(const GridSpec& grid, const PlateParams& params, BoundaryLoads loads = {},
               ForcingSpec forcing = {});

    const GridSpec& grid() const noexcept { return grid_; }
    const PlateParams& params() const noexcept { return params_; }
    const BoundaryLoads& loads() const noexcept { return loads_; }
    const ForcingSpec& forcing() const noexcept { return forcing_; }
    const GhostFiller& ghosts() const noexcept { return ghosts_; }

    /// 2N, the length of the state vector.
    Eigen::Index state_size() const noexcept {
        return 2 * static_cast<Eigen::Index>(grid_.unknowns());
    }

    /// y' for the full problem (loads and forcing active).
    Eigen::VectorXd rhs(const Eigen::VectorXd& y, double t) const;

    /// y' with zero boundary loads and zero forcing, i.e. the linear part A y.
    Eigen::VectorXd linear_rhs(const Eigen::VectorXd& y) const;

    /// Contribution of the boundary loads alone: rhs(0, t) with f = 0.
    Eigen::VectorXd load_offset() const;

    /// f sampled at the unknown nodes.
    std::vector<double> forcing_samples(double t) const;

    /// Ghost-filled displacement field for the w-part of a state.
    ExtendedField displacement_field(std::span<const double> w, bool with_loads = true) const;

private:
    Eigen::VectorXd evaluate(const Eigen::VectorXd& y, double t, bool with_loads,
                             bool with_forcing) const;

    GridSpec grid_;
    PlateParams params_;
    BoundaryLoads loads_;
    ForcingSpec forcing_;
    GhostFiller ghosts_;
};

/// y' = A y + b(t), with b(t) = b_static + [0; f(t)].
class SemiDiscreteSystem {
public:
    using TimePart = std::function<void(double t, Eigen::VectorXd& b)>;

    SemiDiscreteSystem(SparseMatrix a, Eigen::VectorXd b_static, TimePart time_part = {});

    const SparseMatrix& A() const noexcept { return a_; }
    Eigen::Index size() const noexcept { return a_.rows(); }
    Eigen::VectorXd b(double t) const;
    bool is_homogeneous() const noexcept { return homogeneous_; }

    Eigen::VectorXd evaluate(const Eigen::VectorXd& y, double t) const { return a_ * y + b(t); }

    /// Model the system was assembled from, if any.
    const std::shared_ptr<const PlateModel>& model() const noexcept { return model_; }
    void set_model(std::shared_ptr<const PlateModel> m) { model_ = std::move(m); }

    /// Max |A_ij| row-sum norm, used to scale spectral tolerances.
    double norm_inf() const;

private:
    SparseMatrix a_;
    Eigen::VectorXd b_static_;
    TimePart time_part_;
    bool homogeneous_;
    std::shared_ptr<const PlateModel> model_;
};

/// Builds A column by column from the linear right-hand side and b from the
/// affine offset.
SemiDiscreteSystem assemble(std::shared_ptr<const PlateModel> model);
SemiDiscreteSystem assemble(const GridSpec& grid, const PlateParams& params,
                            const BoundaryLoads& loads = {}, const ForcingSpec& forcing = {});

/// Coordinate-triplet text dump ("row col value" per line), for debugging.
void write_triplets(const SparseMatrix& a, std::ostream& out);

}  // namespace plate
