#pragma once

// Energy diagnostics and flow-induced instability detection.

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "plate/integrator.hpp"
#include "plate/mesh.hpp"
#include "plate/operator.hpp"

namespace plate {

struct EnergySample {
    double t = 0.0;
    double U = 0.0;
    double K = 0.0;
    double E = 0.0;
};

/// Trapezoidal weight of node (i, j) on the closed rectangle.
double quadrature_weight(const GridSpec& grid, int i, int j) noexcept;

/// 1/2 D * integral of nu (lap w)^2 + (1 - nu)(w_xx^2 + 2 w_xy^2 + w_yy^2)
/// over the closed plate. Pure second differences are taken at the nodes of
/// the ghost-filled field (trapezoidal weights); w_xy is the staggered mixed
/// difference at cell centres (midpoint rule). With zero loads this equals
/// 1/2 D w^T W K w for the trapezoidal weights W and the assembled stiffness K.
double potential_energy(const ExtendedField& w, double D, double nu);

/// 1/2 * integral of v^2; `v` holds the unknown-node values (clamped = 0).
double kinetic_energy(std::span<const double> v, const GridSpec& grid);

/// Energy of a full state [w; v] using the model's loads for the w ghosts.
EnergySample state_energy(const PlateModel& model, const Eigen::VectorXd& y, double t);

std::vector<EnergySample> energy_series(const Trajectory& traj, const PlateModel& model);

/// Largest |E(t) - E(t0)| / E(t0); 0 when E(t0) = 0.
double max_relative_drift(const std::vector<EnergySample>& series);

struct SpectralResult {
    double abscissa = 0.0;
    std::complex<double> dominant;
    bool converged = true;
    std::string method;
};

struct SpectralOptions {
    /// Systems up to this size use a dense eigensolve.
    Eigen::Index dense_limit = 4000;
    /// Krylov dimension for the shift-invert Arnoldi estimate.
    int krylov_dim = 120;
};

/// max Re(lambda) over the eigenvalues of A.
SpectralResult spectral_abscissa(const SemiDiscreteSystem& sys, const SpectralOptions& opts = {});

enum class FlowAxis { A1, A2 };

const char* to_string(FlowAxis a) noexcept;

struct BisectionStep {
    double parameter = 0.0;
    double abscissa = 0.0;
    double bracket_width = 0.0;
};

struct StabilityReport {
    GridSpec grid;
    PlateParams params;
    FlowAxis axis = FlowAxis::A1;
    double critical = 0.0;
    double abscissa_at_critical = 0.0;
    double abscissa_lo = 0.0;
    double abscissa_hi = 0.0;
    double final_width = 0.0;
    double norm_A = 0.0;
    int iterations = 0;
    std::vector<BisectionStep> history{};
    std::vector<std::string> warnings{};
};

/// Bisection on one flow parameter for the sign change of the spectral
/// abscissa. Requires abscissa(lo) < 0 < abscissa(hi); stops once the
/// bracket is at most rel_width * (hi - lo) wide.
StabilityReport find_critical_flow(const PlateParams& base, const GridSpec& grid, FlowAxis axis,
                                   double lo, double hi, const BoundaryLoads& loads = {},
                                   double rel_width = 1e-3, const SpectralOptions& opts = {});

}  // namespace plate
