#pragma once

// Ghost-node elimination for the clamped-free-free-free plate.
//
// Every discrete boundary condition is stored as a small stencil (offsets and
// weights). Free-edge ghosts are obtained by solving one condition for its
// single unknown cell; each free-free corner couples seven unknown ghosts
// that are found by a dense 7x7 solve.
//
// Sign conventions follow the continuous conditions in global coordinates:
//   north/south: nu*w_xx + w_yy = g,  w_yyy + (2-nu)*w_xxy = h
//   east:        w_xx + nu*w_yy = g,  w_xxx + (2-nu)*w_xyy = h

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "plate/mesh.hpp"

namespace plate {

enum class Edge { North, South, East };
enum class Corner { NorthEast, SouthEast };

const char* to_string(Edge e) noexcept;
const char* to_string(Corner c) noexcept;

/// Load data along one free edge: a constant or a function of (x, y).
class EdgeLoad {
public:
    using Fn = std::function<double(double x, double y)>;

    EdgeLoad() = default;
    EdgeLoad(double value) : constant_(value) {}  // NOLINT: constants convert implicitly
    explicit EdgeLoad(Fn fn) : fn_(std::move(fn)) {}

    double operator()(double x, double y) const { return fn_ ? fn_(x, y) : constant_; }

    bool is_constant() const noexcept { return !fn_; }
    bool is_zero() const noexcept { return !fn_ && constant_ == 0.0; }

private:
    double constant_ = 0.0;
    Fn fn_;
};

/// Bending moments g and effective shears h on the three free edges.
struct BoundaryLoads {
    EdgeLoad g_north, g_south, g_east;
    EdgeLoad h_north, h_south, h_east;

    const EdgeLoad& moment(Edge e) const noexcept;
    const EdgeLoad& shear(Edge e) const noexcept;
    bool is_zero() const noexcept;

    /// Same constant moment G and shear H on every free edge.
    static BoundaryLoads uniform(double g, double h);
};

struct StencilTerm {
    int di;
    int dj;
    double weight;
};

/// Linear discrete boundary condition: sum of weight * w(i+di, j+dj).
class Condition {
public:
    Condition() = default;
    explicit Condition(std::vector<StencilTerm> terms);

    double apply(const ExtendedField& f, int i, int j) const;
    double weight_at(int di, int dj) const noexcept;
    const std::vector<StencilTerm>& terms() const noexcept { return terms_; }

    /// Solves the condition `apply(...) == load` for the cell at (di, dj)
    /// relative to (i, j), using the current values of every other cell.
    double solve_for(const ExtendedField& f, int i, int j, int di, int dj, double load) const;

private:
    std::vector<StencilTerm> terms_;
};

Condition moment_condition(Edge e, double nu, double dx, double dy);
Condition shear_condition(Edge e, double nu, double dx, double dy);
/// Discrete w_xy = 0 at a free-free corner.
Condition twist_condition(double dx, double dy);

/// The seven-equation system for the ghosts around one free-free corner.
///
/// Unknown order: E, N, NE, EE, NN, NNW, SEE in the corner's local frame,
/// where "north" is the outward normal of the horizontal edge (south for the
/// south-east corner). Rows: moment on the horizontal edge, moment on the east
/// edge, horizontal-edge shear at the corner and at its western neighbour,
/// east-edge shear at the corner and at its inward neighbour, twist.
struct CornerSystem {
    static constexpr int kSize = 7;
    using Matrix = Eigen::Matrix<double, kSize, kSize>;
    using Vector = Eigen::Matrix<double, kSize, 1>;

    Corner corner = Corner::NorthEast;
    int ci = 0;
    int cj = 0;
    std::array<std::pair<int, int>, kSize> cells{};
    Matrix matrix = Matrix::Zero();
    Vector rhs = Vector::Zero();
    double condition_number = 0.0;
};

/// Fills the ghost margin of an ExtendedField for a given Poisson ratio.
class GhostFiller {
public:
    /// Condition number above which a corner system is rejected.
    static constexpr double kMaxCondition = 1e12;

    GhostFiller(const GridSpec& grid, double nu);

    const GridSpec& grid() const noexcept { return grid_; }
    double nu() const noexcept { return nu_; }

    const Condition& moment(Edge e) const noexcept;
    const Condition& shear(Edge e) const noexcept;
    const Condition& twist() const noexcept { return twist_; }

    /// w(0, j) = 0, w(-1, j) = w(1, j), outer column zeroed.
    void fill_clamped(ExtendedField& f) const;

    /// Depth-1 ghost at boundary node `k` along the edge (i for north/south,
    /// j for east). Throws for free-free corner nodes.
    void fill_first_row_node(ExtendedField& f, const BoundaryLoads& loads, Edge e, int k) const;
    void fill_free_first_row(ExtendedField& f, const BoundaryLoads& loads, Edge e) const;

    /// Depth-2 ghost at boundary node `k`. Throws for nodes within one node
    /// of a free-free corner.
    void fill_second_row_node(ExtendedField& f, const BoundaryLoads& loads, Edge e, int k) const;
    void fill_free_second_row(ExtendedField& f, const BoundaryLoads& loads, Edge e) const;

    CornerSystem build_corner_system(const ExtendedField& f, const BoundaryLoads& loads,
                                     Corner c) const;
    std::array<double, CornerSystem::kSize> solve_corner(const CornerSystem& sys) const;
    void write_corner(ExtendedField& f, const CornerSystem& sys,
                      const std::array<double, CornerSystem::kSize>& values) const;

    /// Clamped edge, first rows, second rows, then both corners.
    void fill_all(ExtendedField& f, const BoundaryLoads& loads) const;

    /// Largest |residual| over every discrete boundary condition, each
    /// measured against its own load.
    double max_boundary_residual(const ExtendedField& f, const BoundaryLoads& loads) const;

private:
    std::array<std::pair<int, int>, CornerSystem::kSize> corner_cells(Corner c) const;
    double load_at(const EdgeLoad& l, int i, int j) const { return l(grid_.x(i), grid_.y(j)); }

    GridSpec grid_;
    double nu_;
    Condition moment_ns_, moment_e_, shear_ns_, shear_e_, twist_;
    double corner_condition_ = 0.0;
};

}  // namespace plate
