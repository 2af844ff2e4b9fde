#pragma once

// Uniform rectangular grid for the cantilevered plate.
//
// Node (i, j) sits at (i*dx, j*dy). Column i = 0 is the clamped edge (west);
// rows j = 0 and j = Ny-1 are the south and north free edges and column
// i = Nx-1 is the east free edge. Unknowns are every node with i >= 1,
// ordered row-major (j outer, i inner).

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace plate {

class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class NodeClass { Clamped, FreeBoundary, Interior, Ghost };

const char* to_string(NodeClass c) noexcept;

/// Depth of the ghost margin on every side of the grid.
inline constexpr int kGhostDepth = 2;

class GridSpec {
public:
    GridSpec(double lx, double ly, int nx, int ny);

    double lx() const noexcept { return lx_; }
    double ly() const noexcept { return ly_; }
    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    double dx() const noexcept { return dx_; }
    double dy() const noexcept { return dy_; }

    double x(int i) const noexcept { return i * dx_; }
    double y(int j) const noexcept { return j * dy_; }

    /// Number of nodes where w is unknown: (Nx - 1) * Ny.
    std::size_t unknowns() const noexcept {
        return static_cast<std::size_t>(nx_ - 1) * static_cast<std::size_t>(ny_);
    }

    bool in_domain(int i, int j) const noexcept {
        return i >= 0 && i < nx_ && j >= 0 && j < ny_;
    }

    NodeClass classify(int i, int j) const noexcept;

    /// Linear index of an unknown node. Throws ContractViolation for
    /// clamped or ghost indices.
    std::size_t flatten(int i, int j) const;
    std::pair<int, int> unflatten(std::size_t k) const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    double lx_;
    double ly_;
    int nx_;
    int ny_;
    double dx_;
    double dy_;
};

/// Nodal field padded with a two-deep ghost margin on all sides.
///
/// Ghost cells start out as NaN and are reset to NaN whenever the interior
/// changes; `ghosts_filled()` reports whether a fill pass has run since.
class ExtendedField {
public:
    explicit ExtendedField(const GridSpec& grid);

    const GridSpec& grid() const noexcept { return grid_; }

    double operator()(int i, int j) const noexcept { return data_[offset(i, j)]; }
    double& operator()(int i, int j) noexcept { return data_[offset(i, j)]; }

    bool in_box(int i, int j) const noexcept {
        return i >= -kGhostDepth && i < grid_.nx() + kGhostDepth && j >= -kGhostDepth &&
               j < grid_.ny() + kGhostDepth;
    }

    /// Loads unknown values (length N) into the interior, sets the clamped
    /// column to zero and invalidates the ghost margin.
    void set_unknowns(std::span<const double> values);
    void set_unknowns_zero();

    /// Copies interior unknowns out in flatten() order.
    void get_unknowns(std::span<double> out) const;

    void invalidate_ghosts();
    void mark_ghosts_filled() noexcept { filled_ = true; }
    bool ghosts_filled() const noexcept { return filled_; }

    /// Throws ContractViolation unless a fill pass has run since the last
    /// interior change.
    void require_ghosts(const char* who) const;

    /// Fill generation; bumped by every fill pass.
    unsigned generation() const noexcept { return generation_; }
    void bump_generation() noexcept { ++generation_; }

private:
    std::size_t offset(int i, int j) const noexcept {
        return static_cast<std::size_t>(j + kGhostDepth) * stride_ +
               static_cast<std::size_t>(i + kGhostDepth);
    }

    GridSpec grid_;
    std::size_t stride_;
    std::vector<double> data_;
    bool filled_ = false;
    unsigned generation_ = 0;
};

}  // namespace plate
