#include "plate/mesh.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace plate {

const char* to_string(NodeClass c) noexcept {
    switch (c) {
        case NodeClass::Clamped: return "clamped";
        case NodeClass::FreeBoundary: return "free-boundary";
        case NodeClass::Interior: return "interior";
        case NodeClass::Ghost: return "ghost";
    }
    return "?";
}

GridSpec::GridSpec(double lx, double ly, int nx, int ny)
    : lx_(lx), ly_(ly), nx_(nx), ny_(ny) {
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
        throw std::invalid_argument("grid: Lx and Ly must be positive and finite");
    if (nx < 5 || ny < 5)
        throw std::invalid_argument("grid: Nx and Ny must be at least 5");
    dx_ = lx / (nx - 1);
    dy_ = ly / (ny - 1);
}

NodeClass GridSpec::classify(int i, int j) const noexcept {
    if (!in_domain(i, j)) return NodeClass::Ghost;
    if (i == 0) return NodeClass::Clamped;
    if (i == nx_ - 1 || j == 0 || j == ny_ - 1) return NodeClass::FreeBoundary;
    return NodeClass::Interior;
}

std::size_t GridSpec::flatten(int i, int j) const {
    if (!in_domain(i, j) || i == 0)
        throw ContractViolation("flatten: node (" + std::to_string(i) + ", " +
                                std::to_string(j) + ") is not an unknown");
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_ - 1) +
           static_cast<std::size_t>(i - 1);
}

std::pair<int, int> GridSpec::unflatten(std::size_t k) const {
    if (k >= unknowns()) throw ContractViolation("unflatten: index out of range");
    const auto row = static_cast<std::size_t>(nx_ - 1);
    return {static_cast<int>(k % row) + 1, static_cast<int>(k / row)};
}

ExtendedField::ExtendedField(const GridSpec& grid)
    : grid_(grid),
      stride_(static_cast<std::size_t>(grid.nx() + 2 * kGhostDepth)),
      data_(stride_ * static_cast<std::size_t>(grid.ny() + 2 * kGhostDepth),
            std::numeric_limits<double>::quiet_NaN()) {
    for (int j = 0; j < grid_.ny(); ++j)
        for (int i = 0; i < grid_.nx(); ++i) (*this)(i, j) = 0.0;
}

void ExtendedField::invalidate_ghosts() {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int j = -kGhostDepth; j < grid_.ny() + kGhostDepth; ++j)
        for (int i = -kGhostDepth; i < grid_.nx() + kGhostDepth; ++i)
            if (!grid_.in_domain(i, j)) (*this)(i, j) = nan;
    filled_ = false;
}

void ExtendedField::set_unknowns(std::span<const double> values) {
    if (values.size() != grid_.unknowns())
        throw ContractViolation("set_unknowns: expected " + std::to_string(grid_.unknowns()) +
                                " values, got " + std::to_string(values.size()));
    std::size_t k = 0;
    for (int j = 0; j < grid_.ny(); ++j) {
        (*this)(0, j) = 0.0;
        for (int i = 1; i < grid_.nx(); ++i) (*this)(i, j) = values[k++];
    }
    invalidate_ghosts();
}

void ExtendedField::set_unknowns_zero() {
    for (int j = 0; j < grid_.ny(); ++j)
        for (int i = 0; i < grid_.nx(); ++i) (*this)(i, j) = 0.0;
    invalidate_ghosts();
}

void ExtendedField::get_unknowns(std::span<double> out) const {
    if (out.size() != grid_.unknowns())
        throw ContractViolation("get_unknowns: output has wrong length");
    std::size_t k = 0;
    for (int j = 0; j < grid_.ny(); ++j)
        for (int i = 1; i < grid_.nx(); ++i) out[k++] = (*this)(i, j);
}

void ExtendedField::require_ghosts(const char* who) const {
    if (!filled_)
        throw ContractViolation(std::string(who) + ": ghost margin read before a fill pass");
}

}  // namespace plate
