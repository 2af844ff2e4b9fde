#include "plate/ghost.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace plate {

const char* to_string(Edge e) noexcept {
    switch (e) {
        case Edge::North: return "north";
        case Edge::South: return "south";
        case Edge::East: return "east";
    }
    return "?";
}

const char* to_string(Corner c) noexcept {
    return c == Corner::NorthEast ? "north-east" : "south-east";
}

const EdgeLoad& BoundaryLoads::moment(Edge e) const noexcept {
    switch (e) {
        case Edge::North: return g_north;
        case Edge::South: return g_south;
        case Edge::East: break;
    }
    return g_east;
}

const EdgeLoad& BoundaryLoads::shear(Edge e) const noexcept {
    switch (e) {
        case Edge::North: return h_north;
        case Edge::South: return h_south;
        case Edge::East: break;
    }
    return h_east;
}

bool BoundaryLoads::is_zero() const noexcept {
    return g_north.is_zero() && g_south.is_zero() && g_east.is_zero() && h_north.is_zero() &&
           h_south.is_zero() && h_east.is_zero();
}

BoundaryLoads BoundaryLoads::uniform(double g, double h) {
    return BoundaryLoads{g, g, g, h, h, h};
}

// ---------------------------------------------------------------------------
// Condition stencils

Condition::Condition(std::vector<StencilTerm> terms) {
    // merge duplicate offsets, drop exact zeros
    for (const auto& t : terms) {
        auto it = std::find_if(terms_.begin(), terms_.end(),
                               [&](const StencilTerm& u) { return u.di == t.di && u.dj == t.dj; });
        if (it == terms_.end())
            terms_.push_back(t);
        else
            it->weight += t.weight;
    }
    std::erase_if(terms_, [](const StencilTerm& t) { return t.weight == 0.0; });
}

double Condition::apply(const ExtendedField& f, int i, int j) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.weight * f(i + t.di, j + t.dj);
    return s;
}

double Condition::weight_at(int di, int dj) const noexcept {
    for (const auto& t : terms_)
        if (t.di == di && t.dj == dj) return t.weight;
    return 0.0;
}

double Condition::solve_for(const ExtendedField& f, int i, int j, int di, int dj,
                            double load) const {
    double pivot = 0.0;
    double rest = 0.0;
    for (const auto& t : terms_) {
        if (t.di == di && t.dj == dj) {
            pivot = t.weight;
            continue;
        }
        const double v = f(i + t.di, j + t.dj);
        if (!std::isfinite(v))
            throw ContractViolation("ghost fill at (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ") needs unfilled cell (" +
                                    std::to_string(i + t.di) + ", " + std::to_string(j + t.dj) +
                                    ")");
        rest += t.weight * v;
    }
    if (pivot == 0.0) throw ContractViolation("solve_for: target cell is not in the stencil");
    return (load - rest) / pivot;
}

Condition moment_condition(Edge e, double nu, double dx, double dy) {
    const double ax = (e == Edge::East ? 1.0 : nu) / (dx * dx);
    const double ay = (e == Edge::East ? nu : 1.0) / (dy * dy);
    return Condition({{-1, 0, ax}, {1, 0, ax}, {0, 0, -2.0 * ax - 2.0 * ay}, {0, -1, ay}, {0, 1, ay}});
}

Condition shear_condition(Edge e, double nu, double dx, double dy) {
    // w_nnn + (2 - nu) w_ttn with n = y on north/south and n = x on east.
    const bool east = e == Edge::East;
    const double dn = east ? dx : dy;
    const double dt = east ? dy : dx;
    const double a = 1.0 / (2.0 * dn * dn * dn);
    const double c = (2.0 - nu) / (2.0 * dt * dt * dn);
    // (p, q) = offset along (normal, tangential)
    std::vector<StencilTerm> t;
    auto add = [&](int p, int q, double w) {
        if (east)
            t.push_back({p, q, w});
        else
            t.push_back({q, p, w});
    };
    add(2, 0, a);
    add(1, 0, -2.0 * a);
    add(-1, 0, 2.0 * a);
    add(-2, 0, -a);
    add(1, 1, c);
    add(1, 0, -2.0 * c);
    add(1, -1, c);
    add(-1, 1, -c);
    add(-1, 0, 2.0 * c);
    add(-1, -1, -c);
    return Condition(std::move(t));
}

Condition twist_condition(double dx, double dy) {
    const double c = 1.0 / (4.0 * dx * dy);
    return Condition({{1, 1, c}, {-1, 1, -c}, {1, -1, -c}, {-1, -1, c}});
}

// ---------------------------------------------------------------------------
// GhostFiller

namespace {

std::pair<int, int> edge_node(const GridSpec& g, Edge e, int k) {
    switch (e) {
        case Edge::North: return {k, g.ny() - 1};
        case Edge::South: return {k, 0};
        case Edge::East: break;
    }
    return {g.nx() - 1, k};
}

std::pair<int, int> outward(Edge e, int depth) {
    switch (e) {
        case Edge::North: return {0, depth};
        case Edge::South: return {0, -depth};
        case Edge::East: break;
    }
    return {depth, 0};
}

// Inclusive range of along-edge indices served by the edge formulas at a
// given ghost depth; the rest belongs to the corner systems.
std::pair<int, int> edge_range(const GridSpec& g, Edge e, int depth) {
    if (e == Edge::East) return {depth, g.ny() - 1 - depth};
    return {0, g.nx() - 1 - depth};
}

}  // namespace

GhostFiller::GhostFiller(const GridSpec& grid, double nu)
    : grid_(grid),
      nu_(nu),
      moment_ns_(moment_condition(Edge::North, nu, grid.dx(), grid.dy())),
      moment_e_(moment_condition(Edge::East, nu, grid.dx(), grid.dy())),
      shear_ns_(shear_condition(Edge::North, nu, grid.dx(), grid.dy())),
      shear_e_(shear_condition(Edge::East, nu, grid.dx(), grid.dy())),
      twist_(twist_condition(grid.dx(), grid.dy())) {
    if (!(nu > 0.0 && nu < 0.5))
        throw std::invalid_argument("ghost: Poisson ratio must lie in (0, 1/2)");

    ExtendedField probe(grid_);
    probe.set_unknowns_zero();
    for (int j = -kGhostDepth; j < grid_.ny() + kGhostDepth; ++j)
        for (int i = -kGhostDepth; i < grid_.nx() + kGhostDepth; ++i) probe(i, j) = 0.0;
    const auto sys = build_corner_system(probe, BoundaryLoads{}, Corner::NorthEast);
    corner_condition_ = sys.condition_number;
    if (!(corner_condition_ <= kMaxCondition))
        throw std::runtime_error("ghost: corner system is ill-conditioned (cond = " +
                                 std::to_string(corner_condition_) + ")");
}

const Condition& GhostFiller::moment(Edge e) const noexcept {
    return e == Edge::East ? moment_e_ : moment_ns_;
}

const Condition& GhostFiller::shear(Edge e) const noexcept {
    return e == Edge::East ? shear_e_ : shear_ns_;
}

void GhostFiller::fill_clamped(ExtendedField& f) const {
    for (int j = 0; j < grid_.ny(); ++j) {
        f(0, j) = 0.0;
        f(-1, j) = f(1, j);
    }
    for (int j = -kGhostDepth; j < grid_.ny() + kGhostDepth; ++j) f(-2, j) = 0.0;
}

void GhostFiller::fill_first_row_node(ExtendedField& f, const BoundaryLoads& loads, Edge e,
                                      int k) const {
    const auto [lo, hi] = edge_range(grid_, e, 1);
    if (k < lo || k > hi)
        throw ContractViolation(std::string("first-row fill: node ") + std::to_string(k) +
                                " on the " + to_string(e) +
                                " edge is a free-free corner or outside the edge");
    const auto [i, j] = edge_node(grid_, e, k);
    const auto [di, dj] = outward(e, 1);
    f(i + di, j + dj) = moment(e).solve_for(f, i, j, di, dj, load_at(loads.moment(e), i, j));
}

void GhostFiller::fill_free_first_row(ExtendedField& f, const BoundaryLoads& loads,
                                      Edge e) const {
    const auto [lo, hi] = edge_range(grid_, e, 1);
    for (int k = lo; k <= hi; ++k) fill_first_row_node(f, loads, e, k);
    if (e != Edge::East) {
        const int jg = e == Edge::North ? grid_.ny() : -1;
        f(-1, jg) = f(1, jg);
    }
}

void GhostFiller::fill_second_row_node(ExtendedField& f, const BoundaryLoads& loads, Edge e,
                                       int k) const {
    const auto [lo, hi] = edge_range(grid_, e, 2);
    if (k < lo || k > hi)
        throw ContractViolation(std::string("second-row fill: node ") + std::to_string(k) +
                                " on the " + to_string(e) +
                                " edge is within one node of a free-free corner");
    const auto [i, j] = edge_node(grid_, e, k);
    const auto [di, dj] = outward(e, 2);
    f(i + di, j + dj) = shear(e).solve_for(f, i, j, di, dj, load_at(loads.shear(e), i, j));
}

void GhostFiller::fill_free_second_row(ExtendedField& f, const BoundaryLoads& loads,
                                       Edge e) const {
    const auto [lo, hi] = edge_range(grid_, e, 2);
    for (int k = lo; k <= hi; ++k) fill_second_row_node(f, loads, e, k);
    if (e != Edge::East) {
        const int jg = e == Edge::North ? grid_.ny() + 1 : -2;
        f(-1, jg) = f(1, jg);
    }
}

std::array<std::pair<int, int>, CornerSystem::kSize> GhostFiller::corner_cells(Corner c) const {
    const int ci = grid_.nx() - 1;
    const int cj = c == Corner::NorthEast ? grid_.ny() - 1 : 0;
    const int s = c == Corner::NorthEast ? 1 : -1;
    return {{{ci + 1, cj},
             {ci, cj + s},
             {ci + 1, cj + s},
             {ci + 2, cj},
             {ci, cj + 2 * s},
             {ci - 1, cj + 2 * s},
             {ci + 2, cj - s}}};
}

CornerSystem GhostFiller::build_corner_system(const ExtendedField& f, const BoundaryLoads& loads,
                                              Corner c) const {
    CornerSystem sys;
    sys.corner = c;
    sys.ci = grid_.nx() - 1;
    sys.cj = c == Corner::NorthEast ? grid_.ny() - 1 : 0;
    sys.cells = corner_cells(c);
    const int s = c == Corner::NorthEast ? 1 : -1;
    const Edge h = c == Corner::NorthEast ? Edge::North : Edge::South;
    const int ci = sys.ci;
    const int cj = sys.cj;

    struct Row {
        const Condition* cond;
        int i, j;
        double load;
    };
    const std::array<Row, CornerSystem::kSize> rows{{
        {&moment(h), ci, cj, load_at(loads.moment(h), ci, cj)},
        {&moment(Edge::East), ci, cj, load_at(loads.moment(Edge::East), ci, cj)},
        {&shear(h), ci, cj, load_at(loads.shear(h), ci, cj)},
        {&shear(h), ci - 1, cj, load_at(loads.shear(h), ci - 1, cj)},
        {&shear(Edge::East), ci, cj, load_at(loads.shear(Edge::East), ci, cj)},
        {&shear(Edge::East), ci, cj - s, load_at(loads.shear(Edge::East), ci, cj - s)},
        {&twist_, ci, cj, 0.0},
    }};

    for (int r = 0; r < CornerSystem::kSize; ++r) {
        double rhs = rows[r].load;
        for (const auto& t : rows[r].cond->terms()) {
            const std::pair<int, int> cell{rows[r].i + t.di, rows[r].j + t.dj};
            const auto it = std::find(sys.cells.begin(), sys.cells.end(), cell);
            if (it != sys.cells.end()) {
                sys.matrix(r, it - sys.cells.begin()) += t.weight;
                continue;
            }
            const double v = f(cell.first, cell.second);
            if (!std::isfinite(v))
                throw ContractViolation(std::string("corner system (") + to_string(c) +
                                        "): prerequisite ghost (" + std::to_string(cell.first) +
                                        ", " + std::to_string(cell.second) + ") is unfilled");
            rhs -= t.weight * v;
        }
        sys.rhs(r) = rhs;
    }

    // Rows mix 1/h^2, 1/h^3 and 1/h^2 scales; equilibrate before measuring.
    CornerSystem::Matrix scaled = sys.matrix;
    for (int r = 0; r < CornerSystem::kSize; ++r) scaled.row(r) /= scaled.row(r).cwiseAbs().maxCoeff();
    Eigen::JacobiSVD<CornerSystem::Matrix> svd(scaled);
    const auto& sv = svd.singularValues();
    sys.condition_number = sv(0) / sv(CornerSystem::kSize - 1);
    return sys;
}

std::array<double, CornerSystem::kSize> GhostFiller::solve_corner(const CornerSystem& sys) const {
    if (!(sys.condition_number <= kMaxCondition))
        throw std::runtime_error("solve_corner: system is ill-conditioned (cond = " +
                                 std::to_string(sys.condition_number) + ")");
    const CornerSystem::Vector x = sys.matrix.fullPivLu().solve(sys.rhs);
    std::array<double, CornerSystem::kSize> out{};
    for (int k = 0; k < CornerSystem::kSize; ++k) out[k] = x(k);
    return out;
}

void GhostFiller::write_corner(ExtendedField& f, const CornerSystem& sys,
                               const std::array<double, CornerSystem::kSize>& values) const {
    for (int k = 0; k < CornerSystem::kSize; ++k) f(sys.cells[k].first, sys.cells[k].second) = values[k];
}

void GhostFiller::fill_all(ExtendedField& f, const BoundaryLoads& loads) const {
    if (!(f.grid() == grid_)) throw ContractViolation("fill_all: field grid mismatch");
    f.invalidate_ghosts();
    fill_clamped(f);
    for (Edge e : {Edge::North, Edge::South, Edge::East}) fill_free_first_row(f, loads, e);
    for (Edge e : {Edge::North, Edge::South, Edge::East}) fill_free_second_row(f, loads, e);
    for (Corner c : {Corner::NorthEast, Corner::SouthEast}) {
        const auto sys = build_corner_system(f, loads, c);
        write_corner(f, sys, solve_corner(sys));
    }
    f.mark_ghosts_filled();
    f.bump_generation();
}

double GhostFiller::max_boundary_residual(const ExtendedField& f,
                                          const BoundaryLoads& loads) const {
    double worst = 0.0;
    auto track = [&](double r) { worst = std::max(worst, std::isfinite(r) ? std::abs(r) : INFINITY); };

    for (int j = 0; j < grid_.ny(); ++j) {
        track(f(0, j));
        track(f(-1, j) - f(1, j));
    }
    for (Edge e : {Edge::North, Edge::South, Edge::East}) {
        const int n = e == Edge::East ? grid_.ny() : grid_.nx();
        for (int k = 0; k < n; ++k) {
            const auto [i, j] = edge_node(grid_, e, k);
            track(moment(e).apply(f, i, j) - load_at(loads.moment(e), i, j));
            track(shear(e).apply(f, i, j) - load_at(loads.shear(e), i, j));
        }
    }
    track(twist_.apply(f, grid_.nx() - 1, grid_.ny() - 1));
    track(twist_.apply(f, grid_.nx() - 1, 0));
    return worst;
}

}  // namespace plate
