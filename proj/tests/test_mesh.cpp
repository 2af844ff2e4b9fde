#include <doctest.h>

#include <cmath>
#include <vector>

#include "plate/mesh.hpp"

using namespace plate;

TEST_CASE("grid spacing and unknown count") {
    const GridSpec g(2.0, 1.0, 9, 5);
    CHECK(g.dx() == doctest::Approx(0.25));
    CHECK(g.dy() == doctest::Approx(0.25));
    CHECK(g.unknowns() == 8u * 5u);
    CHECK(g.x(8) == doctest::Approx(2.0));
    CHECK(g.y(4) == doctest::Approx(1.0));
}

TEST_CASE("grid rejects too few nodes or bad lengths") {
    CHECK_THROWS_AS(GridSpec(1, 1, 4, 10), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec(1, 1, 10, 4), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec(0, 1, 10, 10), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec(1, -1, 10, 10), std::invalid_argument);
    CHECK_NOTHROW(GridSpec(1, 1, 5, 5));
}

TEST_CASE("node classification") {
    const GridSpec g(1, 1, 6, 7);
    CHECK(g.classify(0, 3) == NodeClass::Clamped);
    CHECK(g.classify(0, 0) == NodeClass::Clamped);
    CHECK(g.classify(0, 6) == NodeClass::Clamped);
    CHECK(g.classify(5, 3) == NodeClass::FreeBoundary);
    CHECK(g.classify(2, 0) == NodeClass::FreeBoundary);
    CHECK(g.classify(2, 6) == NodeClass::FreeBoundary);
    CHECK(g.classify(5, 6) == NodeClass::FreeBoundary);
    CHECK(g.classify(2, 3) == NodeClass::Interior);
    CHECK(g.classify(-1, 3) == NodeClass::Ghost);
    CHECK(g.classify(6, 3) == NodeClass::Ghost);
    CHECK(g.classify(3, -2) == NodeClass::Ghost);
    CHECK(std::string(to_string(NodeClass::FreeBoundary)) == "free-boundary");

    int interior = 0, boundary = 0, clamped = 0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) switch (g.classify(i, j)) {
                case NodeClass::Interior: ++interior; break;
                case NodeClass::FreeBoundary: ++boundary; break;
                case NodeClass::Clamped: ++clamped; break;
                default: break;
            }
    CHECK(clamped == 7);
    CHECK(interior == 4 * 5);
    CHECK(boundary + interior == static_cast<int>(g.unknowns()));
}

TEST_CASE("flatten is row-major over i >= 1 and inverts") {
    const GridSpec g(1, 1, 6, 5);
    CHECK(g.flatten(1, 0) == 0u);
    CHECK(g.flatten(5, 0) == 4u);
    CHECK(g.flatten(1, 1) == 5u);
    for (std::size_t k = 0; k < g.unknowns(); ++k) {
        const auto [i, j] = g.unflatten(k);
        CHECK(g.flatten(i, j) == k);
    }
    CHECK_THROWS_AS(g.flatten(0, 2), ContractViolation);
    CHECK_THROWS_AS(g.flatten(6, 2), ContractViolation);
    CHECK_THROWS_AS(g.flatten(2, -1), ContractViolation);
    CHECK_THROWS_AS(g.unflatten(g.unknowns()), ContractViolation);
}

TEST_CASE("extended field layout and ghost bookkeeping") {
    const GridSpec g(1, 1, 5, 6);
    ExtendedField f(g);
    CHECK(f.in_box(-2, -2));
    CHECK(f.in_box(6, 7));
    CHECK_FALSE(f.in_box(-3, 0));
    CHECK(std::isnan(f(-1, 0)));
    CHECK(f(2, 2) == 0.0);
    CHECK_FALSE(f.ghosts_filled());
    CHECK_THROWS_AS(f.require_ghosts("test"), ContractViolation);

    std::vector<double> v(g.unknowns());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = 1.0 + static_cast<double>(k);
    f.set_unknowns(v);
    CHECK(f(0, 3) == 0.0);
    CHECK(f(1, 0) == 1.0);
    CHECK(f(4, 5) == static_cast<double>(v.size()));

    std::vector<double> back(g.unknowns());
    f.get_unknowns(back);
    CHECK(back == v);
    CHECK_THROWS_AS(f.set_unknowns(std::vector<double>(3)), ContractViolation);

    f.mark_ghosts_filled();
    CHECK_NOTHROW(f.require_ghosts("test"));
    f.set_unknowns(v);
    CHECK_FALSE(f.ghosts_filled());
}
