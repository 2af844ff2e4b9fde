#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "plate/operator.hpp"

using namespace plate;
using doctest::Approx;

namespace {

using Fn = std::function<double(double, double)>;

// Samples fn on every cell of the extended box, ghosts included.
ExtendedField exact_field(const GridSpec& g, const Fn& fn) {
    ExtendedField f(g);
    for (int j = -kGhostDepth; j < g.ny() + kGhostDepth; ++j)
        for (int i = -kGhostDepth; i < g.nx() + kGhostDepth; ++i) f(i, j) = fn(g.x(i), g.y(j));
    f.mark_ghosts_filled();
    return f;
}

double max_dev(const std::vector<double>& v, double target) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x - target));
    return m;
}

Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

}  // namespace

TEST_CASE("biharmonic stencil is exact on quartics") {
    const GridSpec g(1.0, 1.0, 9, 9);
    CHECK(max_dev(apply_biharmonic(exact_field(g, [](double x, double) { return x * x * x * x; })), 24.0) <=
          1e-8 * 24.0);
    CHECK(max_dev(apply_biharmonic(exact_field(g, [](double, double y) { return y * y * y * y; })), 24.0) <=
          1e-8 * 24.0);
    CHECK(max_dev(apply_biharmonic(exact_field(g, [](double x, double y) { return x * x * y * y; })), 8.0) <=
          1e-8 * 8.0);
    CHECK(max_dev(apply_biharmonic(exact_field(g, [](double, double) { return 3.5; })), 0.0) <= 1e-8);

    // every monomial of total degree <= 4 on an anisotropic grid
    const GridSpec h(1.3, 0.7, 8, 11);
    for (int p = 0; p <= 4; ++p)
        for (int q = 0; p + q <= 4; ++q) {
            const auto f = exact_field(h, [=](double x, double y) { return std::pow(x, p) * std::pow(y, q); });
            double exact = 0.0;
            if (p == 4 && q == 0) exact = 24.0;
            if (p == 0 && q == 4) exact = 24.0;
            if (p == 2 && q == 2) exact = 8.0;
            CHECK(max_dev(apply_biharmonic(f), exact) <= 1e-8 * std::max(1.0, exact));
        }
}

TEST_CASE("laplacian and gradient exactness") {
    const GridSpec g(1.2, 0.9, 8, 7);
    CHECK(max_dev(apply_laplacian(exact_field(g, [](double x, double y) { return x * x + y * y; })), 4.0) <= 1e-9);
    CHECK(max_dev(apply_laplacian(exact_field(g, [](double x, double y) { return 3 * x * y - x * x + 2; })), -2.0) <=
          1e-9);
    CHECK(max_dev(apply_laplacian(exact_field(g, [](double, double) { return 1.0; })), 0.0) == 0.0);
    CHECK(max_dev(apply_laplacian(exact_field(g, [](double x, double) { return x; })), 0.0) <= 1e-10);

    CHECK(max_dev(apply_flow(exact_field(g, [](double x, double) { return x; }), 1.0, 0.0), 1.0) <= 1e-12);
    CHECK(max_dev(apply_flow(exact_field(g, [](double, double y) { return y; }), 0.0, 2.0), 2.0) <= 1e-12);
    CHECK(max_dev(apply_flow(exact_field(g, [](double x, double y) { return 2 * x - y + 1; }), 0.5, 3.0), -2.0) <=
          1e-12);
    CHECK(max_dev(apply_flow(exact_field(g, [](double x, double y) { return x * y; }), 0.0, 0.0), 0.0) == 0.0);
}

TEST_CASE("stencils need a ghost fill") {
    const GridSpec g(1, 1, 6, 6);
    ExtendedField f(g);
    CHECK_THROWS_AS(apply_biharmonic(f), ContractViolation);
    CHECK_THROWS_AS(apply_laplacian(f), ContractViolation);
    CHECK_THROWS_AS(apply_flow(f, 1, 0), ContractViolation);
}

TEST_CASE("biharmonic truncation error is second order") {
    // smooth function with exact ghosts; Delta^2 w = (a^2 + b^2)^2 w
    const double a = 1.3, b = 2.1;
    const Fn w = [=](double x, double y) { return std::sin(a * x + 0.2) * std::cos(b * y); };
    double prev = 0.0;
    for (int n : {9, 17, 33, 65}) {
        const GridSpec g(1.0, 1.0, n, n);
        const auto r = apply_biharmonic(exact_field(g, w));
        double err = 0.0;
        std::size_t k = 0;
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 1; i < g.nx(); ++i, ++k)
                err = std::max(err, std::abs(r[k] - std::pow(a * a + b * b, 2) * w(g.x(i), g.y(j))));
        if (prev > 0.0) CHECK(std::log2(prev / err) >= 1.9);
        prev = err;
    }
}

TEST_CASE("parameter validation") {
    PlateParams p;
    CHECK_NOTHROW(p.validate());
    p.nu = 0.7;
    try {
        p.validate();
        FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("(0, 1/2)") != std::string::npos);
    }
    p = PlateParams{};
    p.D = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = PlateParams{};
    p.k0 = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = PlateParams{};
    p.k1 = -0.1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = PlateParams{};
    p.a1 = std::nan("");
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("right-hand side basics") {
    const GridSpec g(1, 1, 7, 7);
    const auto n = static_cast<Eigen::Index>(g.unknowns());

    SUBCASE("zero state, no loads, no forcing") {
        const PlateModel m(g, PlateParams{});
        CHECK(m.rhs(Eigen::VectorXd::Zero(2 * n), 0.3).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("friction alone") {
        PlateParams p;
        p.k0 = 1.0;
        const PlateModel m(g, p);
        std::mt19937 rng(4);
        Eigen::VectorXd y = Eigen::VectorXd::Zero(2 * n);
        y.tail(n) = random_vector(n, rng);
        const Eigen::VectorXd r = m.rhs(y, 0.0);
        CHECK((r.head(n) - y.tail(n)).cwiseAbs().maxCoeff() == 0.0);
        CHECK((r.tail(n) + y.tail(n)).cwiseAbs().maxCoeff() <= 1e-15);
    }
    SUBCASE("strong damping uses the velocity laplacian") {
        PlateParams p;
        p.k1 = 0.5;
        const PlateModel m(g, p);
        Eigen::VectorXd y = Eigen::VectorXd::Zero(2 * n);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 1; i < g.nx(); ++i) y(n + static_cast<Eigen::Index>(g.flatten(i, j))) = g.y(j) * g.y(j);
        const Eigen::VectorXd r = m.rhs(y, 0.0);
        // away from the boundary the 5-point laplacian of y^2 is 2
        for (int j = 2; j < g.ny() - 2; ++j)
            for (int i = 2; i < g.nx() - 2; ++i)
                CHECK(r(n + static_cast<Eigen::Index>(g.flatten(i, j))) == Approx(0.5 * 2.0));
    }
    SUBCASE("forcing is sampled at the nodes") {
        ForcingSpec fs;
        fs.f = [](double x, double y, double t) { return x + 2 * y + 3 * t; };
        const PlateModel m(g, PlateParams{}, {}, fs);
        const Eigen::VectorXd r = m.rhs(Eigen::VectorXd::Zero(2 * n), 0.5);
        const auto k = static_cast<Eigen::Index>(g.flatten(3, 2));
        CHECK(r(n + k) == Approx(g.x(3) + 2 * g.y(2) + 1.5));
    }
    SUBCASE("bad input") {
        const PlateModel m(g, PlateParams{});
        Eigen::VectorXd y = Eigen::VectorXd::Zero(2 * n);
        y(3) = std::nan("");
        CHECK_THROWS_AS(m.rhs(y, 0.0), std::domain_error);
        CHECK_THROWS_AS(m.rhs(Eigen::VectorXd::Zero(5), 0.0), ContractViolation);
    }
}

TEST_CASE("assembled system reproduces the right-hand side") {
    const GridSpec g(1, 1, 8, 8);
    PlateParams p;
    p.k0 = 0.2;
    p.k1 = 0.05;
    p.a1 = 3.0;
    p.a2 = -1.5;
    BoundaryLoads L;
    L.g_north = 0.3;
    L.h_east = EdgeLoad(EdgeLoad::Fn([](double, double y) { return std::cos(y); }));
    L.h_south = -0.7;
    ForcingSpec fs;
    fs.f = [](double x, double y, double t) { return std::sin(x + t) * y; };
    auto model = std::make_shared<const PlateModel>(g, p, L, fs);
    const SemiDiscreteSystem sys = assemble(model);
    CHECK(sys.size() == 2 * static_cast<Eigen::Index>(g.unknowns()));
    CHECK_FALSE(sys.is_homogeneous());

    std::mt19937 rng(8);
    std::uniform_real_distribution<double> ut(0.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::VectorXd y = random_vector(sys.size(), rng);
        const double t = ut(rng);
        const Eigen::VectorXd direct = model->rhs(y, t);
        const Eigen::VectorXd assembled = sys.evaluate(y, t);
        const double scale = sys.norm_inf() * y.cwiseAbs().maxCoeff() + sys.b(t).cwiseAbs().maxCoeff();
        CHECK((direct - assembled).cwiseAbs().maxCoeff() <= 1e-12 * scale);
    }
}

TEST_CASE("homogeneous problems have no affine part") {
    const GridSpec g(1, 1, 6, 6);
    const SemiDiscreteSystem sys = assemble(g, PlateParams{});
    CHECK(sys.is_homogeneous());
    for (double t : {0.0, 1.0, 7.5}) CHECK(sys.b(t).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("right-hand side is affine") {
    const GridSpec g(1, 1, 7, 6);
    PlateParams p;
    p.k0 = 0.1;
    p.k1 = 0.2;
    p.a1 = 1.0;
    const PlateModel m(g, p, BoundaryLoads::uniform(0.4, -0.3));
    std::mt19937 rng(12);
    const auto n = m.state_size();
    const Eigen::VectorXd y1 = random_vector(n, rng), y2 = random_vector(n, rng);
    const double a = 0.3, b = -2.2;
    const Eigen::VectorXd r0 = m.rhs(Eigen::VectorXd::Zero(n), 0.0);
    const Eigen::VectorXd lhs = m.rhs(a * y1 + b * y2, 0.0) - r0;
    const Eigen::VectorXd rhs = a * (m.rhs(y1, 0.0) - r0) + b * (m.rhs(y2, 0.0) - r0);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10 * rhs.cwiseAbs().maxCoeff());
}

TEST_CASE("undamped spectrum is purely oscillatory") {
    const GridSpec g(1, 1, 10, 10);
    const SemiDiscreteSystem sys = assemble(g, PlateParams{});
    Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(sys.A()), false);
    REQUIRE(es.info() == Eigen::Success);
    const auto ev = es.eigenvalues();
    const double norm = sys.norm_inf();
    double worst_re = 0.0;
    for (Eigen::Index k = 0; k < ev.size(); ++k) worst_re = std::max(worst_re, std::abs(ev(k).real()));
    CHECK(worst_re <= 1e-8 * norm);
    // eigenvalues pair up as +lambda, -lambda
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        double best = INFINITY;
        for (Eigen::Index l = 0; l < ev.size(); ++l) best = std::min(best, std::abs(ev(l) + ev(k)));
        CHECK(best <= 1e-8 * norm);
    }
}

TEST_CASE("triplet dump") {
    const GridSpec g(1, 1, 5, 5);
    const SemiDiscreteSystem sys = assemble(g, PlateParams{});
    std::ostringstream out;
    write_triplets(sys.A(), out);
    const std::string s = out.str();
    CHECK(static_cast<Eigen::Index>(std::count(s.begin(), s.end(), '\n')) == sys.A().nonZeros());
}
