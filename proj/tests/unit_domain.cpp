#include <doctest.h>

#include <cmath>

#include "equispec/domain.hpp"

using namespace equispec;

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;

// Independent curvature oracle: centered differences of the parameterization.
double fd_curvature(const SymmetricDomain& d, double theta, double h = 1e-5) {
    auto p = [&](double t) {
        double r = d.radius(t);
        return Eigen::Vector2d(r * std::cos(t), r * std::sin(t));
    };
    Eigen::Vector2d d1 = (p(theta + h) - p(theta - h)) / (2.0 * h);
    Eigen::Vector2d d2 = (p(theta + h) - 2.0 * p(theta) + p(theta - h)) / (h * h);
    double cross = d1.x() * d2.y() - d1.y() * d2.x();
    return cross / std::pow(d1.norm(), 3);
}
} // namespace

TEST_CASE("mode rules per group") {
    FiniteGroup c5 = build_group(GroupKind::cyclic, 5);
    CHECK_NOTHROW(make_domain(c5, 1.0, {{5, 0.1, 0.0}}));
    CHECK_NOTHROW(make_domain(c5, 1.0, {{10, 0.05, 0.02}}));

    FiniteGroup d3 = build_group(GroupKind::dihedral, 3);
    CHECK_THROWS_AS(make_domain(d3, 1.0, {{3, 0.0, 0.2}}), Error);
    CHECK_NOTHROW(make_domain(d3, 1.0, {{3, 0.2, 0.0}}));

    FiniteGroup c3 = build_group(GroupKind::cyclic, 3);
    CHECK_THROWS_AS(make_domain(c3, 1.0, {{4, 0.1, 0.0}}), Error);

    FiniteGroup k = build_group(GroupKind::klein, 0);
    CHECK_NOTHROW(make_domain(k, 1.0, {{2, 0.2, 0.0}, {4, 0.05, 0.0}}));
    CHECK_THROWS_AS(make_domain(k, 1.0, {{3, 0.1, 0.0}}), Error);
    CHECK_THROWS_AS(make_domain(k, 1.0, {{2, 0.1, 0.1}}), Error);

    // star-shape margin
    CHECK_THROWS_AS(make_domain(c3, 1.0, {{3, 0.95, 0.0}}), Error);
    // rejection message names the offending mode
    try {
        make_domain(c3, 1.0, {{4, 0.1, 0.0}});
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("k=4") != std::string::npos);
        CHECK(e.category() == ErrorCategory::symmetry_violation);
    }
}

TEST_CASE("boundary geometry of the circle") {
    FiniteGroup c4 = build_group(GroupKind::cyclic, 4);
    SymmetricDomain disk = make_domain(c4, 2.0, {});
    for (double th : {0.0, 0.7, 2.1, 4.4}) {
        BoundaryPoint bp = boundary_geometry(disk, th);
        CHECK(bp.curvature == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(bp.arclength_density == doctest::Approx(2.0).epsilon(1e-12));
        Eigen::Vector2d radial(std::cos(th), std::sin(th));
        CHECK((bp.normal - radial).norm() < 1e-12);
        CHECK((bp.point - 2.0 * radial).norm() < 1e-12);
    }
}

TEST_CASE("flower curvature matches the finite-difference oracle") {
    FiniteGroup c3 = build_group(GroupKind::cyclic, 3);
    SymmetricDomain d = make_domain(c3, 1.0, {{3, 0.1, 0.0}});
    // closed form at theta = 0: (1.21 + 0 + 0.99) / 1.21^{3/2}
    BoundaryPoint bp = boundary_geometry(d, 0.0);
    CHECK(bp.curvature == doctest::Approx(2.2 / 1.331).epsilon(1e-12));
    for (double th = 0.0; th < kTwoPi; th += 0.3)
        CHECK(boundary_geometry(d, th).curvature ==
              doctest::Approx(fd_curvature(d, th)).epsilon(1e-6));
}

TEST_CASE("turning number: curvature integrates to 2 pi") {
    FiniteGroup k = build_group(GroupKind::klein, 0);
    SymmetricDomain d = make_domain(k, 1.0, {{2, 0.2, 0.0}});
    int n = 8192;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double th = kTwoPi * i / n;
        BoundaryPoint bp = boundary_geometry(d, th);
        acc += bp.curvature * bp.arclength_density * (kTwoPi / n);
    }
    CHECK(acc == doctest::Approx(kTwoPi).epsilon(1e-8));
}

TEST_CASE("normal velocity basics") {
    FiniteGroup c4 = build_group(GroupKind::cyclic, 4);
    SymmetricDomain disk = make_domain(c4, 1.0, {});
    BoundaryField dilation = make_field(c4, {{0, 1.0, 0.0}});
    NormalVelocity nv = normal_velocity(disk, dilation);
    for (double th = 0.0; th < kTwoPi; th += 0.5)
        CHECK(nv.value(th) == doctest::Approx(1.0).epsilon(1e-14));

    BoundaryField zero = make_field(c4, {});
    NormalVelocity nz = normal_velocity(disk, zero);
    for (double th = 0.0; th < kTwoPi; th += 0.5) CHECK(nz.value(th) == 0.0);

    FiniteGroup c5 = build_group(GroupKind::cyclic, 5);
    BoundaryField other = make_field(c5, {{5, 1.0, 0.0}});
    CHECK_THROWS_AS(normal_velocity(disk, other), Error);
}

TEST_CASE("normal velocity equals V . N of the transport family") {
    FiniteGroup c5 = build_group(GroupKind::cyclic, 5);
    SymmetricDomain d = make_domain(c5, 1.0, {{5, 0.1, 0.0}});
    BoundaryField rho = make_field(c5, {{5, 1.0, 0.0}});
    NormalVelocity nv = normal_velocity(d, rho);
    TransportMap map = make_transport(d, rho);
    for (double th = 0.05; th < kTwoPi; th += 0.37) {
        BoundaryPoint bp = boundary_geometry(d, th);
        Eigen::Vector2d v = map.velocity(bp.point);
        CHECK(std::abs(v.dot(bp.normal) - nv.value(th)) < 1e-10);
    }
}

TEST_CASE("sigma is invariant, and even about dihedral axes") {
    FiniteGroup d3 = build_group(GroupKind::dihedral, 3);
    SymmetricDomain dom = make_domain(d3, 1.0, {{3, 0.15, 0.0}});
    BoundaryField rho = make_field(d3, {{6, 1.0, 0.0}});
    NormalVelocity nv = normal_velocity(dom, rho);
    for (double th = 0.0; th < kTwoPi; th += 0.21) {
        CHECK(nv.value(th) == doctest::Approx(nv.value(th + kTwoPi / 3)).epsilon(1e-12));
        // reflection about the x-axis
        CHECK(nv.value(th) == doctest::Approx(nv.value(-th)).epsilon(1e-12));
        // reflection about the axis at pi/3
        CHECK(nv.value(th) ==
              doctest::Approx(nv.value(2.0 * M_PI / 3.0 - th)).epsilon(1e-12));
    }
}

TEST_CASE("transport map") {
    FiniteGroup c4 = build_group(GroupKind::cyclic, 4);
    SymmetricDomain disk = make_domain(c4, 1.0, {});
    BoundaryField dilation = make_field(c4, {{0, 1.0, 0.0}});
    TransportMap map = make_transport(disk, dilation);

    Eigen::Vector2d x(0.8, 0.3);
    CHECK((map.apply(0.0, x) - x).norm() == 0.0);

    SymmetricDomain grown = map.perturbed_domain(0.1);
    CHECK(grown.r0 == doctest::Approx(1.1).epsilon(1e-15));

    // boundary points move radially by exactly t*rho
    for (double th = 0.0; th < kTwoPi; th += 0.41) {
        Eigen::Vector2d p = boundary_geometry(disk, th).point;
        Eigen::Vector2d q = map.apply(0.1, p);
        CHECK(q.norm() == doctest::Approx(1.1).epsilon(1e-14));
    }

    CHECK(map.t_max() > 0.0);
    CHECK_THROWS_AS(map.apply(map.t_max() * 1.5, x), Error);
}

TEST_CASE("perturbed radius is exact in the mode coefficients") {
    FiniteGroup c3 = build_group(GroupKind::cyclic, 3);
    SymmetricDomain d = make_domain(c3, 1.0, {{3, 0.1, 0.02}});
    BoundaryField rho = make_field(c3, {{3, 0.3, -0.1}, {6, 0.2, 0.0}});
    TransportMap map = make_transport(d, rho);
    double t = 0.05;
    SymmetricDomain dt = map.perturbed_domain(t);
    for (double th = 0.0; th < kTwoPi; th += 0.17)
        CHECK(dt.radius(th) ==
              doctest::Approx(d.radius(th) + t * rho.rho(th)).epsilon(1e-14));
}

TEST_CASE("transport equivariance sampled over the group") {
    for (auto [kind, p] : std::vector<std::pair<GroupKind, int>>{{GroupKind::cyclic, 3},
                                                                 {GroupKind::dihedral, 4},
                                                                 {GroupKind::klein, 0}}) {
        FiniteGroup g = build_group(kind, p);
        int k0 = kind == GroupKind::klein ? 2 : p;
        SymmetricDomain d = make_domain(g, 1.0, {{k0, 0.1, 0.0}});
        BoundaryField rho = make_field(g, {{2 * k0, 1.0, 0.0}});
        TransportMap map = make_transport(d, rho);
        double t = 0.05;
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            double a = 0.001 + 0.00628 * i;
            double rr = 0.2 + 0.75 * std::fmod(0.37 * i, 1.0);
            Eigen::Vector2d x = rr * d.radius(a) * Eigen::Vector2d(std::cos(a), std::sin(a));
            for (int e = 0; e < g.order(); ++e) {
                const Eigen::Matrix2d& m = g.elements[e].matrix;
                worst = std::max(worst, (map.apply(t, m * x) - m * map.apply(t, x)).norm());
            }
        }
        CHECK(worst < 1e-12);
    }
}
