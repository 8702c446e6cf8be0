#include <doctest.h>

#include <cmath>

#include "equispec/splitter.hpp"

using namespace equispec;

TEST_CASE("candidate fields respect the group mode rules") {
    FiniteGroup d3 = build_group(GroupKind::dihedral, 3);
    auto fields = candidate_fields(d3, 12);
    CHECK(fields.size() == 5); // k = 0,3,6,9,12
    for (const auto& f : fields)
        for (const auto& m : f.modes) {
            CHECK(m.k % 3 == 0);
            CHECK(m.b == 0.0);
        }

    FiniteGroup c4 = build_group(GroupKind::cyclic, 4);
    auto fc = candidate_fields(c4, 8);
    CHECK(fc.size() == 5); // cos0, cos4, sin4, cos8, sin8
}

TEST_CASE("no splitting direction for the zero cluster or an irreducible pair") {
    FiniteGroup g = build_group(GroupKind::cyclic, 3);
    SymmetricDomain d = make_domain(g, 1.0, {{3, 0.12, 0.0}});
    SymmetricMesh mesh = generate_mesh(d, 0.08);
    FemOperatorPair ops = assemble(mesh);
    EigenSolution sol = solve_neumann_eigs(ops, 4);
    SpectralResult spec = cluster_eigenvalues(sol.eigenvalues, 1e-6);
    auto candidates = candidate_fields(g, 12);

    auto none0 = find_splitting_direction(mesh, sol, spec.clusters[0].members,
                                          spec.clusters[0].lambda_mean, d, candidates);
    CHECK_FALSE(none0.has_value());

    REQUIRE(spec.clusters[1].size() == 2);
    auto none1 = find_splitting_direction(mesh, sol, spec.clusters[1].members,
                                          spec.clusters[1].lambda_mean, d, candidates);
    CHECK_FALSE(none1.has_value());
}

TEST_CASE("branch tracking: constant branches for zero field") {
    FiniteGroup g = build_group(GroupKind::cyclic, 3);
    SymmetricDomain d = make_domain(g, 1.0, {{3, 0.1, 0.0}});
    SymmetricMesh mesh = generate_mesh(d, 0.1);
    BoundaryField zero = make_field(g, {});
    TransportMap map = make_transport(d, zero);
    BranchCurves curves =
        track_branches(mesh, map, {-0.02, -0.01, 0.0, 0.01, 0.02}, 12.0);
    for (size_t b = 0; b < curves.lambda.size(); ++b) {
        double l0 = curves.lambda[b][2];
        for (double l : curves.lambda[b])
            CHECK(std::abs(l - l0) <= 1e-9 * std::max(1.0, std::abs(l0)));
        CHECK(curves.fit_residual[b] < 1e-9);
    }
}

TEST_CASE("dilation branches follow the scaling law") {
    FiniteGroup g = build_group(GroupKind::cyclic, 4);
    SymmetricDomain disk = make_domain(g, 1.0, {});
    SymmetricMesh mesh = generate_mesh(disk, 0.06);
    BoundaryField dil = make_field(g, {{0, 1.0, 0.0}});
    TransportMap map = make_transport(disk, dil);
    std::vector<double> grid;
    for (int i = -4; i <= 4; ++i) grid.push_back(0.0125 * i);
    BranchCurves curves = track_branches(mesh, map, grid, 11.0);
    REQUIRE(curves.lambda.size() >= 3);
    for (size_t b = 1; b < curves.lambda.size(); ++b) {
        double l0 = curves.lambda[b][4]; // t = 0
        for (size_t ti = 0; ti < grid.size(); ++ti) {
            double expected = l0 / ((1.0 + grid[ti]) * (1.0 + grid[ti]));
            CHECK(curves.lambda[b][ti] == doctest::Approx(expected).epsilon(0.01));
        }
    }
}

TEST_CASE("sweep runs deterministically and reports fractions") {
    FiniteGroup g = build_group(GroupKind::cyclic, 3);
    SymmetricDomain d = make_domain(g, 1.0, {{3, 0.1, 0.0}});
    SymmetricMesh mesh = generate_mesh(d, 0.12);
    SweepReport a = genericity_sweep(d, mesh, 15.0, 3, 42, 1e-2, 12, 1e-6);
    SweepReport b = genericity_sweep(d, mesh, 15.0, 3, 42, 1e-2, 12, 1e-6);
    CHECK(a.trials == 3);
    CHECK(a.ok_g_simple == b.ok_g_simple);
    CHECK(a.failures.size() == b.failures.size());
    CHECK(a.fraction_g_simple() >= 0.0);
    CHECK(a.fraction_g_simple() <= 1.0);
}

TEST_CASE("zero amplitude trial reproduces the base spectrum") {
    FiniteGroup g = build_group(GroupKind::cyclic, 3);
    SymmetricDomain d = make_domain(g, 1.0, {{3, 0.1, 0.0}});
    SymmetricMesh mesh = generate_mesh(d, 0.12);
    BoundaryField f = make_field(g, {{3, 1.0, 0.0}});
    TransportMap map = make_transport(d, f);
    SymmetricMesh m0 = transport_mesh(mesh, map, 0.0);
    EigenSolution a = solve_neumann_eigs(assemble(mesh), 6);
    EigenSolution b = solve_neumann_eigs(assemble(m0), 6);
    for (int i = 0; i < 6; ++i) CHECK(a.eigenvalues[i] == b.eigenvalues[i]);
}
