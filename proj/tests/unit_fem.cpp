#include <doctest.h>

#include <cmath>

#include "equispec/fem.hpp"
#include "equispec/oracle.hpp"

using namespace equispec;

namespace {

SymmetricMesh single_reference_triangle() {
    SymmetricMesh m;
    m.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    m.triangles = {{0, 1, 2}};
    m.boundary_loop = {0, 1, 2};
    m.boundary_theta = {0.0, 1.0, 2.0};
    m.h_target = 1.0;
    return m;
}

} // namespace

TEST_CASE("P1 element matrices on the reference triangle") {
    FemOperatorPair ops = assemble(single_reference_triangle());
    Eigen::MatrixXd k = Eigen::MatrixXd(ops.stiffness);
    Eigen::MatrixXd m = Eigen::MatrixXd(ops.mass);

    Eigen::Matrix3d k_expected;
    k_expected << 1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5;
    CHECK((k - k_expected).cwiseAbs().maxCoeff() < 1e-14);

    Eigen::Matrix3d m_expected;
    m_expected << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    m_expected *= 0.5 / 12.0;
    CHECK((m - m_expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("stiffness annihilates constants and operators are equivariant") {
    FiniteGroup g = build_group(GroupKind::cyclic, 5);
    SymmetricDomain d = make_domain(g, 1.0, {{5, 0.1, 0.0}});
    SymmetricMesh mesh = generate_mesh(d, 0.08);
    FemOperatorPair ops = assemble(mesh);

    Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.num_vertices());
    CHECK((ops.stiffness * ones).cwiseAbs().maxCoeff() < 1e-12);

    CHECK((Eigen::MatrixXd(ops.stiffness) - Eigen::MatrixXd(ops.stiffness).transpose())
              .cwiseAbs()
              .maxCoeff() == 0.0);

    for (int e = 0; e < g.order(); ++e) {
        CHECK(conjugation_defect(ops.stiffness, mesh.orbit_action[e]) < 1e-12);
        CHECK(conjugation_defect(ops.mass, mesh.orbit_action[e]) < 1e-12);
    }
}

TEST_CASE("zero mode, orthonormality, residuals, Rayleigh quotients") {
    FiniteGroup g = build_group(GroupKind::cyclic, 3);
    SymmetricDomain d = make_domain(g, 1.0, {{3, 0.1, 0.0}});
    SymmetricMesh mesh = generate_mesh(d, 0.1);
    FemOperatorPair ops = assemble(mesh);
    EigenSolution sol = solve_neumann_eigs(ops, 8);

    CHECK(std::abs(sol.eigenvalues[0]) < 1e-9);
    Eigen::VectorXd v0 = sol.eigenvectors.col(0);
    CHECK((v0 - Eigen::VectorXd::Constant(v0.size(), v0[0])).cwiseAbs().maxCoeff() < 1e-7);

    Eigen::MatrixXd gram = sol.eigenvectors.transpose() * (ops.mass * sol.eigenvectors);
    CHECK((gram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);

    for (int i = 0; i < 8; ++i) {
        double lam = sol.eigenvalues[i];
        CHECK(sol.residuals[i] <= 1e-8 * std::max(1.0, lam));
        double rq = sol.eigenvectors.col(i).dot(ops.stiffness * sol.eigenvectors.col(i));
        CHECK(std::abs(rq - lam) < 1e-10 * std::max(1.0, lam));
    }
}

TEST_CASE("dense and shift-invert paths agree") {
    FiniteGroup g = build_group(GroupKind::cyclic, 4);
    SymmetricDomain d = make_domain(g, 1.0, {});
    SymmetricMesh mesh = generate_mesh(d, 0.14);
    FemOperatorPair ops = assemble(mesh);

    SolverOptions dense;
    dense.dense_threshold = 100000;
    SolverOptions sparse;
    sparse.dense_threshold = 1;
    EigenSolution a = solve_neumann_eigs(ops, 10, dense);
    EigenSolution b = solve_neumann_eigs(ops, 10, sparse);
    for (int i = 0; i < 10; ++i)
        CHECK(a.eigenvalues[i] ==
              doctest::Approx(b.eigenvalues[i]).epsilon(1e-8).scale(std::max(1.0, a.eigenvalues[i])));
}

TEST_CASE("coarse disk eigenvalues approach the Bessel values") {
    FiniteGroup g = build_group(GroupKind::cyclic, 5);
    SymmetricDomain disk = make_domain(g, 1.0, {});
    SymmetricMesh mesh = generate_mesh(disk, 0.08);
    FemOperatorPair ops = assemble(mesh);
    EigenSolution sol = solve_neumann_eigs(ops, 6);

    std::vector<double> exact = disk_spectrum(1.0, 6).expanded();
    // lambda_2 = lambda_3 = (j'_{1,1})^2
    CHECK(sol.eigenvalues[1] == doctest::Approx(exact[1]).epsilon(0.03));
    CHECK(sol.eigenvalues[2] == doctest::Approx(exact[2]).epsilon(0.03));
    // equivariant mesh keeps the pair numerically degenerate
    CHECK(std::abs(sol.eigenvalues[1] - sol.eigenvalues[2]) < 1e-9 * sol.eigenvalues[1]);
}

TEST_CASE("disk eigenvalue error decays like h^2") {
    FiniteGroup g = build_group(GroupKind::cyclic, 4);
    SymmetricDomain disk = make_domain(g, 1.0, {});
    double exact = 3.3899577166718887; // (j'_{1,1})^2 from the zero oracle

    auto err = [&](double h) {
        SymmetricMesh mesh = generate_mesh(disk, h);
        EigenSolution sol = solve_neumann_eigs(assemble(mesh), 3);
        return std::abs(sol.eigenvalues[1] - exact);
    };
    double e1 = err(0.1), e2 = err(0.05);
    CHECK(e2 < e1 / 2.5);
    CHECK(e2 > e1 / 8.0);
}

TEST_CASE("boundary tangential gradient") {
    FiniteGroup g = build_group(GroupKind::cyclic, 4);
    SymmetricDomain disk = make_domain(g, 1.0, {});
    SymmetricMesh mesh = generate_mesh(disk, 0.05);
    int nb = mesh.num_boundary();

    Eigen::VectorXd c = Eigen::VectorXd::Constant(mesh.num_vertices(), 3.7);
    CHECK(boundary_tangential_gradient(mesh, c).cwiseAbs().maxCoeff() < 1e-12);

    Eigen::VectorXd x(mesh.num_vertices());
    for (int i = 0; i < mesh.num_vertices(); ++i) x[i] = mesh.vertices[i].x();
    Eigen::VectorXd gx = boundary_tangential_gradient(mesh, x);
    for (int i = 0; i < nb; ++i) {
        double th = mesh.boundary_theta[i];
        CHECK(gx[i] == doctest::Approx(-std::sin(th)).epsilon(0.01).scale(1.0));
    }
}

TEST_CASE("disk eigenfunction tangential derivative vs Bessel oracle") {
    FiniteGroup g = build_group(GroupKind::cyclic, 4);
    SymmetricDomain disk = make_domain(g, 1.0, {});
    SymmetricMesh mesh = generate_mesh(disk, 0.05);
    double k = 1.8411837813406593;

    Eigen::VectorXd u(mesh.num_vertices());
    for (int i = 0; i < mesh.num_vertices(); ++i) {
        double r = mesh.vertices[i].norm();
        double th = std::atan2(mesh.vertices[i].y(), mesh.vertices[i].x());
        u[i] = bessel_j(1, k * r) * std::cos(th);
    }
    Eigen::VectorXd g1 = boundary_tangential_gradient(mesh, u);
    double scale = bessel_j(1, k);
    for (int i = 0; i < mesh.num_boundary(); ++i) {
        double th = mesh.boundary_theta[i];
        double expected = -bessel_j(1, k) * std::sin(th);
        CHECK(std::abs(g1[i] - expected) < 0.04 * scale);
    }
}

TEST_CASE("projected eigenvectors stay eigenvectors") {
    FiniteGroup g = build_group(GroupKind::cyclic, 3);
    SymmetricDomain d = make_domain(g, 1.0, {{3, 0.1, 0.0}});
    SymmetricMesh mesh = generate_mesh(d, 0.1);
    FemOperatorPair ops = assemble(mesh);
    EigenSolution sol = solve_neumann_eigs(ops, 6);
    auto irreps = real_irreps(g);
    PermutationAction action = vertex_permutations(mesh);
    auto projectors = isotypic_projectors(g, irreps, action);

    for (int i = 0; i < 6; ++i) {
        for (const auto& p : projectors) {
            Eigen::VectorXd pv = p.apply(sol.eigenvectors.col(i));
            double num = (ops.stiffness * pv - sol.eigenvalues[i] * (ops.mass * pv)).norm();
            CHECK(num <= 10.0 * sol.residuals[i] + 1e-12);
        }
    }
}

TEST_CASE("count exceeding the vertex count is rejected") {
    FiniteGroup g = build_group(GroupKind::cyclic, 3);
    SymmetricDomain d = make_domain(g, 1.0, {});
    SymmetricMesh mesh = generate_mesh(d, 0.2);
    FemOperatorPair ops = assemble(mesh);
    CHECK_THROWS_AS(solve_neumann_eigs(ops, mesh.num_vertices() + 1), Error);
}
