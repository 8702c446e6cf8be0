#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "equispec/mesh.hpp"

using namespace equispec;

namespace {

std::set<std::array<int, 3>> sorted_triangle_set(const SymmetricMesh& mesh) {
    std::set<std::array<int, 3>> s;
    for (auto t : mesh.triangles) {
        std::sort(t.begin(), t.end());
        s.insert(t);
    }
    return s;
}

} // namespace

TEST_CASE("disk mesh under cyclic 4 is equivariant and conforming") {
    FiniteGroup g = build_group(GroupKind::cyclic, 4);
    SymmetricDomain disk = make_domain(g, 1.0, {});
    SymmetricMesh mesh = generate_mesh(disk, 0.1);

    CHECK(mesh.num_vertices() > 100);
    CHECK(equivariance_defect(mesh) < 1e-12);
    CHECK(check_conformity(mesh));
    CHECK(min_triangle_angle(mesh) >= 20.0);
    CHECK(mesh_area(mesh) == doctest::Approx(M_PI).epsilon(0.01));

    // boundary loop strictly increasing in theta, starting at 0
    for (size_t i = 1; i < mesh.boundary_theta.size(); ++i)
        CHECK(mesh.boundary_theta[i] > mesh.boundary_theta[i - 1]);
    CHECK(mesh.boundary_theta.front() == 0.0);
    CHECK(mesh.boundary_theta.back() < 2.0 * M_PI);
}

TEST_CASE("permutations form the group") {
    FiniteGroup g = build_group(GroupKind::dihedral, 3);
    SymmetricDomain d = make_domain(g, 1.0, {{3, 0.12, 0.0}});
    SymmetricMesh mesh = generate_mesh(d, 0.12);
    PermutationAction action = vertex_permutations(mesh); // validates internally

    for (int i = 0; i < mesh.num_vertices(); ++i) CHECK(action.perms[0][i] == i);
    for (int e = 0; e < g.order(); ++e) {
        int inv = g.inverse(e);
        for (int i = 0; i < mesh.num_vertices(); ++i)
            CHECK(action.perms[inv][action.perms[e][i]] == i);
    }
}

TEST_CASE("klein reflections map the triangle set onto itself") {
    FiniteGroup g = build_group(GroupKind::klein, 0);
    SymmetricDomain d = make_domain(g, 1.0, {{2, 0.15, 0.0}, {4, 0.05, 0.0}});
    SymmetricMesh mesh = generate_mesh(d, 0.11);
    CHECK(equivariance_defect(mesh) < 1e-12);

    auto base = sorted_triangle_set(mesh);
    for (int e = 0; e < g.order(); ++e) {
        std::set<std::array<int, 3>> image;
        for (auto t : mesh.triangles) {
            std::array<int, 3> it{mesh.orbit_action[e][t[0]], mesh.orbit_action[e][t[1]],
                                  mesh.orbit_action[e][t[2]]};
            std::sort(it.begin(), it.end());
            image.insert(it);
        }
        CHECK(image == base);
    }
}

TEST_CASE("transport keeps connectivity and scales the boundary exactly") {
    FiniteGroup g = build_group(GroupKind::cyclic, 4);
    SymmetricDomain disk = make_domain(g, 1.0, {});
    SymmetricMesh mesh = generate_mesh(disk, 0.1);
    BoundaryField dilation = make_field(g, {{0, 1.0, 0.0}});
    TransportMap map = make_transport(disk, dilation);

    SymmetricMesh same = transport_mesh(mesh, map, 0.0);
    for (int i = 0; i < mesh.num_vertices(); ++i)
        CHECK((same.vertices[i] - mesh.vertices[i]).norm() == 0.0);

    SymmetricMesh moved = transport_mesh(mesh, map, 0.1);
    CHECK(moved.triangles == mesh.triangles);
    CHECK(moved.boundary_loop == mesh.boundary_loop);
    for (int v : mesh.boundary_loop)
        CHECK(moved.vertices[v].norm() ==
              doctest::Approx(1.1 * mesh.vertices[v].norm()).epsilon(1e-13));
    CHECK(equivariance_defect(moved) < 1e-12);

    // the fixed core does not move
    for (int i = 0; i < mesh.num_vertices(); ++i)
        if (mesh.vertices[i].norm() < 0.25)
            CHECK((moved.vertices[i] - mesh.vertices[i]).norm() == 0.0);
}

TEST_CASE("transport equivariance on a flower with a field") {
    FiniteGroup g = build_group(GroupKind::cyclic, 5);
    SymmetricDomain d = make_domain(g, 1.0, {{5, 0.12, 0.0}});
    SymmetricMesh mesh = generate_mesh(d, 0.09);
    BoundaryField rho = make_field(g, {{5, 0.4, 0.3}, {10, 0.2, 0.0}});
    TransportMap map = make_transport(d, rho);
    SymmetricMesh moved = transport_mesh(mesh, map, 0.03);
    CHECK(equivariance_defect(moved) < 1e-12);
    CHECK(min_triangle_angle(moved) >= 20.0);
}

TEST_CASE("boundary polyline length converges at second order") {
    FiniteGroup g = build_group(GroupKind::cyclic, 3);
    SymmetricDomain d = make_domain(g, 1.0, {{3, 0.1, 0.0}});
    double exact = 0.0;
    int n = 1 << 16;
    for (int i = 0; i < n; ++i)
        exact += boundary_geometry(d, 2.0 * M_PI * i / n).arclength_density * (2.0 * M_PI / n);

    auto polyline_length = [](const SymmetricMesh& mesh) {
        double len = 0.0;
        int nb = mesh.num_boundary();
        for (int i = 0; i < nb; ++i)
            len += (mesh.vertices[mesh.boundary_loop[(i + 1) % nb]] -
                    mesh.vertices[mesh.boundary_loop[i]])
                       .norm();
        return len;
    };

    double err1 = std::abs(polyline_length(generate_mesh(d, 0.1)) - exact);
    double err2 = std::abs(polyline_length(generate_mesh(d, 0.05)) - exact);
    CHECK(err2 < err1 / 2.5);
}

TEST_CASE("narrow sector with too few arc segments is rejected") {
    FiniteGroup g = build_group(GroupKind::dihedral, 8);
    SymmetricDomain d = make_domain(g, 1.0, {});
    CHECK_THROWS_AS(generate_mesh(d, 0.3), Error);
}

TEST_CASE("mesh text export round-trips the counts") {
    FiniteGroup g = build_group(GroupKind::cyclic, 3);
    SymmetricDomain d = make_domain(g, 1.0, {});
    SymmetricMesh mesh = generate_mesh(d, 0.15);
    std::string path = "mesh_export_test.txt";
    write_mesh_txt(mesh, path);
    std::ifstream f(path);
    int nv = 0, nt = 0;
    f >> nv >> nt;
    CHECK(nv == mesh.num_vertices());
    CHECK(nt == mesh.num_triangles());
    int id;
    double x, y;
    f >> id >> x >> y;
    CHECK(id == 0);
    CHECK(x == mesh.vertices[0].x());
    f.close();
    std::remove(path.c_str());
}

TEST_CASE("determinism: identical input gives identical mesh") {
    FiniteGroup g = build_group(GroupKind::dihedral, 4);
    SymmetricDomain d = make_domain(g, 1.0, {{4, 0.08, 0.0}});
    SymmetricMesh a = generate_mesh(d, 0.09);
    SymmetricMesh b = generate_mesh(d, 0.09);
    REQUIRE(a.num_vertices() == b.num_vertices());
    for (int i = 0; i < a.num_vertices(); ++i)
        CHECK((a.vertices[i] - b.vertices[i]).norm() == 0.0);
    CHECK(a.triangles == b.triangles);
}
