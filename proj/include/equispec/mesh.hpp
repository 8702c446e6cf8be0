#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "equispec/domain.hpp"
#include "equispec/grouprep.hpp"

namespace equispec {

/// Conforming triangulation built by meshing one fundamental sector and
/// replicating it with the group action. Shared vertices (the centroid and
/// the sector rays) exist once and are referenced by index, so the vertex
/// permutations realize the group action exactly.
struct SymmetricMesh {
    FiniteGroup group;
    std::vector<Eigen::Vector2d> vertices;
    std::vector<std::array<int, 3>> triangles; // CCW
    std::vector<int> boundary_loop;            // ordered by increasing theta
    std::vector<double> boundary_theta;        // angular parameter per loop entry
    std::vector<std::vector<int>> orbit_action; // vertex permutation per element
    std::vector<int> sector_tag;               // owning fundamental-sector copy
    double h_target = 0.0;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }
    int num_boundary() const { return static_cast<int>(boundary_loop.size()); }

    /// loop position of a vertex, or -1 if interior.
    std::vector<int> boundary_position() const;
};

SymmetricMesh generate_mesh(const SymmetricDomain& domain, double h_target);

/// Validated permutation family (homomorphism + geometric equivariance).
PermutationAction vertex_permutations(const SymmetricMesh& mesh);

/// Same connectivity, vertices moved by h(t,.); rechecks quality.
SymmetricMesh transport_mesh(const SymmetricMesh& mesh, const TransportMap& map, double t);

/// max over g,v of |coords(perm_g(v)) - g coords(v)|_inf.
double equivariance_defect(const SymmetricMesh& mesh);

/// smallest interior angle over all triangles, in degrees.
double min_triangle_angle(const SymmetricMesh& mesh);

/// every interior edge in exactly 2 triangles, boundary edges in exactly 1.
bool check_conformity(const SymmetricMesh& mesh);

double mesh_area(const SymmetricMesh& mesh);

/// Plain-text export: "nv nt" header, vertex lines "id x y",
/// triangle lines "id v1 v2 v3".
void write_mesh_txt(const SymmetricMesh& mesh, const std::string& path);

} // namespace equispec
