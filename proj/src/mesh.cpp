#include "equispec/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace equispec {

namespace {

constexpr double kPi = 3.141592653589793238462643;
constexpr double kTwoPi = 2.0 * kPi;

enum class VertexClass { center, ray0, ray1, inner };

struct SectorVertex {
    VertexClass cls;
    int ring;  // 0 = center
    int slot;  // index along the ring
    double u;  // angular fraction in [0,1]
};

struct SectorMesh {
    std::vector<SectorVertex> verts;
    std::vector<Eigen::Vector2d> coords; // physical coordinates in the base wedge
    std::vector<std::array<int, 3>> tris;
    std::vector<int> inner_index;  // sector vertex -> dense interior index or -1
    std::vector<int> ray_ring;     // sector vertex -> ring-1 for ray vertices, else -1
    int n_rings = 0;
    int n_inner = 0;
    int outer_segments = 0;
    std::vector<int> outer_ring; // sector vertex ids of ring n_rings, by slot
};

double triangle_min_angle(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                          const Eigen::Vector2d& c) {
    auto corner = [](const Eigen::Vector2d& p, const Eigen::Vector2d& q,
                     const Eigen::Vector2d& r) {
        Eigen::Vector2d u = q - p, v = r - p;
        double nu = u.norm(), nv = v.norm();
        if (nu == 0.0 || nv == 0.0) return 0.0;
        double ca = std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
        return std::acos(ca);
    };
    double m = std::min({corner(a, b, c), corner(b, c, a), corner(c, a, b)});
    return m * 180.0 / kPi;
}

// Strip triangulation between two rings given ascending angular parameters.
void zip_rings(const std::vector<int>& inner, const std::vector<double>& uin,
               const std::vector<int>& outer, const std::vector<double>& uout,
               std::vector<std::array<int, 3>>& tris) {
    int a = static_cast<int>(inner.size()) - 1;
    int b = static_cast<int>(outer.size()) - 1;
    int i = 0, j = 0;
    while (i < a || j < b) {
        bool advance_inner;
        if (i < a && j < b)
            advance_inner = uin[i + 1] <= uout[j + 1] + 1e-15;
        else
            advance_inner = i < a;
        if (advance_inner) {
            tris.push_back({inner[i], inner[i + 1], outer[j]});
            ++i;
        } else {
            tris.push_back({inner[i], outer[j], outer[j + 1]});
            ++j;
        }
    }
}

SectorMesh build_sector(const SymmetricDomain& domain, double theta_span, int n_rings,
                        double angular_density) {
    SectorMesh sm;
    sm.n_rings = n_rings;

    auto physical = [&](double s, double u) {
        double theta = u * theta_span;
        double r = domain.radius(theta);
        return Eigen::Vector2d(s * r * std::cos(theta), s * r * std::sin(theta));
    };

    // center
    sm.verts.push_back({VertexClass::center, 0, 0, 0.0});
    sm.coords.push_back(Eigen::Vector2d::Zero());

    std::vector<int> prev_ids{0};
    std::vector<double> prev_u{0.0};
    for (int ring = 1; ring <= n_rings; ++ring) {
        int segs = std::max<int>(1, static_cast<int>(std::llround(ring * angular_density)));
        std::vector<int> ids(segs + 1);
        std::vector<double> us(segs + 1);
        double s = static_cast<double>(ring) / n_rings;
        for (int j = 0; j <= segs; ++j) {
            double u = static_cast<double>(j) / segs;
            VertexClass cls = (j == 0) ? VertexClass::ray0
                              : (j == segs) ? VertexClass::ray1
                                            : VertexClass::inner;
            ids[j] = static_cast<int>(sm.verts.size());
            us[j] = u;
            sm.verts.push_back({cls, ring, j, u});
            sm.coords.push_back(physical(s, u));
        }
        zip_rings(prev_ids, prev_u, ids, us, sm.tris);
        prev_ids = ids;
        prev_u = us;
        if (ring == n_rings) {
            sm.outer_ring = ids;
            sm.outer_segments = segs;
        }
    }

    sm.inner_index.assign(sm.verts.size(), -1);
    sm.ray_ring.assign(sm.verts.size(), -1);
    int next = 0;
    for (size_t v = 0; v < sm.verts.size(); ++v) {
        if (sm.verts[v].cls == VertexClass::inner) sm.inner_index[v] = next++;
        if (sm.verts[v].cls == VertexClass::ray0 || sm.verts[v].cls == VertexClass::ray1)
            sm.ray_ring[v] = sm.verts[v].ring - 1;
    }
    sm.n_inner = next;
    return sm;
}

double sector_min_angle(const SectorMesh& sm) {
    double m = 180.0;
    for (const auto& t : sm.tris)
        m = std::min(m, triangle_min_angle(sm.coords[t[0]], sm.coords[t[1]], sm.coords[t[2]]));
    return m;
}

struct WedgeLayout {
    double theta_span;
    int n_rays;
    std::vector<int> wedge_element;  // wedge -> group element index
    std::vector<int> element_wedge;  // inverse
    std::vector<bool> wedge_mirror;  // image reverses orientation
};

WedgeLayout wedge_layout(const FiniteGroup& g) {
    WedgeLayout w;
    int p = g.p;
    if (g.kind == GroupKind::cyclic) {
        w.theta_span = kTwoPi / p;
        w.n_rays = p;
        w.wedge_element.resize(p);
        w.wedge_mirror.assign(p, false);
        for (int c = 0; c < p; ++c) w.wedge_element[c] = c;
    } else {
        w.theta_span = kPi / p;
        w.n_rays = 2 * p;
        w.wedge_element.resize(2 * p);
        w.wedge_mirror.assign(2 * p, false);
        for (int m = 0; m < 2 * p; ++m) {
            if (m % 2 == 0) {
                w.wedge_element[m] = m / 2; // rotation by 2*pi*(m/2)/p
            } else {
                w.wedge_element[m] = p + ((m + 1) / 2) % p; // reflection
                w.wedge_mirror[m] = true;
            }
        }
    }
    w.element_wedge.assign(g.order(), -1);
    for (size_t m = 0; m < w.wedge_element.size(); ++m) w.element_wedge[w.wedge_element[m]] = static_cast<int>(m);
    return w;
}

// Image of ray index under a group element, in exact integer arithmetic.
int ray_action(const FiniteGroup& g, const WedgeLayout& w, int elem, int ray) {
    int p = g.p;
    if (g.kind == GroupKind::cyclic) return (ray + elem) % p;
    int n = w.n_rays;
    if (elem < p) return (ray + 2 * elem) % n;
    int j = elem - p;
    return ((2 * j - ray) % n + n) % n;
}

} // namespace

std::vector<int> SymmetricMesh::boundary_position() const {
    std::vector<int> pos(vertices.size(), -1);
    for (size_t i = 0; i < boundary_loop.size(); ++i) pos[boundary_loop[i]] = static_cast<int>(i);
    return pos;
}

SymmetricMesh generate_mesh(const SymmetricDomain& domain, double h_target) {
    if (h_target <= 0.0) fail(ErrorCategory::meshing, "h_target must be positive");
    const FiniteGroup& g = domain.group;
    WedgeLayout layout = wedge_layout(g);

    int base_rings = std::max<int>(2, static_cast<int>(std::llround(domain.r0 / h_target)));
    double best_angle = 0.0;

    // A few deterministic refinement attempts; first one meeting the quality
    // bound wins.
    const std::array<std::pair<int, double>, 4> attempts{{
        {0, 1.0}, {1, 1.0}, {0, 1.3}, {1, 1.3}}};

    SectorMesh sector;
    bool ok = false;
    for (const auto& [extra, mult] : attempts) {
        int n_rings = base_rings + extra;
        double density = layout.theta_span * domain.r0 / (n_rings * h_target) * mult;
        SectorMesh sm = build_sector(domain, layout.theta_span, n_rings, density);
        double ang = sector_min_angle(sm);
        if (ang > best_angle) best_angle = ang;
        if (ang >= 20.0) {
            sector = std::move(sm);
            ok = true;
            break;
        }
    }
    if (!ok)
        fail(ErrorCategory::meshing,
             "triangle quality below 20 deg after refinement attempts (best min angle " +
                 std::to_string(best_angle) + " deg)");
    if (sector.outer_segments < 8)
        fail(ErrorCategory::meshing,
             "sector arc has " + std::to_string(sector.outer_segments) +
                 " boundary segments (< 8); decrease h_target");

    int n_copies = static_cast<int>(layout.wedge_element.size());
    int n_rays = layout.n_rays;
    int n_rings = sector.n_rings;
    int ray_base = 1;
    int inner_base = 1 + n_rays * n_rings;

    SymmetricMesh mesh;
    mesh.group = g;
    mesh.h_target = h_target;
    mesh.vertices.assign(inner_base + n_copies * sector.n_inner, Eigen::Vector2d::Zero());
    mesh.sector_tag.assign(mesh.vertices.size(), 0);

    // Global id of a sector vertex seen from a given wedge copy.
    auto global_id = [&](int wedge, int sv) -> int {
        const SectorVertex& v = sector.verts[sv];
        switch (v.cls) {
            case VertexClass::center:
                return 0;
            case VertexClass::inner:
                return inner_base + wedge * sector.n_inner + sector.inner_index[sv];
            case VertexClass::ray0:
            case VertexClass::ray1: {
                bool edge0 = v.cls == VertexClass::ray0;
                int ray;
                if (g.kind == GroupKind::cyclic) {
                    ray = edge0 ? wedge : (wedge + 1) % n_rays;
                } else if (!layout.wedge_mirror[wedge]) {
                    ray = edge0 ? wedge : (wedge + 1) % n_rays;
                } else {
                    ray = edge0 ? (wedge + 1) % n_rays : wedge;
                }
                return ray_base + ray * n_rings + sector.ray_ring[sv];
            }
        }
        return -1;
    };

    // Coordinates: each global vertex is written by its canonical owner; rays
    // are owned by the rotation mapping the matching sector edge onto them, so
    // every coordinate is (group matrix) * (sector coordinate).
    mesh.vertices[0] = Eigen::Vector2d::Zero();
    for (int sv = 0; sv < static_cast<int>(sector.verts.size()); ++sv) {
        const SectorVertex& v = sector.verts[sv];
        if (v.cls == VertexClass::center) continue;
        if (v.cls == VertexClass::inner) {
            for (int w = 0; w < n_copies; ++w) {
                int id = global_id(w, sv);
                mesh.vertices[id] = g.elements[layout.wedge_element[w]].matrix * sector.coords[sv];
                mesh.sector_tag[id] = w;
            }
        } else if (g.kind == GroupKind::cyclic) {
            if (v.cls == VertexClass::ray0) {
                for (int ray = 0; ray < n_rays; ++ray) {
                    int id = ray_base + ray * n_rings + sector.ray_ring[sv];
                    mesh.vertices[id] = g.elements[ray].matrix * sector.coords[sv];
                    mesh.sector_tag[id] = ray;
                }
            }
        } else {
            // dihedral/klein: even rays carry the ray0 radii, odd rays ray1.
            bool edge0 = v.cls == VertexClass::ray0;
            for (int ray = edge0 ? 0 : 1; ray < n_rays; ray += 2) {
                int rot = edge0 ? ray / 2 : (ray - 1) / 2;
                int id = ray_base + ray * n_rings + sector.ray_ring[sv];
                mesh.vertices[id] = g.elements[rot].matrix * sector.coords[sv];
                mesh.sector_tag[id] = layout.element_wedge[rot];
            }
        }
    }

    // Triangles, CCW-normalized.
    mesh.triangles.reserve(n_copies * sector.tris.size());
    for (int w = 0; w < n_copies; ++w) {
        for (const auto& t : sector.tris) {
            std::array<int, 3> tri{global_id(w, t[0]), global_id(w, t[1]), global_id(w, t[2])};
            const Eigen::Vector2d &a = mesh.vertices[tri[0]], &b = mesh.vertices[tri[1]],
                                  &c = mesh.vertices[tri[2]];
            double area2 = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
            if (area2 < 0.0) std::swap(tri[1], tri[2]);
            mesh.triangles.push_back(tri);
        }
    }

    // Vertex permutations.
    int n_elems = g.order();
    mesh.orbit_action.assign(n_elems, std::vector<int>(mesh.vertices.size(), -1));
    for (int e = 0; e < n_elems; ++e) {
        std::vector<int>& perm = mesh.orbit_action[e];
        perm[0] = 0;
        for (int ray = 0; ray < n_rays; ++ray) {
            int target = ray_action(g, layout, e, ray);
            for (int t = 0; t < n_rings; ++t)
                perm[ray_base + ray * n_rings + t] = ray_base + target * n_rings + t;
        }
        for (int w = 0; w < n_copies; ++w) {
            int wt = layout.element_wedge[g.multiply(e, layout.wedge_element[w])];
            for (int k = 0; k < sector.n_inner; ++k)
                perm[inner_base + w * sector.n_inner + k] = inner_base + wt * sector.n_inner + k;
        }
    }

    // Boundary loop in increasing theta. Mirrored wedges traverse their outer
    // ring backwards; the last vertex of each wedge is the first of the next.
    for (int w = 0; w < n_copies; ++w) {
        double base = w * layout.theta_span;
        bool mirror = g.kind != GroupKind::cyclic && layout.wedge_mirror[w];
        int segs = sector.outer_segments;
        if (!mirror) {
            for (int j = 0; j < segs; ++j) {
                int sv = sector.outer_ring[j];
                mesh.boundary_loop.push_back(global_id(w, sv));
                mesh.boundary_theta.push_back(base + sector.verts[sv].u * layout.theta_span);
            }
        } else {
            for (int j = segs; j > 0; --j) {
                int sv = sector.outer_ring[j];
                mesh.boundary_loop.push_back(global_id(w, sv));
                mesh.boundary_theta.push_back(base + (1.0 - sector.verts[sv].u) * layout.theta_span);
            }
        }
    }

    if (!check_conformity(mesh)) fail(ErrorCategory::meshing, "replicated mesh is not conforming");
    return mesh;
}

PermutationAction vertex_permutations(const SymmetricMesh& mesh) {
    PermutationAction a;
    a.group = &mesh.group;
    a.perms = mesh.orbit_action;
    validate_action(a);
    if (equivariance_defect(mesh) > 1e-12)
        fail(ErrorCategory::equivariance_violation, "mesh coordinates are not equivariant");
    return a;
}

SymmetricMesh transport_mesh(const SymmetricMesh& mesh, const TransportMap& map, double t) {
    map.require_valid_t(t);
    SymmetricMesh out = mesh;
    if (t == 0.0) return out;
    for (auto& v : out.vertices) v = map.apply(t, v);
    double ang = min_triangle_angle(out);
    if (ang < 20.0)
        fail(ErrorCategory::meshing, "transport degraded quality to " + std::to_string(ang) +
                                         " deg; use smaller t");
    return out;
}

double equivariance_defect(const SymmetricMesh& mesh) {
    double d = 0.0;
    for (int e = 0; e < mesh.group.order(); ++e) {
        const Eigen::Matrix2d& m = mesh.group.elements[e].matrix;
        const std::vector<int>& perm = mesh.orbit_action[e];
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            Eigen::Vector2d img = m * mesh.vertices[v];
            d = std::max(d, (mesh.vertices[perm[v]] - img).cwiseAbs().maxCoeff());
        }
    }
    return d;
}

double min_triangle_angle(const SymmetricMesh& mesh) {
    double m = 180.0;
    for (const auto& t : mesh.triangles)
        m = std::min(m, triangle_min_angle(mesh.vertices[t[0]], mesh.vertices[t[1]],
                                           mesh.vertices[t[2]]));
    return m;
}

bool check_conformity(const SymmetricMesh& mesh) {
    std::map<std::pair<int, int>, int> edges;
    for (const auto& t : mesh.triangles) {
        for (int i = 0; i < 3; ++i) {
            int a = t[i], b = t[(i + 1) % 3];
            edges[{std::min(a, b), std::max(a, b)}]++;
        }
    }
    std::set<std::pair<int, int>> boundary;
    int nb = mesh.num_boundary();
    for (int i = 0; i < nb; ++i) {
        int a = mesh.boundary_loop[i], b = mesh.boundary_loop[(i + 1) % nb];
        boundary.insert({std::min(a, b), std::max(a, b)});
    }
    for (const auto& [e, count] : edges) {
        bool is_boundary = boundary.count(e) > 0;
        if (is_boundary && count != 1) return false;
        if (!is_boundary && count != 2) return false;
    }
    return true;
}

double mesh_area(const SymmetricMesh& mesh) {
    double a = 0.0;
    for (const auto& t : mesh.triangles) {
        const Eigen::Vector2d &p = mesh.vertices[t[0]], &q = mesh.vertices[t[1]],
                              &r = mesh.vertices[t[2]];
        a += 0.5 * ((q - p).x() * (r - p).y() - (q - p).y() * (r - p).x());
    }
    return a;
}

void write_mesh_txt(const SymmetricMesh& mesh, const std::string& path) {
    std::ofstream f(path);
    if (!f) fail(ErrorCategory::io, "cannot open " + path);
    f.precision(17);
    f << mesh.num_vertices() << " " << mesh.num_triangles() << "\n";
    for (int i = 0; i < mesh.num_vertices(); ++i)
        f << i << " " << mesh.vertices[i].x() << " " << mesh.vertices[i].y() << "\n";
    for (int i = 0; i < mesh.num_triangles(); ++i)
        f << i << " " << mesh.triangles[i][0] << " " << mesh.triangles[i][1] << " "
          << mesh.triangles[i][2] << "\n";
}

} // namespace equispec
