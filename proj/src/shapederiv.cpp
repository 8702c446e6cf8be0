#include "equispec/shapederiv.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <set>

namespace equispec {

SigmaBoundaryData sigma_boundary_data(const SymmetricMesh& mesh, const SymmetricDomain& domain,
                                      const BoundaryField& field) {
    NormalVelocity nv = normal_velocity(domain, field);
    int nb = mesh.num_boundary();
    SigmaBoundaryData out;
    out.value.resize(nb);
    out.d_arc.resize(nb);
    out.flow_rate.resize(nb);
    out.v_tangent.resize(nb);
    out.curvature.resize(nb);
    out.normal.resize(nb, 2);
    for (int i = 0; i < nb; ++i) {
        double th = mesh.boundary_theta[i];
        double r = domain.radius(th);
        double r1 = domain.radius_d1(th);
        double rho = field.rho(th);
        double rho1 = field.rho_d1(th);
        double w = std::sqrt(r * r + r1 * r1);
        BoundaryPoint bp = boundary_geometry(domain, th);
        out.value[i] = nv.value(th);
        out.d_arc[i] = nv.d_theta(th) / w;
        // d/dt of sigma along the material boundary point at t = 0, for the
        // radial family: sigma(t) = rho (r + t rho) / |(r + t rho, r' + t rho')|.
        out.flow_rate[i] = rho * r1 * (rho * r1 - rho1 * r) / (w * w * w);
        out.v_tangent[i] = rho * r1 / w;
        out.curvature[i] = bp.curvature;
        out.normal(i, 0) = bp.normal.x();
        out.normal(i, 1) = bp.normal.y();
    }
    return out;
}

namespace {

void require_clean_cluster(const EigenSolution& eig, const std::vector<int>& members,
                           double lambda0) {
    if (members.empty()) fail(ErrorCategory::precondition, "empty cluster");
    for (int m : members) {
        if (m < 0 || m >= eig.eigenvalues.size())
            fail(ErrorCategory::precondition, "cluster member out of range");
        if (eig.residuals[m] > 1e-6 * std::max(1.0, std::abs(lambda0)))
            fail(ErrorCategory::numerical,
                 "cluster eigenpair residual too large for derivative computation");
    }
}

} // namespace

Eigen::MatrixXd first_derivative_matrix(const SymmetricMesh& mesh, const EigenSolution& eig,
                                        const std::vector<int>& members, double lambda0,
                                        const Eigen::VectorXd& sigma_on_loop) {
    require_clean_cluster(eig, members, lambda0);
    int m = static_cast<int>(members.size());
    int nb = mesh.num_boundary();
    Eigen::VectorXd w = boundary_weights(mesh);

    std::vector<Eigen::VectorXd> bu(m), bg(m);
    for (int j = 0; j < m; ++j) {
        bu[j] = boundary_values(mesh, eig.eigenvectors.col(members[j]));
        bg[j] = boundary_tangential_gradient(mesh, eig.eigenvectors.col(members[j]));
    }

    Eigen::MatrixXd out(m, m);
    for (int k = 0; k < m; ++k) {
        for (int j = k; j < m; ++j) {
            double acc = 0.0;
            for (int i = 0; i < nb; ++i)
                acc += w[i] * sigma_on_loop[i] *
                       (bg[k][i] * bg[j][i] - lambda0 * bu[k][i] * bu[j][i]);
            out(k, j) = acc;
            out(j, k) = acc;
        }
    }
    return out;
}

EigenfunctionDerivative eigenfunction_derivative(const SymmetricMesh& mesh,
                                                 const FemOperatorPair& ops,
                                                 const EigenSolution& eig,
                                                 const std::vector<int>& members, int j,
                                                 double lambda0,
                                                 const Eigen::VectorXd& sigma_on_loop) {
    require_clean_cluster(eig, members, lambda0);
    const int n = static_cast<int>(ops.stiffness.rows());
    const int m = static_cast<int>(members.size());
    const int nb = mesh.num_boundary();
    const Eigen::VectorXd phi = eig.eigenvectors.col(members[j]);

    // Weak Neumann data: b_psi = -int sigma dpsi/dtau dphi/dtau + l0 int sigma psi phi.
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + m);
    Eigen::VectorXd bu = boundary_values(mesh, phi);
    Eigen::VectorXd wloop = boundary_weights(mesh);
    for (int i = 0; i < nb; ++i) {
        int inext = (i + 1) % nb;
        int a = mesh.boundary_loop[i];
        int c = mesh.boundary_loop[inext];
        double len = (mesh.vertices[c] - mesh.vertices[a]).norm();
        double sbar = 0.5 * (sigma_on_loop[i] + sigma_on_loop[inext]);
        double dphi = (bu[inext] - bu[i]) / len;
        b[a] += sbar * dphi;
        b[c] -= sbar * dphi;
    }
    for (int i = 0; i < nb; ++i)
        b[mesh.boundary_loop[i]] += lambda0 * sigma_on_loop[i] * bu[i] * wloop[i];

    // Saddle system [(K - l0 M), M Phi; Phi^T M, 0].
    using T = Eigen::Triplet<double>;
    std::vector<T> trips;
    Eigen::SparseMatrix<double> a = ops.stiffness - lambda0 * ops.mass;
    trips.reserve(a.nonZeros() + 2 * static_cast<size_t>(n) * m);
    for (int k = 0; k < a.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it)
            trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                               it.value());
    for (int c = 0; c < m; ++c) {
        Eigen::VectorXd mphi = ops.mass * eig.eigenvectors.col(members[c]);
        for (int r = 0; r < n; ++r) {
            if (mphi[r] == 0.0) continue;
            trips.emplace_back(r, n + c, mphi[r]);
            trips.emplace_back(n + c, r, mphi[r]);
        }
    }
    Eigen::SparseMatrix<double> saddle(n + m, n + m);
    saddle.setFromTriplets(trips.begin(), trips.end());

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(saddle);
    if (lu.info() != Eigen::Success)
        fail(ErrorCategory::numerical, "singular saddle system (cluster mis-specified)");
    Eigen::VectorXd sol = lu.solve(b);
    if (lu.info() != Eigen::Success)
        fail(ErrorCategory::numerical, "saddle solve failed");

    EigenfunctionDerivative out;
    out.phidot = sol.head(n);
    out.multipliers = sol.tail(m);
    out.residual = (saddle * sol - b).norm() / std::max(1.0, b.norm());
    out.max_orthogonality = 0.0;
    Eigen::VectorXd mphidot = ops.mass * out.phidot;
    for (int i = 0; i < m; ++i)
        out.max_orthogonality = std::max(
            out.max_orthogonality, std::abs(eig.eigenvectors.col(members[i]).dot(mphidot)));
    return out;
}

namespace {

// P1 point evaluation with triangle search around a seed vertex.
struct P1Probe {
    const SymmetricMesh* mesh;
    std::vector<std::vector<int>> vertex_tris;

    explicit P1Probe(const SymmetricMesh& m) : mesh(&m) {
        vertex_tris.resize(m.num_vertices());
        for (int t = 0; t < m.num_triangles(); ++t)
            for (int v : m.triangles[t]) vertex_tris[v].push_back(t);
    }

    bool barycentric(int t, const Eigen::Vector2d& p, Eigen::Vector3d& lam) const {
        const auto& tri = mesh->triangles[t];
        const Eigen::Vector2d &a = mesh->vertices[tri[0]], &b = mesh->vertices[tri[1]],
                              &c = mesh->vertices[tri[2]];
        double det = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
        if (det == 0.0) return false;
        double l1 = ((p - a).x() * (c - a).y() - (p - a).y() * (c - a).x()) / det;
        double l2 = ((b - a).x() * (p - a).y() - (b - a).y() * (p - a).x()) / det;
        lam = Eigen::Vector3d(1.0 - l1 - l2, l1, l2);
        return lam.minCoeff() >= -1e-10;
    }

    int locate(const Eigen::Vector2d& p, int seed, Eigen::Vector3d& lam) const {
        std::set<int> seen;
        std::vector<int> frontier{seed};
        for (int ring = 0; ring < 4; ++ring) {
            std::vector<int> next;
            for (int v : frontier) {
                for (int t : vertex_tris[v]) {
                    if (!seen.insert(t).second) continue;
                    if (barycentric(t, p, lam)) return t;
                    for (int w : mesh->triangles[t]) next.push_back(w);
                }
            }
            frontier = std::move(next);
        }
        for (int t = 0; t < mesh->num_triangles(); ++t)
            if (barycentric(t, p, lam)) return t;
        return -1;
    }

    void eval(int t, const Eigen::Vector3d& lam, const Eigen::VectorXd& u, double& value,
              Eigen::Vector2d& grad) const {
        const auto& tri = mesh->triangles[t];
        const Eigen::Vector2d &a = mesh->vertices[tri[0]], &b = mesh->vertices[tri[1]],
                              &c = mesh->vertices[tri[2]];
        double det = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
        value = lam[0] * u[tri[0]] + lam[1] * u[tri[1]] + lam[2] * u[tri[2]];
        Eigen::Vector2d g1((c - a).y(), (a - c).x());
        Eigen::Vector2d g2((a - b).y(), (b - a).x());
        grad = ((u[tri[1]] - u[tri[0]]) * g1 + (u[tri[2]] - u[tri[0]]) * g2) / det;
    }
};

} // namespace

Eigen::MatrixXd second_derivative_matrix(const SymmetricMesh& mesh, const EigenSolution& eig,
                                         const std::vector<int>& members, double lambda0,
                                         double lambda_dot,
                                         const std::vector<EigenfunctionDerivative>& phidots,
                                         const SigmaBoundaryData& sigma, double offset_delta) {
    require_clean_cluster(eig, members, lambda0);
    const int m = static_cast<int>(members.size());
    if (static_cast<int>(phidots.size()) != m)
        fail(ErrorCategory::precondition, "need one eigenfunction derivative per cluster member");
    const int nb = mesh.num_boundary();
    const Eigen::VectorXd w = boundary_weights(mesh);

    std::vector<Eigen::VectorXd> bu(m), bg(m), bud(m), bgd(m);
    for (int j = 0; j < m; ++j) {
        bu[j] = boundary_values(mesh, eig.eigenvectors.col(members[j]));
        bg[j] = boundary_tangential_gradient(mesh, eig.eigenvectors.col(members[j]));
        bud[j] = boundary_values(mesh, phidots[j].phidot);
        bgd[j] = boundary_tangential_gradient(mesh, phidots[j].phidot);
    }

    // Tangential data of each phi_j at the two inward offsets, with the normal
    // frozen along the ray (the dN/dN = 0 extension).
    P1Probe probe(mesh);
    const int offsets = 2;
    std::vector<Eigen::MatrixXd> val(offsets, Eigen::MatrixXd(nb, m));
    std::vector<Eigen::MatrixXd> gtx(offsets, Eigen::MatrixXd(nb, m));
    std::vector<Eigen::MatrixXd> gty(offsets, Eigen::MatrixXd(nb, m));
    for (int i = 0; i < nb; ++i) {
        int v = mesh.boundary_loop[i];
        Eigen::Vector2d nrm(sigma.normal(i, 0), sigma.normal(i, 1));
        for (int d = 0; d < offsets; ++d) {
            Eigen::Vector2d p = mesh.vertices[v] - (d + 1) * offset_delta * nrm;
            Eigen::Vector3d lam;
            int t = probe.locate(p, v, lam);
            if (t < 0)
                fail(ErrorCategory::numerical,
                     "offset point left the mesh; decrease the normal-derivative offset");
            for (int j = 0; j < m; ++j) {
                double fv;
                Eigen::Vector2d g;
                probe.eval(t, lam, eig.eigenvectors.col(members[j]), fv, g);
                Eigen::Vector2d gt = g - nrm * nrm.dot(g);
                val[d](i, j) = fv;
                gtx[d](i, j) = gt.x();
                gty[d](i, j) = gt.y();
            }
        }
    }

    Eigen::MatrixXd out(m, m);
    for (int k = 0; k < m; ++k) {
        for (int j = k; j < m; ++j) {
            double acc = 0.0;
            for (int i = 0; i < nb; ++i) {
                double q0 = bg[j][i] * bg[k][i] - lambda0 * bu[j][i] * bu[k][i];
                double q1 = gtx[0](i, j) * gtx[0](i, k) + gty[0](i, j) * gty[0](i, k) -
                            lambda0 * val[0](i, j) * val[0](i, k);
                double q2 = gtx[1](i, j) * gtx[1](i, k) + gty[1](i, j) * gty[1](i, k) -
                            lambda0 * val[1](i, j) * val[1](i, k);
                double dnq = (3.0 * q0 - 4.0 * q1 + q2) / (2.0 * offset_delta);
                double qdot_sym = (bg[k][i] * bgd[j][i] - lambda_dot * bu[k][i] * bu[j][i] -
                                   lambda0 * bu[k][i] * bud[j][i]) +
                                  (bg[j][i] * bgd[k][i] - lambda_dot * bu[j][i] * bu[k][i] -
                                   lambda0 * bu[j][i] * bud[k][i]);
                double s = sigma.value[i];
                double bracket = sigma.flow_rate[i] - sigma.v_tangent[i] * sigma.d_arc[i] +
                                 sigma.curvature[i] * s * s;
                acc += w[i] * (s * qdot_sym + s * s * dnq + bracket * q0);
            }
            out(k, j) = acc;
            out(j, k) = acc;
        }
    }
    return out;
}

FdValidation fd_validate(const SymmetricMesh& mesh, const TransportMap& transport,
                         const EigenSolution& eig, const std::vector<int>& members,
                         const Eigen::MatrixXd& branch_dirs, double t_step,
                         const SolverOptions& opts, int solve_count) {
    const int m = static_cast<int>(members.size());
    if (branch_dirs.rows() != m || branch_dirs.cols() != m)
        fail(ErrorCategory::precondition, "branch direction matrix must be m x m");
    transport.require_valid_t(t_step);

    FemOperatorPair base_ops = assemble(mesh);
    Eigen::MatrixXd u(eig.eigenvectors.rows(), m);
    for (int j = 0; j < m; ++j) u.col(j) = eig.eigenvectors.col(members[j]);
    u = u * branch_dirs;

    int max_member = *std::max_element(members.begin(), members.end());
    int count = solve_count > 0 ? solve_count : max_member + 1 + std::max(4, m + 2);

    FdValidation out;
    std::vector<double> ts = {-t_step, -0.5 * t_step, 0.5 * t_step, t_step};
    out.t_values = {-t_step, -0.5 * t_step, 0.0, 0.5 * t_step, t_step};

    // lambda per branch at each t (branch = column of branch_dirs).
    Eigen::MatrixXd lambda_t(static_cast<int>(ts.size()), m);
    Eigen::VectorXd min_overlap = Eigen::VectorXd::Ones(m);
    for (size_t ti = 0; ti < ts.size(); ++ti) {
        SymmetricMesh mt = transport_mesh(mesh, transport, ts[ti]);
        FemOperatorPair ops = assemble(mt);
        EigenSolution sol = solve_neumann_eigs(ops, count, opts);

        // overlap(b, j) = |u_b^T M0 v_j|
        Eigen::MatrixXd overlap =
            (u.transpose() * (base_ops.mass * sol.eigenvectors)).cwiseAbs();
        std::vector<bool> used(count, false);
        for (int b = 0; b < m; ++b) {
            int best = -1;
            double bestv = -1.0;
            for (int j = 0; j < count; ++j) {
                if (used[j]) continue;
                if (overlap(b, j) > bestv) {
                    bestv = overlap(b, j);
                    best = j;
                }
            }
            if (best < 0 || bestv < 0.7)
                fail(ErrorCategory::numerical,
                     "branch-matching ambiguity at t = " + std::to_string(ts[ti]) +
                         " (overlap " + std::to_string(bestv) + " < 0.7)");
            used[best] = true;
            lambda_t(static_cast<int>(ti), b) = sol.eigenvalues[best];
            min_overlap[b] = std::min(min_overlap[b], bestv);
        }
    }

    for (int b = 0; b < m; ++b) {
        FdBranch br;
        br.member = members[b];
        br.lambda0 = eig.eigenvalues[members[b]];
        double lm = lambda_t(0, b), lmh = lambda_t(1, b), lph = lambda_t(2, b),
               lp = lambda_t(3, b);
        double fd1_full = (lp - lm) / (2.0 * t_step);
        double fd1_half = (lph - lmh) / t_step;
        br.fd1 = fd1_full;
        br.fd1_refined = (4.0 * fd1_half - fd1_full) / 3.0;
        double fd2_full = (lp - 2.0 * br.lambda0 + lm) / (t_step * t_step);
        double fd2_half = (lph - 2.0 * br.lambda0 + lmh) / (0.25 * t_step * t_step);
        br.fd2 = fd2_full;
        br.fd2_refined = (4.0 * fd2_half - fd2_full) / 3.0;
        br.min_overlap = min_overlap[b];
        out.branches.push_back(br);
    }
    return out;
}

} // namespace equispec
