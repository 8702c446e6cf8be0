#include "equispec/fem.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "equispec/rng.hpp"

namespace equispec {

FemOperatorPair assemble(const SymmetricMesh& mesh) {
    using T = Eigen::Triplet<double>;
    std::vector<T> kt, mt;
    kt.reserve(mesh.num_triangles() * 6);
    mt.reserve(mesh.num_triangles() * 6);

    for (int e = 0; e < mesh.num_triangles(); ++e) {
        const auto& t = mesh.triangles[e];
        const Eigen::Vector2d &p0 = mesh.vertices[t[0]], &p1 = mesh.vertices[t[1]],
                              &p2 = mesh.vertices[t[2]];
        double area2 = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
        double area = 0.5 * area2;
        if (!(area > 1e-14))
            fail(ErrorCategory::meshing, "degenerate triangle " + std::to_string(e));

        // b_i = rotated opposite edge; grad(hat_i) = b_i / (2 area).
        Eigen::Vector2d b[3] = {
            {p1.y() - p2.y(), p2.x() - p1.x()},
            {p2.y() - p0.y(), p0.x() - p2.x()},
            {p0.y() - p1.y(), p1.x() - p0.x()},
        };
        for (int i = 0; i < 3; ++i) {
            for (int j = i; j < 3; ++j) {
                double kij = b[i].dot(b[j]) / (4.0 * area);
                double mij = area / 12.0 * (i == j ? 2.0 : 1.0);
                int a = t[i], c = t[j];
                if (a > c) std::swap(a, c);
                kt.emplace_back(a, c, kij);
                mt.emplace_back(a, c, mij);
            }
        }
    }

    int n = mesh.num_vertices();
    Eigen::SparseMatrix<double> ku(n, n), mu(n, n);
    ku.setFromTriplets(kt.begin(), kt.end());
    mu.setFromTriplets(mt.begin(), mt.end());

    FemOperatorPair ops;
    ops.stiffness = ku.selfadjointView<Eigen::Upper>();
    ops.mass = mu.selfadjointView<Eigen::Upper>();
    return ops;
}

namespace {

// M-orthonormalize the columns of x in place (Cholesky of the Gram matrix,
// one refinement pass).
void m_orthonormalize(const Eigen::SparseMatrix<double>& m, Eigen::MatrixXd& x) {
    for (int pass = 0; pass < 2; ++pass) {
        Eigen::MatrixXd g = x.transpose() * (m * x);
        Eigen::LLT<Eigen::MatrixXd> llt(g);
        if (llt.info() != Eigen::Success)
            fail(ErrorCategory::numerical, "rank-deficient block in eigensolver");
        Eigen::MatrixXd u = llt.matrixU();
        x = u.triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(x);
    }
}

EigenSolution dense_solve(const FemOperatorPair& ops, int count) {
    Eigen::MatrixXd k = Eigen::MatrixXd(ops.stiffness);
    Eigen::MatrixXd m = Eigen::MatrixXd(ops.mass);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(k, m);
    if (es.info() != Eigen::Success)
        fail(ErrorCategory::numerical, "dense generalized eigensolver failed");
    EigenSolution sol;
    sol.eigenvalues = es.eigenvalues().head(count);
    sol.eigenvectors = es.eigenvectors().leftCols(count);
    sol.residuals.resize(count);
    for (int i = 0; i < count; ++i)
        sol.residuals[i] = (ops.stiffness * sol.eigenvectors.col(i) -
                            sol.eigenvalues[i] * (ops.mass * sol.eigenvectors.col(i)))
                               .norm();
    return sol;
}

EigenSolution shift_invert_solve(const FemOperatorPair& ops, int count,
                                 const SolverOptions& opts) {
    const int n = ops.stiffness.rows();
    const int q = std::min(n, count + std::max(10, count));
    const double area = ops.mass.sum();
    const double shift = std::max(1e-8, M_PI * q / std::max(area, 1e-12));

    Eigen::SparseMatrix<double> a = ops.stiffness + shift * ops.mass;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a);
    if (ldlt.info() != Eigen::Success)
        fail(ErrorCategory::numerical, "factorization of shifted operator failed");

    Rng rng(opts.seed);
    Eigen::MatrixXd x(n, q);
    for (int j = 0; j < q; ++j)
        for (int i = 0; i < n; ++i) x(i, j) = rng.normal();
    m_orthonormalize(ops.mass, x);

    Eigen::VectorXd ritz = Eigen::VectorXd::Zero(q);
    Eigen::VectorXd res = Eigen::VectorXd::Constant(count, 1e30);
    for (int it = 0; it < opts.max_iterations; ++it) {
        Eigen::MatrixXd y = ldlt.solve(ops.mass * x);
        m_orthonormalize(ops.mass, y);
        Eigen::MatrixXd kp = y.transpose() * (ops.stiffness * y);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(0.5 * (kp + kp.transpose()));
        x = y * small.eigenvectors();
        ritz = small.eigenvalues();

        bool done = true;
        for (int i = 0; i < count; ++i) {
            res[i] = (ops.stiffness * x.col(i) - ritz[i] * (ops.mass * x.col(i))).norm();
            if (res[i] > opts.tol_rel * std::max(1.0, std::abs(ritz[i]))) done = false;
        }
        if (done) break;
        if (it + 1 == opts.max_iterations)
            fail(ErrorCategory::numerical,
                 "eigensolver did not converge: worst residual " +
                     std::to_string(res.maxCoeff()) + " after " +
                     std::to_string(opts.max_iterations) + " iterations");
    }

    EigenSolution sol;
    sol.eigenvalues = ritz.head(count);
    sol.eigenvectors = x.leftCols(count);
    sol.residuals = res;
    return sol;
}

} // namespace

EigenSolution solve_neumann_eigs(const FemOperatorPair& ops, int count,
                                 const SolverOptions& opts) {
    const int n = ops.stiffness.rows();
    if (count < 1 || count > n)
        fail(ErrorCategory::precondition,
             "requested " + std::to_string(count) + " eigenpairs from an n=" +
                 std::to_string(n) + " system");
    if (n <= opts.dense_threshold || count > n / 2) return dense_solve(ops, count);
    return shift_invert_solve(ops, count, opts);
}

Eigen::VectorXd boundary_tangential_gradient(const SymmetricMesh& mesh,
                                             const Eigen::VectorXd& u) {
    int nb = mesh.num_boundary();
    Eigen::VectorXd out(nb);
    for (int i = 0; i < nb; ++i) {
        int im = mesh.boundary_loop[(i + nb - 1) % nb];
        int i0 = mesh.boundary_loop[i];
        int ip = mesh.boundary_loop[(i + 1) % nb];
        double hm = (mesh.vertices[i0] - mesh.vertices[im]).norm();
        double hp = (mesh.vertices[ip] - mesh.vertices[i0]).norm();
        out[i] = (hm * hm * u[ip] - hp * hp * u[im] + (hp * hp - hm * hm) * u[i0]) /
                 (hm * hp * (hm + hp));
    }
    return out;
}

Eigen::VectorXd boundary_weights(const SymmetricMesh& mesh) {
    int nb = mesh.num_boundary();
    Eigen::VectorXd w(nb);
    for (int i = 0; i < nb; ++i) {
        int im = mesh.boundary_loop[(i + nb - 1) % nb];
        int i0 = mesh.boundary_loop[i];
        int ip = mesh.boundary_loop[(i + 1) % nb];
        double hm = (mesh.vertices[i0] - mesh.vertices[im]).norm();
        double hp = (mesh.vertices[ip] - mesh.vertices[i0]).norm();
        w[i] = 0.5 * (hm + hp);
    }
    return w;
}

Eigen::VectorXd boundary_values(const SymmetricMesh& mesh, const Eigen::VectorXd& u) {
    int nb = mesh.num_boundary();
    Eigen::VectorXd v(nb);
    for (int i = 0; i < nb; ++i) v[i] = u[mesh.boundary_loop[i]];
    return v;
}

double conjugation_defect(const Eigen::SparseMatrix<double>& a, const std::vector<int>& perm) {
    // (P^T A P)_{ij} = A_{perm(i), perm(j)} with P the permutation matrix of
    // perm (P e_i = e_{perm(i)}). Scanning the nonzeros of A in both the
    // forward and inverse direction covers every entry of the difference.
    std::vector<int> inv(perm.size());
    for (size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<int>(i);
    double d = 0.0;
    for (int k = 0; k < a.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) {
            double fwd = a.coeff(perm[it.row()], perm[it.col()]);
            double bwd = a.coeff(inv[it.row()], inv[it.col()]);
            d = std::max({d, std::abs(fwd - it.value()), std::abs(bwd - it.value())});
        }
    }
    return d;
}

} // namespace equispec
