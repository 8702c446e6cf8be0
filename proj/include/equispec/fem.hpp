#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "equispec/mesh.hpp"

namespace equispec {

/// P1 Galerkin operators for the Neumann Laplacian: K (stiffness) and M
/// (mass), assembled exactly symmetric, constants in the kernel of K.
struct FemOperatorPair {
    Eigen::SparseMatrix<double> stiffness;
    Eigen::SparseMatrix<double> mass;
};

FemOperatorPair assemble(const SymmetricMesh& mesh);

struct EigenSolution {
    Eigen::VectorXd eigenvalues;  // ascending
    Eigen::MatrixXd eigenvectors; // M-orthonormal columns
    Eigen::VectorXd residuals;    // |K v - lambda M v|_2
};

struct SolverOptions {
    int dense_threshold = 256;   // at or below: dense tridiagonalization path
    double tol_rel = 1e-9;       // residual target, relative to max(1, lambda)
    int max_iterations = 500;
    std::uint64_t seed = 0x139408dcbbf7a44ULL; // deterministic start block
};

/// Lowest `count` eigenpairs of K v = lambda M v.
EigenSolution solve_neumann_eigs(const FemOperatorPair& ops, int count,
                                 const SolverOptions& opts = {});

/// Tangential derivative along the boundary loop by arclength-weighted
/// central differences; entry i corresponds to boundary_loop[i].
Eigen::VectorXd boundary_tangential_gradient(const SymmetricMesh& mesh,
                                             const Eigen::VectorXd& u);

/// Trapezoid quadrature weights per boundary-loop position (chord lengths).
Eigen::VectorXd boundary_weights(const SymmetricMesh& mesh);

/// Values of a mesh function at the boundary loop vertices.
Eigen::VectorXd boundary_values(const SymmetricMesh& mesh, const Eigen::VectorXd& u);

/// max |(P^T A P - A)_ij| over the joint sparsity pattern.
double conjugation_defect(const Eigen::SparseMatrix<double>& a, const std::vector<int>& perm);

} // namespace equispec
