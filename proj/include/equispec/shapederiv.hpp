#pragma once

#include <optional>
#include <vector>

#include "equispec/domain.hpp"
#include "equispec/fem.hpp"

namespace equispec {

/// sigma and the analytic boundary data needed by the second-derivative
/// integrand, sampled at the boundary loop positions of a mesh.
struct SigmaBoundaryData {
    Eigen::VectorXd value;       // sigma
    Eigen::VectorXd d_arc;       // d sigma / d s (arclength derivative)
    Eigen::VectorXd flow_rate;   // d/dt [sigma(t, .) along the boundary flow] at t=0
    Eigen::VectorXd v_tangent;   // tangential component of the velocity field
    Eigen::VectorXd curvature;   // H = div N on the boundary
    Eigen::Matrix<double, Eigen::Dynamic, 2> normal; // outward unit normal
};

SigmaBoundaryData sigma_boundary_data(const SymmetricMesh& mesh, const SymmetricDomain& domain,
                                      const BoundaryField& field);

/// Hadamard first-derivative matrix of the cluster for normal velocity sigma:
/// entries integrate sigma (grad_tau phi_k . grad_tau phi_j - lambda0 phi_k phi_j)
/// over the boundary loop (trapezoid quadrature). The eigenvalue branch slopes
/// are the eigenvalues of this matrix.
Eigen::MatrixXd first_derivative_matrix(const SymmetricMesh& mesh, const EigenSolution& eig,
                                        const std::vector<int>& members, double lambda0,
                                        const Eigen::VectorXd& sigma_on_loop);

struct EigenfunctionDerivative {
    Eigen::VectorXd phidot;
    Eigen::VectorXd multipliers;
    double residual = 0.0;        // saddle solve residual, relative
    double max_orthogonality = 0.0; // max_i |phi_i^T M phidot|
};

/// Solves the constrained problem for phidot_j: (K - lambda0 M) phidot +
/// sum mu_i M phi_i = b with phi_i^T M phidot = 0, where b carries the
/// Neumann data weakly: b_psi = -int_bdry sigma grad_tau psi . grad_tau phi_j
/// + lambda0 int_bdry sigma psi phi_j.
EigenfunctionDerivative eigenfunction_derivative(const SymmetricMesh& mesh,
                                                 const FemOperatorPair& ops,
                                                 const EigenSolution& eig,
                                                 const std::vector<int>& members, int j,
                                                 double lambda0,
                                                 const Eigen::VectorXd& sigma_on_loop);

/// Second-derivative matrix for a branch with slope lambda_dot. The normal
/// derivative of Q is taken by one-sided differences at inward offsets
/// delta = h/2 (second order); the sigma transport terms come from the
/// radial family in closed form.
Eigen::MatrixXd second_derivative_matrix(const SymmetricMesh& mesh, const EigenSolution& eig,
                                         const std::vector<int>& members, double lambda0,
                                         double lambda_dot,
                                         const std::vector<EigenfunctionDerivative>& phidots,
                                         const SigmaBoundaryData& sigma, double offset_delta);

struct FdBranch {
    int member = 0;
    double lambda0 = 0.0;
    double fd1 = 0.0;        // central difference at the largest step
    double fd1_refined = 0.0; // Richardson estimate from the two steps
    double fd2 = 0.0;
    double fd2_refined = 0.0;
    double min_overlap = 1.0;
};

struct FdValidation {
    std::vector<double> t_values;
    std::vector<FdBranch> branches;
};

/// Eigenvalues on transported meshes (same connectivity), branch-matched to
/// the directions `branch_dirs` (columns; typically the eigenvectors of the
/// first-derivative matrix) by M-inner-product overlap.
FdValidation fd_validate(const SymmetricMesh& mesh, const TransportMap& transport,
                         const EigenSolution& eig, const std::vector<int>& members,
                         const Eigen::MatrixXd& branch_dirs, double t_step,
                         const SolverOptions& opts = {}, int solve_count = -1);

} // namespace equispec
