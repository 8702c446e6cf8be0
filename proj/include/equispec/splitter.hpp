#pragma once

#include <optional>
#include <string>
#include <vector>

#include "equispec/shapederiv.hpp"
#include "equispec/specsym.hpp"

namespace equispec {

/// Invariant Fourier fields with k <= k_max, each sup-normalized to 1.
std::vector<BoundaryField> candidate_fields(const FiniteGroup& group, int k_max);

struct SplitDirection {
    BoundaryField field;
    double spread = 0.0;            // max - min eigenvalue of the derivative matrix
    Eigen::MatrixXd derivative;     // the matrix itself
    Eigen::VectorXd slopes;         // its eigenvalues (branch slopes)
    std::string description;
};

/// Candidate maximizing the slope spread; none when every candidate is scalar
/// to within 1e-8 * max(1, lambda_mean) (the first-order obstruction).
std::optional<SplitDirection> find_splitting_direction(
    const SymmetricMesh& mesh, const EigenSolution& eig, const std::vector<int>& members,
    double lambda_mean, const SymmetricDomain& domain,
    const std::vector<BoundaryField>& candidates);

struct BranchCurves {
    std::vector<double> t_values;
    std::vector<int> base_indices;                // eigen index at t = 0 per branch
    std::vector<std::vector<double>> lambda;      // [branch][t]
    std::vector<double> fit_residual;             // relative residual of quartic fit
};

/// Eigenvalue curves below `cutoff` over a t grid on transported meshes,
/// matched step to step by eigenvector overlap; quartic least-squares fit per
/// branch as smoothness evidence.
BranchCurves track_branches(const SymmetricMesh& mesh, const TransportMap& transport,
                            const std::vector<double>& t_grid, double cutoff,
                            const SolverOptions& opts = {});

struct SplitExperiment {
    double t = 0.0;
    std::optional<SplitDirection> direction;
    std::vector<int> before_sizes;
    std::vector<int> after_sizes;
    double predicted_gap = 0.0; // t * (max slope - min slope)
    double achieved_gap = 0.0;  // spread of the matched eigenvalues at t
    bool size_conserved = false;
};

/// Perturb along the best splitting direction and compare the first-order
/// prediction with the achieved gap.
SplitExperiment run_split_experiment(const SymmetricMesh& mesh, const SymmetricDomain& domain,
                                     const EigenSolution& eig, const SpectralResult& spectrum,
                                     int cluster_index,
                                     const std::vector<BoundaryField>& candidates, double t,
                                     const SolverOptions& opts = {});

struct SweepTrialFailure {
    int trial = 0;
    int cluster = 0;
    std::vector<int> sizes;
    std::vector<std::string> sigmas;
    std::string reason;
};

struct SweepReport {
    std::uint64_t seed = 0;
    int trials = 0;
    double amplitude = 0.0;
    double cutoff = 0.0;
    double cluster_tol = 0.0;
    int ok_class_simple = 0;   // (a) every class multiplicity <= 1 in each cluster
    int ok_no_accidental = 0;  // (b) no cluster mixes classes
    int ok_g_simple = 0;       // both
    std::vector<SweepTrialFailure> failures;

    double fraction_g_simple() const {
        return trials > 0 ? static_cast<double>(ok_g_simple) / trials : 0.0;
    }
};

/// Random invariant perturbations with decaying coefficients; classify the
/// perturbed spectra below `cutoff` and report the G-simple fraction.
SweepReport genericity_sweep(const SymmetricDomain& domain, const SymmetricMesh& mesh,
                             double cutoff, int trials, std::uint64_t seed, double amplitude,
                             int k_max, double cluster_tol, const SolverOptions& opts = {});

} // namespace equispec
