#pragma once

#include <map>
#include <string>
#include <vector>

#include "equispec/fem.hpp"
#include "equispec/grouprep.hpp"

namespace equispec {

enum class Verdict { g_simple, g_sigma_simple_only, accidental, unresolved };

const char* verdict_name(Verdict v);

struct Cluster {
    double lambda_mean = 0.0;
    std::vector<int> members;                 // eigenpair indices
    std::map<std::string, int> isotypic;      // sigma label -> multiplicity m_sigma
    Verdict verdict = Verdict::unresolved;

    int size() const { return static_cast<int>(members.size()); }
};

struct SpectralResult {
    std::vector<Cluster> clusters;
    double cluster_tol = 0.0;
};

/// Cluster tolerance defaults: 1e-6 relative for analytic spectra; for
/// unprotected FEM spectra max(1e-8, 5 h^2) relative absorbs the O(h^2)
/// splitting of exact multiplicities. Equivariant meshes protect G-forced
/// degeneracy to near machine precision, so the tight default applies there.
constexpr double kOracleClusterTol = 1e-6;
inline double fem_cluster_tol(double h) { return std::max(1e-8, 5.0 * h * h); }

/// Greedy gap clustering: a new cluster starts when
/// lambda_{i+1} - lambda_i > tol_rel * max(1, lambda_i).
SpectralResult cluster_eigenvalues(const Eigen::VectorXd& eigenvalues, double tol_rel);

/// Rank threshold on the normalized M-Gram eigenvalues of projected cluster
/// bases (the vectors themselves are M-unit).
constexpr double kIsotypicRankTol = 1e-6;

/// Fill isotypic multiplicities and verdicts; clusters whose ranks do not add
/// up to the cluster size stay `unresolved`.
void classify_isotypic(SpectralResult& result, const EigenSolution& eig,
                       const std::vector<IsotypicProjector>& projectors,
                       const std::vector<RealIrrep>& irreps,
                       const Eigen::SparseMatrix<double>& mass);

struct DivisibilityReport {
    struct Row {
        int cluster = 0;
        double lambda_mean = 0.0;
        int size = 0;
        bool divisible = true;
    };
    std::vector<Row> rows;
    bool all_divisible = true;
    /// Only meaningful when the group has a 2-dim irrep (forced multiplicity);
    /// klein-type groups are the exceptional case with no forced multiplicity.
    bool forced_multiplicity_applies = false;
    bool has_multiple_cluster = false;
    std::map<std::string, bool> two_dim_sigma_present;
    bool all_two_dim_present = true;
};

DivisibilityReport divisibility_report(const SpectralResult& result,
                                       const std::vector<RealIrrep>& irreps,
                                       double lambda_cutoff);

/// CSV: cluster_id,lambda_mean,size,sigma_labels,multiplicities,verdict
void write_classification_csv(const SpectralResult& result, const std::string& path,
                              const std::string& meta_comment);

} // namespace equispec
