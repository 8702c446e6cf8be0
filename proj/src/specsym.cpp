#include "equispec/specsym.hpp"

#include <Eigen/Eigenvalues>
#include <fstream>

namespace equispec {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::g_simple: return "G-simple";
        case Verdict::g_sigma_simple_only: return "G_sigma-simple-only";
        case Verdict::accidental: return "accidental";
        case Verdict::unresolved: return "unresolved";
    }
    return "?";
}

SpectralResult cluster_eigenvalues(const Eigen::VectorXd& eigenvalues, double tol_rel) {
    SpectralResult res;
    res.cluster_tol = tol_rel;
    if (eigenvalues.size() == 0) return res;
    for (int i = 1; i < eigenvalues.size(); ++i)
        if (eigenvalues[i] < eigenvalues[i - 1] - 1e-12)
            fail(ErrorCategory::precondition, "eigenvalues must be ascending");

    Cluster cur;
    cur.members.push_back(0);
    for (int i = 1; i < eigenvalues.size(); ++i) {
        double gap = eigenvalues[i] - eigenvalues[i - 1];
        if (gap > tol_rel * std::max(1.0, std::abs(eigenvalues[i - 1]))) {
            res.clusters.push_back(cur);
            cur = Cluster{};
        }
        cur.members.push_back(i);
    }
    res.clusters.push_back(cur);
    for (Cluster& c : res.clusters) {
        double s = 0.0;
        for (int i : c.members) s += eigenvalues[i];
        c.lambda_mean = s / c.size();
    }
    return res;
}

void classify_isotypic(SpectralResult& result, const EigenSolution& eig,
                       const std::vector<IsotypicProjector>& projectors,
                       const std::vector<RealIrrep>& irreps,
                       const Eigen::SparseMatrix<double>& mass) {
    for (Cluster& c : result.clusters) {
        c.isotypic.clear();
        int m = c.size();
        int accounted = 0;
        bool rank_mismatch = false;
        for (size_t s = 0; s < projectors.size(); ++s) {
            // Gram matrix of the projected cluster basis in the M inner
            // product. Its rank is the dimension of the isotypic part of the
            // cluster span, m_sigma * d_sigma.
            Eigen::MatrixXd proj(eig.eigenvectors.rows(), m);
            for (int j = 0; j < m; ++j)
                proj.col(j) = projectors[s].apply(eig.eigenvectors.col(c.members[j]));
            Eigen::MatrixXd gram = proj.transpose() * (mass * proj);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
            int rank = 0;
            for (int j = 0; j < m; ++j)
                if (es.eigenvalues()[j] > kIsotypicRankTol) ++rank;
            if (rank == 0) continue;
            if (rank % irreps[s].dim != 0) {
                rank_mismatch = true;
                c.isotypic[projectors[s].label()] = rank; // raw, for diagnostics
                continue;
            }
            c.isotypic[projectors[s].label()] = rank / irreps[s].dim;
            accounted += rank;
        }
        if (rank_mismatch || accounted != m) {
            c.verdict = Verdict::unresolved;
            continue;
        }
        if (c.isotypic.size() >= 2) {
            c.verdict = Verdict::accidental;
        } else if (c.isotypic.size() == 1 && c.isotypic.begin()->second == 1) {
            c.verdict = Verdict::g_simple;
        } else {
            // single class carrying several copies
            c.verdict = Verdict::g_sigma_simple_only;
        }
    }
}

DivisibilityReport divisibility_report(const SpectralResult& result,
                                       const std::vector<RealIrrep>& irreps,
                                       double lambda_cutoff) {
    DivisibilityReport rep;
    std::map<std::string, int> dim_of;
    for (const RealIrrep& ir : irreps) {
        dim_of[ir.label] = ir.dim;
        if (ir.dim == 2) {
            rep.forced_multiplicity_applies = true;
            rep.two_dim_sigma_present[ir.label] = false;
        }
    }

    int id = 0;
    for (const Cluster& c : result.clusters) {
        if (c.lambda_mean > lambda_cutoff) break;
        DivisibilityReport::Row row;
        row.cluster = id++;
        row.lambda_mean = c.lambda_mean;
        row.size = c.size();
        if (c.verdict != Verdict::unresolved && c.isotypic.size() == 1) {
            int d = dim_of[c.isotypic.begin()->first];
            row.divisible = (c.size() % d) == 0;
        }
        if (c.size() >= 2) rep.has_multiple_cluster = true;
        for (const auto& [label, mult] : c.isotypic) {
            auto it = rep.two_dim_sigma_present.find(label);
            if (it != rep.two_dim_sigma_present.end()) it->second = true;
        }
        rep.all_divisible = rep.all_divisible && row.divisible;
        rep.rows.push_back(row);
    }
    for (const auto& [label, present] : rep.two_dim_sigma_present)
        rep.all_two_dim_present = rep.all_two_dim_present && present;
    return rep;
}

void write_classification_csv(const SpectralResult& result, const std::string& path,
                              const std::string& meta_comment) {
    std::ofstream f(path);
    if (!f) fail(ErrorCategory::io, "cannot open " + path);
    f.precision(17);
    if (!meta_comment.empty()) f << "# " << meta_comment << "\n";
    f << "cluster_id,lambda_mean,size,sigma_labels,multiplicities,verdict\n";
    for (size_t i = 0; i < result.clusters.size(); ++i) {
        const Cluster& c = result.clusters[i];
        std::string labels, mults;
        for (const auto& [label, m] : c.isotypic) {
            if (!labels.empty()) {
                labels += ";";
                mults += ";";
            }
            labels += label;
            mults += std::to_string(m);
        }
        f << i << "," << c.lambda_mean << "," << c.size() << "," << labels << "," << mults
          << "," << verdict_name(c.verdict) << "\n";
    }
}

} // namespace equispec
