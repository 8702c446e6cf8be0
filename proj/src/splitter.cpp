#include "equispec/splitter.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "equispec/rng.hpp"

namespace equispec {

std::vector<BoundaryField> candidate_fields(const FiniteGroup& group, int k_max) {
    std::vector<BoundaryField> out;
    int step = group.kind == GroupKind::klein ? 2 : group.p;
    for (int k = 0; k <= k_max; k += step) {
        out.push_back(make_field(group, {{k, 1.0, 0.0}}));
        if (group.kind == GroupKind::cyclic && k > 0)
            out.push_back(make_field(group, {{k, 0.0, 1.0}}));
    }
    return out;
}

namespace {

std::string field_description(const BoundaryField& f) {
    std::string s;
    for (const FourierMode& m : f.modes) {
        if (!s.empty()) s += " + ";
        if (m.a != 0.0) s += std::to_string(m.a) + "*cos(" + std::to_string(m.k) + "t)";
        if (m.b != 0.0) {
            if (m.a != 0.0) s += " + ";
            s += std::to_string(m.b) + "*sin(" + std::to_string(m.k) + "t)";
        }
        if (m.a == 0.0 && m.b == 0.0) s += "0";
    }
    return s.empty() ? "0" : s;
}

Eigen::VectorXd sigma_values_on_loop(const SymmetricMesh& mesh, const SymmetricDomain& domain,
                                     const BoundaryField& field) {
    NormalVelocity nv = normal_velocity(domain, field);
    Eigen::VectorXd s(mesh.num_boundary());
    for (int i = 0; i < mesh.num_boundary(); ++i) s[i] = nv.value(mesh.boundary_theta[i]);
    return s;
}

} // namespace

std::optional<SplitDirection> find_splitting_direction(
    const SymmetricMesh& mesh, const EigenSolution& eig, const std::vector<int>& members,
    double lambda_mean, const SymmetricDomain& domain,
    const std::vector<BoundaryField>& candidates) {
    std::optional<SplitDirection> best;
    for (const BoundaryField& f : candidates) {
        double norm = f.sup_norm();
        BoundaryField scaled = f;
        if (norm > 0.0)
            for (FourierMode& m : scaled.modes) {
                m.a /= norm;
                m.b /= norm;
            }
        Eigen::VectorXd sigma = sigma_values_on_loop(mesh, domain, scaled);
        Eigen::MatrixXd d =
            first_derivative_matrix(mesh, eig, members, lambda_mean, sigma);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d);
        double spread = es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
        if (!best || spread > best->spread) {
            SplitDirection sd;
            sd.field = scaled;
            sd.spread = spread;
            sd.derivative = d;
            sd.slopes = es.eigenvalues();
            sd.description = field_description(scaled);
            best = std::move(sd);
        }
    }
    if (!best || best->spread < 1e-8 * std::max(1.0, lambda_mean)) return std::nullopt;
    return best;
}

BranchCurves track_branches(const SymmetricMesh& mesh, const TransportMap& transport,
                            const std::vector<double>& t_grid, double cutoff,
                            const SolverOptions& opts) {
    for (double t : t_grid) transport.require_valid_t(t);
    std::vector<double> ts = t_grid;
    std::sort(ts.begin(), ts.end());

    FemOperatorPair base_ops = assemble(mesh);
    // count: everything below cutoff at t=0 plus margin.
    int count = 8;
    EigenSolution base;
    for (;;) {
        base = solve_neumann_eigs(base_ops, count, opts);
        if (base.eigenvalues[count - 1] > cutoff || count >= base_ops.stiffness.rows()) break;
        count = std::min<int>(base_ops.stiffness.rows(), count * 2);
    }
    int n_branches = 0;
    while (n_branches < count && base.eigenvalues[n_branches] <= cutoff) ++n_branches;
    int solve_count = std::min<int>(base_ops.stiffness.rows(), n_branches + 4);

    BranchCurves out;
    out.t_values = ts;
    out.base_indices.resize(n_branches);
    out.lambda.assign(n_branches, std::vector<double>(ts.size(), 0.0));
    for (int b = 0; b < n_branches; ++b) out.base_indices[b] = b;

    // March outward from t=0 in both directions, matching each step to the
    // previous one by mass-orthonormal overlap.
    std::vector<int> order(ts.size());
    for (size_t i = 0; i < ts.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return std::abs(ts[a]) < std::abs(ts[b]); });

    struct Snapshot {
        Eigen::MatrixXd vectors;
        double t;
    };
    Snapshot pos{base.eigenvectors.leftCols(n_branches), 0.0};
    Snapshot neg = pos;

    for (int oi : order) {
        double t = ts[oi];
        if (t == 0.0) {
            for (int b = 0; b < n_branches; ++b) out.lambda[b][oi] = base.eigenvalues[b];
            continue;
        }
        Snapshot& ref = t > 0.0 ? pos : neg;
        SymmetricMesh mt = transport_mesh(mesh, transport, t);
        FemOperatorPair ops = assemble(mt);
        EigenSolution sol = solve_neumann_eigs(ops, solve_count, opts);
        Eigen::MatrixXd overlap =
            (ref.vectors.transpose() * (base_ops.mass * sol.eigenvectors)).cwiseAbs();
        std::vector<bool> used(solve_count, false);
        Eigen::MatrixXd new_vectors(base.eigenvectors.rows(), n_branches);
        for (int b = 0; b < n_branches; ++b) {
            int bestj = -1;
            double bestv = -1.0;
            for (int j = 0; j < solve_count; ++j) {
                if (used[j]) continue;
                if (overlap(b, j) > bestv) {
                    bestv = overlap(b, j);
                    bestj = j;
                }
            }
            if (bestj < 0 || bestv < 0.7)
                fail(ErrorCategory::numerical,
                     "branch overlap ambiguity at t = " + std::to_string(t));
            used[bestj] = true;
            out.lambda[b][oi] = sol.eigenvalues[bestj];
            new_vectors.col(b) = sol.eigenvectors.col(bestj);
        }
        ref.vectors = new_vectors;
        ref.t = t;
    }

    // Quartic least-squares fit per branch.
    int deg = std::min<int>(4, static_cast<int>(ts.size()) - 1);
    Eigen::MatrixXd vand(ts.size(), deg + 1);
    for (size_t i = 0; i < ts.size(); ++i) {
        double p = 1.0;
        for (int d = 0; d <= deg; ++d) {
            vand(static_cast<int>(i), d) = p;
            p *= ts[i];
        }
    }
    out.fit_residual.resize(n_branches);
    for (int b = 0; b < n_branches; ++b) {
        Eigen::VectorXd y(ts.size());
        for (size_t i = 0; i < ts.size(); ++i) y[static_cast<int>(i)] = out.lambda[b][i];
        Eigen::VectorXd coef = vand.colPivHouseholderQr().solve(y);
        double denom = std::max(y.norm(), 1e-30);
        out.fit_residual[b] = (vand * coef - y).norm() / denom;
    }
    return out;
}

SplitExperiment run_split_experiment(const SymmetricMesh& mesh, const SymmetricDomain& domain,
                                     const EigenSolution& eig, const SpectralResult& spectrum,
                                     int cluster_index,
                                     const std::vector<BoundaryField>& candidates, double t,
                                     const SolverOptions& opts) {
    if (cluster_index < 0 || cluster_index >= static_cast<int>(spectrum.clusters.size()))
        fail(ErrorCategory::precondition, "cluster index out of range");
    const Cluster& c = spectrum.clusters[cluster_index];

    SplitExperiment ex;
    ex.t = t;
    for (const Cluster& cl : spectrum.clusters) ex.before_sizes.push_back(cl.size());
    ex.direction =
        find_splitting_direction(mesh, eig, c.members, c.lambda_mean, domain, candidates);
    if (!ex.direction) return ex;

    TransportMap transport = make_transport(domain, ex.direction->field);
    transport.require_valid_t(t);
    SymmetricMesh mt = transport_mesh(mesh, transport, t);
    FemOperatorPair ops = assemble(mt);
    int count = *std::max_element(c.members.begin(), c.members.end()) + 4;
    EigenSolution sol = solve_neumann_eigs(ops, count, opts);

    // Match perturbed eigenvalues to the cluster by overlap with its basis.
    FemOperatorPair base_ops = assemble(mesh);
    Eigen::MatrixXd basis(eig.eigenvectors.rows(), c.size());
    for (int j = 0; j < c.size(); ++j) basis.col(j) = eig.eigenvectors.col(c.members[j]);
    Eigen::MatrixXd overlap =
        (basis.transpose() * (base_ops.mass * sol.eigenvectors)).cwiseAbs();
    std::vector<double> matched;
    std::vector<bool> used(count, false);
    for (int b = 0; b < c.size(); ++b) {
        int bestj = -1;
        double bestv = -1.0;
        for (int j = 0; j < count; ++j) {
            if (used[j]) continue;
            if (overlap(b, j) > bestv) {
                bestv = overlap(b, j);
                bestj = j;
            }
        }
        if (bestj < 0 || bestv < 0.7)
            fail(ErrorCategory::numerical, "cluster tracking ambiguity in split experiment");
        used[bestj] = true;
        matched.push_back(sol.eigenvalues[bestj]);
    }
    std::sort(matched.begin(), matched.end());
    ex.achieved_gap = matched.back() - matched.front();
    ex.predicted_gap = t * ex.direction->spread;

    // Count preservation near the target cluster: the tracked eigenvalues,
    // re-clustered at the same tolerance, must account for the full cluster.
    Eigen::VectorXd mv = Eigen::Map<Eigen::VectorXd>(matched.data(), matched.size());
    SpectralResult after = cluster_eigenvalues(mv, spectrum.cluster_tol);
    int after_total = 0;
    for (const Cluster& cl : after.clusters) {
        ex.after_sizes.push_back(cl.size());
        after_total += cl.size();
    }
    ex.size_conserved = after_total == c.size();
    return ex;
}

SweepReport genericity_sweep(const SymmetricDomain& domain, const SymmetricMesh& mesh,
                             double cutoff, int trials, std::uint64_t seed, double amplitude,
                             int k_max, double cluster_tol, const SolverOptions& opts) {
    if (trials < 1) fail(ErrorCategory::precondition, "trials must be >= 1");
    SweepReport rep;
    rep.seed = seed;
    rep.trials = trials;
    rep.amplitude = amplitude;
    rep.cutoff = cutoff;
    rep.cluster_tol = cluster_tol;

    const FiniteGroup& group = domain.group;
    std::vector<RealIrrep> irreps = real_irreps(group);
    PermutationAction action = vertex_permutations(mesh);
    std::vector<IsotypicProjector> projectors = isotypic_projectors(group, irreps, action);
    FemOperatorPair base_ops = assemble(mesh);

    int step = group.kind == GroupKind::klein ? 2 : group.p;
    Rng rng(seed);

    // count estimate from the Weyl law, then verified per solve.
    double area = mesh_area(mesh);
    int count0 = static_cast<int>(std::ceil(area * cutoff / (4.0 * M_PI))) + 8;

    for (int trial = 0; trial < trials; ++trial) {
        // Decaying random coefficients over the invariant modes.
        std::vector<FourierMode> modes;
        double decay = 1.0;
        for (int k = 0; k <= k_max; k += step) {
            FourierMode m;
            m.k = k;
            m.a = decay * rng.uniform(-1.0, 1.0);
            if (group.kind == GroupKind::cyclic && k > 0) m.b = decay * rng.uniform(-1.0, 1.0);
            if (k == 0) m.b = 0.0;
            modes.push_back(m);
            decay *= 0.7;
        }
        BoundaryField field = make_field(group, modes);
        double norm = field.sup_norm();
        if (norm > 0.0)
            for (FourierMode& m : field.modes) {
                m.a /= norm;
                m.b /= norm;
            }

        try {
            TransportMap transport = make_transport(domain, field);
            SymmetricMesh mt = amplitude == 0.0 ? mesh : transport_mesh(mesh, transport, amplitude);
            FemOperatorPair ops = amplitude == 0.0 ? base_ops : assemble(mt);
            int count = std::min<int>(count0, ops.stiffness.rows());
            EigenSolution sol = solve_neumann_eigs(ops, count, opts);
            while (sol.eigenvalues[count - 1] <= cutoff &&
                   count < ops.stiffness.rows()) {
                count = std::min<int>(ops.stiffness.rows(), count + count / 2 + 4);
                sol = solve_neumann_eigs(ops, count, opts);
            }
            SpectralResult spec = cluster_eigenvalues(sol.eigenvalues, cluster_tol);
            classify_isotypic(spec, sol, projectors, irreps, ops.mass);

            bool class_simple = true, no_accidental = true;
            for (size_t ci = 0; ci < spec.clusters.size(); ++ci) {
                const Cluster& c = spec.clusters[ci];
                if (c.lambda_mean > cutoff) break;
                bool bad_class = c.verdict == Verdict::unresolved;
                for (const auto& [label, mult] : c.isotypic) bad_class |= mult > 1;
                bool bad_acc = c.isotypic.size() >= 2;
                if (bad_class) class_simple = false;
                if (bad_acc) no_accidental = false;
                if (bad_class || bad_acc) {
                    SweepTrialFailure f;
                    f.trial = trial;
                    f.cluster = static_cast<int>(ci);
                    for (const Cluster& cl : spec.clusters)
                        if (cl.lambda_mean <= cutoff) f.sizes.push_back(cl.size());
                    for (const auto& [label, mult] : c.isotypic) f.sigmas.push_back(label);
                    f.reason = c.verdict == Verdict::unresolved ? "unresolved"
                               : bad_acc ? "accidental" : "class multiplicity > 1";
                    rep.failures.push_back(std::move(f));
                }
            }
            if (class_simple) rep.ok_class_simple++;
            if (no_accidental) rep.ok_no_accidental++;
            if (class_simple && no_accidental) rep.ok_g_simple++;
        } catch (const Error& e) {
            SweepTrialFailure f;
            f.trial = trial;
            f.cluster = -1;
            f.reason = e.what();
            rep.failures.push_back(std::move(f));
        }
    }
    return rep;
}

} // namespace equispec
