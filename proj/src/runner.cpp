#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "equispec/config.hpp"
#include "equispec/oracle.hpp"
#include "equispec/splitter.hpp"

namespace equispec {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Stopwatch {
  public:
    void lap(const std::string& name) {
        auto now = std::chrono::steady_clock::now();
        laps_[name] = std::chrono::duration<double>(now - last_).count();
        last_ = now;
    }
    json to_json() const {
        json j;
        for (const auto& [k, v] : laps_) j[k] = v;
        return j;
    }

  private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
    std::map<std::string, double> laps_;
};

json modes_to_json(const std::vector<FourierMode>& modes) {
    json arr = json::array();
    for (const FourierMode& m : modes) arr.push_back({{"k", m.k}, {"a", m.a}, {"b", m.b}});
    return arr;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json data = json::array();
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data_row_major", data}};
}

json config_echo(const ExperimentConfig& c, double cluster_tol_used) {
    json j;
    j["group"] = {{"kind", group_kind_name(c.group_kind)}, {"p", c.group_p}};
    j["domain"] = {{"r0", c.r0}, {"modes", modes_to_json(c.domain_modes)}};
    j["mesh"] = {{"h_target", c.h_target}};
    j["solver"] = {{"num_eigs", c.num_eigs}, {"cluster_tol", cluster_tol_used}};
    j["experiment"] = {{"kind", experiment_kind_name(c.kind)}};
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    return j;
}

void write_json(const json& j, const fs::path& path) {
    std::ofstream f(path);
    if (!f) fail(ErrorCategory::io, "cannot open " + path.string());
    f << j.dump(2) << "\n";
}

void write_spectrum_csv(const EigenSolution& sol, const fs::path& path,
                        const std::string& meta) {
    std::ofstream f(path);
    if (!f) fail(ErrorCategory::io, "cannot open " + path.string());
    f.precision(17);
    f << "# " << meta << "\n";
    f << "index,lambda,residual\n";
    for (int i = 0; i < sol.eigenvalues.size(); ++i)
        f << i << "," << sol.eigenvalues[i] << "," << sol.residuals[i] << "\n";
}

void write_matrix_txt(const Eigen::MatrixXd& m, const fs::path& path) {
    std::ofstream f(path);
    if (!f) fail(ErrorCategory::io, "cannot open " + path.string());
    f.precision(17);
    f << m.rows() << " " << m.cols() << "\n";
    for (int r = 0; r < m.rows(); ++r) {
        for (int c = 0; c < m.cols(); ++c) f << m(r, c) << (c + 1 == m.cols() ? "" : " ");
        f << "\n";
    }
}

} // namespace

int run_experiment(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    fs::path out(cfg.output_dir);
    Stopwatch watch;

    double cluster_tol = cfg.cluster_tol.value_or(fem_cluster_tol(cfg.h_target));
    std::string meta = std::string("equispec ") + kVersion +
                       " h_target=" + std::to_string(cfg.h_target) +
                       " cluster_tol=" + std::to_string(cluster_tol);

    json manifest;
    manifest["version"] = kVersion;
    manifest["config"] = config_echo(cfg, cluster_tol);
    manifest["tolerances"] = {{"cluster_tol", cluster_tol},
                              {"isotypic_rank_tol", kIsotypicRankTol}};

    FiniteGroup group = build_group(cfg.group_kind, cfg.group_p);

    if (cfg.kind == ExperimentKind::oracle_check) {
        AnalyticSpectrum spec;
        if (cfg.oracle.shape == "disk") {
            spec = disk_spectrum(cfg.oracle.radius, cfg.oracle.count);
            disk_symmetry_labels(spec, group, real_irreps(group));
        } else {
            spec = rectangle_spectrum(cfg.oracle.lx, cfg.oracle.ly, cfg.oracle.count);
        }
        write_oracle_csv(spec, (out / "oracle.csv").string(), meta);
        watch.lap("oracle");

        if (cfg.oracle.compare_fem) {
            SymmetricDomain domain = make_domain(group, cfg.r0, cfg.domain_modes);
            SymmetricMesh mesh = generate_mesh(domain, cfg.h_target);
            FemOperatorPair ops = assemble(mesh);
            int count = std::min<int>(cfg.num_eigs, mesh.num_vertices());
            EigenSolution sol = solve_neumann_eigs(ops, count);
            write_spectrum_csv(sol, out / "spectrum.csv", meta);
            write_mesh_txt(mesh, (out / "mesh.txt").string());
            std::vector<double> exact = spec.expanded();
            double worst = 0.0;
            int ncmp = std::min<int>(count, static_cast<int>(exact.size()));
            for (int i = 1; i < ncmp; ++i)
                worst = std::max(worst,
                                 std::abs(sol.eigenvalues[i] - exact[i]) / std::abs(exact[i]));
            manifest["oracle_comparison"] = {{"compared", ncmp},
                                             {"max_rel_error_nonzero_modes", worst}};
            watch.lap("fem-compare");
        }
        manifest["timings_s"] = watch.to_json();
        write_json(manifest, out / "manifest.json");
        return 0;
    }

    SymmetricDomain domain = make_domain(group, cfg.r0, cfg.domain_modes);
    SymmetricMesh mesh = generate_mesh(domain, cfg.h_target);
    watch.lap("mesh");
    manifest["mesh"] = {{"vertices", mesh.num_vertices()},
                        {"triangles", mesh.num_triangles()},
                        {"boundary_vertices", mesh.num_boundary()},
                        {"min_angle_deg", min_triangle_angle(mesh)},
                        {"equivariance_defect", equivariance_defect(mesh)},
                        {"area", mesh_area(mesh)}};
    write_mesh_txt(mesh, (out / "mesh.txt").string());

    FemOperatorPair ops = assemble(mesh);
    int count = std::min<int>(cfg.num_eigs, mesh.num_vertices());
    EigenSolution sol = solve_neumann_eigs(ops, count);
    watch.lap("solve");
    write_spectrum_csv(sol, out / "spectrum.csv", meta);
    write_matrix_txt(sol.eigenvectors, out / "eigenvectors.txt");

    std::vector<RealIrrep> irreps = real_irreps(group);

    switch (cfg.kind) {
        case ExperimentKind::spectrum:
            break;

        case ExperimentKind::classify: {
            PermutationAction action = vertex_permutations(mesh);
            std::vector<IsotypicProjector> projectors =
                isotypic_projectors(group, irreps, action);
            SpectralResult spec = cluster_eigenvalues(sol.eigenvalues, cluster_tol);
            classify_isotypic(spec, sol, projectors, irreps, ops.mass);
            write_classification_csv(spec, (out / "classification.csv").string(), meta);
            DivisibilityReport rep =
                divisibility_report(spec, irreps, sol.eigenvalues[count - 1]);
            manifest["divisibility"] = {
                {"all_divisible", rep.all_divisible},
                {"forced_multiplicity_applies", rep.forced_multiplicity_applies},
                {"has_multiple_cluster", rep.has_multiple_cluster},
                {"all_two_dim_present", rep.all_two_dim_present}};
            watch.lap("classify");
            break;
        }

        case ExperimentKind::derivative: {
            SpectralResult spec = cluster_eigenvalues(sol.eigenvalues, cluster_tol);
            const DerivativeParams& dp = cfg.derivative;
            if (dp.cluster_index < 0 ||
                dp.cluster_index >= static_cast<int>(spec.clusters.size()))
                fail(ErrorCategory::config_invalid, "cluster_index out of range");
            const Cluster& cl = spec.clusters[dp.cluster_index];
            BoundaryField field = make_field(group, dp.field_modes);
            SigmaBoundaryData sig = sigma_boundary_data(mesh, domain, field);

            Eigen::MatrixXd m1 = first_derivative_matrix(mesh, sol, cl.members,
                                                         cl.lambda_mean, sig.value);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m1);
            watch.lap("first-derivative");

            json report;
            report["version"] = kVersion;
            report["h_target"] = cfg.h_target;
            report["cluster_tol"] = cluster_tol;
            report["cluster"] = {{"index", dp.cluster_index},
                                 {"lambda0", cl.lambda_mean},
                                 {"size", cl.size()},
                                 {"members", cl.members}};
            report["field"] = {{"modes", modes_to_json(field.modes)}};
            report["M1"] = matrix_to_json(m1);

            TransportMap transport = make_transport(domain, field);
            FdValidation fd1 = fd_validate(mesh, transport, sol, cl.members,
                                           es.eigenvectors(), dp.fd_t);
            watch.lap("fd1");

            std::vector<EigenfunctionDerivative> phidots;
            Eigen::MatrixXd phidot_mat;
            if (dp.second_order) {
                for (int j = 0; j < cl.size(); ++j)
                    phidots.push_back(eigenfunction_derivative(mesh, ops, sol, cl.members, j,
                                                               cl.lambda_mean, sig.value));
                phidot_mat.resize(mesh.num_vertices(), cl.size());
                for (int j = 0; j < cl.size(); ++j) phidot_mat.col(j) = phidots[j].phidot;
                write_matrix_txt(phidot_mat, out / "phidot.txt");
                watch.lap("phidot");
            }

            FdValidation fd2 = dp.second_order
                                   ? fd_validate(mesh, transport, sol, cl.members,
                                                 es.eigenvectors(), dp.fd_t2)
                                   : FdValidation{};

            json branches = json::array();
            double delta = cfg.h_target / 2.0;
            for (int b = 0; b < cl.size(); ++b) {
                json jb;
                jb["branch"] = b;
                double ldot = es.eigenvalues()[b];
                jb["lambda_dot"] = ldot;
                json fdres;
                fdres["fd1"] = fd1.branches[b].fd1;
                fdres["fd1_refined"] = fd1.branches[b].fd1_refined;
                fdres["fd1_minus_slope"] = fd1.branches[b].fd1 - ldot;
                fdres["min_overlap"] = fd1.branches[b].min_overlap;
                if (dp.second_order) {
                    Eigen::MatrixXd m2 = second_derivative_matrix(
                        mesh, sol, cl.members, cl.lambda_mean, ldot, phidots, sig, delta);
                    Eigen::VectorXd cvec = es.eigenvectors().col(b);
                    double lddot = cvec.dot(m2 * cvec);
                    jb["lambda_ddot"] = lddot;
                    jb["M2"] = matrix_to_json(m2);
                    jb["M2_symmetry_defect"] =
                        (m2 - m2.transpose()).cwiseAbs().maxCoeff() /
                        std::max(1.0, m2.cwiseAbs().maxCoeff());
                    fdres["fd2"] = fd2.branches[b].fd2;
                    fdres["fd2_refined"] = fd2.branches[b].fd2_refined;
                    fdres["fd2_minus_lambda_ddot"] = fd2.branches[b].fd2_refined - lddot;
                }
                jb["fd_residuals"] = fdres;
                branches.push_back(jb);
            }
            report["branches"] = branches;
            if (dp.second_order) {
                json diag = json::array();
                for (const auto& pd : phidots)
                    diag.push_back({{"residual", pd.residual},
                                    {"max_orthogonality", pd.max_orthogonality}});
                report["phidot_diagnostics"] = diag;
            }
            write_json(report, out / "derivative.json");
            watch.lap("second-derivative");
            break;
        }

        case ExperimentKind::split: {
            PermutationAction action = vertex_permutations(mesh);
            std::vector<IsotypicProjector> projectors =
                isotypic_projectors(group, irreps, action);
            SpectralResult spec = cluster_eigenvalues(sol.eigenvalues, cluster_tol);
            classify_isotypic(spec, sol, projectors, irreps, ops.mass);
            write_classification_csv(spec, (out / "classification.csv").string(), meta);

            int k_max = cfg.split.k_max > 0 ? cfg.split.k_max : 4 * group.p;
            std::vector<BoundaryField> candidates = candidate_fields(group, k_max);
            SplitExperiment ex = run_split_experiment(mesh, domain, sol, spec,
                                                      cfg.split.cluster_index, candidates,
                                                      cfg.split.t);
            json report;
            report["version"] = kVersion;
            report["h_target"] = cfg.h_target;
            report["cluster_tol"] = cluster_tol;
            report["cluster_index"] = cfg.split.cluster_index;
            report["t"] = ex.t;
            report["found_direction"] = ex.direction.has_value();
            if (ex.direction) {
                json slopes = json::array();
                for (int i = 0; i < ex.direction->slopes.size(); ++i)
                    slopes.push_back(ex.direction->slopes[i]);
                report["direction"] = {{"modes", modes_to_json(ex.direction->field.modes)},
                                       {"spread", ex.direction->spread},
                                       {"slopes", slopes},
                                       {"M1", matrix_to_json(ex.direction->derivative)}};
                report["predicted_gap"] = ex.predicted_gap;
                report["achieved_gap"] = ex.achieved_gap;
                report["before_sizes"] = ex.before_sizes;
                report["after_sizes"] = ex.after_sizes;
                report["size_conserved"] = ex.size_conserved;
            }
            write_json(report, out / "split.json");
            watch.lap("split");
            break;
        }

        case ExperimentKind::sweep: {
            int k_max = cfg.sweep.k_max > 0 ? cfg.sweep.k_max : 4 * group.p;
            SweepReport rep =
                genericity_sweep(domain, mesh, cfg.sweep.cutoff, cfg.sweep.trials, cfg.seed,
                                 cfg.sweep.amplitude, k_max, cluster_tol);
            json report;
            report["version"] = kVersion;
            report["seed"] = rep.seed;
            report["trials"] = rep.trials;
            report["amplitude"] = rep.amplitude;
            report["cutoff"] = rep.cutoff;
            report["cluster_tol"] = rep.cluster_tol;
            report["h_target"] = cfg.h_target;
            report["fraction_G_simple"] = rep.fraction_g_simple();
            report["fraction_class_simple"] =
                static_cast<double>(rep.ok_class_simple) / rep.trials;
            report["fraction_no_accidental"] =
                static_cast<double>(rep.ok_no_accidental) / rep.trials;
            json failures = json::array();
            for (const SweepTrialFailure& f : rep.failures)
                failures.push_back({{"trial", f.trial},
                                    {"cluster", f.cluster},
                                    {"sizes", f.sizes},
                                    {"sigmas", f.sigmas},
                                    {"reason", f.reason}});
            report["failures"] = failures;
            write_json(report, out / "sweep.json");
            watch.lap("sweep");
            break;
        }

        case ExperimentKind::oracle_check:
            break; // handled above
    }

    manifest["timings_s"] = watch.to_json();
    write_json(manifest, out / "manifest.json");
    if (cfg.verbose) std::cerr << "wrote reports to " << out.string() << "\n";
    return 0;
}

} // namespace equispec
