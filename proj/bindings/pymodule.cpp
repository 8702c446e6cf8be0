#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "equispec/config.hpp"
#include "equispec/oracle.hpp"
#include "equispec/splitter.hpp"

namespace py = pybind11;
using namespace equispec;

namespace {

FiniteGroup group_from_args(const std::string& kind, int p) {
    return build_group(group_kind_from_string(kind), p);
}

std::vector<FourierMode> modes_from_list(const std::vector<std::tuple<int, double, double>>& in) {
    std::vector<FourierMode> out;
    for (const auto& [k, a, b] : in) out.push_back({k, a, b});
    return out;
}

// One-call pipeline: mesh, solve, classify. Returns plain dicts for smoke use.
py::dict spectrum_report(const std::string& kind, int p, double r0,
                         const std::vector<std::tuple<int, double, double>>& modes,
                         double h_target, int num_eigs, double cluster_tol) {
    FiniteGroup group = group_from_args(kind, p);
    SymmetricDomain domain = make_domain(group, r0, modes_from_list(modes));
    SymmetricMesh mesh = generate_mesh(domain, h_target);
    FemOperatorPair ops = assemble(mesh);
    EigenSolution sol = solve_neumann_eigs(ops, std::min(num_eigs, mesh.num_vertices()));
    std::vector<RealIrrep> irreps = real_irreps(group);
    PermutationAction action = vertex_permutations(mesh);
    std::vector<IsotypicProjector> projectors = isotypic_projectors(group, irreps, action);
    SpectralResult spec = cluster_eigenvalues(sol.eigenvalues, cluster_tol);
    classify_isotypic(spec, sol, projectors, irreps, ops.mass);

    py::dict out;
    out["num_vertices"] = mesh.num_vertices();
    out["equivariance_defect"] = equivariance_defect(mesh);
    std::vector<double> lambdas(sol.eigenvalues.data(),
                                sol.eigenvalues.data() + sol.eigenvalues.size());
    out["eigenvalues"] = lambdas;
    py::list clusters;
    for (const Cluster& c : spec.clusters) {
        py::dict jc;
        jc["lambda_mean"] = c.lambda_mean;
        jc["size"] = c.size();
        jc["verdict"] = verdict_name(c.verdict);
        py::dict iso;
        for (const auto& [label, mult] : c.isotypic) iso[py::str(label)] = mult;
        jc["isotypic"] = iso;
        clusters.append(jc);
    }
    out["clusters"] = clusters;
    return out;
}

py::dict derivative_report(const std::string& kind, int p, double r0,
                           const std::vector<std::tuple<int, double, double>>& domain_modes,
                           const std::vector<std::tuple<int, double, double>>& field_modes,
                           double h_target, int num_eigs, double cluster_tol,
                           int cluster_index) {
    FiniteGroup group = group_from_args(kind, p);
    SymmetricDomain domain = make_domain(group, r0, modes_from_list(domain_modes));
    BoundaryField field = make_field(group, modes_from_list(field_modes));
    SymmetricMesh mesh = generate_mesh(domain, h_target);
    FemOperatorPair ops = assemble(mesh);
    EigenSolution sol = solve_neumann_eigs(ops, std::min(num_eigs, mesh.num_vertices()));
    SpectralResult spec = cluster_eigenvalues(sol.eigenvalues, cluster_tol);
    if (cluster_index < 0 || cluster_index >= static_cast<int>(spec.clusters.size()))
        fail(ErrorCategory::precondition, "cluster index out of range");
    const Cluster& cl = spec.clusters[cluster_index];
    SigmaBoundaryData sig = sigma_boundary_data(mesh, domain, field);
    Eigen::MatrixXd m1 =
        first_derivative_matrix(mesh, sol, cl.members, cl.lambda_mean, sig.value);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m1);

    py::dict out;
    out["lambda0"] = cl.lambda_mean;
    out["size"] = cl.size();
    std::vector<double> slopes(es.eigenvalues().data(),
                               es.eigenvalues().data() + es.eigenvalues().size());
    out["lambda_dot"] = slopes;
    std::vector<std::vector<double>> m1v;
    for (int r = 0; r < m1.rows(); ++r)
        m1v.emplace_back(m1.row(r).data(), m1.row(r).data() + m1.cols());
    out["M1"] = m1v;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Neumann spectra on group-invariant planar domains: core operations";

    py::register_exception<Error>(m, "EquispecError");

    m.def("version", [] { return std::string(kVersion); });

    m.def("group_order", [](const std::string& kind, int p) {
        return group_from_args(kind, p).order();
    }, py::arg("kind"), py::arg("p") = 2);

    m.def("irrep_dims", [](const std::string& kind, int p) {
        std::vector<int> dims;
        for (const RealIrrep& ir : real_irreps(group_from_args(kind, p))) dims.push_back(ir.dim);
        return dims;
    }, py::arg("kind"), py::arg("p") = 2);

    m.def("disk_eigenvalues", [](double radius, int count) {
        AnalyticSpectrum s = disk_spectrum(radius, count);
        return s.expanded();
    }, py::arg("radius") = 1.0, py::arg("count") = 10);

    m.def("rectangle_eigenvalues", [](double lx, double ly, int count) {
        AnalyticSpectrum s = rectangle_spectrum(lx, ly, count);
        return s.expanded();
    }, py::arg("lx"), py::arg("ly"), py::arg("count") = 10);

    m.def("bessel_jprime_zero", [](int order, int k) {
        return bessel_jprime_zeros(order, k).back();
    }, py::arg("order"), py::arg("k") = 1);

    m.def("spectrum", &spectrum_report, py::arg("kind"), py::arg("p"), py::arg("r0"),
          py::arg("modes"), py::arg("h_target"), py::arg("num_eigs") = 16,
          py::arg("cluster_tol") = 1e-6,
          "Mesh the domain, solve the Neumann eigenproblem and classify clusters.");

    m.def("first_derivative", &derivative_report, py::arg("kind"), py::arg("p"), py::arg("r0"),
          py::arg("domain_modes"), py::arg("field_modes"), py::arg("h_target"),
          py::arg("num_eigs") = 16, py::arg("cluster_tol") = 1e-6, py::arg("cluster_index") = 1,
          "Hadamard first-derivative matrix and branch slopes for a cluster.");

    m.def("run_config", [](const std::string& config_path, const std::string& out_dir) {
        ExperimentConfig cfg = parse_config_file(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        return run_experiment(cfg);
    }, py::arg("config_path"), py::arg("out_dir") = std::string(),
       "Run a full experiment config, writing the usual report files.");
}
