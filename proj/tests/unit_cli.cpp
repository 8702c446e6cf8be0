#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "equispec/config.hpp"

using namespace equispec;
namespace fs = std::filesystem;

namespace {

const char* kDiskConfig = R"({
  "group": {"kind": "cyclic", "p": 4},
  "domain": {"r0": 1.0, "modes": []},
  "mesh": {"h_target": 0.14},
  "solver": {"num_eigs": 5, "cluster_tol": 1e-6},
  "experiment": {"kind": "spectrum"},
  "seed": 1
})";

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("config parsing accepts the schema and rejects noise") {
    ExperimentConfig c = parse_config_text(kDiskConfig);
    CHECK(c.group_kind == GroupKind::cyclic);
    CHECK(c.group_p == 4);
    CHECK(c.num_eigs == 5);
    CHECK(c.kind == ExperimentKind::spectrum);

    CHECK_THROWS_AS(parse_config_text("{not json"), Error);
    CHECK_THROWS_AS(parse_config_text(R"({"group":{"kind":"cyclic","p":4}})"), Error);

    // unknown key
    std::string extra = kDiskConfig;
    extra.insert(1, "\"surprise\": 1,");
    CHECK_THROWS_AS(parse_config_text(extra), Error);

    // malformed mode entry
    const char* bad_mode = R"({
      "group": {"kind": "cyclic", "p": 4},
      "domain": {"r0": 1.0, "modes": [{"k": "four", "a": 0.1}]},
      "mesh": {"h_target": 0.1},
      "experiment": {"kind": "spectrum"}
    })";
    try {
        parse_config_text(bad_mode);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::config_invalid);
        CHECK(e.exit_code() == 2);
    }
}

TEST_CASE("spectrum experiment writes the expected reports") {
    ExperimentConfig c = parse_config_text(kDiskConfig);
    fs::path dir = fs::temp_directory_path() / "equispec_test_spectrum";
    fs::remove_all(dir);
    c.output_dir = dir.string();
    CHECK(run_experiment(c) == 0);

    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "spectrum.csv"));
    CHECK(fs::exists(dir / "eigenvectors.txt"));
    CHECK(fs::exists(dir / "mesh.txt"));

    std::string csv = slurp(dir / "spectrum.csv");
    CHECK(csv.find("index,lambda,residual") != std::string::npos);
    // first eigenvalue is the zero mode
    auto pos = csv.find("\n0,");
    REQUIRE(pos != std::string::npos);
    double lambda0 = std::stod(csv.substr(pos + 3));
    CHECK(std::abs(lambda0) < 1e-9);
    fs::remove_all(dir);
}

TEST_CASE("reports are bit-identical for identical config and seed") {
    const char* cfg = R"({
      "group": {"kind": "cyclic", "p": 3},
      "domain": {"r0": 1.0, "modes": [{"k": 3, "a": 0.1}]},
      "mesh": {"h_target": 0.12},
      "solver": {"num_eigs": 6, "cluster_tol": 1e-6},
      "experiment": {"kind": "classify"},
      "seed": 7
    })";
    ExperimentConfig c = parse_config_text(cfg);
    fs::path d1 = fs::temp_directory_path() / "equispec_det_1";
    fs::path d2 = fs::temp_directory_path() / "equispec_det_2";
    fs::remove_all(d1);
    fs::remove_all(d2);
    c.output_dir = d1.string();
    run_experiment(c);
    c.output_dir = d2.string();
    run_experiment(c);

    for (const char* name : {"spectrum.csv", "classification.csv", "eigenvectors.txt",
                             "mesh.txt"}) {
        CHECK(slurp(d1 / name) == slurp(d2 / name));
    }
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("classification on a Z5 flower has even 2-dim cluster sizes") {
    const char* cfg = R"({
      "group": {"kind": "cyclic", "p": 5},
      "domain": {"r0": 1.0, "modes": [{"k": 5, "a": 0.12}]},
      "mesh": {"h_target": 0.1},
      "solver": {"num_eigs": 12, "cluster_tol": 1e-6},
      "experiment": {"kind": "classify"},
      "seed": 0
    })";
    ExperimentConfig c = parse_config_text(cfg);
    fs::path dir = fs::temp_directory_path() / "equispec_test_classify";
    fs::remove_all(dir);
    c.output_dir = dir.string();
    run_experiment(c);

    std::ifstream f(dir / "classification.csv");
    std::string line;
    std::getline(f, line); // comment
    std::getline(f, line); // header
    while (std::getline(f, line)) {
        // cluster_id,lambda_mean,size,sigma_labels,multiplicities,verdict
        std::stringstream ss(line);
        std::string field;
        std::getline(ss, field, ',');
        std::getline(ss, field, ',');
        std::getline(ss, field, ',');
        int size = std::stoi(field);
        std::string labels;
        std::getline(ss, labels, ',');
        if (labels.rfind("rot", 0) == 0 && labels.find(';') == std::string::npos)
            CHECK(size % 2 == 0);
    }
    fs::remove_all(dir);
}

TEST_CASE("oracle-check experiment writes oracle.csv") {
    const char* cfg = R"({
      "group": {"kind": "cyclic", "p": 3},
      "domain": {"r0": 1.0, "modes": []},
      "mesh": {"h_target": 0.2},
      "experiment": {"kind": "oracle-check", "shape": "disk", "radius": 1.0, "count": 8},
      "seed": 0
    })";
    ExperimentConfig c = parse_config_text(cfg);
    fs::path dir = fs::temp_directory_path() / "equispec_test_oracle";
    fs::remove_all(dir);
    c.output_dir = dir.string();
    run_experiment(c);
    std::string csv = slurp(dir / "oracle.csv");
    CHECK(csv.find("lambda,m,n_or_k,multiplicity,sigma_label") != std::string::npos);
    CHECK(csv.find("\n0,0,0,1,triv") != std::string::npos);
    fs::remove_all(dir);
}
