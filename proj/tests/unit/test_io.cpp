#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "jdgsvd/cli.hpp"
#include "jdgsvd/driver.hpp"
#include "jdgsvd/errors.hpp"
#include "jdgsvd/generators.hpp"
#include "jdgsvd/matrix_market.hpp"
#include "jdgsvd/probe.hpp"
#include "jdgsvd/report.hpp"
#include "helpers.hpp"

using namespace jdgsvd;
namespace fs = std::filesystem;

namespace {

SparseMatrix parse(const std::string& text) {
    std::istringstream in(text);
    return parse_matrix_market(in);
}

std::size_t parse_error_line(const std::string& text) {
    try {
        (void)parse(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args) {
    args.insert(args.begin(), "jdgsvd");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "jdgsvd_test_io";
    fs::create_directories(dir);
    return dir / name;
}

std::size_t count_lines(const fs::path& p) {
    std::ifstream f(p);
    std::size_t n = 0;
    for (std::string line; std::getline(f, line);) ++n;
    return n;
}

}  // namespace

TEST_CASE("matrix market: general diagonal") {
    const SparseMatrix m = parse("%%MatrixMarket matrix coordinate real general\n"
                                 "% a comment\n"
                                 "2 2 2\n1 1 1.0\n2 2 2.0\n");
    CHECK(m.to_dense() == Matrix(Vector(Eigen::Vector2d(1, 2)).asDiagonal()));
}

TEST_CASE("matrix market: symmetric storage is mirrored") {
    const SparseMatrix m = parse("%%MatrixMarket matrix coordinate real symmetric\n"
                                 "3 3 2\n1 1 4\n3 1 -2.5\n");
    CHECK(m.nnz() == 3);
    const Matrix d = m.to_dense();
    CHECK(d(2, 0) == -2.5);
    CHECK(d(0, 2) == -2.5);
    CHECK(d(0, 0) == 4.0);
}

TEST_CASE("matrix market: duplicates are summed") {
    const SparseMatrix m = parse("%%MatrixMarket matrix coordinate real general\n"
                                 "2 3 3\n1 2 1.5\n1 2 2.0\n2 3 1\n");
    CHECK(m.to_dense()(0, 1) == 3.5);
    CHECK(m.nnz() == 2);
}

TEST_CASE("matrix market: errors name the line") {
    CHECK_THROWS_AS(parse("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n1 1\n"), ParseError);
    CHECK(parse_error_line("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n1 1\n") == 1);
    CHECK(parse_error_line("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n") == 1);
    CHECK(parse_error_line("%%MatrixMarket matrix array real general\n1 1\n1\n") == 1);
    CHECK(parse_error_line("not a header\n") == 1);
    CHECK(parse_error_line("%%MatrixMarket matrix coordinate real general\n%c\n2 2 2\n1 1 1\n3 1 1\n") == 5);
    CHECK(parse_error_line("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 x\n2 2 1\n") == 3);
    CHECK(parse_error_line("%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1\n2 2 1\n") > 0);
    CHECK(parse_error_line("%%MatrixMarket matrix coordinate real general\n2 two 1\n") == 2);
    CHECK_THROWS_AS((void)read_matrix_market("/nonexistent/file.mtx"), Error);
}

TEST_CASE("matrix market: integer field is accepted") {
    const SparseMatrix m = parse("%%MatrixMarket matrix coordinate integer general\n1 1 1\n1 1 7\n");
    CHECK(m.to_dense()(0, 0) == 7.0);
}

TEST_CASE("matrix market round trip is exact") {
    const SparseMatrix a = random_sparse(40, 30, 0.1, 5);
    std::stringstream buf;
    write_matrix_market(a, buf);
    const SparseMatrix b = parse_matrix_market(buf);
    CHECK(a.row_offsets() == b.row_offsets());
    CHECK(a.col_indices() == b.col_indices());
    CHECK(a.values() == b.values());

    const fs::path p = scratch("roundtrip.mtx");
    write_matrix_market(generate_b(BKind::L2, 9), p.string());
    CHECK(read_matrix_market(p.string()).to_dense() == generate_b(BKind::L2, 9).to_dense());
}

TEST_CASE("generate_b examples") {
    Matrix l1(3, 4);
    l1 << 1, -1, 0, 0, 0, 1, -1, 0, 0, 0, 1, -1;
    CHECK(generate_b(BKind::L1, 4).to_dense() == l1);
    Matrix t(3, 3);
    t << 3, 1, 0, 1, 3, 1, 0, 1, 3;
    CHECK(generate_b(BKind::T, 3).to_dense() == t);
    Matrix l2(3, 5);
    l2 << -1, 2, -1, 0, 0, 0, -1, 2, -1, 0, 0, 0, -1, 2, -1;
    CHECK(generate_b(BKind::L2, 5).to_dense() == l2);
    CHECK_THROWS_AS((void)generate_b(BKind::T, 2), Error);
    CHECK(parse_b_kind("L1") == BKind::L1);
    CHECK(!parse_b_kind("L3"));
    CHECK(b_kind_name(BKind::L2) == "L2");
}

TEST_CASE("random_sparse is reproducible and has no empty column") {
    const SparseMatrix a = random_sparse(50, 40, 0.01, 9);
    const SparseMatrix b = random_sparse(50, 40, 0.01, 9);
    CHECK(a.values() == b.values());
    const Matrix d = a.to_dense();
    for (Index j = 0; j < 40; ++j) CHECK(d.col(j).norm() > 0.0);
}

TEST_CASE("planted components satisfy their invariants") {
    const std::vector<double> spec = {0.5, 1.0, 2.0, 3.0, 4.5};
    const PlantedPair pp = generate_planted_pair(8, 6, 5, spec, 100.0, 2);
    REQUIRE(pp.components.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        const GsvdComponent& c = pp.components[i];
        const ComponentCheck chk = check_component(pp.pair, c);
        CHECK(chk.passes_invariants());
        CHECK(chk.converged(1e-12));
        CHECK(c.sigma() == doctest::Approx(spec[i]).epsilon(1e-12));
    }
    const std::vector<double> sv = testutil::dense_gsv(pp.pair.a.to_dense(), pp.pair.b.to_dense());
    for (std::size_t i = 0; i < 5; ++i) CHECK(sv[i] == doctest::Approx(spec[i]).epsilon(1e-8));
    CHECK_THROWS_AS((void)generate_planted_pair(4, 6, 5, spec, 1.0, 1), Error);
    CHECK_THROWS_AS((void)generate_planted_pair(8, 6, 5, spec, 0.5, 1), Error);
}

TEST_CASE("planted isotropic pair gives alpha = beta") {
    const PlantedPair pp = generate_planted_pair(10, 10, 6, std::vector<double>(6, 1.0), 1.0, 3);
    SolverOptions opts;
    opts.target = 1.0;
    const PartialGsvdResult r = solve(pp.pair, opts);
    REQUIRE(r.converged);
    CHECK(r.components[0].alpha == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
    CHECK(r.components[0].beta == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("planted {0.5, 1, 2} with tau = 0.9 returns 1") {
    const PlantedPair pp = generate_planted_pair(3, 3, 3, {0.5, 1.0, 2.0}, 2.0, 4);
    for (Method m : {Method::standard, Method::cpf_harmonic, Method::if_harmonic}) {
        SolverOptions opts;
        opts.target = 0.9;
        opts.method = m;
        opts.max_outer = 20;
        const PartialGsvdResult r = solve(pp.pair, opts);
        REQUIRE(r.converged);
        CHECK(r.components[0].sigma() == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("badly conditioned X still passes the residual test") {
    std::vector<double> spec;
    for (int i = 0; i < 30; ++i) spec.push_back(0.2 + 0.13 * i);
    const PlantedPair pp = generate_planted_pair(40, 35, 30, spec, 1e6, 6);
    SolverOptions opts;
    opts.target = 1.5;
    opts.num_components = 2;
    opts.max_outer = 300;
    const PartialGsvdResult r = solve(pp.pair, opts);
    REQUIRE(r.converged);
    for (const GsvdComponent& c : r.components) CHECK(check_component(pp.pair, c).converged(opts.tol));
}

TEST_CASE("probe reports the spectrum of a planted pair") {
    const PlantedPair pp = generate_planted_pair(12, 10, 8, {0.3, 0.6, 1, 1.5, 2, 3, 4, 6}, 10.0, 5);
    const ProbeReport p = probe_pair(pp.pair);
    CHECK(p.regular);
    CHECK(p.sigma_min() == doctest::Approx(0.3).epsilon(1e-8));
    CHECK(p.sigma_max() == doctest::Approx(6.0).epsilon(1e-8));
    CHECK(p.percentile(0.0) == doctest::Approx(0.3).epsilon(1e-8));
    CHECK(p.percentile(1.0) == doctest::Approx(6.0).epsilon(1e-8));
}

TEST_CASE("trace CSV header and row count") {
    const MatrixPair pair = testutil::random_pair(30, 30, 30, 3);
    SolverOptions opts;
    opts.target = 1.2;
    opts.num_components = 2;
    const PartialGsvdResult r = solve(pair, opts);
    std::ostringstream csv;
    write_trace_csv(r.trace, csv);
    std::istringstream in(csv.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "outer_iter,component_index,theta,alpha,beta,rel_residual,inner_iters,rho_mode,event");
    Index rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == r.outer_iterations);

    const nlohmann::json j = result_to_json(r);
    CHECK(j["method"] == "ifh");
    CHECK(j["components"].size() == 2);
    CHECK(j["outer_iterations"] == r.outer_iterations);
    CHECK(j["inner_iterations"] == r.inner_iterations);
    CHECK(j["converged"] == true);
    CHECK(j.contains("wall_seconds"));
    CHECK(j["components"][0]["sigma"].get<double>() == doctest::Approx(r.components[0].sigma()));
}

TEST_CASE("summary table has the Table 2 columns") {
    const MatrixPair pair = testutil::random_pair(20, 20, 20, 4);
    SolverOptions opts;
    opts.target = 1.0;
    const PartialGsvdResult r = solve(pair, opts);
    const std::string t = summary_table({{"demo", &r}});
    CHECK(t.find("I_out") != std::string::npos);
    CHECK(t.find("I_in") != std::string::npos);
    CHECK(t.find("T_cpu") != std::string::npos);
    CHECK(t.find("demo") != std::string::npos);
}

TEST_CASE("cli: end-to-end run with JSON and trace") {
    const fs::path json_path = scratch("run.json");
    const fs::path trace_path = scratch("run.csv");
    const CliRun r = cli({"--b-gen", "T", "--a", "random_sparse", "--n", "200", "--target", "10", "--num", "2",
                          "--method", "ifh", "--out", json_path.string(), "--trace", trace_path.string()});
    CHECK(r.code == kExitOk);
    std::ifstream f(json_path);
    const nlohmann::json j = nlohmann::json::parse(f);
    CHECK(j["components"].size() == 2);
    CHECK(j["converged"] == true);
    CHECK(count_lines(trace_path) == j["outer_iterations"].get<std::size_t>() + 1);

    // The reported components check out against the same pair.
    const MatrixPair pair(random_sparse(200, 200, 0.01, 1), generate_b(BKind::T, 200));
    SolverOptions opts;
    opts.target = 10.0;
    opts.num_components = 2;
    const PartialGsvdResult again = solve(pair, opts);
    CHECK(j["components"][0]["sigma"].get<double>() == doctest::Approx(again.components[0].sigma()));
    for (const GsvdComponent& c : again.components) CHECK(check_component(pair, c).converged(1e-8));
}

TEST_CASE("cli: usage errors exit 1") {
    CHECK(cli({"--b-gen", "T", "--a", "random_sparse", "--n", "50"}).code == kExitUsage);
    CHECK(cli({"--b-gen", "T", "--a", "random_sparse", "--n", "50", "--target", "1", "--method", "bogus"}).code ==
          kExitUsage);
    CHECK(cli({"--target", "1"}).code == kExitUsage);
    const CliRun r = cli({"--b-gen", "T", "--a", "random_sparse", "--n", "50"});
    CHECK(r.err.find("--target") != std::string::npos);
    CHECK(cli({"--b-gen", "T", "--a", "random_sparse", "--n", "50", "--target", "1", "--kmax", "3", "--kmin",
               "5"}).code == kExitUsage);
}

TEST_CASE("cli: parse errors exit 2") {
    const fs::path bad = scratch("bad.mtx");
    {
        std::ofstream f(bad);
        f << "%%MatrixMarket matrix coordinate pattern general\n2 2 1\n1 1\n";
    }
    const CliRun r = cli({"--matrix-a", bad.string(), "--b-gen", "T", "--target", "1"});
    CHECK(r.code == kExitParse);
    CHECK(r.err.find("line 1") != std::string::npos);
}

TEST_CASE("cli: non-convergence exits 3") {
    const CliRun r = cli({"--b-gen", "T", "--a", "random_sparse", "--n", "100", "--target", "1", "--num", "3",
                          "--max-outer", "2"});
    CHECK(r.code == kExitNotConverged);
}

TEST_CASE("cli: CPF-harmonic with L1 exits 4") {
    const CliRun r = cli({"--b-gen", "L1", "--a", "random_sparse", "--n", "100", "--target", "1", "--method",
                          "cpfh"});
    CHECK(r.code == kExitPrecondition);
    CHECK(r.err.find("CPF-HJDGSVD cannot be applied") != std::string::npos);
}

TEST_CASE("cli: all methods write one trace per method") {
    const fs::path trace_path = scratch("all.csv");
    const fs::path json_path = scratch("all.json");
    const CliRun r = cli({"--b-gen", "T", "--a", "random_sparse", "--n", "150", "--target", "2", "--method",
                          "all", "--trace", trace_path.string(), "--out", json_path.string(),
                          "--parallel-methods"});
    CHECK(r.code == kExitOk);
    std::ifstream f(json_path);
    const nlohmann::json j = nlohmann::json::parse(f);
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 3);
    for (const auto& entry : j) {
        const std::string label = entry["method"];
        const fs::path per = scratch("all." + label + ".csv");
        CHECK(fs::exists(per));
        CHECK(count_lines(per) == entry["outer_iterations"].get<std::size_t>() + 1);
    }
}
