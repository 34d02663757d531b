#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "helpers.hpp"
#include "permorb/cli.hpp"

namespace fs = std::filesystem;
using permorb::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "permorb");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("permorb_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("version and usage") {
    CHECK(invoke({"--version"}).out.find("permorb 0.1.0") != std::string::npos);
    CHECK(invoke({}).code == 1);
    CHECK(invoke({"embed", "--A"}).code == 1);
  }

  TEST_CASE("construct") {
    const auto dir = scratch("construct");
    auto r = invoke({"construct", "circle", "--D", "8", "--out", dir.string()});
    REQUIRE(r.code == 0);
    const auto a = permorb::read_csv_matrix(dir / "A.csv");
    CHECK(a.rows() == 2);
    CHECK(a.cols() == 8);
    CHECK(nlohmann::json::parse(permorb::read_text_file(dir / "certificate.json")).at("sigma1").get<double>() ==
          doctest::Approx(2.0));

    r = invoke({"construct", "adversarial-pair", "--n", "5", "--d", "3", "--out", dir.string()});
    REQUIRE(r.code == 0);
    CHECK(permorb::read_csv_matrix(dir / "Y.csv").row(0).isZero());

    CHECK(invoke({"construct", "circle", "--D", "1", "--out", dir.string()}).code == 1);
    CHECK(invoke({"construct", "gaussian", "--d", "2", "--D", "3"}).code == 1);
    CHECK(invoke({"construct", "spiral", "--out", dir.string()}).code == 1);
    fs::remove_all(dir);
  }

  TEST_CASE("embed and distance") {
    const auto dir = scratch("embed");
    fs::create_directories(dir);
    permorb::write_csv_matrix(dir / "A.csv", permorb::Matrix{{1.0, 0.0, 1.0}, {0.0, 1.0, 1.0}});
    permorb::write_csv_matrix(dir / "X.csv", permorb::Matrix{{1.0, 2.0}, {3.0, 0.0}});
    permorb::write_csv_matrix(dir / "Y.csv", permorb::Matrix{{3.0, 0.0}, {1.0, 2.0}});
    auto r = invoke({"embed", "--A", (dir / "A.csv").string(), "--X", (dir / "X.csv").string()});
    REQUIRE(r.code == 0);
    const auto e = permorb::parse_csv_matrix(r.out);
    CHECK(e == permorb::Matrix{{1.0, 0.0, 3.0}, {3.0, 2.0, 3.0}});

    r = invoke({"distance", "--X", (dir / "X.csv").string(), "--Y", (dir / "Y.csv").string(), "--A",
                (dir / "A.csv").string(), "--bruteforce"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("distance").get<double>() == 0.0);
    CHECK(j.at("embedding_gap").get<double>() == 0.0);

    CHECK(invoke({"distance", "--X", (dir / "missing.csv").string(), "--Y", (dir / "Y.csv").string()}).code == 2);
    fs::remove_all(dir);
  }

  TEST_CASE("audit is reproducible") {
    const auto a = testutil::data_path("a_n4_d2_D4.csv");
    const auto r1 = invoke({"audit", "--A", a, "--n", "3", "--trials", "300", "--r", "1", "--m", "2", "--seed", "5"});
    const auto r2 = invoke({"audit", "--A", a, "--n", "3", "--trials", "300", "--r", "1", "--m", "2", "--seed", "5",
                            "--threads", "2"});
    REQUIRE(r1.code == 0);
    CHECK(r1.out == r2.out);
    const auto j = nlohmann::json::parse(r1.out);
    CHECK(j.at("empirical_C1").get<double>() <= j.at("empirical_C2").get<double>());
    CHECK(j.at("subset_bound").at("certified").get<bool>());

    const auto ose = invoke({"audit", "--A", a, "--n", "3", "--trials", "50", "--check-ose", "--M", "40",
                             "--ose-trials", "50"});
    REQUIRE(ose.code == 0);
    const auto k = nlohmann::json::parse(ose.out);
    CHECK(k.at("ose_check").at("M").get<int>() == 40);
    CHECK(k.at("ose_check").at("region_count_bound").is_string());

    CHECK(invoke({"audit", "--A", a, "--n", "3", "--trials", "20", "--r", "2", "--budget", "0"}).code == 3);
  }

  TEST_CASE("certify exit codes") {
    CHECK(invoke({"certify", "--A", testutil::data_path("a_n4_d2_D4.csv"), "--n", "4"}).code == 0);
    CHECK(invoke({"certify", "--A", testutil::data_path("a_n3_d3_D6.csv"), "--n", "3"}).code == 4);
    CHECK(invoke({"certify", "--A", testutil::data_path("a_n4_d2_D4.csv"), "--n", "4", "--budget", "10"}).code == 5);
    CHECK(invoke({"certify", "--A", testutil::data_path("a_n4_d2_D4.csv"), "--n", "8"}).code == 1);

    ::setenv("PERMORB_BUDGET", "10", 1);
    CHECK(invoke({"certify", "--A", testutil::data_path("a_n4_d2_D4.csv"), "--n", "4"}).code == 5);
    ::setenv("PERMORB_BUDGET", "ten", 1);
    CHECK(invoke({"certify", "--A", testutil::data_path("a_n4_d2_D4.csv"), "--n", "4"}).code == 1);
    ::unsetenv("PERMORB_BUDGET");

    const auto w = invoke({"certify", "--A", testutil::data_path("a_n3_d3_D6.csv"), "--n", "3"});
    const auto j = nlohmann::json::parse(w.out);
    CHECK(j.at("verdict").at("status") == "WitnessFound");
    CHECK(j.at("verdict").at("witness").at("verified").get<bool>());
  }

  TEST_CASE("counterexample") {
    const auto dir = scratch("counter");
    REQUIRE(invoke({"counterexample", "--d", "3", "--D", "5", "--seed", "2", "--out", dir.string()}).code == 0);
    const auto cert = nlohmann::json::parse(permorb::read_text_file(dir / "certificate.json"));
    CHECK(cert.at("dist").get<double>() > 0.0);
    CHECK(cert.at("embedding_gap").get<double>() <= 1e-8);
    CHECK(permorb::read_csv_matrix(dir / "X.csv").rows() == 4);
    fs::remove_all(dir);
  }

  TEST_CASE("reproduce") {
    const auto dir = scratch("reproduce");
    const auto r = invoke({"reproduce", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("50 cells match") != std::string::npos);
    CHECK(fs::exists(dir / "minimal.csv"));
    CHECK(invoke({"reproduce", "--max-n", "5"}).code == 1);
    fs::remove_all(dir);

    auto minimal = permorb::cli::reference_minimal_table();
    auto maximal = permorb::cli::reference_maximal_table();
    CHECK(permorb::cli::compare_tables(minimal, maximal).empty());
    minimal[1][2] += 1;
    maximal[4][0] -= 1;
    const auto mm = permorb::cli::compare_tables(minimal, maximal);
    REQUIRE(mm.size() == 2);
    CHECK(mm[0].n == 3);
    CHECK(mm[0].d == 4);
    CHECK(mm[1].n == 6);
    CHECK(mm[1].d == 2);
  }
}
