#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "scrollforge/io.hpp"
#include "scrollforge/scrollforge.hpp"
#include "support.hpp"

using namespace scrollforge;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    fs::path dir = fs::temp_directory_path() / "scrollforge_io_test";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args, const fs::path& stdout_file) {
    std::string cmd = std::string(SCROLLFORGE_CLI_PATH) + " " + args + " > " +
                      stdout_file.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

nlohmann::json minimal_doc() {
    return nlohmann::json{
        {"name", "mini"},
        {"matrix", {-1, 0, 0, 0, -1, 0, 0, 0, -1}},
        {"planes", nlohmann::json::array()},
        {"pieces", {{{"guard", nlohmann::json::array()}, {"b", {0, 0, 0}}}}}};
}

}  // namespace

TEST_CASE("factory systems round-trip through the document format") {
    for (auto build : {build_example1_double, build_example1_triple, build_example2_triple}) {
        PWLSystem sys = build();
        PWLSystem back = system_from_json(system_to_json(sys));
        CHECK(back == sys);
    }
}

TEST_CASE("round-trip through a file preserves every bit") {
    fs::path path = work_dir() / "sys.json";
    PWLSystem sys = build_example1_double();
    save_system(sys, path);
    PWLSystem back = load_system(path);
    CHECK(back == sys);
    CHECK(back.pieces[3].b_vector == Vec3(0.05, 1, 0));
    CHECK(back.pieces[0].a_matrix(0, 1) == -10.0);
}

TEST_CASE("schema and dimension errors carry the field path") {
    auto doc = minimal_doc();
    doc.erase("matrix");
    CHECK_THROWS_AS(system_from_json(doc), SchemaError);

    doc = minimal_doc();
    doc["matrix"] = {1, 0, 0, 1};  // 2x2
    CHECK_THROWS_AS(system_from_json(doc), DimensionError);

    doc = minimal_doc();
    doc["pieces"][0]["b"] = {1, 2};
    CHECK_THROWS_AS(system_from_json(doc), DimensionError);

    doc = minimal_doc();
    doc["pieces"] = nlohmann::json::array();
    CHECK_THROWS_AS(system_from_json(doc), SchemaError);

    doc = minimal_doc();
    doc["pieces"][0]["guard"].push_back({{"plane", "S9"}, {"rel", "<"}});
    CHECK_THROWS_AS(system_from_json(doc), SchemaError);

    doc = minimal_doc();
    doc["planes"].push_back(
        {{"name", "S1"}, {"normal", {0, 0, 1}}, {"offset", 0.0}, {"tolerance", 0.0}});
    doc["pieces"][0]["guard"].push_back({{"plane", "S1"}, {"rel", "between"}});
    CHECK_THROWS_AS(system_from_json(doc), SchemaError);

    doc = minimal_doc();
    doc["pieces"][0]["guard"].push_back({{"coord", "x4"}, {"op", "<"}, {"value", 0.0}});
    CHECK_THROWS_AS(system_from_json(doc), SchemaError);

    doc = minimal_doc();
    doc["region_cuts"] = {"nope"};
    CHECK_THROWS_AS(system_from_json(doc), SchemaError);

    CHECK_THROWS_AS(system_from_json(nlohmann::json::array()), SchemaError);

    // zero normal is rejected through the plane constructor
    doc = minimal_doc();
    doc["planes"].push_back(
        {{"name", "bad"}, {"normal", {0, 0, 0}}, {"offset", 0.0}, {"tolerance", 0.0}});
    CHECK_THROWS_AS(system_from_json(doc), SchemaError);
}

TEST_CASE("saving requires a single shared matrix") {
    PWLSystem sys = sftest::single_piece(Mat3::identity(), Vec3());
    sys.pieces.push_back(AffinePiece{RegionPredicate{}, Mat3::diagonal(1, 2, 3), Vec3()});
    CHECK_THROWS_AS(system_to_json(sys), SchemaError);
}

TEST_CASE("unnamed guard planes get synthesized catalogue entries") {
    PWLSystem sys = sftest::single_piece(Mat3::identity(), Vec3());
    sys.pieces[0].guard.clauses.push_back(
        PlaneClause{SwitchingPlane(Vec3(0, 0, 1), 1.5), PlaneRel::Below});
    auto doc = system_to_json(sys);
    REQUIRE(doc["planes"].size() == 1);
    CHECK(doc["planes"][0]["offset"] == 1.5);
    PWLSystem back = system_from_json(doc);
    CHECK(back.pieces == sys.pieces);
}

TEST_CASE("trajectory CSV round-trips full precision") {
    Trajectory traj;
    traj.times = {0.0, 0.01};
    traj.states = {Vec3(0.1, -0.2, 1.0 / 3.0), Vec3(1e-17, 2e205, -3.5)};
    traj.regions = "13";
    traj.transitions = {{0.01, '1', '3'}};

    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x1,x2,x3,region");
    std::getline(in, line);
    CHECK(line.substr(line.size() - 2) == ",1");
    std::getline(in, line);
    double t, x1, x2, x3;
    char region;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%c", &t, &x1, &x2, &x3, &region) == 5);
    CHECK(t == 0.01);
    CHECK(x1 == 1e-17);
    CHECK(x2 == 2e205);
    CHECK(x3 == -3.5);
    CHECK(region == '3');

    std::ostringstream tcsv;
    write_transitions_csv(tcsv, traj);
    CHECK(tcsv.str() == "time,from,to\n0.01,1,3\n");
}

TEST_CASE("report JSON omits disabled analyses") {
    ChaosReport report;
    report.symbols = "1313";
    report.region_occupancy = {{'1', 0.5}, {'3', 0.5}};
    auto doc = report_to_json(report);
    CHECK_FALSE(doc.contains("lle"));
    CHECK_FALSE(doc.contains("k_median"));
    CHECK(doc["symbols"] == "1313");
    CHECK(doc["occupancy"]["1"] == 0.5);

    report.lle = 0.97;
    report.k_median = 0.99;
    report.k_per_c = {{1.0, 0.98}, {2.0, 1.0}};
    doc = report_to_json(report);
    CHECK(doc["lle"] == 0.97);
    CHECK(doc["k_per_c"].size() == 2);

    std::ostringstream kc;
    write_kc_csv(kc, report.k_per_c);
    CHECK(kc.str() == "c,Kc\n1,0.97999999999999998\n2,1\n");
}

TEST_CASE("cli: simulate writes the documented CSVs") {
    fs::path dir = work_dir() / "sim";
    fs::remove_all(dir);
    fs::path log = work_dir() / "sim.log";
    int code = run_cli("simulate --system example1-double --x0 0,0,0 --duration 50 --out " +
                           dir.string(),
                       log);
    CHECK(code == 0);
    std::string csv = slurp(dir / "trajectory.csv");
    std::size_t rows = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
    CHECK(rows == 5002);  // header + 5001 samples
    CHECK(fs::exists(dir / "transitions.csv"));
}

TEST_CASE("cli: input errors exit with 2, numerical failures with 3") {
    fs::path log = work_dir() / "err.log";
    CHECK(run_cli("simulate --system no-such-system --duration 1", log) == 2);
    CHECK(run_cli("simulate --system example1-double --x0 bogus --duration 1", log) == 2);
    CHECK(run_cli("simulate", log) == 2);  // missing required option

    fs::path bad = work_dir() / "bad.json";
    {
        std::ofstream f(bad);
        f << "{\"matrix\": [1,2,3,4]}";
    }
    CHECK(run_cli("simulate --system file:" + bad.string() + " --duration 1", log) == 2);

    // expanding system trips the divergence guard -> exit 3
    fs::path grow = work_dir() / "grow.json";
    {
        nlohmann::json doc = minimal_doc();
        doc["matrix"] = {1, 0, 0, 0, 1, 0, 0, 0, 1};
        std::ofstream f(grow);
        f << doc.dump();
    }
    CHECK(run_cli("simulate --system file:" + grow.string() +
                      " --x0 1,1,1 --duration 40 --out " + (work_dir() / "grow_out").string(),
                  log) == 3);
}

TEST_CASE("cli: analyze produces a reproducible report") {
    fs::path dir = work_dir() / "ana";
    fs::remove_all(dir);
    fs::path log = work_dir() / "ana.log";
    std::string cmd = "analyze --system example1-triple --duration 30 --n 100 --c-count 20 "
                      "--seed 9 --no-lle --out " +
                      dir.string();
    CHECK(run_cli(cmd, log) == 0);
    auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK_FALSE(report.contains("lle"));
    CHECK(report.contains("k_median"));
    CHECK(report["seed"] == 9);
    CHECK(report["tau"] == 0.25);
    CHECK(fs::exists(dir / "kc.csv"));
    std::string first = slurp(dir / "report.json");

    fs::path dir2 = work_dir() / "ana2";
    fs::remove_all(dir2);
    std::string cmd2 = "analyze --system example1-triple --duration 30 --n 100 --c-count 20 "
                       "--seed 9 --no-lle --out " +
                       dir2.string();
    CHECK(run_cli(cmd2, log) == 0);
    CHECK(slurp(dir2 / "report.json") == first);  // byte-identical

    // --no-k drops the 0-1 test artifacts
    fs::path dir3 = work_dir() / "ana3";
    fs::remove_all(dir3);
    CHECK(run_cli("analyze --system example1-double --duration 20 --no-k --no-lle --out " +
                      dir3.string(),
                  log) == 0);
    auto report3 = nlohmann::json::parse(slurp(dir3 / "report.json"));
    CHECK_FALSE(report3.contains("k_median"));
    CHECK_FALSE(fs::exists(dir3 / "kc.csv"));
}

TEST_CASE("cli: SCROLLFORGE_OUT supplies the default output directory") {
    fs::path dir = work_dir() / "env_out";
    fs::remove_all(dir);
    fs::path log = work_dir() / "env.log";
    std::string cmd = "SCROLLFORGE_OUT=" + dir.string() + " " + SCROLLFORGE_CLI_PATH +
                      " simulate --system example1-double --duration 1 > " + log.string() +
                      " 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(fs::exists(dir / "trajectory.csv"));
}

TEST_CASE("cli: verify reports the equilibrium verdict") {
    fs::path log = work_dir() / "verify.log";
    CHECK(run_cli("verify --system example1-double", log) == 0);
    CHECK(slurp(log).find("equilibrium-free: yes") != std::string::npos);

    fs::path contracting = work_dir() / "contracting.json";
    {
        std::ofstream f(contracting);
        f << minimal_doc().dump();
    }
    CHECK(run_cli("verify --system file:" + contracting.string(), log) == 0);
    CHECK(slurp(log).find("equilibrium-free: no") != std::string::npos);
}
