// Input parsing, deterministic formatting, and the command-line front end.
// The CLI binary and the sample-data directory are baked in at compile time
// by the build; every subprocess check goes through run_cli below.

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "cpdex/io.hpp"
#include "cpdex/potential.hpp"
#include "cpdex/version.hpp"

using namespace cpdex;

namespace {

std::filesystem::path temp_root() {
    static const std::filesystem::path root = [] {
        const auto p = std::filesystem::temp_directory_path() /
                       ("cpdex_cli_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(p);
        return p;
    }();
    return root;
}

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = temp_root() / name;
    std::ofstream f(path);
    f << content;
    return path.string();
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const auto out_path = temp_root() / ("out" + std::to_string(counter) + ".txt");
    const auto err_path = temp_root() / ("err" + std::to_string(counter) + ".txt");
    ++counter;
    const std::string cmd = std::string(CPDEX_CLI_PATH) + " " + args + " > " +
                            out_path.string() + " 2> " + err_path.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    if (status != -1 && WIFEXITED(status)) r.code = WEXITSTATUS(status);
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

std::string data_file(const std::string& name) {
    return std::string(CPDEX_DATA_DIR) + "/" + name;
}

// Data rows of a CSV body: comment and header lines skipped, fields split on
// commas.
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        rows.push_back(fields);
    }
    return rows;
}

}  // namespace

TEST_CASE("numbers cross the file boundary at twelve significant digits") {
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(0.125) == "0.125");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(1e-30) == "1e-30");
    CHECK(round_trip_12(1.0 / 3.0) == Catch::Approx(1.0 / 3.0).epsilon(1e-11));
    // the rounded value re-formats to the same text
    const double r = round_trip_12(0.0667425313655);
    CHECK(format_number(r) == "0.0667425313655");
}

TEST_CASE("the configuration fingerprint matches the published test vectors") {
    CHECK(hex_digest(fnv1a64("")) == "cbf29ce484222325");
    CHECK(hex_digest(fnv1a64("a")) == "af63dc4c8601ec8c");
    CHECK(hex_digest(fnv1a64("foobar")) == "85944171f73967e8");
}

TEST_CASE("particle files parse into the response model") {
    const json iso = json::parse(R"({"model":"static",
        "alpha0":[[0.1,0,0],[0,0.1,0],[0,0,0.1]]})");
    const Polarizability p = parse_atom(iso);
    CHECK(p.model == Polarizability::Model::fixed);
    CHECK(p.alpha0(0, 0) == 0.1);
    CHECK(p.alpha0(0, 1) == 0.0);

    const json two = json::parse(R"({"model":"two_state",
        "alpha0":[[0.1,0,0],[0,0.1,0],[0,0,0.1]],"resonance_length":0.7})");
    const Polarizability t = parse_atom(two);
    CHECK(t.model == Polarizability::Model::two_state);
    CHECK(t.resonance_length == 0.7);
    CHECK(t.at(10.0)(2, 2) == Catch::Approx(0.1 / 50.0).epsilon(1e-12));

    CHECK_THROWS_AS(parse_atom(json::parse(R"({"model":"plasma",
        "alpha0":[[1,0,0],[0,1,0],[0,0,1]]})")),
                    InputError);
    CHECK_THROWS_AS(parse_atom(json::parse(R"({"model":"static"})")), InputError);
    CHECK_THROWS_AS(parse_atom(json::parse(R"({"model":"static",
        "alpha0":[[1,0,0],[0,1,0]]})")),
                    InputError);
    CHECK_THROWS_AS(parse_atom(json::parse(R"({"model":"two_state",
        "alpha0":[[1,0,0],[0,1,0],[0,0,1]]})")),
                    InputError);
    // asymmetric tensors are rejected by the domain validator
    CHECK_THROWS_AS(parse_atom(json::parse(R"({"model":"static",
        "alpha0":[[1,0.5,0],[0,1,0],[0,0,1]]})")),
                    std::invalid_argument);
}

TEST_CASE("surface files parse into every family") {
    const SurfaceSpec sphere =
        parse_surface(json::parse(R"({"family":"sphere","units":"d","radius":10})"));
    CHECK(sphere.lengths_in_d);
    CHECK(std::get<Sphere>(sphere.shape).radius == 10.0);

    const SurfaceSpec wave = parse_surface(json::parse(
        R"({"family":"sinusoid","units":"absolute","amplitude":0.05,"wavelength":6.28})"));
    CHECK_FALSE(wave.lengths_in_d);

    const SurfaceSpec saddle = parse_surface(json::parse(
        R"({"family":"polynomial","coefficients":[[2,0,0.05],[0,2,-0.02]]})"));
    CHECK(std::get<Polynomial>(saddle.shape).c[2][0] == 0.05);

    json grid;
    grid["family"] = "grid";
    grid["spacing"] = 0.1;
    grid["nx"] = 7;
    grid["ny"] = 7;
    grid["heights"] = std::vector<double>(49, 0.0);
    CHECK(std::holds_alternative<Grid>(parse_surface(grid).shape));
    grid["heights"] = std::vector<double>(48, 0.0);
    CHECK_THROWS_AS(parse_surface(grid), std::invalid_argument);

    CHECK_THROWS_AS(parse_surface(json::parse(R"({"family":"cone","radius":1})")),
                    InputError);
    CHECK_THROWS_AS(
        parse_surface(json::parse(R"({"family":"sphere","units":"m","radius":1})")),
        InputError);
    CHECK_THROWS_AS(parse_surface(json::parse(
                        R"({"family":"polynomial","coefficients":[[3,2,0.1]]})")),
                    InputError);
    CHECK_THROWS_AS(parse_surface(json::parse(R"({"family":"sphere","radius":-1})")),
                    std::invalid_argument);
}

TEST_CASE("separation-unit surfaces keep their reduced geometry at every distance") {
    const SurfaceSpec sphere =
        parse_surface(json::parse(R"({"family":"sphere","units":"d","radius":10})"));
    const SurfaceJet j1 = surface_jet(realize(sphere, 1.0)).reduced();
    const SurfaceJet j2 = surface_jet(realize(sphere, 2.0)).reduced();
    CHECK(surface_jet(realize(sphere, 2.0)).d == Catch::Approx(2.0).margin(1e-12));
    CHECK(j1.hxx == Catch::Approx(0.1).margin(1e-12));
    CHECK(j2.hxx == Catch::Approx(j1.hxx).margin(1e-13));
    CHECK(j2.hxxxx == Catch::Approx(j1.hxxxx).margin(1e-12));

    // polynomial coefficients carry length dimension 1 - m - n
    const SurfaceSpec saddle = parse_surface(json::parse(
        R"({"family":"polynomial","units":"d","coefficients":[[2,0,0.05],[0,2,-0.02]]})"));
    const SurfaceJet s1 = surface_jet(realize(saddle, 1.0)).reduced();
    const SurfaceJet s3 = surface_jet(realize(saddle, 3.0)).reduced();
    CHECK(s1.hxx == Catch::Approx(0.1).margin(1e-12));
    CHECK(s1.hyy == Catch::Approx(-0.04).margin(1e-12));
    CHECK(s3.hxx == Catch::Approx(s1.hxx).margin(1e-12));

    // absolute surfaces do not: the reduced curvature grows with separation
    const SurfaceSpec wave = parse_surface(json::parse(
        R"({"family":"sinusoid","units":"absolute","amplitude":0.05,"wavelength":6.2831853071795862})"));
    const SurfaceJet w1 = surface_jet(realize(wave, 1.0)).reduced();
    const SurfaceJet w2 = surface_jet(realize(wave, 2.0)).reduced();
    CHECK(w2.hxx == Catch::Approx(2.0 * w1.hxx).epsilon(1e-10));
}

TEST_CASE("constants files fall back to the standard values") {
    const Constants defaults = parse_constants(json::parse("{}"));
    CHECK(defaults.hbar == Catch::Approx(1.054571817e-34));
    CHECK(defaults.c == 299792458.0);
    const Constants custom = parse_constants(json::parse(R"({"hbar":1,"c":2,"k_B":3})"));
    CHECK(custom.hbar == 1.0);
    CHECK(custom.k_B == 3.0);
    CHECK_THROWS_AS(parse_constants(json::parse(R"({"c":-1})")), InputError);
}

TEST_CASE("the table command emits the static row as published") {
    const RunResult r = run_cli("betas --xi 0 --pq 0,1");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# cpdex 0.1.0\n") != std::string::npos);
    CHECK(r.out.find("# config ") != std::string::npos);
    CHECK(r.out.find("p,q,xi,beta,exp_part,ei_part,provenance\n") != std::string::npos);
    CHECK(r.out.find("0,1,0,0.125,0.125,0,verbatim\n") != std::string::npos);
}

TEST_CASE("the table command rejects an unknown row filter") {
    const RunResult r = run_cli("betas --xi 0.5 --pq 9,9");
    CHECK(r.code == 3);
    CHECK(r.err.find("names no table row") != std::string::npos);
}

TEST_CASE("table output is byte-identical across runs and output targets") {
    const RunResult a = run_cli("betas --xi 0.1,0.7,2.5");
    const RunResult b = run_cli("betas --xi 0.1,0.7,2.5");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);

    const auto path = temp_root() / "betas_out.csv";
    const RunResult c = run_cli("betas --xi 0.1,0.7,2.5 --out " + path.string());
    REQUIRE(c.code == 0);
    CHECK(slurp(path) == a.out);
}

TEST_CASE("the moments report flags exactly the corrupted slot") {
    const RunResult r = run_cli("moments");
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["all_expected"].get<bool>());
    int verbatim_42 = 0, recovered_42 = 0;
    for (const json& row : doc["rows"]) {
        const int p = row["p"].get<int>();
        const int q = row["q"].get<int>();
        const std::string status = row["status"].get<std::string>();
        if (p == 4 && q == 2 && row["variant"] == "verbatim") {
            ++verbatim_42;
            CHECK(status == "known-discrepant");
            CHECK(row["deviation"].get<double>() > 30.0);
        } else if (p == 4 && q == 2) {
            ++recovered_42;
            CHECK(row["variant"] == "recovered");
            CHECK(status == "pass");
            CHECK(row["deviation"].get<double>() < 1e-12);
        } else {
            CHECK(status == "pass");
        }
    }
    CHECK(verbatim_42 == 1);
    CHECK(recovered_42 == 1);
}

TEST_CASE("a flat surface in classical mode reproduces the closed form") {
    const RunResult r = run_cli("potential --surface " + data_file("flat.json") +
                                " --atom " + data_file("atom_isotropic.json") +
                                " --mode classical --distance 1,2");
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        REQUIRE(row.size() == 8);
        CHECK(std::stod(row[1]) == Catch::Approx(-0.025).margin(1e-14));
        CHECK(std::stod(row[6]) == 0.0);
        CHECK(std::stod(row[7]) == 0.0);
    }
}

TEST_CASE("the emitted curve matches an in-process evaluation") {
    const RunResult r = run_cli("potential --surface " + data_file("sphere.json") +
                                " --atom " + data_file("atom_isotropic.json") +
                                " --mode retarded --distance 1");
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 1);

    const SurfaceSpec spec =
        parse_surface(parse_json_text(slurp(data_file("sphere.json")), "surface"));
    const SurfaceJet jr = surface_jet(realize(spec, 1.0)).reduced();
    const PotentialResult want =
        potential_retarded(jr, Mat3::diagonal(0.1, 0.1, 0.1));
    CHECK(std::stod(rows[0][1]) == Catch::Approx(want.total).epsilon(1e-11));
    CHECK(std::stod(rows[0][2]) == Catch::Approx(want.flat).epsilon(1e-11));
    CHECK(std::stod(rows[0][6]) == Catch::Approx(0.1).margin(1e-12));
}

TEST_CASE("zero-temperature integration agrees with the closed form through the CLI") {
    const std::string base = "potential --surface " + data_file("sinusoid.json") +
                             " --atom " + data_file("atom_isotropic.json") +
                             " --distance 1";
    const RunResult direct = run_cli(base + " --mode retarded");
    const RunResult integrated = run_cli(base + " --mode t0");
    REQUIRE(direct.code == 0);
    REQUIRE(integrated.code == 0);
    const double a = std::stod(csv_rows(direct.out)[0][1]);
    const double b = std::stod(csv_rows(integrated.out)[0][1]);
    CHECK(b == Catch::Approx(a).epsilon(1e-8));
}

TEST_CASE("a tight separation triggers the warning but not a failure") {
    const std::string surface = write_temp(
        "close_sphere.json", R"({"family":"sphere","units":"d","radius":1.5})");
    const RunResult r = run_cli("potential --surface " + surface + " --atom " +
                                data_file("atom_isotropic.json") +
                                " --mode retarded --distance 1");
    CHECK(r.code == 0);
    CHECK(r.err.find("warning") != std::string::npos);
    CHECK(csv_rows(r.out).size() == 1);
}

TEST_CASE("physical units scale the thermal result by the energy quantum") {
    const RunResult r = run_cli("potential --surface " + data_file("sphere.json") +
                                " --atom " + data_file("atom_isotropic.json") +
                                " --mode classical --distance 1e-6 "
                                "--temperature 300 --constants " +
                                data_file("constants_si.json"));
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 1);

    const SurfaceSpec spec =
        parse_surface(parse_json_text(slurp(data_file("sphere.json")), "surface"));
    const SurfaceJet jr = surface_jet(realize(spec, 1e-6)).reduced();
    const double d3 = 1e-18;
    const Mat3 reduced_alpha = Mat3::diagonal(0.1 / d3, 0.1 / d3, 0.1 / d3);
    const Constants k;
    const double want = potential_classical(jr, reduced_alpha).total * k.k_B * 300.0;
    CHECK(std::stod(rows[0][1]) == Catch::Approx(want).epsilon(1e-11));
}

TEST_CASE("oracle validation at the flat order passes and reports each row") {
    const RunResult r = run_cli("validate-oracle --xi 0,1 --order 0");
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["pass"].get<bool>());
    CHECK(doc["order"].get<int>() == 0);
    REQUIRE(doc["rows"].size() == 4);
    for (const json& row : doc["rows"]) CHECK(row["pass"].get<bool>());
}

TEST_CASE("an unreachable tolerance turns into the validation exit code") {
    const RunResult r = run_cli("validate-oracle --xi 0.5 --order 1 --tol 1e-9");
    CHECK(r.code == 2);
    const json doc = json::parse(r.out);
    CHECK_FALSE(doc["pass"].get<bool>());
}

TEST_CASE("orientation over a cylinder is two-fold periodic in azimuth") {
    const RunResult r = run_cli("orientation --surface " + data_file("cylinder.json") +
                                " --atom " + data_file("atom_uniaxial.json") +
                                " --polar 3 --azimuth 4");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# degenerate 0\n") != std::string::npos);
    CHECK(r.out.find("# argmin ") != std::string::npos);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 12);
    // equator rows: azimuth 0 vs pi and pi/2 vs 3pi/2
    const double e0 = std::stod(rows[4][2]);
    const double e90 = std::stod(rows[5][2]);
    const double e180 = std::stod(rows[6][2]);
    const double e270 = std::stod(rows[7][2]);
    CHECK(e180 == Catch::Approx(e0).margin(1e-10));
    CHECK(e270 == Catch::Approx(e90).margin(1e-10));
    // the stiff axis prefers the curved direction over the translation axis
    CHECK(e0 < e90);
}

TEST_CASE("an isotropic particle yields a degenerate orientation scan") {
    const RunResult r = run_cli("orientation --surface " + data_file("cylinder.json") +
                                " --atom " + data_file("atom_isotropic.json") +
                                " --polar 2 --azimuth 3 --format json");
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["degenerate"].get<bool>());
}

TEST_CASE("input failures exit with the input-error code") {
    CHECK(run_cli("potential --surface /nonexistent.json --atom " +
                  data_file("atom_isotropic.json") + " --mode retarded --distance 1")
              .code == 3);

    const std::string broken = write_temp("broken.json", "{ not json");
    CHECK(run_cli("potential --surface " + broken + " --atom " +
                  data_file("atom_isotropic.json") + " --mode retarded --distance 1")
              .code == 3);

    // frequency-dependent model has no closed-form moment curve
    const RunResult retarded_two_state =
        run_cli("potential --surface " + data_file("sphere.json") + " --atom " +
                data_file("atom_two_state.json") + " --mode retarded --distance 1");
    CHECK(retarded_two_state.code == 3);
    CHECK(retarded_two_state.err.find("t0") != std::string::npos);

    CHECK(run_cli("potential --surface " + data_file("sphere.json") + " --atom " +
                  data_file("atom_isotropic.json") +
                  " --mode finite-t --distance 1")
              .code == 3);
    CHECK(run_cli("potential --surface " + data_file("sphere.json") + " --atom " +
                  data_file("atom_isotropic.json") +
                  " --mode retarded --distance 0,-1")
              .code == 3);
    CHECK(run_cli("betas --xi 0.5 --format yaml").code == 3);
    CHECK(run_cli("nonsense").code == 3);
}

TEST_CASE("the thermal bridge modes run through the front end") {
    // same geometry and tensor: the bridge at a deep resonance approaches
    // the classical value times x coth x ~ x for small temperature
    const std::string base = "potential --surface " + data_file("sphere.json") +
                             " --atom " + data_file("atom_two_state.json") +
                             " --distance 1 --temperature 0.5";
    const RunResult london = run_cli(base + " --mode london");
    const RunResult finite = run_cli(base + " --mode finite-t");
    REQUIRE(london.code == 0);
    REQUIRE(finite.code == 0);
    const double ul = std::stod(csv_rows(london.out)[0][1]);
    const double uf = std::stod(csv_rows(finite.out)[0][1]);
    // both carry the same k_B T / d^3 normalization and the same sign
    CHECK(ul < 0.0);
    CHECK(uf < 0.0);
}
