#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "hjbfem/cli.hpp"
#include "hjbfem/errors.hpp"
#include "hjbfem/format.hpp"
#include "hjbfem/mesh.hpp"
#include "hjbfem/problems.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace hjb;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("hjbfem_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int count_lines(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) ++n;
    return n;
}

std::string run_value(const fs::path& manifest, const std::string& key) {
    std::ifstream in(manifest);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
    }
    return {};
}

}  // namespace

TEST_CASE("shortest round-trip formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5e-7) == "-2.5e-07");
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        CHECK(parse_double(format_double(x)) == x);
    }
    CHECK(parse_double("1.5") == 1.5);
    CHECK_THROWS_AS(parse_double(" 1.5"), InputError);
    CHECK_THROWS_AS(parse_double("1.5x"), InputError);
    CHECK_THROWS_AS(parse_double(""), InputError);
}

TEST_CASE("solve writes the advertised files") {
    const auto dir = scratch("eikonal");
    const auto r = cli({"solve", "--problem", "eikonal", "--refine", "0", "--n-beta", "8", "--out", dir.string(),
                        "--emit", "csv,vtk,diffusion"});
    CHECK(r.code == kExitOk);
    for (const char* f : {"solution.csv", "solution.vtk", "diffusion.csv", "newton.csv", "run.txt"}) {
        CHECK(fs::exists(dir / f));
    }
    CHECK(r.out.find("n_interior") != std::string::npos);
    CHECK(r.out.find("steps") != std::string::npos);
    const int steps = std::stoi(run_value(dir / "run.txt", "n-steps"));
    CHECK(count_lines(dir / "newton.csv") == steps + 1);
}

TEST_CASE("newton.csv has one row per time step") {
    const auto dir = scratch("fullynl");
    const auto r = cli({"solve", "--problem", "fullynl", "--refine", "1", "--n-beta", "8", "--out", dir.string()});
    REQUIRE(r.code == kExitOk);
    const int steps = std::stoi(run_value(dir / "run.txt", "n-steps"));
    CHECK(steps >= 1);
    CHECK(count_lines(dir / "newton.csv") == steps + 1);
    CHECK(fs::exists(dir / "policy.csv"));
}

TEST_CASE("time steps beyond the CFL bound fail with exit 3") {
    const auto dir = scratch("cfl");
    const auto r = cli({"solve", "--problem", "triangle", "--dt-law", "linear", "--dt-ratio", "1e9", "--n-beta", "8",
                        "--out", dir.string()});
    CHECK(r.code == kExitSolver);
    CHECK(r.err.find("CFL") != std::string::npos);
}

TEST_CASE("configuration errors exit 1") {
    CHECK(cli({"study", "--problem", "nonsense"}).code == kExitConfig);
    CHECK(cli({"solve", "--refine", "-1"}).code == kExitConfig);
    CHECK(cli({"solve", "--dt-ratio", "0"}).code == kExitConfig);
    CHECK(cli({"solve", "--dt-ratio", "0.5", "--dt-auto"}).code == kExitConfig);
    CHECK(cli({}).code == kExitConfig);
}

TEST_CASE("config files supply flags and flags override them") {
    const auto dir = scratch("config");
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "# eikonal smoke\nproblem = eikonal\nrefine=0\nn-beta=4\nthreads=3\n";
    }
    const auto r = cli({"solve", "--config", (dir / "run.cfg").string(), "--n-beta", "6", "--out", (dir / "o").string()});
    REQUIRE(r.code == kExitOk);
    CHECK(run_value(dir / "o" / "run.txt", "problem") == "eikonal");
    CHECK(run_value(dir / "o" / "run.txt", "n-beta") == "6");
    CHECK(run_value(dir / "o" / "run.txt", "threads") == "3");
    {
        std::ofstream bad(dir / "bad.cfg");
        bad << "no-such-key=1\n";
    }
    CHECK(cli({"solve", "--config", (dir / "bad.cfg").string()}).code == kExitConfig);
}

TEST_CASE("outputs do not depend on the thread count") {
    const auto dir = scratch("threads");
    for (const char* t : {"1", "3"}) {
        const auto r = cli({"solve", "--problem", "fullynl", "--refine", "1", "--n-beta", "8", "--threads", t, "--out",
                            (dir / t).string()});
        REQUIRE(r.code == kExitOk);
    }
    for (const char* f : {"solution.csv", "newton.csv", "policy.csv", "diffusion.csv"}) {
        CHECK(slurp(dir / "1" / f) == slurp(dir / "3" / f));
    }
}

TEST_CASE("identical configurations give byte-identical output") {
    const auto dir = scratch("repeat");
    for (const char* sub : {"a", "b"}) {
        REQUIRE(cli({"solve", "--problem", "triangle", "--n-beta", "8", "--out", (dir / sub).string()}).code == kExitOk);
    }
    CHECK(slurp(dir / "a" / "solution.csv") == slurp(dir / "b" / "solution.csv"));
    CHECK(!slurp(dir / "a" / "solution.csv").empty());
}

TEST_CASE("triangle study writes errors.csv and rates") {
    const auto dir = scratch("study");
    const auto r = cli({"study", "--problem", "triangle", "--levels", "3", "--n-beta", "8", "--dt-law", "linear",
                        "--out", dir.string()});
    REQUIRE(r.code == kExitOk);
    std::ifstream in(dir / "errors.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "level,n_interior,dx,h,err_l2,err_linf,err_h1");
    std::vector<double> linf;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        REQUIRE(cells.size() == 7);
        linf.push_back(parse_double(cells[5]));
    }
    REQUIRE(linf.size() == 3);
    CHECK(linf[1] < linf[0]);
    CHECK(linf[2] < linf[1]);
    CHECK(r.out.find("rate") != std::string::npos);
}

TEST_CASE("eikonal study writes eikonal.csv") {
    const auto dir = scratch("eikonal_study");
    const auto r = cli({"study", "--problem", "eikonal", "--levels", "2", "--n-beta", "8", "--out", dir.string()});
    REQUIRE(r.code == kExitOk);
    CHECK(count_lines(dir / "eikonal.csv") == 3);
    CHECK(cli({"study", "--problem", "eikonal", "--levels", "1"}).code == kExitConfig);
}

TEST_CASE("mesh subcommands") {
    const auto dir = scratch("mesh");
    write_mesh_file(dir / "tri.mesh2", equilateral_triangle_mesh(3));
    write_mesh_file(dir / "square.mesh2", testing::unit_square_mesh(2));
    {
        std::ofstream bad(dir / "bad.mesh2");
        bad << "mesh2\n3 1\n0 0\n1 0\n";
    }
    CHECK(cli({"mesh", "check-acute", (dir / "tri.mesh2").string()}).code == kExitOk);
    CHECK(cli({"mesh", "check-acute", (dir / "square.mesh2").string()}).code == kExitNotAcute);
    CHECK(cli({"mesh", "info", (dir / "bad.mesh2").string()}).code == kExitMesh);
    CHECK(cli({"mesh", "info", (dir / "missing.mesh2").string()}).code == kExitMesh);

    REQUIRE(cli({"mesh", "refine", (dir / "tri.mesh2").string()}).code == kExitOk);
    REQUIRE(fs::exists(dir / "tri.r1.mesh2"));
    CHECK(read_mesh_file(dir / "tri.r1.mesh2").n_triangles() == 4 * 9);
    const auto info = cli({"mesh", "info", (dir / "tri.r1.mesh2").string()});
    CHECK(info.code == kExitOk);
    CHECK(info.out.find("36") != std::string::npos);

    const auto gen = cli({"mesh", "generate", "lattice", "--side-rows", "10", "--out", (dir / "l.mesh2").string()});
    CHECK(gen.code == kExitOk);
    CHECK(read_mesh_file(dir / "l.mesh2").n_triangles() == lattice_domain(10).n_triangles());
}

TEST_CASE("solve rejects meshes that are not strictly acute") {
    const auto dir = scratch("not_acute");
    write_mesh_file(dir / "square.mesh2", testing::unit_square_mesh(2));
    const auto r = cli({"solve", "--problem", "eikonal", "--mesh", (dir / "square.mesh2").string(), "--out",
                        (dir / "o").string()});
    CHECK(r.code == kExitMesh);
}
