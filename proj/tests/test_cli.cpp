#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(GCPH_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    char buf[4096];
    while (fgets(buf, sizeof(buf), pipe) != nullptr) res.output += buf;
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / ("gcph_cli_test_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

} // namespace

TEST_CASE("usage errors exit with code 1") {
    CHECK(run("").exit_code == 1);
    CHECK(run("simulate").exit_code == 1);
    CHECK(run("simulate --kind sideways --n 10 --out /tmp/x").exit_code == 1);
    CHECK(run("frobnicate").exit_code == 1);
}

TEST_CASE("simulate writes deterministic artifacts") {
    TempDir dir("sim");
    const std::string flags =
        "simulate --kind linear --n 100 --seed 1 --out " + dir.str() + " --name d";
    CHECK(run(flags).exit_code == 0);
    const auto csv = dir.path / "d.csv";
    const auto manifest = dir.path / "d.manifest.json";
    REQUIRE(fs::exists(csv));
    REQUIRE(fs::exists(manifest));

    const std::string first = slurp(csv);
    CHECK(first.rfind("x1,x2,time,event,truth\n", 0) == 0);
    // 100 data rows + header
    CHECK(std::count(first.begin(), first.end(), '\n') == 101);

    CHECK(run(flags).exit_code == 0);
    CHECK(slurp(csv) == first);

    CHECK(slurp(manifest).find("\"fingerprint\"") != std::string::npos);
}

TEST_CASE("missing input files exit with code 2") {
    TempDir dir("missing");
    CHECK(run("train --data /does/not/exist.csv --out " + dir.str()).exit_code == 2);
    CHECK(run("eval --train /does/not/exist.csv --test /also/missing.csv --oracle --out " +
              dir.str())
              .exit_code == 2);
}

TEST_CASE("train, eval, symbolify, sweep pipeline") {
    TempDir dir("pipe");
    REQUIRE(run("simulate --kind linear --n 400 --seed 3 --out " + dir.str() +
                " --name train_data")
                .exit_code == 0);
    REQUIRE(run("simulate --kind linear --n 150 --seed 4 --out " + dir.str() +
                " --name test_data")
                .exit_code == 0);
    const std::string train_csv = (dir.path / "train_data.csv").string();
    const std::string test_csv = (dir.path / "test_data.csv").string();

    // deterministic training artifacts
    const std::string train_flags = "train --data " + train_csv +
                                    " --steps 150 --seed 9 --linear-only --out " + dir.str();
    auto tr = run(train_flags);
    CHECK(tr.exit_code == 0);
    CHECK(tr.output.find("slope ratio") != std::string::npos);
    const auto model_path = dir.path / "model.json";
    REQUIRE(fs::exists(model_path));
    REQUIRE(fs::exists(dir.path / "model_log.csv"));
    const std::string model_bytes = slurp(model_path);
    CHECK(run(train_flags).exit_code == 0);
    CHECK(slurp(model_path) == model_bytes);

    // multi-seed suffixes
    CHECK(run("train --data " + train_csv + " --steps 60 --seeds 1,2,3 --out " + dir.str() +
              " --name multi")
              .exit_code == 0);
    CHECK(fs::exists(dir.path / "multi_seed1.json"));
    CHECK(fs::exists(dir.path / "multi_seed2.json"));
    CHECK(fs::exists(dir.path / "multi_seed3.json"));

    // eval with model and oracle rows, plus the surface grid
    auto ev = run("eval --model " + model_path.string() + " --train " + train_csv +
                  " --test " + test_csv + " --oracle --surface --surface-points 11 --out " +
                  dir.str());
    CHECK(ev.exit_code == 0);
    REQUIRE(fs::exists(dir.path / "metrics.json"));
    const std::string metrics = slurp(dir.path / "metrics.json");
    CHECK(metrics.find("\"oracle\"") != std::string::npos);
    CHECK(metrics.find("\"summary\"") != std::string::npos);
    CHECK(metrics.find("\"p25\"") != std::string::npos);
    const std::string surface = slurp(dir.path / "metrics_surface.csv");
    CHECK(surface.rfind("x1,x2,f\n", 0) == 0);
    CHECK(std::count(surface.begin(), surface.end(), '\n') == 11 * 11 + 1);

    // symbolify three models onto a shared grid
    auto sy = run("symbolify --model " + (dir.path / "multi_seed1.json").string() + "," +
                  (dir.path / "multi_seed2.json").string() + "," +
                  (dir.path / "multi_seed3.json").string() + " --points 41 --out " +
                  dir.str());
    CHECK(sy.exit_code == 0);
    CHECK(sy.output.find("f =") != std::string::npos);
    const std::string curves = slurp(dir.path / "symbolic_curves.csv");
    CHECK(curves.rfind("feature,x,multi_seed1,multi_seed2,multi_seed3\n", 0) == 0);
    // 2 features x 41 points + header
    CHECK(std::count(curves.begin(), curves.end(), '\n') == 2 * 41 + 1);
    CHECK(slurp(dir.path / "symbolic.json").find("\"legend\"") != std::string::npos);
    CHECK(slurp(dir.path / "symbolic_formula.txt").find("f =") != std::string::npos);

    // sweep: values x seeds x horizons rows, deterministic bytes
    const std::string sweep_flags = "sweep --data " + train_csv +
                                    " --axis order --values 1,2 --seeds 1,2 --steps 40 "
                                    "--out " +
                                    dir.str();
    auto sw = run(sweep_flags);
    CHECK(sw.exit_code == 0);
    const auto sweep_path = dir.path / "sweep.csv";
    const std::string sweep_csv = slurp(sweep_path);
    CHECK(sweep_csv.rfind("axis,axis_value,seed,horizon,c_index,brier,total_l1\n", 0) == 0);
    CHECK(std::count(sweep_csv.begin(), sweep_csv.end(), '\n') == 2 * 2 * 3 + 1);
    CHECK(run(sweep_flags).exit_code == 0);
    CHECK(slurp(sweep_path) == sweep_csv);
}

TEST_CASE("config file fills unset flags") {
    TempDir dir("cfg");
    REQUIRE(run("simulate --kind linear --n 120 --seed 6 --out " + dir.str()).exit_code == 0);
    const std::string data = (dir.path / "dataset.csv").string();

    std::ofstream cfg(dir.path / "cfg.json");
    cfg << R"({"steps": 25, "linear_only": true, "seed": 4})";
    cfg.close();

    CHECK(run("train --data " + data + " --config " + (dir.path / "cfg.json").string() +
              " --out " + dir.str() + " --name from_config")
              .exit_code == 0);
    const std::string log = slurp(dir.path / "from_config_log.csv");
    // 25 steps -> init + 25 logged rows + header
    CHECK(std::count(log.begin(), log.end(), '\n') == 27);

    // explicit flag beats the config file
    CHECK(run("train --data " + data + " --config " + (dir.path / "cfg.json").string() +
              " --steps 5 --out " + dir.str() + " --name flag_wins")
              .exit_code == 0);
    const std::string log2 = slurp(dir.path / "flag_wins_log.csv");
    CHECK(std::count(log2.begin(), log2.end(), '\n') == 7);
}

TEST_CASE("numerical aborts exit with code 3") {
    TempDir dir("numeric");
    REQUIRE(run("simulate --kind linear --n 80 --seed 2 --out " + dir.str()).exit_code == 0);
    const std::string data = (dir.path / "dataset.csv").string();
    const auto res = run("train --data " + data +
                         " --steps 3 --init-coeff-sd 1e308 --out " + dir.str());
    CHECK(res.exit_code == 3);
}
