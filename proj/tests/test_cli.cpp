#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dcnet/model.hpp"
#include "test_support.hpp"

#ifndef DCNET_CLI_PATH
#error "DCNET_CLI_PATH must point at the built binary"
#endif

namespace {

struct RunResult {
    int code;
    std::string out;
};

RunResult run_cli(const std::string& args, const std::filesystem::path& dir) {
    const auto out_file = dir / "stdout.txt";
    std::ostringstream cmd;
    cmd << '"' << DCNET_CLI_PATH << "\" " << args << " > \"" << out_file.string()
        << "\" 2> \"" << (dir / "stderr.txt").string() << '"';
    const int raw = std::system(cmd.str().c_str());
    RunResult r;
    r.code = WEXITSTATUS(raw);
    r.out = testsup::read_file(out_file);
    return r;
}

std::string small_dataset(const testsup::TempDir& tmp) {
    // 6 samples, d = 2, label first
    const auto p = tmp.file("toy.tsv");
    testsup::write_file(p,
                        "1.0\t0.4\t0.1\n0.0\t-0.3\t0.8\n1.0\t0.9\t-0.2\n"
                        "0.0\t-0.7\t-0.5\n1.0\t0.2\t0.6\n0.0\t0.1\t-0.9\n");
    return p.string();
}

}  // namespace

TEST_CASE("train writes artifacts and exits 0", "[cli]") {
    testsup::TempDir tmp;
    const std::string data = small_dataset(tmp);
    const auto out = tmp.file("run1");
    const RunResult r = run_cli("train --data \"" + data +
                                    "\" --loss uniform --activation relu --pairs 1 "
                                    "--engine dca --seed 7 --out \"" +
                                    out.string() + "\"",
                                tmp.path());
    CHECK(r.code == 0);
    CHECK(std::filesystem::exists(out / "weights.txt"));
    CHECK(std::filesystem::exists(out / "trace.csv"));
    CHECK(std::filesystem::exists(out / "summary.csv"));
    // summary line: engine,loss,activation,pairs,final_objective,status,wall_ms
    std::istringstream is(r.out);
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line.rfind("dca,uniform,relu,1,", 0) == 0);
}

TEST_CASE("leaky activation with alpha parses", "[cli]") {
    testsup::TempDir tmp;
    const std::string data = small_dataset(tmp);
    const auto out = tmp.file("run2");
    const RunResult r = run_cli("train --data \"" + data +
                                    "\" --loss l1 --activation leaky:0.01 --pairs 1 "
                                    "--engine adamax --max-iters 50 --seed 3 --out \"" +
                                    out.string() + "\"",
                                tmp.path());
    CHECK(r.code == 0);
    CHECK(r.out.find("leaky:0.01") != std::string::npos);
    CHECK(std::filesystem::exists(out / "curve.csv"));
}

TEST_CASE("unknown flags exit 1 with usage", "[cli]") {
    testsup::TempDir tmp;
    const RunResult r = run_cli("train --data synthetic:phi1 --what", tmp.path());
    CHECK(r.code == 1);
    const RunResult r2 = run_cli("nonsense", tmp.path());
    CHECK(r2.code == 1);
}

TEST_CASE("train then eval round-trips the objective", "[cli]") {
    testsup::TempDir tmp;
    const std::string data = small_dataset(tmp);
    const auto out = tmp.file("run3");
    const RunResult train = run_cli("train --data \"" + data +
                                        "\" --loss l1 --activation relu --pairs 2 "
                                        "--engine adam --max-iters 200 --seed 5 --out \"" +
                                    out.string() + "\"",
                                    tmp.path());
    REQUIRE(train.code == 0);
    std::istringstream is(train.out);
    std::string line;
    REQUIRE(std::getline(is, line));
    // final_objective is field 5
    std::vector<std::string> fields;
    std::istringstream fs(line);
    std::string f;
    while (std::getline(fs, f, ',')) fields.push_back(f);
    REQUIRE(fields.size() == 7);
    const double trained = std::stod(fields[4]);

    const RunResult eval = run_cli("eval \"" + (out / "weights.txt").string() + "\" --data \"" +
                                       data + "\" --loss l1",
                                   tmp.path());
    REQUIRE(eval.code == 0);
    const double evaluated = std::stod(eval.out);
    CHECK(std::fabs(trained - evaluated) <= 1.5e-6);  // both go through %.6f
}

TEST_CASE("eval of zero weights on phi2 prints the grid max", "[cli]") {
    testsup::TempDir tmp;
    const auto wpath = tmp.file("zero.weights");
    dcnet::save_weights(wpath.string(), dcnet::Weights(1, 2), dcnet::Activation::relu());
    const RunResult r =
        run_cli("eval \"" + wpath.string() + "\" --data synthetic:phi2 --loss uniform",
                tmp.path());
    REQUIRE(r.code == 0);
    CHECK(r.out.substr(0, 8) == "1.993739");
}

TEST_CASE("eval dimension mismatch exits 1", "[cli]") {
    testsup::TempDir tmp;
    const std::string data = small_dataset(tmp);  // d = 2
    const auto wpath = tmp.file("wrong.weights");
    dcnet::save_weights(wpath.string(), dcnet::Weights(1, 5), dcnet::Activation::relu());
    const RunResult r =
        run_cli("eval \"" + wpath.string() + "\" --data \"" + data + "\" --loss uniform",
                tmp.path());
    CHECK(r.code == 1);
}

TEST_CASE("time budget exit code is 2", "[cli]") {
    testsup::TempDir tmp;
    const std::string data = small_dataset(tmp);
    const auto out = tmp.file("run4");
    const RunResult r = run_cli("train --data \"" + data +
                                    "\" --loss uniform --activation relu --pairs 1 "
                                    "--engine dca --seed 7 --time-budget 0 --out \"" +
                                    out.string() + "\"",
                                tmp.path());
    CHECK(r.code == 2);
}

TEST_CASE("table1 covers the grid, honors the budget, and repeats", "[cli]") {
    testsup::TempDir tmp;
    const std::string data = small_dataset(tmp);
    const auto out1 = tmp.file("t1");
    const auto out2 = tmp.file("t2");
    // tiny budget: dca on the 50x50 grids records F; baselines still finish
    const std::string args = "table1 --seed 11 --time-budget 0.01 --jobs 2 --data \"" + data +
                             "\" --out ";
    const RunResult r1 = run_cli(args + "\"" + out1.string() + "\"", tmp.path());
    REQUIRE(r1.code == 0);
    const std::string table = testsup::read_file(out1 / "table.csv");
    CHECK(table.find("dataset,activation,loss,pairs,nn_objective,dca_objective") == 0);
    // 3 datasets x 2 activations x 2 losses x 2 pair counts = 24 data lines
    int lines = -1;
    for (std::size_t pos = 0; pos != std::string::npos; pos = table.find('\n', pos + 1)) ++lines;
    CHECK(lines == 24);
    // phi rows: 8 dca cells per synthetic dataset, all budget-bound
    std::istringstream is(table);
    std::string line;
    std::getline(is, line);
    int phi_f = 0;
    while (std::getline(is, line))
        if (line.rfind("phi", 0) == 0 && line.substr(line.rfind(',') + 1) == "F") ++phi_f;
    CHECK(phi_f == 16);

    const RunResult r2 = run_cli(args + "\"" + out2.string() + "\"", tmp.path());
    REQUIRE(r2.code == 0);
    CHECK(testsup::read_file(out2 / "table.csv") == table);
}
