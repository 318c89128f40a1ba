// Command-line front end: train one network, evaluate saved weights, or run
// the full benchmark table over the synthetic grids (plus any user-supplied
// delimited datasets).

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dcnet/baseline.hpp"
#include "dcnet/dca.hpp"
#include "dcnet/dataset.hpp"
#include "dcnet/model.hpp"

namespace fs = std::filesystem;
using namespace dcnet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitTimeBudget = 2;

Activation parse_activation(const std::string& s) {
    if (s == "relu") return Activation::relu();
    if (s == "leaky") return Activation::leaky(0.01);
    if (s.rfind("leaky:", 0) == 0) {
        double a;
        if (!parse_double(s.substr(6), a) || !(a > 0.0) || !(a < 1.0))
            throw CLI::ValidationError("--activation", "leaky alpha must be in (0, 1)");
        return Activation::leaky(a);
    }
    throw CLI::ValidationError("--activation", "expected relu or leaky:<alpha>");
}

Norm parse_norm(const std::string& s) {
    if (s == "uniform") return Norm::Uniform;
    if (s == "l1" || s == "manhattan") return Norm::Manhattan;
    throw CLI::ValidationError("--loss", "expected uniform or l1");
}

char sniff_delimiter(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    if (in && std::getline(in, line) && line.find('\t') != std::string::npos) return '\t';
    return ',';
}

Dataset load_source(const std::string& src, bool augment_bias) {
    Dataset ds;
    if (src == "synthetic:phi1") {
        ds = make_grid({50, -1.0, 1.0}, phi1);
        ds.name = "phi1";
    } else if (src == "synthetic:phi2") {
        ds = make_grid({50, -1.0, 1.0}, phi2);
        ds.name = "phi2";
    } else {
        ds = load_delimited(src, sniff_delimiter(src), /*label_first=*/true);
        ds.name = fs::path(src).stem().string();
        std::cerr << "loaded " << src << ": N=" << ds.size() << " d=" << ds.d
                  << " (label-first convention)\n";
    }
    if (augment_bias) ds = ds.with_bias_column();
    return ds;
}

struct CellResult {
    std::string value = "ERR";  // formatted objective, "F", or "ERR"
    double objective = 0.0;
    bool ok = false;
    bool timed_out = false;
};

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

struct TrainOutcome {
    Weights weights;
    double objective = 0.0;
    std::string status;
    bool timed_out = false;
    bool failed = false;
    std::string trace_csv;   // dca only
    std::string curve_csv;   // baselines only
};

TrainOutcome run_engine(const std::string& engine, const Dataset& data, int pairs,
                        const Activation& act, Norm norm, std::uint64_t seed, int max_iters,
                        double eps, double time_budget, double trust_radius) {
    TrainOutcome out;
    if (engine == "dca") {
        DcaConfig cfg;
        cfg.max_iters = max_iters > 0 ? max_iters : 200;
        cfg.eps_objective = eps;
        cfg.time_budget_secs = time_budget;
        cfg.trust_radius = trust_radius;
        cfg.seed = seed;
        const DcaTrace tr = run_dca(data, pairs, act, norm, cfg);
        out.weights = tr.best_weights;
        out.objective = tr.best_p;
        out.status = dca_status_str(tr.status);
        out.timed_out = tr.status == DcaStatus::TimeBudget;
        out.failed = tr.status == DcaStatus::LpFailure;
        std::ostringstream os;
        tr.write_csv(os);
        out.trace_csv = os.str();
        if (out.failed && !tr.note.empty()) std::cerr << "dca: " << tr.note << "\n";
    } else {
        BaselineConfig cfg;
        cfg.optimizer = engine == "adam" ? Optimizer::Adam : Optimizer::Adamax;
        cfg.max_epochs = max_iters > 0 ? max_iters : 5000;
        cfg.seed = seed;
        const auto t0 = std::chrono::steady_clock::now();
        const BaselineResult res = train_baseline(data, pairs, act, norm, cfg);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.weights = res.final_weights;
        out.objective = res.final_loss;
        out.timed_out = secs > time_budget;
        out.status = out.timed_out ? "TimeBudget" : "Completed";
        std::ostringstream os;
        os << "epoch,loss\n";
        for (std::size_t e = 0; e < res.loss_curve.size(); ++e)
            os << e << ',' << format_double(res.loss_curve[e]) << '\n';
        out.curve_csv = os.str();
    }
    return out;
}

int cmd_train(const std::string& data_src, const std::string& loss_name,
              const std::string& act_name, int pairs, const std::string& engine,
              std::uint64_t seed, int max_iters, double eps, double time_budget,
              double trust_radius, const std::string& out_dir, bool augment_bias) {
    const Activation act = parse_activation(act_name);
    const Norm norm = parse_norm(loss_name);
    const Dataset data = load_source(data_src, augment_bias);

    const auto t0 = std::chrono::steady_clock::now();
    const TrainOutcome res = run_engine(engine, data, pairs, act, norm, seed, max_iters, eps,
                                        time_budget, trust_radius);
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    fs::create_directories(out_dir);
    save_weights((fs::path(out_dir) / "weights.txt").string(), res.weights, act);
    if (!res.trace_csv.empty()) {
        std::ofstream tf(fs::path(out_dir) / "trace.csv");
        tf << res.trace_csv;
    }
    if (!res.curve_csv.empty()) {
        std::ofstream cf(fs::path(out_dir) / "curve.csv");
        cf << res.curve_csv;
    }

    std::ostringstream summary;
    summary << engine << ',' << loss_name << ',' << act.str() << ',' << pairs << ','
            << fmt6(res.objective) << ',' << res.status << ',' << format_double(wall_ms);
    std::ofstream sf(fs::path(out_dir) / "summary.csv");
    sf << "engine,loss,activation,pairs,final_objective,status,wall_ms\n"
       << summary.str() << '\n';
    std::cout << summary.str() << '\n';

    if (res.failed) return kExitError;
    if (res.timed_out) return kExitTimeBudget;
    return kExitOk;
}

int cmd_eval(const std::string& weights_file, const std::string& data_src,
             const std::string& loss_name, const std::string& act_name, bool augment_bias) {
    const auto [w, file_act] = load_weights(weights_file);
    const Activation act = act_name.empty() ? file_act : parse_activation(act_name);
    const Norm norm = parse_norm(loss_name);
    const Dataset data = load_source(data_src, augment_bias);
    if (data.d != w.d) {
        std::cerr << "eval: dimension mismatch (weights d=" << w.d << ", data d=" << data.d
                  << ")\n";
        return kExitError;
    }
    std::cout << fmt6(loss(w, act, norm, data)) << '\n';
    return kExitOk;
}

struct Cell {
    std::string dataset;
    Activation act;
    Norm norm;
    int pairs;
    std::string engine;  // "dca" or the norm-matched baseline
};

int cmd_table1(const std::string& out_dir, double budget, std::uint64_t seed, int jobs,
               const std::vector<std::string>& extra_data, double trust_radius,
               bool augment_bias) {
    std::vector<std::pair<std::string, Dataset>> datasets;
    datasets.push_back({"phi1", load_source("synthetic:phi1", augment_bias)});
    datasets.push_back({"phi2", load_source("synthetic:phi2", augment_bias)});
    for (const auto& p : extra_data) {
        Dataset ds = load_source(p, augment_bias);
        datasets.push_back({ds.name, std::move(ds)});
    }

    // fixed grid order: dataset x activation x loss x pairs, engines inline
    std::vector<Cell> cells;
    for (const auto& [name, ds] : datasets)
        for (const Activation act : {Activation::relu(), Activation::leaky(0.01)})
            for (Norm norm : {Norm::Uniform, Norm::Manhattan})
                for (int pairs : {1, 2})
                    for (const char* engine :
                         {norm == Norm::Uniform ? "adamax" : "adam", "dca"})
                        cells.push_back({name, act, norm, pairs, engine});

    fs::create_directories(out_dir);
    std::vector<CellResult> results(cells.size());
    std::atomic<std::size_t> next{0};

    auto dataset_of = [&](const std::string& name) -> const Dataset& {
        for (const auto& [n, ds] : datasets)
            if (n == name) return ds;
        throw std::runtime_error("unknown dataset " + name);
    };

    auto worker = [&] {
        while (true) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= cells.size()) return;
            const Cell& c = cells[idx];
            CellResult& r = results[idx];
            try {
                const std::uint64_t cell_seed = derive_seed(seed, idx);
                const TrainOutcome res =
                    run_engine(c.engine, dataset_of(c.dataset), c.pairs, c.act, c.norm, cell_seed,
                               /*max_iters=*/0, /*eps=*/1e-6, budget, trust_radius);
                if (res.timed_out) {
                    r.value = "F";
                    r.timed_out = true;
                } else if (res.failed) {
                    r.value = "ERR";
                } else {
                    r.objective = res.objective;
                    r.value = fmt6(res.objective);
                    r.ok = true;
                    std::ostringstream fname;
                    fname << c.dataset << '_'
                          << (c.act.kind == ActivationKind::ReLU ? "relu" : "leaky") << '_'
                          << norm_str(c.norm) << '_' << c.pairs << '_' << c.engine << ".weights";
                    save_weights((fs::path(out_dir) / fname.str()).string(), res.weights, c.act);
                }
            } catch (const std::exception& e) {
                std::cerr << "cell " << idx << " failed: " << e.what() << "\n";
                r.value = "ERR";
            }
        }
    };

    const int nthreads = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (int t = 0; t < std::max(1, nthreads); ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::ostringstream table;
    table << "dataset,activation,loss,pairs,nn_objective,dca_objective\n";
    for (std::size_t idx = 0; idx + 1 < cells.size(); idx += 2) {
        const Cell& c = cells[idx];  // baseline first, dca second
        table << c.dataset << ',' << c.act.str() << ',' << norm_str(c.norm) << ',' << c.pairs
              << ',' << results[idx].value << ',' << results[idx + 1].value << '\n';
    }
    std::ofstream tf(fs::path(out_dir) / "table.csv");
    tf << table.str();
    std::cout << table.str();
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"single-hidden-layer network training: DC algorithm with exact LP steps, "
                 "plus Adam/Adamax subgradient baselines"};
    app.require_subcommand(1);

    std::string data_src, loss_name = "uniform", act_name = "relu", engine = "dca";
    std::string out_dir = ".", weights_file;
    int pairs = 1, max_iters = 0, jobs = 0;
    std::uint64_t seed = 0;
    double eps = 1e-6, time_budget = 1800.0, trust_radius = 1e3;
    bool augment_bias = false;
    std::vector<std::string> extra_data;

    auto* train = app.add_subcommand("train", "train one configuration and write artifacts");
    train->add_option("--data", data_src, "path | synthetic:phi1 | synthetic:phi2")->required();
    train->add_option("--loss", loss_name, "uniform | l1");
    train->add_option("--activation", act_name, "relu | leaky:<alpha>");
    train->add_option("--pairs", pairs, "hidden pairs (n)")->check(CLI::PositiveNumber);
    train->add_option("--engine", engine, "dca | adam | adamax")
        ->check(CLI::IsMember({"dca", "adam", "adamax"}));
    train->add_option("--seed", seed, "rng seed");
    train->add_option("--max-iters", max_iters, "dca iterations / baseline epochs");
    train->add_option("--eps", eps, "dca objective-decrease stop");
    train->add_option("--time-budget", time_budget, "seconds before the run counts as F");
    train->add_option("--trust-radius", trust_radius, "weight box for the LP step");
    train->add_option("--out", out_dir, "output directory");
    train->add_flag("--augment-bias", augment_bias, "append a constant-1 feature");

    auto* eval = app.add_subcommand("eval", "evaluate saved weights on a dataset");
    eval->add_option("weights", weights_file, "weights file")->required();
    eval->add_option("--data", data_src, "path | synthetic:phi1 | synthetic:phi2")->required();
    eval->add_option("--loss", loss_name, "uniform | l1");
    std::string eval_act;
    eval->add_option("--activation", eval_act, "override the activation stored in the file");
    eval->add_flag("--augment-bias", augment_bias, "append a constant-1 feature");

    auto* table = app.add_subcommand("table1", "benchmark grid over datasets and settings");
    table->add_option("--out", out_dir, "output directory");
    table->add_option("--time-budget", time_budget, "per-cell budget in seconds");
    table->add_option("--seed", seed, "base seed; per-cell seeds derive from it");
    table->add_option("--jobs", jobs, "worker threads (default: hardware)");
    table->add_option("--data", extra_data, "extra delimited dataset(s), label-first");
    table->add_option("--trust-radius", trust_radius, "weight box for the LP step");
    table->add_flag("--augment-bias", augment_bias, "append a constant-1 feature");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitError : kExitError;
    }

    try {
        if (train->parsed())
            return cmd_train(data_src, loss_name, act_name, pairs, engine, seed, max_iters, eps,
                             time_budget, trust_radius, out_dir, augment_bias);
        if (eval->parsed())
            return cmd_eval(weights_file, data_src, loss_name, eval_act, augment_bias);
        if (table->parsed())
            return cmd_table1(out_dir, time_budget, seed, jobs, extra_data, trust_radius,
                              augment_bias);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
