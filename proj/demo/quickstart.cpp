// Minimal library walkthrough: fit a tiny grid under uniform loss with the
// DC algorithm and compare against an Adamax subgradient run.

#include <iostream>

#include "dcnet/baseline.hpp"
#include "dcnet/dca.hpp"
#include "dcnet/dataset.hpp"

int main() {
    using namespace dcnet;

    const Dataset grid = make_grid({10, -1.0, 1.0}, phi1);
    std::cout << "dataset: " << grid.size() << " points, d = " << grid.d << "\n";

    DcaConfig dca_cfg;
    dca_cfg.seed = 1;
    const DcaTrace trace = run_dca(grid, 2, Activation::relu(), Norm::Uniform, dca_cfg);
    std::cout << "dca:    " << dca_status_str(trace.status) << " after "
              << trace.records.size() - 1 << " iterations, objective " << trace.best_p << "\n";

    BaselineConfig base_cfg;
    base_cfg.optimizer = Optimizer::Adamax;
    base_cfg.seed = 1;
    const BaselineResult res = train_baseline(grid, 2, Activation::relu(), Norm::Uniform, base_cfg);
    std::cout << "adamax: objective " << res.final_loss << " after "
              << res.loss_curve.size() - 1 << " epochs\n";
    return 0;
}
