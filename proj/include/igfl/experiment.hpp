#ifndef IGFL_EXPERIMENT_HPP
#define IGFL_EXPERIMENT_HPP

#include <memory>
#include <string>
#include <vector>

#include "igfl/engine.hpp"

namespace igfl {

// Owns everything a run needs; problem() exposes the non-owning view the
// engine consumes.
struct ExperimentSetup {
    Dataset train;
    Dataset test;
    std::unique_ptr<LossModel> model;
    Partition partition;
    ParamVector w0;

    FederatedProblem problem(int num_clients) const;
};

ExperimentSetup build_setup(const RunConfig& cfg);

// Runs one experiment, writing metrics.csv, summary.json and (when
// attention collection is on) attention.csv under cfg.out_dir.
// Returns 0 on success, nonzero on divergence or I/O failure.
int run_experiment(const RunConfig& cfg);

// One run per axis value in a subdirectory, plus a combined sweep.csv.
// Failed cells are marked and do not stop the sweep.
int run_sweep(const RunConfig& base, const std::string& axis_key,
              const std::vector<std::string>& values);

// Self-attention heatmap experiment; writes attention.csv and summary.json.
int run_heatmap(const RunConfig& cfg);

// Fixed header: "round,train_loss,test_accuracy,drift,elapsed_ms".
void write_metrics_csv(const std::string& path, const std::vector<RoundMetrics>& metrics);

}  // namespace igfl

#endif
