#ifndef IGFL_ENGINE_HPP
#define IGFL_ENGINE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "igfl/client_opt.hpp"
#include "igfl/config.hpp"
#include "igfl/partition.hpp"
#include "igfl/server_opt.hpp"

namespace igfl {

// A population ready to train: per-client objectives plus (for data-driven
// models) the dataset and partition backing their batch streams. Analytic
// populations leave train null and set steps_override to T.
struct FederatedProblem {
    const Dataset* train = nullptr;
    const Dataset* test = nullptr;
    std::vector<const LossModel*> client_models;  // one entry per client
    Partition partition;                          // empty for analytic populations
    int steps_override = 0;                       // local steps T when train is null
};

// max(1, round(C*P)) distinct ids, uniform without replacement, sorted.
std::vector<int> sample_clients(int num_clients, double select_rate, long round,
                                std::uint64_t seed);

struct RoundMetrics {
    long round = 0;
    double train_loss = 0.0;
    double test_accuracy = 0.0;
    double drift = 0.0;
    double elapsed_ms = 0.0;
    std::vector<int> sampled;
};

struct RoundOutcome {
    double train_loss = 0.0;
    double drift = 0.0;
    std::vector<int> sampled;
    AttentionScores scores;  // filled only when collect_scores is requested
};

// One federated round: sample, local training, state update, aggregation.
RoundOutcome run_round(const RunConfig& cfg, const FederatedProblem& prob,
                       ServerState& server, std::vector<ClientState>& clients,
                       long round, bool collect_scores = false);

struct TrainResult {
    std::vector<RoundMetrics> metrics;  // one row per evaluation
    ServerState server;
    double summary_accuracy = 0.0;  // mean accuracy over the last ceil(R/10) evals
    double final_drift = 0.0;
    bool diverged = false;
    std::string message;
    AttentionScores mean_scores;  // averaged over rounds when collecting
};

TrainResult run_training(const RunConfig& cfg, const FederatedProblem& prob,
                         const ParamVector& w0);

// Mean L2 distance between the clients' final local iterates and the
// broadcast parameters.
double drift_metric(const std::vector<ParamVector>& client_finals,
                    const ParamVector& global_params);

struct HeatmapResult {
    AttentionScores mean_scores;
    double matching_rate = 0.0;
    // Fraction of rows whose top off-diagonal entry is the client's
    // same-label partner (meaningful for paired populations).
    double paired_top_rate = 0.0;
    TrainResult train;
};

// Runs self-attention training collecting scores every round, then checks
// how well high mean scores align with shared labels between clients.
HeatmapResult attention_heatmap(const RunConfig& cfg, const FederatedProblem& prob,
                                const ParamVector& w0);

// Fraction of client pairs sharing a label whose mean off-diagonal score
// exceeds the median off-diagonal score.
double matching_rate(const AttentionScores& mean_scores,
                     const std::vector<std::vector<int>>& labels_per_client);

}  // namespace igfl

#endif
