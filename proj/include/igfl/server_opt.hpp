#ifndef IGFL_SERVER_OPT_HPP
#define IGFL_SERVER_OPT_HPP

#include <vector>

#include "igfl/param_vector.hpp"

namespace igfl {

// Query choice for attention aggregation.
enum class AttentionOption { kSelf, kGlobal, kTime };

// One round's worth of client deltas, in ascending client-id order.
struct RoundUpdates {
    std::vector<int> client_ids;
    std::vector<ParamVector> current_deltas;   // this round
    std::vector<ParamVector> previous_deltas;  // last participation; zero if none
};

struct ServerState {
    ParamVector params;
    ParamVector prev_global_delta;  // the step applied last round; zero at r=0
    ParamVector momentum;           // FedAvgM v
    ParamVector adam_m;
    ParamVector adam_v;
    ParamVector scaffold_control;   // global SCAFFOLD c
    long round = 0;

    static ServerState init(ParamVector w0);
};

// Row-stochastic score matrix over the sampled clients.
using AttentionScores = std::vector<std::vector<double>>;

void average_aggregate(ServerState& state, const RoundUpdates& updates);

void fedavgm_aggregate(ServerState& state, const RoundUpdates& updates, double beta);

void fedadam_aggregate(ServerState& state, const RoundUpdates& updates, double beta1,
                       double beta2, double tau, double server_lr);

// Softmax over dot products of a per-option query with the current deltas.
// self: query_i = current delta i; global: the round mean; time: client i's
// previous delta.
AttentionScores attention_scores(const RoundUpdates& updates, AttentionOption option);

// Attention-reweighted aggregation: each client's delta is replaced by its
// score-weighted mixture of all deltas, then the mixtures are averaged.
// force_uniform is a test hook making every row uniform; out_scores, when
// non-null, receives the score matrix actually used.
void igfl_server_aggregate(ServerState& state, const RoundUpdates& updates,
                           AttentionOption option, bool force_uniform = false,
                           AttentionScores* out_scores = nullptr);

}  // namespace igfl

#endif
