#ifndef IGFL_CLIENT_OPT_HPP
#define IGFL_CLIENT_OPT_HPP

#include <stdexcept>
#include <utility>
#include <vector>

#include "igfl/models.hpp"
#include "igfl/param_vector.hpp"

namespace igfl {

// Raised when a local trajectory produces non-finite values. The engine
// wraps it with round/client context.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Per-client persistent memory across rounds.
struct ClientState {
    ParamVector last_update;      // delta from the client's last participation
    ParamVector control_variate;  // SCAFFOLD c_i; zero otherwise
    long last_round_seen = -1;

    static ClientState init(std::size_t param_len) {
        return ClientState{zeros(param_len), zeros(param_len), -1};
    }
};

// Everything a client needs for one round of local training.
struct ClientRoundInput {
    const ParamVector* global_params = nullptr;  // broadcast w
    const ParamVector* global_delta = nullptr;   // server's previous applied step
    std::size_t sample_count = 1;                // |S| this round
    double lr = 0.0;
    const std::vector<Batch>* batches = nullptr;  // one per local step, length T
    // Test hook: drop the group-correction term entirely, reducing the
    // corrected routine to plain local SGD.
    bool disable_correction = false;
};

// Plain local SGD: T steps of w -= lr * g(w); returns the parameter delta.
ParamVector local_sgd_round(const ClientRoundInput& in, const LossModel& model);

// Corrected local update: each step moves by the local gradient step plus a
// group term built from the client's previous delta and the server's
// previous step, both amortized over T.
ParamVector igfl_client_round(const ClientRoundInput& in, const ClientState& state,
                              const LossModel& model);

// SCAFFOLD baseline (option II control update). Returns the parameter delta
// and the change to the client's control variate.
std::pair<ParamVector, ParamVector> scaffold_client_round(const ClientRoundInput& in,
                                                          const ClientState& state,
                                                          const ParamVector& server_control,
                                                          const LossModel& model);

}  // namespace igfl

#endif
