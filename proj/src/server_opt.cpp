#include "igfl/server_opt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace igfl {

namespace {

void validate(const RoundUpdates& u) {
    if (u.current_deltas.empty()) throw std::invalid_argument("aggregate: empty updates");
    if (u.client_ids.size() != u.current_deltas.size() ||
        u.previous_deltas.size() != u.current_deltas.size())
        throw std::invalid_argument("aggregate: inconsistent update counts");
    const std::size_t len = u.current_deltas[0].size();
    for (const auto& d : u.current_deltas)
        if (d.size() != len) throw std::invalid_argument("aggregate: delta length mismatch");
    for (const auto& d : u.previous_deltas)
        if (d.size() != len) throw std::invalid_argument("aggregate: delta length mismatch");
}

std::vector<double> uniform_coeffs(std::size_t n) {
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

ParamVector round_mean(const RoundUpdates& u) {
    return combine(uniform_coeffs(u.current_deltas.size()), u.current_deltas);
}

void apply_step(ServerState& state, const ParamVector& step) {
    axpy(1.0, step, state.params);
    state.prev_global_delta = step;
    ++state.round;
}

}  // namespace

ServerState ServerState::init(ParamVector w0) {
    ServerState s;
    const std::size_t n = w0.size();
    s.params = std::move(w0);
    s.prev_global_delta = zeros(n);
    s.momentum = zeros(n);
    s.adam_m = zeros(n);
    s.adam_v = zeros(n);
    s.scaffold_control = zeros(n);
    s.round = 0;
    return s;
}

void average_aggregate(ServerState& state, const RoundUpdates& updates) {
    validate(updates);
    apply_step(state, round_mean(updates));
}

void fedavgm_aggregate(ServerState& state, const RoundUpdates& updates, double beta) {
    validate(updates);
    if (!(beta >= 0.0 && beta < 1.0))
        throw std::invalid_argument("fedavgm: beta must be in [0, 1)");
    const ParamVector mean = round_mean(updates);
    for (std::size_t k = 0; k < state.momentum.size(); ++k)
        state.momentum[k] = beta * state.momentum[k] + mean[k];
    apply_step(state, state.momentum);
}

void fedadam_aggregate(ServerState& state, const RoundUpdates& updates, double beta1,
                       double beta2, double tau, double server_lr) {
    validate(updates);
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
        throw std::invalid_argument("fedadam: betas must be in [0, 1)");
    if (!(tau > 0.0)) throw std::invalid_argument("fedadam: tau must be > 0");
    if (!(server_lr > 0.0)) throw std::invalid_argument("fedadam: server_lr must be > 0");

    const ParamVector mean = round_mean(updates);
    ParamVector step(mean.size());
    for (std::size_t k = 0; k < mean.size(); ++k) {
        state.adam_m[k] = beta1 * state.adam_m[k] + (1.0 - beta1) * mean[k];
        state.adam_v[k] = beta2 * state.adam_v[k] + (1.0 - beta2) * mean[k] * mean[k];
        step[k] = server_lr * state.adam_m[k] / (std::sqrt(state.adam_v[k]) + tau);
    }
    apply_step(state, step);
}

AttentionScores attention_scores(const RoundUpdates& updates, AttentionOption option) {
    validate(updates);
    const std::size_t s = updates.current_deltas.size();
    AttentionScores scores(s);

    if (option == AttentionOption::kSelf) {
        for (std::size_t i = 0; i < s; ++i) {
            std::vector<double> raw(s);
            for (std::size_t j = 0; j < s; ++j)
                raw[j] = dot(updates.current_deltas[i], updates.current_deltas[j]);
            scores[i] = softmax_stable(raw);
        }
        return scores;
    }

    // Global and time options share one query row across all clients.
    std::vector<double> raw(s);
    if (option == AttentionOption::kGlobal) {
        // Query is the round mean; by bilinearity its dot with delta j is the
        // mean of the pairwise dots. Summing those in sorted order keeps the
        // scores bit-invariant under client permutation.
        for (std::size_t j = 0; j < s; ++j) {
            std::vector<double> dots(s);
            for (std::size_t i = 0; i < s; ++i)
                dots[i] = dot(updates.current_deltas[i], updates.current_deltas[j]);
            std::sort(dots.begin(), dots.end(), std::greater<double>());
            double sum = 0.0;
            for (double d : dots) sum += d;
            raw[j] = sum / static_cast<double>(s);
        }
    } else {
        // Time: each key is scored against that client's own previous delta,
        // so the score vector is decoupled from the row index.
        for (std::size_t j = 0; j < s; ++j)
            raw[j] = dot(updates.previous_deltas[j], updates.current_deltas[j]);
    }
    const std::vector<double> row = softmax_stable(raw);
    for (std::size_t i = 0; i < s; ++i) scores[i] = row;
    return scores;
}

void igfl_server_aggregate(ServerState& state, const RoundUpdates& updates,
                           AttentionOption option, bool force_uniform,
                           AttentionScores* out_scores) {
    validate(updates);
    const std::size_t s = updates.current_deltas.size();

    AttentionScores scores;
    if (force_uniform) {
        scores.assign(s, uniform_coeffs(s));
    } else {
        scores = attention_scores(updates, option);
    }
    if (out_scores) *out_scores = scores;

    ParamVector step;
    if (force_uniform || option != AttentionOption::kSelf) {
        // All rows identical (uniform, global, or time query): the averaged
        // mixture collapses to a single weighted sum, applied directly.
        step = combine(scores[0], updates.current_deltas);
    } else {
        std::vector<ParamVector> mixed(s);
        for (std::size_t i = 0; i < s; ++i)
            mixed[i] = combine(scores[i], updates.current_deltas);
        step = combine(uniform_coeffs(s), mixed);
    }
    apply_step(state, step);
}

}  // namespace igfl
