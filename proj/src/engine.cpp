#include "igfl/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "igfl/rng.hpp"

namespace igfl {

std::vector<int> sample_clients(int num_clients, double select_rate, long round,
                                std::uint64_t seed) {
    if (num_clients < 1) throw std::invalid_argument("sample_clients: num_clients < 1");
    if (!(select_rate > 0.0 && select_rate <= 1.0))
        throw std::invalid_argument("sample_clients: select_rate must be in (0, 1]");

    const long want = std::max<long>(1, std::lround(select_rate * num_clients));
    std::vector<int> ids(num_clients);
    std::iota(ids.begin(), ids.end(), 0);
    std::mt19937_64 rng = make_engine({seed, stream::kSampling, std::uint64_t(round)});
    // Partial Fisher-Yates: the first `want` entries form the sample.
    for (long k = 0; k < want; ++k) {
        std::uniform_int_distribution<long> pick(k, num_clients - 1);
        std::swap(ids[k], ids[pick(rng)]);
    }
    ids.resize(want);
    std::sort(ids.begin(), ids.end());
    return ids;
}

double drift_metric(const std::vector<ParamVector>& client_finals,
                    const ParamVector& global_params) {
    if (client_finals.empty()) throw std::invalid_argument("drift_metric: empty list");
    double total = 0.0;
    for (const auto& w : client_finals) {
        if (w.size() != global_params.size())
            throw std::invalid_argument("drift_metric: length mismatch");
        double s = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) {
            const double d = w[k] - global_params[k];
            s += d * d;
        }
        total += std::sqrt(s);
    }
    return total / static_cast<double>(client_finals.size());
}

namespace {

std::vector<Batch> batches_for(const FederatedProblem& prob, const RunConfig& cfg,
                               int client, long round) {
    if (prob.train) {
        return epoch_batches(*prob.train, prob.partition.client_indices[client],
                             cfg.batch_size, cfg.epochs,
                             seed_combine({cfg.seed, stream::kBatches,
                                           std::uint64_t(round), std::uint64_t(client)}));
    }
    // Analytic objective: T dummy batches (the model ignores them).
    if (prob.steps_override < 1)
        throw std::invalid_argument("run_round: analytic problem needs steps_override >= 1");
    return std::vector<Batch>(prob.steps_override);
}

double client_data_loss(const FederatedProblem& prob, int client, const ParamVector& w) {
    const LossModel& model = *prob.client_models[client];
    if (!prob.train) return model.loss(w, Batch{});
    return model.loss(w, prob.train->batch(prob.partition.client_indices[client]));
}

}  // namespace

RoundOutcome run_round(const RunConfig& cfg, const FederatedProblem& prob,
                       ServerState& server, std::vector<ClientState>& clients,
                       long round, bool collect_scores) {
    if (prob.client_models.size() != std::size_t(cfg.clients) ||
        clients.size() != std::size_t(cfg.clients))
        throw std::invalid_argument("run_round: client count mismatch");

    RoundOutcome out;
    out.sampled = sample_clients(cfg.clients, cfg.select_rate, round, cfg.seed);
    const std::size_t s = out.sampled.size();

    // Loss of the broadcast parameters on the sampled clients' data.
    double loss_sum = 0.0;
    for (int id : out.sampled) loss_sum += client_data_loss(prob, id, server.params);
    out.train_loss = loss_sum / static_cast<double>(s);

    RoundUpdates updates;
    updates.client_ids = out.sampled;
    updates.current_deltas.reserve(s);
    updates.previous_deltas.reserve(s);
    std::vector<ParamVector> scaffold_control_deltas;
    std::vector<ParamVector> finals;
    finals.reserve(s);

    for (int id : out.sampled) {
        const LossModel& model = *prob.client_models[id];
        const std::vector<Batch> batches = batches_for(prob, cfg, id, round);
        ClientRoundInput in;
        in.global_params = &server.params;
        in.global_delta = &server.prev_global_delta;
        in.sample_count = s;
        in.lr = cfg.client_lr;
        in.batches = &batches;

        ParamVector delta;
        try {
            switch (cfg.algorithm) {
                case Algorithm::kFedAvg:
                case Algorithm::kFedAvgM:
                case Algorithm::kFedAdam:
                case Algorithm::kIgflS:
                    delta = local_sgd_round(in, model);
                    break;
                case Algorithm::kScaffold: {
                    auto [d, cd] =
                        scaffold_client_round(in, clients[id], server.scaffold_control, model);
                    delta = std::move(d);
                    scaffold_control_deltas.push_back(std::move(cd));
                    break;
                }
                case Algorithm::kIgflC:
                case Algorithm::kIgfl:
                    in.disable_correction = cfg.zero_client_correction;
                    delta = igfl_client_round(in, clients[id], model);
                    break;
            }
        } catch (const DivergenceError& e) {
            throw DivergenceError("round " + std::to_string(round) + ", client " +
                                  std::to_string(id) + ": " + e.what());
        }

        updates.previous_deltas.push_back(clients[id].last_update);
        ParamVector final_w = server.params;
        axpy(1.0, delta, final_w);
        finals.push_back(std::move(final_w));
        updates.current_deltas.push_back(std::move(delta));
    }

    out.drift = drift_metric(finals, server.params);

    // Persist state for sampled clients only.
    for (std::size_t j = 0; j < s; ++j) {
        ClientState& st = clients[out.sampled[j]];
        st.last_update = updates.current_deltas[j];
        st.last_round_seen = round;
    }
    if (cfg.algorithm == Algorithm::kScaffold) {
        // c <- c + (1/P) * sum of control changes.
        for (std::size_t j = 0; j < s; ++j) {
            ClientState& st = clients[out.sampled[j]];
            axpy(1.0, scaffold_control_deltas[j], st.control_variate);
            axpy(1.0 / cfg.clients, scaffold_control_deltas[j], server.scaffold_control);
        }
    }

    switch (cfg.algorithm) {
        case Algorithm::kFedAvg:
        case Algorithm::kScaffold:
        case Algorithm::kIgflC:
            average_aggregate(server, updates);
            break;
        case Algorithm::kFedAvgM:
            fedavgm_aggregate(server, updates, cfg.beta);
            break;
        case Algorithm::kFedAdam:
            fedadam_aggregate(server, updates, cfg.beta1, cfg.beta2, cfg.tau, cfg.server_lr);
            break;
        case Algorithm::kIgflS:
        case Algorithm::kIgfl:
            igfl_server_aggregate(server, updates, cfg.attention, cfg.force_uniform_attention,
                                  collect_scores ? &out.scores : nullptr);
            break;
    }
    return out;
}

TrainResult run_training(const RunConfig& cfg, const FederatedProblem& prob,
                         const ParamVector& w0) {
    TrainResult result;
    result.server = ServerState::init(w0);
    std::vector<ClientState> clients(cfg.clients, ClientState::init(w0.size()));

    const bool collect = cfg.collect_attention &&
                         (cfg.algorithm == Algorithm::kIgflS || cfg.algorithm == Algorithm::kIgfl);
    AttentionScores score_sum;
    long score_rounds = 0;

    Batch test_batch;
    const bool classify = prob.test != nullptr && prob.client_models[0]->is_classifier();
    if (classify) test_batch = prob.test->full();

    const auto start = std::chrono::steady_clock::now();
    for (long r = 0; r < cfg.rounds; ++r) {
        RoundOutcome outcome;
        try {
            outcome = run_round(cfg, prob, result.server, clients, r, collect);
        } catch (const DivergenceError& e) {
            result.diverged = true;
            result.message = e.what();
            break;
        }
        if (collect && !outcome.scores.empty()) {
            if (score_sum.empty())
                score_sum.assign(outcome.scores.size(),
                                 std::vector<double>(outcome.scores.size(), 0.0));
            if (score_sum.size() == outcome.scores.size()) {
                for (std::size_t i = 0; i < score_sum.size(); ++i)
                    for (std::size_t j = 0; j < score_sum.size(); ++j)
                        score_sum[i][j] += outcome.scores[i][j];
                ++score_rounds;
            }
        }
        result.final_drift = outcome.drift;
        if ((r + 1) % cfg.eval_every == 0) {
            RoundMetrics m;
            m.round = r + 1;
            m.train_loss = outcome.train_loss;
            m.drift = outcome.drift;
            m.sampled = outcome.sampled;
            m.test_accuracy = classify ? predict_accuracy(*prob.client_models[0],
                                                          result.server.params, test_batch)
                                       : 0.0;
            m.elapsed_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - start)
                               .count();
            result.metrics.push_back(std::move(m));
        }
    }

    if (!result.metrics.empty()) {
        const std::size_t window =
            std::min(result.metrics.size(), std::size_t((cfg.rounds + 9) / 10));
        double acc = 0.0;
        for (std::size_t k = result.metrics.size() - window; k < result.metrics.size(); ++k)
            acc += result.metrics[k].test_accuracy;
        result.summary_accuracy = acc / static_cast<double>(window);
    }

    if (score_rounds > 0) {
        result.mean_scores = score_sum;
        for (auto& row : result.mean_scores)
            for (double& v : row) v /= static_cast<double>(score_rounds);
    }
    return result;
}

double matching_rate(const AttentionScores& mean_scores,
                     const std::vector<std::vector<int>>& labels_per_client) {
    const std::size_t p = mean_scores.size();
    if (p < 2 || labels_per_client.size() != p)
        throw std::invalid_argument("matching_rate: need >= 2 clients with labels");

    std::vector<double> off_diag;
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            if (i != j) off_diag.push_back(mean_scores[i][j]);
    std::vector<double> sorted = off_diag;
    std::sort(sorted.begin(), sorted.end());
    const double median = (sorted[(sorted.size() - 1) / 2] + sorted[sorted.size() / 2]) / 2.0;

    auto share_label = [&](std::size_t a, std::size_t b) {
        for (int la : labels_per_client[a])
            for (int lb : labels_per_client[b])
                if (la == lb) return true;
        return false;
    };

    std::size_t pairs = 0, matched = 0;
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i + 1; j < p; ++j) {
            if (!share_label(i, j)) continue;
            ++pairs;
            const double score = 0.5 * (mean_scores[i][j] + mean_scores[j][i]);
            if (score > median) ++matched;
        }
    }
    if (pairs == 0) return 0.0;
    return static_cast<double>(matched) / static_cast<double>(pairs);
}

HeatmapResult attention_heatmap(const RunConfig& cfg, const FederatedProblem& prob,
                                const ParamVector& w0) {
    if (cfg.attention != AttentionOption::kSelf)
        throw std::invalid_argument("attention_heatmap: requires self-attention");
    if (cfg.algorithm != Algorithm::kIgflS && cfg.algorithm != Algorithm::kIgfl)
        throw std::invalid_argument("attention_heatmap: requires an attention-aggregating "
                                    "algorithm (igfl or igfl_s)");
    if (cfg.select_rate != 1.0)
        throw std::invalid_argument("attention_heatmap: requires full participation");
    if (!prob.train)
        throw std::invalid_argument("attention_heatmap: requires a data-backed population");

    RunConfig run_cfg = cfg;
    run_cfg.collect_attention = true;
    TrainResult result = run_training(run_cfg, prob, w0);
    if (result.mean_scores.empty())
        throw std::runtime_error("attention_heatmap: no attention scores collected");

    HeatmapResult out;
    out.mean_scores = result.mean_scores;
    out.train = std::move(result);

    std::vector<std::vector<int>> labels(cfg.clients);
    for (int c = 0; c < cfg.clients; ++c)
        labels[c] = distinct_labels(*prob.train, prob.partition.client_indices[c]);
    out.matching_rate = matching_rate(out.mean_scores, labels);

    // Rows whose strongest off-diagonal weight points at a same-label client.
    std::size_t top_hits = 0;
    const std::size_t p = out.mean_scores.size();
    for (std::size_t i = 0; i < p; ++i) {
        std::size_t best = (i == 0) ? 1 : 0;
        for (std::size_t j = 0; j < p; ++j)
            if (j != i && out.mean_scores[i][j] > out.mean_scores[i][best]) best = j;
        bool shares = false;
        for (int la : labels[i])
            for (int lb : labels[best])
                if (la == lb) shares = true;
        if (shares) ++top_hits;
    }
    out.paired_top_rate = static_cast<double>(top_hits) / static_cast<double>(p);
    return out;
}

}  // namespace igfl
