#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "igfl/engine.hpp"

using namespace igfl;

namespace {

// Heterogeneous quadratic population with an analytic optimum.
struct QuadraticPopulation {
    std::vector<QuadraticModel> models;
    FederatedProblem problem;
    ParamVector optimum;

    QuadraticPopulation(int clients, std::size_t dim, std::uint64_t seed, int steps) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> uc(-2.0, 2.0), ua(0.5, 2.0);
        models.reserve(clients);
        for (int i = 0; i < clients; ++i) {
            ParamVector c(dim), a(dim);
            for (std::size_t k = 0; k < dim; ++k) {
                c[k] = uc(rng);
                a[k] = ua(rng);
            }
            models.emplace_back(c, a);
        }
        std::vector<const QuadraticModel*> ptrs;
        for (const auto& m : models) {
            problem.client_models.push_back(&m);
            ptrs.push_back(&m);
        }
        problem.steps_override = steps;
        optimum = QuadraticModel::average_optimum(ptrs);
    }
};

RunConfig quad_config(int clients, int rounds, double lr) {
    RunConfig cfg;
    cfg.algorithm = Algorithm::kFedAvg;
    cfg.clients = clients;
    cfg.rounds = rounds;
    cfg.select_rate = 1.0;
    cfg.client_lr = lr;
    cfg.seed = 42;
    return cfg;
}

}  // namespace

TEST_CASE("sample_clients size, determinism, and bounds") {
    const auto s = sample_clients(100, 0.1, 3, 7);
    CHECK(s.size() == 10);
    std::set<int> uniq(s.begin(), s.end());
    CHECK(uniq.size() == 10);
    for (int id : s) {
        CHECK(id >= 0);
        CHECK(id < 100);
    }
    CHECK(std::is_sorted(s.begin(), s.end()));
    CHECK(sample_clients(100, 0.1, 3, 7) == s);
    CHECK(sample_clients(100, 0.1, 4, 7) != s);  // fresh draw per round

    const auto all = sample_clients(7, 1.0, 0, 1);
    CHECK(all == std::vector<int>{0, 1, 2, 3, 4, 5, 6});

    CHECK(sample_clients(50, 0.001, 0, 1).size() == 1);  // floor of one client
}

TEST_CASE("drift metric basics") {
    CHECK(drift_metric({{1.0, 2.0}, {1.0, 2.0}}, {1.0, 2.0}) == 0.0);
    // Two clients symmetric about the global point.
    CHECK(drift_metric({{1.0, 0.0}, {-1.0, 0.0}}, {0.0, 0.0}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(drift_metric({}, {1.0}), std::invalid_argument);
}

TEST_CASE("with many local steps FedAvg drift approaches the client-optima spread") {
    // Large T on quadratics drives each client to its own optimum; once the
    // server has settled, drift equals the mean distance from the client
    // centers to the aggregate parameters.
    QuadraticPopulation pop(6, 3, 11, /*steps=*/1500);
    RunConfig cfg = quad_config(6, 200, 0.05);
    const TrainResult result = run_training(cfg, pop.problem, zeros(3));
    REQUIRE(!result.diverged);

    double expected = 0.0;
    for (const auto& m : pop.models) {
        double s = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
            const double d = m.center()[k] - result.server.params[k];
            s += d * d;
        }
        expected += std::sqrt(s);
    }
    expected /= pop.models.size();
    CHECK(result.final_drift == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("fedavg equals the manual local-SGD + averaging composition") {
    QuadraticPopulation pop(4, 2, 5, /*steps=*/3);
    RunConfig cfg = quad_config(4, 10, 0.1);

    const TrainResult engine_run = run_training(cfg, pop.problem, zeros(2));
    REQUIRE(!engine_run.diverged);

    // Reference loop composed by hand from the client/server primitives.
    ServerState server = ServerState::init(zeros(2));
    for (long r = 0; r < cfg.rounds; ++r) {
        RoundUpdates updates;
        const ParamVector broadcast = server.params;
        for (int i = 0; i < 4; ++i) {
            std::vector<Batch> batches(3);
            ClientRoundInput in;
            in.global_params = &broadcast;
            in.global_delta = &server.prev_global_delta;
            in.sample_count = 4;
            in.lr = cfg.client_lr;
            in.batches = &batches;
            updates.client_ids.push_back(i);
            updates.current_deltas.push_back(local_sgd_round(in, *pop.problem.client_models[i]));
            updates.previous_deltas.push_back(zeros(2));
        }
        average_aggregate(server, updates);
    }
    CHECK(engine_run.server.params == server.params);
}

TEST_CASE("round zero broadcasts a zero global delta") {
    // One client, one igfl round: with zero history the per-step move is
    // (1 + 1/|S|) times the local step, which pins the broadcast delta to 0.
    QuadraticPopulation pop(1, 1, 2, /*steps=*/1);
    RunConfig cfg = quad_config(1, 1, 0.1);
    cfg.algorithm = Algorithm::kIgfl;
    cfg.attention = AttentionOption::kSelf;

    ServerState server = ServerState::init({0.0});
    std::vector<ClientState> clients(1, ClientState::init(1));
    run_round(cfg, pop.problem, server, clients, 0);

    const double g0 = pop.models[0].gradient({0.0}, {})[0];
    CHECK(server.params[0] == doctest::Approx(-0.1 * g0 * 2.0).epsilon(1e-14));
}

TEST_CASE("unsampled client state is bitwise unchanged") {
    QuadraticPopulation pop(10, 2, 9, /*steps=*/2);
    RunConfig cfg = quad_config(10, 1, 0.05);
    cfg.algorithm = Algorithm::kIgflC;
    cfg.select_rate = 0.3;

    ServerState server = ServerState::init(zeros(2));
    std::vector<ClientState> clients(10, ClientState::init(2));
    // Seed some history to make staleness observable.
    for (auto& c : clients) c.last_update = {0.5, -0.5};

    const auto outcome = run_round(cfg, pop.problem, server, clients, 0);
    const std::set<int> sampled(outcome.sampled.begin(), outcome.sampled.end());
    CHECK(sampled.size() == 3);
    for (int i = 0; i < 10; ++i) {
        if (sampled.count(i)) {
            CHECK(clients[i].last_round_seen == 0);
            CHECK(clients[i].last_update != ParamVector{0.5, -0.5});
        } else {
            CHECK(clients[i].last_round_seen == -1);
            CHECK(clients[i].last_update == ParamVector{0.5, -0.5});
        }
    }
}

TEST_CASE("equal configs and seeds reproduce identical metric streams") {
    QuadraticPopulation pop(5, 2, 21, /*steps=*/4);
    RunConfig cfg = quad_config(5, 20, 0.05);
    cfg.algorithm = Algorithm::kIgfl;
    cfg.attention = AttentionOption::kTime;
    cfg.select_rate = 0.6;

    const TrainResult a = run_training(cfg, pop.problem, zeros(2));
    const TrainResult b = run_training(cfg, pop.problem, zeros(2));
    REQUIRE(a.metrics.size() == b.metrics.size());
    for (std::size_t k = 0; k < a.metrics.size(); ++k) {
        CHECK(a.metrics[k].train_loss == b.metrics[k].train_loss);
        CHECK(a.metrics[k].drift == b.metrics[k].drift);
        CHECK(a.metrics[k].sampled == b.metrics[k].sampled);
    }
    CHECK(a.server.params == b.server.params);
}

TEST_CASE("summary window covers the last tenth of evaluations") {
    // Synthetic check via an engine run on a tiny classification problem.
    RunConfig cfg;
    cfg.algorithm = Algorithm::kFedAvg;
    cfg.clients = 2;
    cfg.rounds = 10;
    cfg.client_lr = 0.05;
    cfg.batch_size = 10;
    cfg.synth_classes = 2;
    cfg.synth_per_class = 20;
    cfg.synth_dim = 4;
    cfg.synth_test_per_class = 10;
    cfg.model = "logistic";
    cfg.seed = 3;

    const Dataset train = synth_gaussian_mixture(2, 20, 4, 2.0, 1);
    const Dataset test = synth_gaussian_mixture(2, 10, 4, 2.0, 2);
    const LogisticModel model(4, 2);
    FederatedProblem prob;
    prob.train = &train;
    prob.test = &test;
    prob.client_models = {&model, &model};
    prob.partition = sort_and_partition(train, 2, 1);

    const TrainResult r = run_training(cfg, prob, zeros(model.param_count()));
    REQUIRE(r.metrics.size() == 10);
    // ceil(10/10) = 1: summary is exactly the last evaluation.
    CHECK(r.summary_accuracy == r.metrics.back().test_accuracy);
}

TEST_CASE("matching_rate rewards same-label pairs above the median score") {
    // 4 clients; 0 and 1 share a label, 2 and 3 share a label.
    const std::vector<std::vector<int>> labels = {{0, 1}, {1, 2}, {3, 4}, {4, 5}};
    AttentionScores strong = {
        {0.70, 0.20, 0.05, 0.05},
        {0.20, 0.70, 0.05, 0.05},
        {0.05, 0.05, 0.70, 0.20},
        {0.05, 0.05, 0.20, 0.70},
    };
    CHECK(matching_rate(strong, labels) == 1.0);

    AttentionScores inverted = {
        {0.70, 0.05, 0.20, 0.05},
        {0.05, 0.70, 0.05, 0.20},
        {0.20, 0.05, 0.70, 0.05},
        {0.05, 0.20, 0.05, 0.70},
    };
    CHECK(matching_rate(inverted, labels) == 0.0);
}
