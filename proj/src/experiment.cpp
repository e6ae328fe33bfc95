#include "igfl/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "igfl/rng.hpp"

namespace igfl {

namespace fs = std::filesystem;
using nlohmann::json;

FederatedProblem ExperimentSetup::problem(int num_clients) const {
    FederatedProblem p;
    p.train = &train;
    p.test = &test;
    p.client_models.assign(num_clients, model.get());
    p.partition = partition;
    return p;
}

ExperimentSetup build_setup(const RunConfig& cfg) {
    validate(cfg);
    ExperimentSetup s;

    if (cfg.dataset == "synth") {
        s.train = synth_gaussian_mixture(cfg.synth_classes, cfg.synth_per_class,
                                         cfg.synth_dim, cfg.synth_separation,
                                         seed_combine({cfg.seed, stream::kTrainData}));
        s.test = synth_gaussian_mixture(cfg.synth_classes, cfg.synth_test_per_class,
                                        cfg.synth_dim, cfg.synth_separation,
                                        seed_combine({cfg.seed, stream::kTestData}));
    } else {
        if (cfg.idx_train_images.empty() || cfg.idx_train_labels.empty() ||
            cfg.idx_test_images.empty() || cfg.idx_test_labels.empty())
            throw std::invalid_argument("dataset=idx requires all four idx_* paths");
        s.train = load_idx(cfg.idx_train_images, cfg.idx_train_labels);
        s.test = load_idx(cfg.idx_test_images, cfg.idx_test_labels);
    }

    if (cfg.model == "logistic") {
        s.model = std::make_unique<LogisticModel>(s.train.dim, s.train.num_classes);
    } else {
        s.model = std::make_unique<MlpModel>(s.train.dim, cfg.hidden_dim, s.train.num_classes);
    }

    switch (cfg.partition) {
        case PartitionScheme::kSort:
            s.partition = sort_and_partition(s.train, cfg.clients, cfg.seed);
            break;
        case PartitionScheme::kPaired:
            s.partition = paired_sort_partition(s.train, cfg.clients, cfg.seed);
            break;
        case PartitionScheme::kDirichlet:
            s.partition = dirichlet_partition(s.train, cfg.clients, cfg.rho, cfg.seed);
            break;
    }

    std::mt19937_64 rng = make_engine({cfg.seed, stream::kInit});
    s.w0 = s.model->init_params(rng);
    return s;
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void write_summary(const std::string& path, const RunConfig& cfg, const TrainResult& r,
                   const HeatmapResult* heatmap) {
    json j;
    j["config"] = to_kv(cfg);
    j["status"] = r.diverged ? "diverged" : "ok";
    if (r.diverged) j["message"] = r.message;
    j["rounds_recorded"] = r.metrics.size();
    j["summary_accuracy"] = r.summary_accuracy;
    j["final_drift"] = r.final_drift;
    if (heatmap) {
        j["matching_rate"] = heatmap->matching_rate;
        j["paired_top_rate"] = heatmap->paired_top_rate;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

void write_attention_csv(const std::string& path, const AttentionScores& scores) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& row : scores) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << ",";
            out << fmt(row[j]);
        }
        out << "\n";
    }
}

}  // namespace

void write_metrics_csv(const std::string& path, const std::vector<RoundMetrics>& metrics) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "round,train_loss,test_accuracy,drift,elapsed_ms\n";
    for (const auto& m : metrics) {
        out << m.round << "," << fmt(m.train_loss) << "," << fmt(m.test_accuracy) << ","
            << fmt(m.drift) << "," << fmt(m.elapsed_ms) << "\n";
    }
}

int run_experiment(const RunConfig& cfg) {
    try {
        fs::create_directories(cfg.out_dir);
        const ExperimentSetup setup = build_setup(cfg);
        const FederatedProblem prob = setup.problem(cfg.clients);
        const TrainResult result = run_training(cfg, prob, setup.w0);

        write_metrics_csv((fs::path(cfg.out_dir) / "metrics.csv").string(), result.metrics);
        write_summary((fs::path(cfg.out_dir) / "summary.json").string(), cfg, result, nullptr);
        if (!result.mean_scores.empty())
            write_attention_csv((fs::path(cfg.out_dir) / "attention.csv").string(),
                                result.mean_scores);
        if (result.diverged) {
            std::cerr << "run failed: " << result.message << "\n";
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return 1;
    }
}

int run_sweep(const RunConfig& base, const std::string& axis_key,
              const std::vector<std::string>& values) {
    if (values.empty()) {
        std::cerr << "sweep: no axis values\n";
        return 1;
    }
    // Reject unknown axis keys up front.
    const auto known = to_kv(base);
    if (known.find(axis_key) == known.end()) {
        std::cerr << "sweep: unknown axis key '" << axis_key << "'\n";
        return 1;
    }

    struct Cell {
        std::string value;
        double summary = 0.0;
        bool ok = false;
    };
    std::vector<Cell> cells;
    int failures = 0;

    for (const std::string& value : values) {
        Cell cell;
        cell.value = value;
        RunConfig cfg = base;
        try {
            apply_kv(cfg, {{axis_key, value}});
            cfg.out_dir =
                (fs::path(base.out_dir) / (axis_key + "_" + value)).string();
            cell.ok = run_experiment(cfg) == 0;
            if (cell.ok) {
                std::ifstream in(fs::path(cfg.out_dir) / "summary.json");
                json j = json::parse(in);
                cell.summary = j["summary_accuracy"].get<double>();
            }
        } catch (const std::exception& e) {
            std::cerr << "sweep cell " << axis_key << "=" << value << " failed: " << e.what()
                      << "\n";
        }
        if (!cell.ok) ++failures;
        cells.push_back(std::move(cell));
    }

    fs::create_directories(base.out_dir);
    std::ofstream out(fs::path(base.out_dir) / "sweep.csv", std::ios::binary);
    out << axis_key << ",summary_accuracy,status\n";
    for (const auto& cell : cells)
        out << cell.value << "," << fmt(cell.summary) << ","
            << (cell.ok ? "ok" : "failed") << "\n";
    return failures == 0 ? 0 : 1;
}

int run_heatmap(const RunConfig& cfg) {
    try {
        fs::create_directories(cfg.out_dir);
        const ExperimentSetup setup = build_setup(cfg);
        const FederatedProblem prob = setup.problem(cfg.clients);
        const HeatmapResult heat = attention_heatmap(cfg, prob, setup.w0);

        write_attention_csv((fs::path(cfg.out_dir) / "attention.csv").string(),
                            heat.mean_scores);
        write_metrics_csv((fs::path(cfg.out_dir) / "metrics.csv").string(),
                          heat.train.metrics);
        write_summary((fs::path(cfg.out_dir) / "summary.json").string(), cfg, heat.train,
                      &heat);
        std::cout << "matching_rate=" << heat.matching_rate
                  << " paired_top_rate=" << heat.paired_top_rate << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "heatmap failed: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace igfl
