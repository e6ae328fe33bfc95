#ifndef IGFL_CONFIG_HPP
#define IGFL_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>

#include "igfl/server_opt.hpp"

namespace igfl {

enum class Algorithm { kFedAvg, kFedAvgM, kFedAdam, kScaffold, kIgflC, kIgflS, kIgfl };

enum class PartitionScheme { kSort, kPaired, kDirichlet };

// All hyperparameters of one experiment. Defaults follow the common
// cross-silo setup; parse/validate via the kv helpers below.
struct RunConfig {
    Algorithm algorithm = Algorithm::kFedAvg;
    AttentionOption attention = AttentionOption::kSelf;

    int clients = 10;          // P
    int rounds = 100;          // R
    double select_rate = 1.0;  // C
    int batch_size = 100;      // B
    int epochs = 1;            // E
    double client_lr = 0.1;

    double beta = 0.9;     // FedAvgM momentum
    double beta1 = 0.9;    // FedAdam
    double beta2 = 0.99;   // FedAdam
    double tau = 0.1;      // FedAdam denominator offset
    double server_lr = 0.1;  // FedAdam only; all other rules use 1

    PartitionScheme partition = PartitionScheme::kSort;
    double rho = 1.0;  // Dirichlet concentration

    std::uint64_t seed = 1;
    int eval_every = 1;

    // Dataset source: "synth" builds Gaussian blobs, "idx" loads IDX files.
    std::string dataset = "synth";
    int synth_classes = 10;
    int synth_per_class = 1000;
    int synth_dim = 20;
    double synth_separation = 2.0;
    int synth_test_per_class = 200;
    std::string idx_train_images, idx_train_labels, idx_test_images, idx_test_labels;

    std::string model = "mlp";  // "mlp" | "logistic"
    int hidden_dim = 16;

    std::string out_dir = "out";

    // Test hooks.
    bool force_uniform_attention = false;
    bool zero_client_correction = false;
    bool collect_attention = false;
};

const char* to_string(Algorithm a);
const char* to_string(AttentionOption o);
const char* to_string(PartitionScheme p);

Algorithm algorithm_from_string(const std::string& s);
AttentionOption attention_from_string(const std::string& s);
PartitionScheme partition_from_string(const std::string& s);

// Flat key=value view of a config; round-trips through apply_kv.
std::map<std::string, std::string> to_kv(const RunConfig& cfg);

// Applies keys onto cfg. Unknown keys, type errors, and constraint
// violations throw with the offending key named.
void apply_kv(RunConfig& cfg, const std::map<std::string, std::string>& kv);

// Post-assignment constraint checks (also run by apply_kv).
void validate(const RunConfig& cfg);

// Reads a flat key=value file ('#' comments, blank lines ignored).
std::map<std::string, std::string> read_kv_file(const std::string& path);

}  // namespace igfl

#endif
