#include "igfl/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace igfl {

const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::kFedAvg: return "fedavg";
        case Algorithm::kFedAvgM: return "fedavgm";
        case Algorithm::kFedAdam: return "fedadam";
        case Algorithm::kScaffold: return "scaffold";
        case Algorithm::kIgflC: return "igfl_c";
        case Algorithm::kIgflS: return "igfl_s";
        case Algorithm::kIgfl: return "igfl";
    }
    return "?";
}

const char* to_string(AttentionOption o) {
    switch (o) {
        case AttentionOption::kSelf: return "self";
        case AttentionOption::kGlobal: return "global";
        case AttentionOption::kTime: return "time";
    }
    return "?";
}

const char* to_string(PartitionScheme p) {
    switch (p) {
        case PartitionScheme::kSort: return "sort";
        case PartitionScheme::kPaired: return "paired";
        case PartitionScheme::kDirichlet: return "dirichlet";
    }
    return "?";
}

Algorithm algorithm_from_string(const std::string& s) {
    if (s == "fedavg") return Algorithm::kFedAvg;
    if (s == "fedavgm") return Algorithm::kFedAvgM;
    if (s == "fedadam") return Algorithm::kFedAdam;
    if (s == "scaffold") return Algorithm::kScaffold;
    if (s == "igfl_c") return Algorithm::kIgflC;
    if (s == "igfl_s") return Algorithm::kIgflS;
    if (s == "igfl") return Algorithm::kIgfl;
    throw std::invalid_argument("algorithm: unknown value '" + s + "'");
}

AttentionOption attention_from_string(const std::string& s) {
    if (s == "self") return AttentionOption::kSelf;
    if (s == "global") return AttentionOption::kGlobal;
    if (s == "time") return AttentionOption::kTime;
    throw std::invalid_argument("attention: unknown value '" + s + "'");
}

PartitionScheme partition_from_string(const std::string& s) {
    if (s == "sort") return PartitionScheme::kSort;
    if (s == "paired") return PartitionScheme::kPaired;
    if (s == "dirichlet") return PartitionScheme::kDirichlet;
    throw std::invalid_argument("partition: unknown value '" + s + "'");
}

namespace {

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::invalid_argument(key + ": not an integer: '" + v + "'");
    }
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::invalid_argument(key + ": not a number: '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::invalid_argument(key + ": not an unsigned integer: '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument(key + ": not a boolean: '" + v + "'");
}

}  // namespace

std::map<std::string, std::string> to_kv(const RunConfig& c) {
    std::map<std::string, std::string> kv;
    kv["algorithm"] = to_string(c.algorithm);
    kv["attention"] = to_string(c.attention);
    kv["clients"] = std::to_string(c.clients);
    kv["rounds"] = std::to_string(c.rounds);
    kv["select_rate"] = fmt_double(c.select_rate);
    kv["batch_size"] = std::to_string(c.batch_size);
    kv["epochs"] = std::to_string(c.epochs);
    kv["client_lr"] = fmt_double(c.client_lr);
    kv["beta"] = fmt_double(c.beta);
    kv["beta1"] = fmt_double(c.beta1);
    kv["beta2"] = fmt_double(c.beta2);
    kv["tau"] = fmt_double(c.tau);
    kv["server_lr"] = fmt_double(c.server_lr);
    kv["partition"] = to_string(c.partition);
    kv["rho"] = fmt_double(c.rho);
    kv["seed"] = std::to_string(c.seed);
    kv["eval_every"] = std::to_string(c.eval_every);
    kv["dataset"] = c.dataset;
    kv["synth_classes"] = std::to_string(c.synth_classes);
    kv["synth_per_class"] = std::to_string(c.synth_per_class);
    kv["synth_dim"] = std::to_string(c.synth_dim);
    kv["synth_separation"] = fmt_double(c.synth_separation);
    kv["synth_test_per_class"] = std::to_string(c.synth_test_per_class);
    kv["idx_train_images"] = c.idx_train_images;
    kv["idx_train_labels"] = c.idx_train_labels;
    kv["idx_test_images"] = c.idx_test_images;
    kv["idx_test_labels"] = c.idx_test_labels;
    kv["model"] = c.model;
    kv["hidden_dim"] = std::to_string(c.hidden_dim);
    kv["out_dir"] = c.out_dir;
    kv["force_uniform_attention"] = c.force_uniform_attention ? "true" : "false";
    kv["zero_client_correction"] = c.zero_client_correction ? "true" : "false";
    kv["collect_attention"] = c.collect_attention ? "true" : "false";
    return kv;
}

void apply_kv(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
    using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
    static const std::map<std::string, Setter> setters = {
        {"algorithm", [](RunConfig& c, const std::string&, const std::string& v) {
             c.algorithm = algorithm_from_string(v); }},
        {"algo", [](RunConfig& c, const std::string&, const std::string& v) {
             c.algorithm = algorithm_from_string(v); }},
        {"attention", [](RunConfig& c, const std::string&, const std::string& v) {
             c.attention = attention_from_string(v); }},
        {"clients", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.clients = parse_int(k, v); }},
        {"rounds", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.rounds = parse_int(k, v); }},
        {"select_rate", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.select_rate = parse_double(k, v); }},
        {"batch_size", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.batch_size = parse_int(k, v); }},
        {"epochs", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.epochs = parse_int(k, v); }},
        {"client_lr", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.client_lr = parse_double(k, v); }},
        {"beta", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.beta = parse_double(k, v); }},
        {"beta1", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.beta1 = parse_double(k, v); }},
        {"beta2", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.beta2 = parse_double(k, v); }},
        {"tau", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.tau = parse_double(k, v); }},
        {"server_lr", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.server_lr = parse_double(k, v); }},
        {"partition", [](RunConfig& c, const std::string&, const std::string& v) {
             c.partition = partition_from_string(v); }},
        {"rho", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.rho = parse_double(k, v); }},
        {"seed", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.seed = parse_u64(k, v); }},
        {"eval_every", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.eval_every = parse_int(k, v); }},
        {"dataset", [](RunConfig& c, const std::string& k, const std::string& v) {
             if (v != "synth" && v != "idx")
                 throw std::invalid_argument(k + ": must be 'synth' or 'idx'");
             c.dataset = v; }},
        {"synth_classes", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth_classes = parse_int(k, v); }},
        {"synth_per_class", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth_per_class = parse_int(k, v); }},
        {"synth_dim", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth_dim = parse_int(k, v); }},
        {"synth_separation", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth_separation = parse_double(k, v); }},
        {"synth_test_per_class", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.synth_test_per_class = parse_int(k, v); }},
        {"idx_train_images", [](RunConfig& c, const std::string&, const std::string& v) {
             c.idx_train_images = v; }},
        {"idx_train_labels", [](RunConfig& c, const std::string&, const std::string& v) {
             c.idx_train_labels = v; }},
        {"idx_test_images", [](RunConfig& c, const std::string&, const std::string& v) {
             c.idx_test_images = v; }},
        {"idx_test_labels", [](RunConfig& c, const std::string&, const std::string& v) {
             c.idx_test_labels = v; }},
        {"model", [](RunConfig& c, const std::string& k, const std::string& v) {
             if (v != "mlp" && v != "logistic")
                 throw std::invalid_argument(k + ": must be 'mlp' or 'logistic'");
             c.model = v; }},
        {"hidden_dim", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.hidden_dim = parse_int(k, v); }},
        {"out_dir", [](RunConfig& c, const std::string&, const std::string& v) {
             c.out_dir = v; }},
        {"force_uniform_attention", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.force_uniform_attention = parse_bool(k, v); }},
        {"zero_client_correction", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.zero_client_correction = parse_bool(k, v); }},
        {"collect_attention", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.collect_attention = parse_bool(k, v); }},
    };

    for (const auto& [key, value] : kv) {
        auto it = setters.find(key);
        if (it == setters.end()) throw std::invalid_argument("unknown config key: '" + key + "'");
        it->second(cfg, key, value);
    }
    validate(cfg);
}

void validate(const RunConfig& c) {
    if (c.clients < 1) throw std::invalid_argument("clients: must be >= 1");
    if (c.rounds < 1) throw std::invalid_argument("rounds: must be >= 1");
    if (!(c.select_rate > 0.0 && c.select_rate <= 1.0))
        throw std::invalid_argument("select_rate: must be in (0, 1]");
    if (c.batch_size < 1) throw std::invalid_argument("batch_size: must be >= 1");
    if (c.epochs < 1) throw std::invalid_argument("epochs: must be >= 1");
    if (!(c.client_lr > 0.0)) throw std::invalid_argument("client_lr: must be > 0");
    if (!(c.beta >= 0.0 && c.beta < 1.0)) throw std::invalid_argument("beta: must be in [0, 1)");
    if (!(c.beta1 >= 0.0 && c.beta1 < 1.0)) throw std::invalid_argument("beta1: must be in [0, 1)");
    if (!(c.beta2 >= 0.0 && c.beta2 < 1.0)) throw std::invalid_argument("beta2: must be in [0, 1)");
    if (!(c.tau > 0.0)) throw std::invalid_argument("tau: must be > 0");
    if (!(c.server_lr > 0.0)) throw std::invalid_argument("server_lr: must be > 0");
    if (!(c.rho > 0.0)) throw std::invalid_argument("rho: must be > 0");
    if (c.eval_every < 1) throw std::invalid_argument("eval_every: must be >= 1");
    if (c.hidden_dim < 1) throw std::invalid_argument("hidden_dim: must be >= 1");
    if (c.synth_classes < 2) throw std::invalid_argument("synth_classes: must be >= 2");
    if (c.synth_per_class < 1) throw std::invalid_argument("synth_per_class: must be >= 1");
    if (c.synth_dim < 1) throw std::invalid_argument("synth_dim: must be >= 1");
    if (!(c.synth_separation > 0.0))
        throw std::invalid_argument("synth_separation: must be > 0");
    if (c.synth_test_per_class < 1)
        throw std::invalid_argument("synth_test_per_class: must be >= 1");
}

std::map<std::string, std::string> read_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r\n");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r\n");
            const auto b = s.find_last_not_of(" \t\r\n");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
        kv[key] = value;
    }
    return kv;
}

}  // namespace igfl
