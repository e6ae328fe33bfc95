#include "igfl/partition.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "igfl/rng.hpp"

namespace igfl {

namespace {

// Indices sorted by (label, index) and cut into num_shards equal blocks.
std::vector<std::vector<std::size_t>> label_sorted_shards(const Dataset& ds,
                                                          std::size_t num_shards) {
    if (ds.n % num_shards != 0)
        throw std::invalid_argument("sort_and_partition: dataset size " +
                                    std::to_string(ds.n) + " not divisible into " +
                                    std::to_string(num_shards) + " shards");
    std::vector<std::size_t> order(ds.n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ds.labels[a] < ds.labels[b]; });
    const std::size_t shard_size = ds.n / num_shards;
    std::vector<std::vector<std::size_t>> shards(num_shards);
    for (std::size_t s = 0; s < num_shards; ++s)
        shards[s].assign(order.begin() + s * shard_size, order.begin() + (s + 1) * shard_size);
    return shards;
}

std::set<int> shard_labels(const Dataset& ds, const std::vector<std::size_t>& shard) {
    std::set<int> out;
    for (std::size_t i : shard) out.insert(ds.labels[i]);
    return out;
}

}  // namespace

Partition sort_and_partition(const Dataset& ds, int num_clients, std::uint64_t seed) {
    if (num_clients < 1) throw std::invalid_argument("sort_and_partition: num_clients < 1");
    const std::size_t num_shards = 2 * std::size_t(num_clients);
    const auto shards = label_sorted_shards(ds, num_shards);

    std::mt19937_64 rng = make_engine({seed, stream::kPartition});
    std::vector<std::size_t> assignment(num_shards);
    std::iota(assignment.begin(), assignment.end(), 0);

    constexpr int kMaxRedraws = 10000;
    for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
        std::shuffle(assignment.begin(), assignment.end(), rng);
        bool ok = true;
        for (int c = 0; c < num_clients && ok; ++c) {
            const auto la = shard_labels(ds, shards[assignment[2 * c]]);
            const auto lb = shard_labels(ds, shards[assignment[2 * c + 1]]);
            if (la == lb) ok = false;
        }
        if (!ok) continue;
        Partition p;
        p.client_indices.resize(num_clients);
        for (int c = 0; c < num_clients; ++c) {
            auto& idx = p.client_indices[c];
            idx = shards[assignment[2 * c]];
            const auto& second = shards[assignment[2 * c + 1]];
            idx.insert(idx.end(), second.begin(), second.end());
        }
        return p;
    }
    throw std::runtime_error("sort_and_partition: could not draw an assignment with "
                             "distinct shard labels per client");
}

Partition paired_sort_partition(const Dataset& ds, int num_clients, std::uint64_t seed) {
    if (num_clients < 2 || num_clients % 2 != 0)
        throw std::invalid_argument("paired_sort_partition: num_clients must be even");
    if (ds.num_classes != num_clients)
        throw std::invalid_argument("paired_sort_partition: requires num_clients == num_classes");
    const std::size_t num_shards = 2 * std::size_t(num_clients);
    const auto shards = label_sorted_shards(ds, num_shards);
    // Balanced dataset => shards s = 2k, 2k+1 both hold label k.
    for (std::size_t s = 0; s < num_shards; ++s) {
        const auto ls = shard_labels(ds, shards[s]);
        if (ls.size() != 1 || *ls.begin() != static_cast<int>(s / 2))
            throw std::invalid_argument("paired_sort_partition: dataset is not label-balanced");
    }

    std::mt19937_64 rng = make_engine({seed, stream::kPartition});
    Partition p;
    p.client_indices.resize(num_clients);
    for (int m = 0; m < num_clients / 2; ++m) {
        const int la = 2 * m, lb = 2 * m + 1;
        // Which of a label's two shards goes to which twin is the only
        // randomness here.
        const std::size_t fa = rng() & 1, fb = rng() & 1;
        for (int twin = 0; twin < 2; ++twin) {
            auto& idx = p.client_indices[2 * m + twin];
            const auto& sa = shards[2 * std::size_t(la) + ((fa + twin) & 1)];
            const auto& sb = shards[2 * std::size_t(lb) + ((fb + twin) & 1)];
            idx = sa;
            idx.insert(idx.end(), sb.begin(), sb.end());
        }
    }
    return p;
}

Partition dirichlet_partition(const Dataset& ds, int num_clients, double rho,
                              std::uint64_t seed) {
    if (!(rho > 0.0)) throw std::invalid_argument("dirichlet_partition: rho must be > 0");
    if (num_clients < 1) throw std::invalid_argument("dirichlet_partition: num_clients < 1");
    if (std::size_t(num_clients) > ds.n)
        throw std::invalid_argument("dirichlet_partition: more clients than examples");

    const int K = ds.num_classes;
    const std::size_t per_client = ds.n / std::size_t(num_clients);

    std::mt19937_64 rng = make_engine({seed, stream::kPartition});

    // Per-class pools, shuffled so "without replacement" draws are random.
    std::vector<std::vector<std::size_t>> pools(K);
    for (std::size_t i = 0; i < ds.n; ++i) pools[ds.labels[i]].push_back(i);
    for (auto& pool : pools) std::shuffle(pool.begin(), pool.end(), rng);

    std::gamma_distribution<double> gamma(rho / K, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    // Dir(rho * q), q uniform, via normalized Gamma(rho/K, 1) draws.
    std::vector<std::vector<double>> props(num_clients, std::vector<double>(K));
    for (int c = 0; c < num_clients; ++c) {
        double total = 0.0;
        for (int k = 0; k < K; ++k) {
            props[c][k] = gamma(rng);
            total += props[c][k];
        }
        if (total <= 0.0) {
            std::fill(props[c].begin(), props[c].end(), 1.0 / K);
        } else {
            for (double& v : props[c]) v /= total;
        }
    }

    Partition p;
    p.client_indices.resize(num_clients);
    for (auto& idx : p.client_indices) idx.reserve(per_client);

    // Round-robin over clients so late-pool exhaustion corrections spread
    // across everyone instead of landing on whichever client draws last.
    for (std::size_t s = 0; s < per_client; ++s) {
        for (int c = 0; c < num_clients; ++c) {
            // Categorical draw over the client's proportion vector.
            double u = unif(rng), acc = 0.0;
            int cls = K - 1;
            for (int k = 0; k < K; ++k) {
                acc += props[c][k];
                if (u < acc) { cls = k; break; }
            }
            if (pools[cls].empty()) {
                // Pool exhausted: take from the most populated remaining class.
                int best = -1;
                for (int k = 0; k < K; ++k)
                    if (best < 0 || pools[k].size() > pools[best].size()) best = k;
                cls = best;
                if (pools[cls].empty())
                    throw std::runtime_error("dirichlet_partition: all pools exhausted");
            }
            p.client_indices[c].push_back(pools[cls].back());
            pools[cls].pop_back();
        }
    }
    return p;
}

std::vector<Batch> epoch_batches(const Dataset& ds, const std::vector<std::size_t>& indices,
                                 int batch_size, int epochs, std::uint64_t seed) {
    if (indices.empty()) throw std::invalid_argument("epoch_batches: empty index list");
    if (batch_size < 1 || epochs < 1)
        throw std::invalid_argument("epoch_batches: batch_size and epochs must be >= 1");

    std::mt19937_64 rng = make_engine({seed, stream::kBatches});
    std::vector<Batch> out;
    const std::size_t n = indices.size();
    const std::size_t per_epoch = (n + batch_size - 1) / batch_size;
    out.reserve(per_epoch * epochs);
    std::vector<std::size_t> shuffled = indices;
    for (int e = 0; e < epochs; ++e) {
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        for (std::size_t start = 0; start < n; start += batch_size) {
            const std::size_t stop = std::min(n, start + batch_size);
            out.push_back(ds.batch(std::vector<std::size_t>(shuffled.begin() + start,
                                                            shuffled.begin() + stop)));
        }
    }
    return out;
}

std::vector<int> distinct_labels(const Dataset& ds, const std::vector<std::size_t>& indices) {
    std::set<int> s;
    for (std::size_t i : indices) s.insert(ds.labels[i]);
    return std::vector<int>(s.begin(), s.end());
}

}  // namespace igfl
