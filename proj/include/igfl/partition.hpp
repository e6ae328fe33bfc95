#ifndef IGFL_PARTITION_HPP
#define IGFL_PARTITION_HPP

#include <cstdint>
#include <vector>

#include "igfl/dataset.hpp"

namespace igfl {

// Disjoint index lists into a Dataset, one per client.
struct Partition {
    std::vector<std::vector<std::size_t>> client_indices;
};

// Sort by label, cut into 2P equal shards, give each client two shards with
// different labels (assignment redrawn until that holds).
Partition sort_and_partition(const Dataset& ds, int num_clients, std::uint64_t seed);

// Like sort_and_partition but clients 2k and 2k+1 receive the same label
// pair (0,1),(0,1),(2,3),(2,3),... Requires a balanced dataset with
// num_clients == num_classes and an even class count.
Partition paired_sort_partition(const Dataset& ds, int num_clients, std::uint64_t seed);

// Per-client class proportions drawn from Dir(rho * uniform); each client
// receives n/P examples drawn class-by-class without replacement, falling
// back to the most populated remaining class when a pool runs dry.
Partition dirichlet_partition(const Dataset& ds, int num_clients, double rho,
                              std::uint64_t seed);

// E epochs of shuffled mini-batches over the given indices; the last batch
// of an epoch may be short. Total batches = E * ceil(n_i / B).
std::vector<Batch> epoch_batches(const Dataset& ds, const std::vector<std::size_t>& indices,
                                 int batch_size, int epochs, std::uint64_t seed);

// Sorted distinct labels held by an index list.
std::vector<int> distinct_labels(const Dataset& ds, const std::vector<std::size_t>& indices);

}  // namespace igfl

#endif
