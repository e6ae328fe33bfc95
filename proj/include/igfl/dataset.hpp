#ifndef IGFL_DATASET_HPP
#define IGFL_DATASET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "igfl/models.hpp"

namespace igfl {

// In-memory dataset. Features row-major [n x dim], values in [0,1] for IDX
// inputs; labels in [0, num_classes).
struct Dataset {
    std::size_t n = 0;
    std::size_t dim = 0;
    int num_classes = 0;
    std::vector<double> features;
    std::vector<int> labels;

    Batch batch(const std::vector<std::size_t>& idx) const;
    Batch full() const;
};

// Reads an IDX image/label file pair (gzip accepted transparently).
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// Isotropic Gaussian blobs: class k centered at separation * u_k with unit
// variance, u_k fixed unit vectors.
Dataset synth_gaussian_mixture(int num_classes, int per_class, int dim,
                               double separation, std::uint64_t seed);

}  // namespace igfl

#endif
