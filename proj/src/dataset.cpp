#include "igfl/dataset.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include "igfl/rng.hpp"

namespace igfl {

Batch Dataset::batch(const std::vector<std::size_t>& idx) const {
    Batch b;
    b.rows = idx.size();
    b.dim = dim;
    b.x.resize(b.rows * dim);
    b.y.resize(b.rows);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        if (idx[r] >= n) throw std::out_of_range("Dataset::batch: index out of range");
        std::memcpy(&b.x[r * dim], &features[idx[r] * dim], dim * sizeof(double));
        b.y[r] = labels[idx[r]];
    }
    return b;
}

Batch Dataset::full() const {
    Batch b;
    b.rows = n;
    b.dim = dim;
    b.x = features;
    b.y = labels;
    return b;
}

namespace {

std::vector<unsigned char> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return std::vector<unsigned char>(std::istreambuf_iterator<char>(in),
                                      std::istreambuf_iterator<char>());
}

std::vector<unsigned char> gunzip(const std::vector<unsigned char>& in,
                                  const std::string& path) {
    z_stream zs{};
    if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK)
        throw std::runtime_error("zlib init failed for " + path);
    std::vector<unsigned char> out;
    std::vector<unsigned char> buf(1 << 16);
    zs.next_in = const_cast<unsigned char*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = buf.data();
        zs.avail_out = static_cast<uInt>(buf.size());
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw std::runtime_error("gzip decompression failed for " + path);
        }
        out.insert(out.end(), buf.data(), buf.data() + (buf.size() - zs.avail_out));
    }
    inflateEnd(&zs);
    return out;
}

std::uint32_t be32(const std::vector<unsigned char>& d, std::size_t off,
                   const std::string& path) {
    if (off + 4 > d.size()) throw std::runtime_error("truncated IDX file: " + path);
    return (std::uint32_t(d[off]) << 24) | (std::uint32_t(d[off + 1]) << 16) |
           (std::uint32_t(d[off + 2]) << 8) | std::uint32_t(d[off + 3]);
}

std::vector<unsigned char> load_maybe_gz(const std::string& path) {
    std::vector<unsigned char> bytes = read_file_bytes(path);
    if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b)
        return gunzip(bytes, path);
    return bytes;
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    const std::vector<unsigned char> img = load_maybe_gz(images_path);
    const std::vector<unsigned char> lab = load_maybe_gz(labels_path);

    const std::uint32_t img_magic = be32(img, 0, images_path);
    if (img_magic != 0x00000803u)
        throw std::runtime_error("IDX magic mismatch in " + images_path +
                                 " (expected 0x00000803)");
    const std::uint32_t lab_magic = be32(lab, 0, labels_path);
    if (lab_magic != 0x00000801u)
        throw std::runtime_error("IDX magic mismatch in " + labels_path +
                                 " (expected 0x00000801)");

    const std::uint32_t n_img = be32(img, 4, images_path);
    const std::uint32_t rows = be32(img, 8, images_path);
    const std::uint32_t cols = be32(img, 12, images_path);
    const std::uint32_t n_lab = be32(lab, 4, labels_path);
    if (n_img != n_lab)
        throw std::runtime_error("IDX count mismatch: " + std::to_string(n_img) +
                                 " images vs " + std::to_string(n_lab) + " labels");

    const std::size_t d = std::size_t(rows) * cols;
    if (img.size() < 16 + std::size_t(n_img) * d)
        throw std::runtime_error("truncated IDX file: " + images_path);
    if (lab.size() < 8 + n_lab)
        throw std::runtime_error("truncated IDX file: " + labels_path);

    Dataset ds;
    ds.n = n_img;
    ds.dim = d;
    ds.features.resize(ds.n * d);
    ds.labels.resize(ds.n);
    for (std::size_t i = 0; i < ds.n; ++i) {
        for (std::size_t k = 0; k < d; ++k)
            ds.features[i * d + k] = img[16 + i * d + k] / 255.0;
        ds.labels[i] = lab[8 + i];
    }
    int max_label = 0;
    for (int y : ds.labels) max_label = std::max(max_label, y);
    ds.num_classes = max_label + 1;
    return ds;
}

Dataset synth_gaussian_mixture(int num_classes, int per_class, int dim,
                               double separation, std::uint64_t seed) {
    if (num_classes < 1 || per_class < 1 || dim < 1)
        throw std::invalid_argument("synth_gaussian_mixture: counts must be >= 1");
    if (!(separation > 0.0))
        throw std::invalid_argument("synth_gaussian_mixture: separation must be > 0");

    // Class centers: axis vectors while they last, then fixed pseudo-random
    // unit vectors (independent of the sampling seed).
    std::vector<std::vector<double>> centers(num_classes, std::vector<double>(dim, 0.0));
    for (int k = 0; k < num_classes; ++k) {
        if (k < dim) {
            centers[k][k] = separation;
        } else {
            std::mt19937_64 crng(mix64(0xce27e5u + std::uint64_t(k)));
            std::normal_distribution<double> nd(0.0, 1.0);
            double norm = 0.0;
            for (int j = 0; j < dim; ++j) {
                centers[k][j] = nd(crng);
                norm += centers[k][j] * centers[k][j];
            }
            norm = std::sqrt(norm);
            for (int j = 0; j < dim; ++j) centers[k][j] *= separation / norm;
        }
    }

    Dataset ds;
    ds.n = std::size_t(num_classes) * per_class;
    ds.dim = std::size_t(dim);
    ds.num_classes = num_classes;
    ds.features.resize(ds.n * ds.dim);
    ds.labels.resize(ds.n);

    std::mt19937_64 rng = make_engine({seed, stream::kTrainData});
    std::normal_distribution<double> nd(0.0, 1.0);
    std::size_t row = 0;
    for (int k = 0; k < num_classes; ++k) {
        for (int s = 0; s < per_class; ++s, ++row) {
            for (std::size_t j = 0; j < ds.dim; ++j)
                ds.features[row * ds.dim + j] = centers[k][j] + nd(rng);
            ds.labels[row] = k;
        }
    }
    return ds;
}

}  // namespace igfl
