#include <doctest.h>

#include <zlib.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "igfl/partition.hpp"

using namespace igfl;

namespace {

// Minimal IDX writer for loader tests.
void put_be32(std::ofstream& out, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void write_idx_pair(const std::string& img_path, const std::string& lab_path,
                    std::uint32_t n_img, std::uint32_t n_lab, std::uint32_t rows,
                    std::uint32_t cols, unsigned char pixel, bool truncate_images = false) {
    std::ofstream img(img_path, std::ios::binary);
    put_be32(img, 0x00000803);
    put_be32(img, n_img);
    put_be32(img, rows);
    put_be32(img, cols);
    const std::size_t total = truncate_images ? std::size_t(n_img) * rows * cols / 2
                                              : std::size_t(n_img) * rows * cols;
    for (std::size_t k = 0; k < total; ++k) img.put(static_cast<char>(pixel));
    img.close();

    std::ofstream lab(lab_path, std::ios::binary);
    put_be32(lab, 0x00000801);
    put_be32(lab, n_lab);
    for (std::uint32_t k = 0; k < n_lab; ++k) lab.put(static_cast<char>(k % 3));
}

struct TempFiles {
    std::string img = "test_images.idx";
    std::string lab = "test_labels.idx";
    ~TempFiles() {
        std::remove(img.c_str());
        std::remove(lab.c_str());
    }
};

void check_disjoint_cover(const Partition& p, std::size_t n, bool require_full_cover) {
    std::set<std::size_t> seen;
    std::size_t total = 0;
    for (const auto& idx : p.client_indices) {
        CHECK(!idx.empty());
        total += idx.size();
        for (std::size_t i : idx) {
            CHECK(i < n);
            CHECK(seen.insert(i).second);  // disjointness
        }
    }
    if (require_full_cover) CHECK(total == n);
}

double max_class_prop(const Dataset& ds, const std::vector<std::size_t>& idx) {
    std::vector<std::size_t> counts(ds.num_classes, 0);
    for (std::size_t i : idx) ++counts[ds.labels[i]];
    return static_cast<double>(*std::max_element(counts.begin(), counts.end())) / idx.size();
}

}  // namespace

TEST_CASE("load_idx parses well-formed files and flags bad ones") {
    TempFiles f;

    SUBCASE("ok") {
        write_idx_pair(f.img, f.lab, 10, 10, 28, 28, 0);
        const Dataset ds = load_idx(f.img, f.lab);
        CHECK(ds.n == 10);
        CHECK(ds.dim == 784);
        for (double v : ds.features) CHECK(v == 0.0);
        CHECK(ds.labels[4] == 1);  // pattern k % 3
    }
    SUBCASE("count mismatch") {
        write_idx_pair(f.img, f.lab, 10, 9, 4, 4, 128);
        CHECK_THROWS_WITH_AS(load_idx(f.img, f.lab),
                             doctest::Contains("count mismatch"), std::runtime_error);
    }
    SUBCASE("magic mismatch") {
        write_idx_pair(f.img, f.lab, 4, 4, 2, 2, 10);
        CHECK_THROWS_WITH_AS(load_idx(f.lab, f.lab),  // labels passed as images
                             doctest::Contains("magic mismatch"), std::runtime_error);
    }
    SUBCASE("truncated") {
        write_idx_pair(f.img, f.lab, 8, 8, 4, 4, 7, /*truncate_images=*/true);
        CHECK_THROWS_WITH_AS(load_idx(f.img, f.lab), doctest::Contains("truncated"),
                             std::runtime_error);
    }
    SUBCASE("pixel scaling") {
        write_idx_pair(f.img, f.lab, 2, 2, 2, 2, 255);
        const Dataset ds = load_idx(f.img, f.lab);
        for (double v : ds.features) CHECK(v == 1.0);
    }
}

TEST_CASE("gzip-compressed IDX inputs are accepted transparently") {
    TempFiles f;
    write_idx_pair(f.img, f.lab, 6, 6, 3, 3, 51);
    const Dataset plain = load_idx(f.img, f.lab);

    auto gzip_file = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        const std::string bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
        in.close();
        gzFile gz = gzopen(path.c_str(), "wb");
        REQUIRE(gz != nullptr);
        gzwrite(gz, bytes.data(), static_cast<unsigned>(bytes.size()));
        gzclose(gz);
    };
    gzip_file(f.img);
    gzip_file(f.lab);

    const Dataset ds = load_idx(f.img, f.lab);
    CHECK(ds.features == plain.features);
    CHECK(ds.labels == plain.labels);
}

TEST_CASE("synthetic mixture is reproducible and validates inputs") {
    const Dataset a = synth_gaussian_mixture(3, 20, 5, 2.0, 99);
    const Dataset b = synth_gaussian_mixture(3, 20, 5, 2.0, 99);
    CHECK(a.features == b.features);
    CHECK(a.labels == b.labels);
    const Dataset c = synth_gaussian_mixture(3, 20, 5, 2.0, 100);
    CHECK(a.features != c.features);

    CHECK_THROWS_AS(synth_gaussian_mixture(3, 0, 5, 2.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(synth_gaussian_mixture(3, 5, 5, 0.0, 1), std::invalid_argument);
}

TEST_CASE("well-separated mixture is linearly classifiable") {
    const Dataset ds = synth_gaussian_mixture(2, 100, 8, 10.0, 5);
    LogisticModel m(ds.dim, 2);
    ParamVector w = zeros(m.param_count());
    const Batch all = ds.full();
    for (int step = 0; step < 400; ++step) axpy(-0.5, m.gradient(w, all), w);
    CHECK(predict_accuracy(m, w, all) >= 0.99);
}

TEST_CASE("sort_and_partition yields two-label clients on balanced data") {
    const Dataset ds = synth_gaussian_mixture(10, 40, 4, 1.0, 3);
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const Partition p = sort_and_partition(ds, 10, seed);
        check_disjoint_cover(p, ds.n, true);
        for (const auto& idx : p.client_indices) {
            const auto labels = distinct_labels(ds, idx);
            CHECK(labels.size() >= 2);
            CHECK(labels.size() <= 2);
        }
    }
    CHECK_THROWS_AS(sort_and_partition(ds, 7, 1), std::invalid_argument);  // 400 % 14 != 0
}

TEST_CASE("paired partition gives twins identical label pairs") {
    const Dataset ds = synth_gaussian_mixture(10, 40, 4, 1.0, 3);
    const Partition p = paired_sort_partition(ds, 10, 17);
    check_disjoint_cover(p, ds.n, true);
    for (int m = 0; m < 5; ++m) {
        const auto la = distinct_labels(ds, p.client_indices[2 * m]);
        const auto lb = distinct_labels(ds, p.client_indices[2 * m + 1]);
        CHECK(la == lb);
        CHECK(la == std::vector<int>{2 * m, 2 * m + 1});
    }
}

TEST_CASE("dirichlet partition statistics track the concentration parameter") {
    // Per-client counts must be large enough that multinomial noise stays
    // below the near-uniform window checked below.
    const Dataset ds = synth_gaussian_mixture(10, 500, 4, 1.0, 3);

    SUBCASE("near-uniform at large rho") {
        int ok = 0, total = 0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const Partition p = dirichlet_partition(ds, 10, 1000.0, seed);
            check_disjoint_cover(p, ds.n, false);
            for (const auto& idx : p.client_indices) {
                ++total;
                if (std::abs(max_class_prop(ds, idx) - 0.1) < 0.05) ++ok;
            }
        }
        CHECK(static_cast<double>(ok) / total >= 0.95);
    }
    SUBCASE("skewed at small rho") {
        std::vector<double> maxes;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const Partition p = dirichlet_partition(ds, 10, 0.1, seed);
            for (const auto& idx : p.client_indices) maxes.push_back(max_class_prop(ds, idx));
        }
        std::sort(maxes.begin(), maxes.end());
        CHECK(maxes[maxes.size() / 2] > 0.4);
    }
    SUBCASE("determinism and validation") {
        const Partition a = dirichlet_partition(ds, 10, 0.5, 4);
        const Partition b = dirichlet_partition(ds, 10, 0.5, 4);
        CHECK(a.client_indices == b.client_indices);
        CHECK_THROWS_AS(dirichlet_partition(ds, 10, 0.0, 1), std::invalid_argument);
        CHECK_THROWS_AS(dirichlet_partition(ds, 6000, 1.0, 1), std::invalid_argument);
    }
}

TEST_CASE("epoch_batches covers every index once per epoch") {
    const Dataset ds = synth_gaussian_mixture(2, 50, 3, 1.0, 8);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < 55; ++i) idx.push_back(i);

    const auto batches = epoch_batches(ds, idx, 10, 3, 12);
    CHECK(batches.size() == 3 * 6);  // ceil(55/10) per epoch

    // Step count T = E * ceil(n_i / B) for a few common shapes.
    CHECK(epoch_batches(ds, std::vector<std::size_t>(idx.begin(), idx.begin() + 50), 10, 1, 1)
              .size() == 5);

    std::size_t covered = 0;
    std::multiset<int> labels_epoch0;
    for (std::size_t b = 0; b < 6; ++b) {
        covered += batches[b].rows;
        for (int y : batches[b].y) labels_epoch0.insert(y);
    }
    CHECK(covered == 55);
    std::multiset<int> expected;
    for (std::size_t i : idx) expected.insert(ds.labels[i]);
    CHECK(labels_epoch0 == expected);

    CHECK_THROWS_AS(epoch_batches(ds, {}, 10, 1, 1), std::invalid_argument);
}

TEST_CASE("T = E * ceil(n_i / B) matches the local-step table") {
    const Dataset ds = synth_gaussian_mixture(2, 2500, 2, 1.0, 8);
    std::vector<std::size_t> idx(5000);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    CHECK(epoch_batches(ds, idx, 100, 1, 1).size() == 50);
    CHECK(epoch_batches(ds, idx, 100, 5, 1).size() == 250);
    CHECK(epoch_batches(ds, idx, 20, 5, 1).size() == 1250);
}
