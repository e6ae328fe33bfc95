#include "igfl/param_vector.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace igfl {

ParamVector zeros(std::size_t n) { return ParamVector(n, 0.0); }

double dot(const ParamVector& a, const ParamVector& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("dot: length mismatch (" + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()) + ")");
    }
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

void axpy(double a, const ParamVector& x, ParamVector& y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("axpy: length mismatch (" + std::to_string(x.size()) +
                                    " vs " + std::to_string(y.size()) + ")");
    }
    for (std::size_t k = 0; k < x.size(); ++k) y[k] += a * x[k];
}

double l2_norm(const ParamVector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

ParamVector combine(const std::vector<double>& coeffs,
                    const std::vector<const ParamVector*>& vecs) {
    if (coeffs.empty() || vecs.empty())
        throw std::invalid_argument("combine: empty input");
    if (coeffs.size() != vecs.size())
        throw std::invalid_argument("combine: " + std::to_string(coeffs.size()) +
                                    " coefficients for " + std::to_string(vecs.size()) +
                                    " vectors");
    const std::size_t len = vecs[0]->size();
    ParamVector out(len, 0.0);
    for (std::size_t j = 0; j < vecs.size(); ++j) {
        if (vecs[j]->size() != len)
            throw std::invalid_argument("combine: vector length mismatch (" +
                                        std::to_string(vecs[j]->size()) + " vs " +
                                        std::to_string(len) + ")");
        axpy(coeffs[j], *vecs[j], out);
    }
    return out;
}

ParamVector combine(const std::vector<double>& coeffs,
                    const std::vector<ParamVector>& vecs) {
    std::vector<const ParamVector*> ptrs;
    ptrs.reserve(vecs.size());
    for (const auto& v : vecs) ptrs.push_back(&v);
    return combine(coeffs, ptrs);
}

std::vector<double> softmax_stable(const std::vector<double>& scores) {
    if (scores.empty()) throw std::invalid_argument("softmax: empty input");
    for (double s : scores)
        if (!std::isfinite(s)) throw std::invalid_argument("softmax: non-finite score");

    const double m = *std::max_element(scores.begin(), scores.end());
    std::vector<double> exps(scores.size());
    for (std::size_t j = 0; j < scores.size(); ++j) exps[j] = std::exp(scores[j] - m);

    // Permutation-invariant normalizer: sum in descending value order.
    std::vector<double> sorted = exps;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double denom = 0.0;
    for (double e : sorted) denom += e;

    std::vector<double> out(scores.size());
    for (std::size_t j = 0; j < scores.size(); ++j) out[j] = exps[j] / denom;
    return out;
}

bool all_finite(const ParamVector& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace igfl
