#include "igfl/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace igfl {

namespace {

void check_len(const ParamVector& w, std::size_t expected, const char* what) {
    if (w.size() != expected)
        throw std::invalid_argument(std::string(what) + ": parameter length " +
                                    std::to_string(w.size()) + ", expected " +
                                    std::to_string(expected));
}

double log_sum_exp(const std::vector<double>& v) {
    const double m = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

int argmax_lowest_tie(const std::vector<double>& v) {
    int best = 0;
    for (int k = 1; k < static_cast<int>(v.size()); ++k)
        if (v[k] > v[best]) best = k;
    return best;
}

}  // namespace

std::vector<int> LossModel::predict(const ParamVector&, const Batch&) const {
    throw std::logic_error("predict: model is not a classifier");
}

ParamVector LossModel::init_params(std::mt19937_64&) const {
    return zeros(param_count());
}

// ---------------------------------------------------------------------------
// QuadraticModel

QuadraticModel::QuadraticModel(ParamVector center, ParamVector curvature)
    : center_(std::move(center)), curvature_(std::move(curvature)) {
    if (center_.empty() || center_.size() != curvature_.size())
        throw std::invalid_argument("quadratic: center/curvature size mismatch");
    for (double a : curvature_)
        if (!(a > 0.0)) throw std::invalid_argument("quadratic: curvature must be positive");
}

double QuadraticModel::loss(const ParamVector& w, const Batch&) const {
    check_len(w, center_.size(), "quadratic loss");
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double d = w[k] - center_[k];
        s += 0.5 * curvature_[k] * d * d;
    }
    return s;
}

ParamVector QuadraticModel::gradient(const ParamVector& w, const Batch&) const {
    check_len(w, center_.size(), "quadratic gradient");
    ParamVector g(w.size());
    for (std::size_t k = 0; k < w.size(); ++k)
        g[k] = curvature_[k] * (w[k] - center_[k]);
    return g;
}

ParamVector QuadraticModel::average_optimum(
    const std::vector<const QuadraticModel*>& models) {
    if (models.empty()) throw std::invalid_argument("average_optimum: no models");
    const std::size_t n = models[0]->param_count();
    ParamVector num(n, 0.0), den(n, 0.0);
    for (const QuadraticModel* m : models) {
        check_len(m->center_, n, "average_optimum");
        for (std::size_t k = 0; k < n; ++k) {
            num[k] += m->curvature_[k] * m->center_[k];
            den[k] += m->curvature_[k];
        }
    }
    ParamVector w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = num[k] / den[k];
    return w;
}

// ---------------------------------------------------------------------------
// LogisticModel

LogisticModel::LogisticModel(std::size_t input_dim, std::size_t num_classes)
    : input_dim_(input_dim), num_classes_(num_classes) {
    if (input_dim_ == 0 || num_classes_ < 2)
        throw std::invalid_argument("logistic: need input_dim >= 1 and >= 2 classes");
}

void LogisticModel::logits_for_row(const ParamVector& w, const Batch& b, std::size_t row,
                                   std::vector<double>& out) const {
    out.assign(num_classes_, 0.0);
    const double* x = &b.x[row * b.dim];
    const double* bias = &w[num_classes_ * input_dim_];
    for (std::size_t c = 0; c < num_classes_; ++c) {
        const double* wc = &w[c * input_dim_];
        double z = bias[c];
        for (std::size_t k = 0; k < input_dim_; ++k) z += wc[k] * x[k];
        out[c] = z;
    }
}

double LogisticModel::loss(const ParamVector& w, const Batch& batch) const {
    check_len(w, param_count(), "logistic loss");
    if (batch.rows == 0 || batch.dim != input_dim_)
        throw std::invalid_argument("logistic loss: bad batch shape");
    std::vector<double> z;
    double total = 0.0;
    for (std::size_t r = 0; r < batch.rows; ++r) {
        logits_for_row(w, batch, r, z);
        total += log_sum_exp(z) - z[static_cast<std::size_t>(batch.y[r])];
    }
    return total / static_cast<double>(batch.rows);
}

ParamVector LogisticModel::gradient(const ParamVector& w, const Batch& batch) const {
    check_len(w, param_count(), "logistic gradient");
    if (batch.rows == 0 || batch.dim != input_dim_)
        throw std::invalid_argument("logistic gradient: bad batch shape");
    ParamVector g(param_count(), 0.0);
    std::vector<double> z;
    const double inv_rows = 1.0 / static_cast<double>(batch.rows);
    for (std::size_t r = 0; r < batch.rows; ++r) {
        logits_for_row(w, batch, r, z);
        const double lse = log_sum_exp(z);
        const double* x = &batch.x[r * batch.dim];
        for (std::size_t c = 0; c < num_classes_; ++c) {
            double p = std::exp(z[c] - lse);
            if (static_cast<int>(c) == batch.y[r]) p -= 1.0;
            p *= inv_rows;
            double* gc = &g[c * input_dim_];
            for (std::size_t k = 0; k < input_dim_; ++k) gc[k] += p * x[k];
            g[num_classes_ * input_dim_ + c] += p;
        }
    }
    return g;
}

std::vector<int> LogisticModel::predict(const ParamVector& w, const Batch& batch) const {
    check_len(w, param_count(), "logistic predict");
    std::vector<int> out(batch.rows);
    std::vector<double> z;
    for (std::size_t r = 0; r < batch.rows; ++r) {
        logits_for_row(w, batch, r, z);
        out[r] = argmax_lowest_tie(z);
    }
    return out;
}

// ---------------------------------------------------------------------------
// MlpModel

MlpModel::MlpModel(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes)
    : input_dim_(input_dim), hidden_dim_(hidden_dim), num_classes_(num_classes) {
    if (input_dim_ == 0 || hidden_dim_ == 0 || num_classes_ < 2)
        throw std::invalid_argument("mlp: bad dimensions");
}

std::size_t MlpModel::param_count() const {
    return hidden_dim_ * input_dim_ + hidden_dim_ + num_classes_ * hidden_dim_ + num_classes_;
}

// Layout: W1 [h x d], b1 [h], W2 [c x h], b2 [c].
void MlpModel::forward_row(const ParamVector& w, const Batch& b, std::size_t row,
                           std::vector<double>& hidden, std::vector<double>& logits) const {
    const double* x = &b.x[row * b.dim];
    const double* w1 = &w[0];
    const double* b1 = &w[hidden_dim_ * input_dim_];
    const double* w2 = b1 + hidden_dim_;
    const double* b2 = w2 + num_classes_ * hidden_dim_;

    hidden.assign(hidden_dim_, 0.0);
    for (std::size_t j = 0; j < hidden_dim_; ++j) {
        double a = b1[j];
        const double* row_w = &w1[j * input_dim_];
        for (std::size_t k = 0; k < input_dim_; ++k) a += row_w[k] * x[k];
        hidden[j] = std::tanh(a);
    }
    logits.assign(num_classes_, 0.0);
    for (std::size_t c = 0; c < num_classes_; ++c) {
        double z = b2[c];
        const double* row_w = &w2[c * hidden_dim_];
        for (std::size_t j = 0; j < hidden_dim_; ++j) z += row_w[j] * hidden[j];
        logits[c] = z;
    }
}

double MlpModel::loss(const ParamVector& w, const Batch& batch) const {
    check_len(w, param_count(), "mlp loss");
    if (batch.rows == 0 || batch.dim != input_dim_)
        throw std::invalid_argument("mlp loss: bad batch shape");
    std::vector<double> h, z;
    double total = 0.0;
    for (std::size_t r = 0; r < batch.rows; ++r) {
        forward_row(w, batch, r, h, z);
        total += log_sum_exp(z) - z[static_cast<std::size_t>(batch.y[r])];
    }
    return total / static_cast<double>(batch.rows);
}

ParamVector MlpModel::gradient(const ParamVector& w, const Batch& batch) const {
    check_len(w, param_count(), "mlp gradient");
    if (batch.rows == 0 || batch.dim != input_dim_)
        throw std::invalid_argument("mlp gradient: bad batch shape");

    ParamVector g(param_count(), 0.0);
    double* g_w1 = &g[0];
    double* g_b1 = &g[hidden_dim_ * input_dim_];
    double* g_w2 = g_b1 + hidden_dim_;
    double* g_b2 = g_w2 + num_classes_ * hidden_dim_;
    const double* w2 = &w[hidden_dim_ * input_dim_ + hidden_dim_];

    std::vector<double> h, z, dlogits(num_classes_), dh(hidden_dim_);
    const double inv_rows = 1.0 / static_cast<double>(batch.rows);
    for (std::size_t r = 0; r < batch.rows; ++r) {
        forward_row(w, batch, r, h, z);
        const double lse = log_sum_exp(z);
        for (std::size_t c = 0; c < num_classes_; ++c) {
            dlogits[c] = std::exp(z[c] - lse);
            if (static_cast<int>(c) == batch.y[r]) dlogits[c] -= 1.0;
            dlogits[c] *= inv_rows;
        }
        const double* x = &batch.x[r * batch.dim];
        std::fill(dh.begin(), dh.end(), 0.0);
        for (std::size_t c = 0; c < num_classes_; ++c) {
            double* grow = &g_w2[c * hidden_dim_];
            const double* wrow = &w2[c * hidden_dim_];
            for (std::size_t j = 0; j < hidden_dim_; ++j) {
                grow[j] += dlogits[c] * h[j];
                dh[j] += dlogits[c] * wrow[j];
            }
            g_b2[c] += dlogits[c];
        }
        for (std::size_t j = 0; j < hidden_dim_; ++j) {
            const double da = dh[j] * (1.0 - h[j] * h[j]);  // tanh'
            double* grow = &g_w1[j * input_dim_];
            for (std::size_t k = 0; k < input_dim_; ++k) grow[k] += da * x[k];
            g_b1[j] += da;
        }
    }
    return g;
}

std::vector<int> MlpModel::predict(const ParamVector& w, const Batch& batch) const {
    check_len(w, param_count(), "mlp predict");
    std::vector<int> out(batch.rows);
    std::vector<double> h, z;
    for (std::size_t r = 0; r < batch.rows; ++r) {
        forward_row(w, batch, r, h, z);
        out[r] = argmax_lowest_tie(z);
    }
    return out;
}

ParamVector MlpModel::init_params(std::mt19937_64& rng) const {
    ParamVector w(param_count(), 0.0);
    const double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim_));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim_));
    std::uniform_real_distribution<double> u1(-s1, s1), u2(-s2, s2);
    for (std::size_t k = 0; k < hidden_dim_ * input_dim_; ++k) w[k] = u1(rng);
    double* w2 = &w[hidden_dim_ * input_dim_ + hidden_dim_];
    for (std::size_t k = 0; k < num_classes_ * hidden_dim_; ++k) w2[k] = u2(rng);
    return w;
}

// ---------------------------------------------------------------------------

ParamVector finite_diff_gradient(const LossModel& model, const ParamVector& w,
                                 const Batch& batch, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite_diff_gradient: h must be > 0");
    ParamVector g(w.size());
    ParamVector wp = w;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double orig = wp[k];
        wp[k] = orig + h;
        const double up = model.loss(wp, batch);
        wp[k] = orig - h;
        const double down = model.loss(wp, batch);
        wp[k] = orig;
        g[k] = (up - down) / (2.0 * h);
    }
    return g;
}

double predict_accuracy(const LossModel& model, const ParamVector& w, const Batch& data) {
    if (!model.is_classifier())
        throw std::logic_error("predict_accuracy: model is not a classifier");
    if (data.rows == 0) throw std::invalid_argument("predict_accuracy: empty batch");
    const std::vector<int> pred = model.predict(w, data);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < data.rows; ++r)
        if (pred[r] == data.y[r]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(data.rows);
}

}  // namespace igfl
