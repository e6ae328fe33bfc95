#ifndef IGFL_MODELS_HPP
#define IGFL_MODELS_HPP

#include <cstddef>
#include <random>
#include <vector>

#include "igfl/param_vector.hpp"

namespace igfl {

// Mini-batch of examples. Features are row-major [rows x dim]; labels are
// ignored by analytic (quadratic) objectives.
struct Batch {
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::vector<double> x;
    std::vector<int> y;
};

// Evaluatable objective with exact gradient. Immutable after construction;
// loss/gradient are pure and callable concurrently.
class LossModel {
public:
    virtual ~LossModel() = default;

    virtual std::size_t param_count() const = 0;
    virtual bool is_classifier() const = 0;

    // May return a non-finite value; callers treat that as divergence.
    virtual double loss(const ParamVector& w, const Batch& batch) const = 0;
    virtual ParamVector gradient(const ParamVector& w, const Batch& batch) const = 0;

    // Argmax class per row, ties broken toward the lowest class index.
    virtual std::vector<int> predict(const ParamVector& w, const Batch& batch) const;

    virtual ParamVector init_params(std::mt19937_64& rng) const;
};

// f(w) = 1/2 sum_k A_k (w_k - c_k)^2 with diagonal curvature A > 0.
class QuadraticModel final : public LossModel {
public:
    QuadraticModel(ParamVector center, ParamVector curvature);

    std::size_t param_count() const override { return center_.size(); }
    bool is_classifier() const override { return false; }
    double loss(const ParamVector& w, const Batch& batch) const override;
    ParamVector gradient(const ParamVector& w, const Batch& batch) const override;

    const ParamVector& center() const { return center_; }
    const ParamVector& curvature() const { return curvature_; }

    // Minimizer of the average of several quadratic objectives:
    // w*_k = sum_i A_ik c_ik / sum_i A_ik.
    static ParamVector average_optimum(const std::vector<const QuadraticModel*>& models);

private:
    ParamVector center_;
    ParamVector curvature_;
};

// Multinomial logistic regression; params are W [classes x dim] then biases.
class LogisticModel final : public LossModel {
public:
    LogisticModel(std::size_t input_dim, std::size_t num_classes);

    std::size_t param_count() const override { return num_classes_ * (input_dim_ + 1); }
    bool is_classifier() const override { return true; }
    double loss(const ParamVector& w, const Batch& batch) const override;
    ParamVector gradient(const ParamVector& w, const Batch& batch) const override;
    std::vector<int> predict(const ParamVector& w, const Batch& batch) const override;

private:
    void logits_for_row(const ParamVector& w, const Batch& b, std::size_t row,
                        std::vector<double>& out) const;
    std::size_t input_dim_;
    std::size_t num_classes_;
};

// One hidden layer, tanh activation, softmax cross-entropy output.
class MlpModel final : public LossModel {
public:
    MlpModel(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes);

    std::size_t param_count() const override;
    bool is_classifier() const override { return true; }
    double loss(const ParamVector& w, const Batch& batch) const override;
    ParamVector gradient(const ParamVector& w, const Batch& batch) const override;
    std::vector<int> predict(const ParamVector& w, const Batch& batch) const override;
    ParamVector init_params(std::mt19937_64& rng) const override;

private:
    void forward_row(const ParamVector& w, const Batch& b, std::size_t row,
                     std::vector<double>& hidden, std::vector<double>& logits) const;
    std::size_t input_dim_;
    std::size_t hidden_dim_;
    std::size_t num_classes_;
};

// Central-difference gradient oracle, (loss(w+h e_k) - loss(w-h e_k)) / 2h.
ParamVector finite_diff_gradient(const LossModel& model, const ParamVector& w,
                                 const Batch& batch, double h = 1e-5);

// Fraction of rows classified correctly.
double predict_accuracy(const LossModel& model, const ParamVector& w, const Batch& data);

}  // namespace igfl

#endif
