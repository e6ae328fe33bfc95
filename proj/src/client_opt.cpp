#include "igfl/client_opt.hpp"

#include <string>

namespace igfl {

namespace {

void validate(const ClientRoundInput& in, const LossModel& model) {
    if (!in.global_params || !in.global_delta || !in.batches)
        throw std::invalid_argument("client round: missing input");
    if (in.global_params->size() != model.param_count() ||
        in.global_delta->size() != model.param_count())
        throw std::invalid_argument("client round: parameter length mismatch");
    if (in.batches->empty()) throw std::invalid_argument("client round: no local steps");
    if (!(in.lr > 0.0)) throw std::invalid_argument("client round: lr must be > 0");
    if (in.sample_count < 1) throw std::invalid_argument("client round: sample_count < 1");
}

void check_step_finite(const ParamVector& g, std::size_t t) {
    if (!all_finite(g))
        throw DivergenceError("non-finite gradient at local step " + std::to_string(t));
}

ParamVector delta_from(const ParamVector& w, const ParamVector& w0) {
    ParamVector d(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) d[k] = w[k] - w0[k];
    return d;
}

}  // namespace

ParamVector local_sgd_round(const ClientRoundInput& in, const LossModel& model) {
    validate(in, model);
    ParamVector w = *in.global_params;
    for (std::size_t t = 0; t < in.batches->size(); ++t) {
        const ParamVector g = model.gradient(w, (*in.batches)[t]);
        check_step_finite(g, t);
        axpy(-in.lr, g, w);
    }
    return delta_from(w, *in.global_params);
}

ParamVector igfl_client_round(const ClientRoundInput& in, const ClientState& state,
                              const LossModel& model) {
    validate(in, model);
    if (state.last_update.size() != model.param_count())
        throw std::invalid_argument("igfl client round: stale state length mismatch");

    const double T = static_cast<double>(in.batches->size());
    const double inv_s = 1.0 / static_cast<double>(in.sample_count);
    ParamVector w = *in.global_params;
    for (std::size_t t = 0; t < in.batches->size(); ++t) {
        const ParamVector g = model.gradient(w, (*in.batches)[t]);
        check_step_finite(g, t);
        for (std::size_t k = 0; k < w.size(); ++k) {
            const double local_step = -in.lr * g[k];
            if (in.disable_correction) {
                w[k] += local_step;
            } else {
                const double group_step =
                    inv_s * (local_step - state.last_update[k] / T) +
                    (*in.global_delta)[k] / T;
                w[k] += local_step + group_step;
            }
        }
    }
    return delta_from(w, *in.global_params);
}

std::pair<ParamVector, ParamVector> scaffold_client_round(const ClientRoundInput& in,
                                                          const ClientState& state,
                                                          const ParamVector& server_control,
                                                          const LossModel& model) {
    validate(in, model);
    if (state.control_variate.size() != model.param_count() ||
        server_control.size() != model.param_count())
        throw std::invalid_argument("scaffold round: control vector length mismatch");

    const double T = static_cast<double>(in.batches->size());
    ParamVector w = *in.global_params;
    for (std::size_t t = 0; t < in.batches->size(); ++t) {
        const ParamVector g = model.gradient(w, (*in.batches)[t]);
        check_step_finite(g, t);
        for (std::size_t k = 0; k < w.size(); ++k)
            w[k] -= in.lr * (g[k] - state.control_variate[k] + server_control[k]);
    }
    const ParamVector delta = delta_from(w, *in.global_params);
    // c_i <- c_i - c + (w_start - w_end) / (T * lr); return the change only.
    ParamVector c_delta(w.size());
    for (std::size_t k = 0; k < w.size(); ++k)
        c_delta[k] = -server_control[k] - delta[k] / (T * in.lr);
    return {delta, c_delta};
}

}  // namespace igfl
