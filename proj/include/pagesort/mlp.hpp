#pragma once

// The 5-5-3 sigmoid network, its 3-bit output code and online
// backpropagation training.

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "pagesort/class_label.hpp"
#include "pagesort/error.hpp"
#include "pagesort/features.hpp"
#include "pagesort/random.hpp"

namespace pagesort {

inline constexpr std::size_t kInputs = 5;
inline constexpr std::size_t kHidden = 5;
inline constexpr std::size_t kOutputs = 3;

using InputVector = std::array<double, kInputs>;
using HiddenVector = std::array<double, kHidden>;
using OutputVector = std::array<double, kOutputs>;

/// Weights and biases. Also used to hold a gradient of the same shape.
struct Network {
    std::array<std::array<double, kHidden>, kInputs> w_ih{};   // [input][hidden]
    HiddenVector b_h{};
    std::array<std::array<double, kOutputs>, kHidden> w_ho{};  // [hidden][output]
    OutputVector b_o{};

    static constexpr std::size_t parameter_count() noexcept {
        return kInputs * kHidden + kHidden + kHidden * kOutputs + kOutputs;
    }

    /// Visits every parameter in file order: w_ih rows, b_h, w_ho rows, b_o.
    template <typename Fn>
    void for_each_parameter(Fn&& fn) {
        for (auto& row : w_ih)
            for (auto& w : row) fn(w);
        for (auto& b : b_h) fn(b);
        for (auto& row : w_ho)
            for (auto& w : row) fn(w);
        for (auto& b : b_o) fn(b);
    }

    template <typename Fn>
    void for_each_parameter(Fn&& fn) const {
        const_cast<Network*>(this)->for_each_parameter(
            [&](double& p) { fn(static_cast<const double&>(p)); });
    }

    bool all_finite() const {
        bool ok = true;
        for_each_parameter([&](double p) { ok = ok && std::isfinite(p); });
        return ok;
    }

    friend bool operator==(const Network&, const Network&) = default;
};

using Gradient = Network;

struct TrainConfig {
    double learning_rate = 0.5;
    std::uint64_t epochs = 2000;
    std::uint64_t seed = 42;
    double target_mse = 0.01;
    double init_scale = 0.5;

    void validate() const {
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
            throw Error("learning rate must be a positive finite number");
        }
        if (epochs < 1) throw Error("epochs must be at least 1");
        if (!(target_mse >= 0.0)) throw Error("target MSE must be >= 0");
        if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) {
            throw Error("init scale must be a finite number >= 0");
        }
    }
};

struct TrainReport {
    std::uint64_t epochs_run = 0;
    double final_mse = 0.0;
    std::vector<double> mse_history;
};

struct Sample {
    FeatureVector features;
    ClassLabel label{};

    friend bool operator==(const Sample&, const Sample&) = default;
};

// ---------------------------------------------------------------------------
// Output code

inline OutputVector encode_label(ClassLabel c) noexcept {
    const auto bits = bits_of(c);
    return {static_cast<double>(bits[0]), static_cast<double>(bits[1]),
            static_cast<double>(bits[2])};
}

/// Threshold each output at 0.50 (inclusive) and read the 3-bit code.
inline ClassLabel decode_output(const OutputVector& raw) noexcept {
    ClassBits bits{};
    for (std::size_t k = 0; k < kOutputs; ++k) bits[k] = raw[k] >= 0.5 ? 1 : 0;
    return label_from_bits(bits);
}

// ---------------------------------------------------------------------------
// Forward / backward

inline double sigmoid(double z) noexcept { return 1.0 / (1.0 + std::exp(-z)); }

struct Activations {
    HiddenVector hidden{};
    OutputVector output{};
};

inline Activations forward(const Network& net, const InputVector& x) noexcept {
    Activations a;
    for (std::size_t j = 0; j < kHidden; ++j) {
        double z = net.b_h[j];
        for (std::size_t i = 0; i < kInputs; ++i) z += net.w_ih[i][j] * x[i];
        a.hidden[j] = sigmoid(z);
    }
    for (std::size_t k = 0; k < kOutputs; ++k) {
        double z = net.b_o[k];
        for (std::size_t j = 0; j < kHidden; ++j) z += net.w_ho[j][k] * a.hidden[j];
        a.output[k] = sigmoid(z);
    }
    return a;
}

inline Activations forward(const Network& net, const FeatureVector& x) noexcept {
    return forward(net, x.as_array());
}

/// E = 1/2 * sum_k (target_k - output_k)^2
inline double half_squared_error(const OutputVector& output, const OutputVector& target) noexcept {
    double e = 0.0;
    for (std::size_t k = 0; k < kOutputs; ++k) {
        const double d = target[k] - output[k];
        e += d * d;
    }
    return 0.5 * e;
}

struct GradientResult {
    Gradient gradient;
    double sample_se = 0.0;  // sum_k (target_k - output_k)^2
};

/// dE/dparameter for one sample, E = 1/2 * sum of squared output errors.
inline GradientResult compute_gradient(const Network& net, const InputVector& x,
                                       const OutputVector& target) noexcept {
    const auto a = forward(net, x);
    GradientResult r;
    OutputVector delta_o{};
    for (std::size_t k = 0; k < kOutputs; ++k) {
        const double o = a.output[k];
        const double err = o - target[k];
        r.sample_se += err * err;
        delta_o[k] = err * o * (1.0 - o);
    }
    HiddenVector delta_h{};
    for (std::size_t j = 0; j < kHidden; ++j) {
        double back = 0.0;
        for (std::size_t k = 0; k < kOutputs; ++k) back += net.w_ho[j][k] * delta_o[k];
        const double h = a.hidden[j];
        delta_h[j] = back * h * (1.0 - h);
    }
    auto& g = r.gradient;
    for (std::size_t j = 0; j < kHidden; ++j) {
        for (std::size_t k = 0; k < kOutputs; ++k) g.w_ho[j][k] = delta_o[k] * a.hidden[j];
    }
    g.b_o = delta_o;
    for (std::size_t i = 0; i < kInputs; ++i) {
        for (std::size_t j = 0; j < kHidden; ++j) g.w_ih[i][j] = delta_h[j] * x[i];
    }
    g.b_h = delta_h;
    return r;
}

struct StepResult {
    Network net;
    double sample_se = 0.0;
};

/// One online gradient-descent update on a single sample.
inline StepResult backprop_step(const Network& net, const InputVector& x,
                                const OutputVector& target, double lr) noexcept {
    const auto [g, se] = compute_gradient(net, x, target);
    StepResult r{net, se};
    auto& n = r.net;
    for (std::size_t i = 0; i < kInputs; ++i)
        for (std::size_t j = 0; j < kHidden; ++j) n.w_ih[i][j] -= lr * g.w_ih[i][j];
    for (std::size_t j = 0; j < kHidden; ++j) n.b_h[j] -= lr * g.b_h[j];
    for (std::size_t j = 0; j < kHidden; ++j)
        for (std::size_t k = 0; k < kOutputs; ++k) n.w_ho[j][k] -= lr * g.w_ho[j][k];
    for (std::size_t k = 0; k < kOutputs; ++k) n.b_o[k] -= lr * g.b_o[k];
    return r;
}

inline StepResult backprop_step(const Network& net, const FeatureVector& x,
                                const OutputVector& target, double lr) noexcept {
    return backprop_step(net, x.as_array(), target, lr);
}

// ---------------------------------------------------------------------------
// Initialization and training

namespace detail {
inline constexpr std::uint64_t kInitStream = 1;
inline constexpr std::uint64_t kShuffleStream = 2;
}  // namespace detail

/// Uniform weights in [-init_scale, init_scale], reproducible per seed.
inline Network init_network(const TrainConfig& config) {
    config.validate();
    auto rng = make_rng(config.seed, detail::kInitStream);
    Network net;
    net.for_each_parameter(
        [&](double& p) { p = uniform(rng, -config.init_scale, config.init_scale); });
    return net;
}

struct TrainResult {
    Network net;
    TrainReport report;
};

/// Online backpropagation with a seeded per-epoch shuffle. Stops after
/// config.epochs or once an epoch's mean sample error reaches target_mse.
inline TrainResult train(Network net, std::span<const Sample> data, const TrainConfig& config) {
    config.validate();
    if (data.empty()) throw Error("empty training set");
    std::vector<OutputVector> targets;
    targets.reserve(data.size());
    for (const auto& s : data) targets.push_back(encode_label(s.label));

    auto rng = make_rng(config.seed, detail::kShuffleStream);
    std::vector<std::size_t> order(data.size());
    TrainReport report;
    for (std::uint64_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        shuffle(std::span<std::size_t>(order), rng);
        double se_sum = 0.0;
        for (auto idx : order) {
            auto step = backprop_step(net, data[idx].features, targets[idx], config.learning_rate);
            net = step.net;
            se_sum += step.sample_se;
        }
        if (!net.all_finite()) {
            throw Error("training diverged: non-finite weight after epoch " +
                        std::to_string(epoch + 1));
        }
        const double mse = se_sum / static_cast<double>(data.size());
        report.mse_history.push_back(mse);
        ++report.epochs_run;
        report.final_mse = mse;
        if (mse <= config.target_mse) break;
    }
    return {net, std::move(report)};
}

struct Prediction {
    ClassLabel label{};
    OutputVector raw{};
};

inline Prediction predict(const Network& net, const FeatureVector& x) noexcept {
    const auto a = forward(net, x);
    return {decode_output(a.output), a.output};
}

}  // namespace pagesort
