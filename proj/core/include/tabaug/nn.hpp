#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tabaug/matrix.hpp"
#include "tabaug/rng.hpp"

namespace tabaug {

enum class Activation { relu, sigmoid, tanh, identity };

const char* to_string(Activation a);
Activation activation_from_string(const std::string& s);

double apply_activation(Activation a, double x);
/// Derivative with respect to the pre-activation. relu'(0) is 0.
double activation_derivative(Activation a, double pre);

/// Fully connected feed-forward network. weights[l] is (width[l+1] x width[l]);
/// the hidden activation applies to every layer except the last.
struct MlpParams {
    std::vector<std::size_t> layer_widths; // input, hidden..., output
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
    Activation hidden_activation = Activation::relu;
    Activation output_activation = Activation::identity;

    std::size_t layer_count() const { return weights.size(); }
    std::size_t input_width() const { return layer_widths.front(); }
    std::size_t output_width() const { return layer_widths.back(); }
    std::size_t parameter_count() const;
    Activation activation_at(std::size_t layer) const {
        return layer + 1 == weights.size() ? output_activation : hidden_activation;
    }
};

/// Glorot-uniform weights (U[-sqrt(6/(fan_in+fan_out)), +sqrt]), zero biases.
/// Weights are drawn layer by layer in row-major entry order.
MlpParams init_mlp(const std::vector<std::size_t>& widths, Activation hidden,
                   Activation output, Rng& rng);

/// Everything forward() computed, kept for the backward pass.
struct ActivationStack {
    Matrix input;             // batch x input_width
    std::vector<Matrix> pre;  // per layer, batch x width (before activation)
    std::vector<Matrix> post; // per layer, batch x width (after activation)
    const Matrix& output() const { return post.back(); }
};

ActivationStack forward(const MlpParams& mlp, const Matrix& batch);

struct MlpGradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};

MlpGradients zero_gradients(const MlpParams& mlp);
void add_gradients(MlpGradients& into, const MlpGradients& g);
void scale_gradients(MlpGradients& g, double factor);

/// Exact backprop. output_grad is dLoss/d(post-activation output), batch x out.
/// When input_grad is non-null it receives dLoss/d(input batch), which is how
/// generator gradients flow through a frozen critic.
MlpGradients backward(const MlpParams& mlp, const ActivationStack& stack,
                      const Matrix& output_grad, Matrix* input_grad = nullptr);

enum class OptimizerKind { sgd, rmsprop, adam };

const char* to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(const std::string& s);

struct OptimizerState {
    OptimizerKind kind = OptimizerKind::sgd;
    double learning_rate = 0.01;
    double decay = 0.9;      // rmsprop accumulator decay
    double beta1 = 0.9;      // adam
    double beta2 = 0.999;    // adam
    double epsilon = 1e-8;
    std::uint64_t step = 0;
    // First/second moment accumulators, shaped exactly like the parameters.
    std::vector<Matrix> acc_w, acc2_w;
    std::vector<std::vector<double>> acc_b, acc2_b;
};

OptimizerState make_optimizer(OptimizerKind kind, const MlpParams& mlp, double learning_rate);

/// One optimizer update in place. Throws NumericFault naming the layer if any
/// gradient entry is not finite.
void optimizer_step(MlpParams& params, const MlpGradients& grads, OptimizerState& state);

/// Clamp every weight and bias into [-c, c].
void clip_weights(MlpParams& params, double c);

enum class LossKind { squared_error, mean_score, logistic };

/// squared_error: (1/n) sum_ij (out - target)^2
/// mean_score:    (1/n) sum_ij out            (critic-style; target ignored)
/// logistic:      -(1/n) sum_ij [t log a + (1-t) log(1-a)], a clamped away from {0,1}
double loss_value(LossKind loss, const Matrix& output, const Matrix& target);
Matrix loss_output_grad(LossKind loss, const Matrix& output, const Matrix& target);

/// Max over parameters of |analytic - numeric| / max(|analytic|, |numeric|, 1e-8),
/// numeric by central differences with step 1e-5. Meant for small nets.
double gradient_check(const MlpParams& mlp, const Matrix& batch, LossKind loss,
                      const Matrix& target);

} // namespace tabaug
