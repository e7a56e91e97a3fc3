#include "tabaug/nn.hpp"

#include <algorithm>
#include <cmath>

#include "tabaug/errors.hpp"

namespace tabaug {

const char* to_string(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::sigmoid: return "sigmoid";
        case Activation::tanh: return "tanh";
        case Activation::identity: return "identity";
    }
    return "?";
}

Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "sigmoid") return Activation::sigmoid;
    if (s == "tanh") return Activation::tanh;
    if (s == "identity") return Activation::identity;
    throw InvalidArgument("unknown activation: " + s);
}

double apply_activation(Activation a, double x) {
    switch (a) {
        case Activation::relu: return x > 0.0 ? x : 0.0;
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
        case Activation::tanh: return std::tanh(x);
        case Activation::identity: return x;
    }
    return x;
}

double activation_derivative(Activation a, double pre) {
    switch (a) {
        case Activation::relu: return pre > 0.0 ? 1.0 : 0.0;
        case Activation::sigmoid: {
            const double s = 1.0 / (1.0 + std::exp(-pre));
            return s * (1.0 - s);
        }
        case Activation::tanh: {
            const double t = std::tanh(pre);
            return 1.0 - t * t;
        }
        case Activation::identity: return 1.0;
    }
    return 1.0;
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& w : weights) n += w.data.size();
    for (const auto& b : biases) n += b.size();
    return n;
}

MlpParams init_mlp(const std::vector<std::size_t>& widths, Activation hidden,
                   Activation output, Rng& rng) {
    if (widths.size() < 2) throw InvalidArgument("init_mlp: need at least one layer");
    for (std::size_t w : widths) {
        if (w == 0) throw InvalidArgument("init_mlp: zero-width layer");
    }
    MlpParams mlp;
    mlp.layer_widths = widths;
    mlp.hidden_activation = hidden;
    mlp.output_activation = output;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const std::size_t fan_in = widths[l];
        const std::size_t fan_out = widths[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Matrix w(fan_out, fan_in);
        for (double& v : w.data) v = rng.uniform(-limit, limit);
        mlp.weights.push_back(std::move(w));
        mlp.biases.emplace_back(fan_out, 0.0);
    }
    return mlp;
}

ActivationStack forward(const MlpParams& mlp, const Matrix& batch) {
    if (batch.cols != mlp.input_width())
        throw InvalidArgument("forward: batch has " + std::to_string(batch.cols) +
                              " columns, net expects " + std::to_string(mlp.input_width()));
    ActivationStack stack;
    stack.input = batch;
    const Matrix* current = &stack.input;
    for (std::size_t l = 0; l < mlp.layer_count(); ++l) {
        Matrix z = matmul_bt(*current, mlp.weights[l]);
        add_row_inplace(z, mlp.biases[l]);
        Matrix a(z.rows, z.cols);
        const Activation act = mlp.activation_at(l);
        for (std::size_t i = 0; i < z.data.size(); ++i)
            a.data[i] = apply_activation(act, z.data[i]);
        stack.pre.push_back(std::move(z));
        stack.post.push_back(std::move(a));
        current = &stack.post.back();
    }
    return stack;
}

MlpGradients zero_gradients(const MlpParams& mlp) {
    MlpGradients g;
    for (const auto& w : mlp.weights) g.weights.emplace_back(w.rows, w.cols);
    for (const auto& b : mlp.biases) g.biases.emplace_back(b.size(), 0.0);
    return g;
}

void add_gradients(MlpGradients& into, const MlpGradients& g) {
    for (std::size_t l = 0; l < into.weights.size(); ++l) {
        for (std::size_t i = 0; i < into.weights[l].data.size(); ++i)
            into.weights[l].data[i] += g.weights[l].data[i];
        for (std::size_t i = 0; i < into.biases[l].size(); ++i)
            into.biases[l][i] += g.biases[l][i];
    }
}

void scale_gradients(MlpGradients& g, double factor) {
    for (auto& w : g.weights)
        for (double& v : w.data) v *= factor;
    for (auto& b : g.biases)
        for (double& v : b) v *= factor;
}

MlpGradients backward(const MlpParams& mlp, const ActivationStack& stack,
                      const Matrix& output_grad, Matrix* input_grad) {
    const std::size_t layers = mlp.layer_count();
    if (!output_grad.same_shape(stack.output()))
        throw InvalidArgument("backward: output_grad shape mismatch");

    MlpGradients grads;
    grads.weights.resize(layers);
    grads.biases.resize(layers);

    // delta = dLoss/d(pre-activation of layer l)
    Matrix delta = output_grad;
    for (std::size_t i = 0; i < delta.data.size(); ++i)
        delta.data[i] *= activation_derivative(mlp.activation_at(layers - 1),
                                               stack.pre[layers - 1].data[i]);

    for (std::size_t l = layers; l-- > 0;) {
        const Matrix& prev_post = (l == 0) ? stack.input : stack.post[l - 1];
        grads.weights[l] = matmul_at(delta, prev_post);
        grads.biases[l] = col_sums(delta);
        if (l > 0) {
            Matrix next = matmul(delta, mlp.weights[l]); // batch x width[l-1]
            const Activation act = mlp.activation_at(l - 1);
            for (std::size_t i = 0; i < next.data.size(); ++i)
                next.data[i] *= activation_derivative(act, stack.pre[l - 1].data[i]);
            delta = std::move(next);
        } else if (input_grad != nullptr) {
            *input_grad = matmul(delta, mlp.weights[0]);
        }
    }
    return grads;
}

OptimizerState make_optimizer(OptimizerKind kind, const MlpParams& mlp, double learning_rate) {
    OptimizerState st;
    st.kind = kind;
    st.learning_rate = learning_rate;
    for (const auto& w : mlp.weights) {
        st.acc_w.emplace_back(w.rows, w.cols);
        st.acc2_w.emplace_back(w.rows, w.cols);
    }
    for (const auto& b : mlp.biases) {
        st.acc_b.emplace_back(b.size(), 0.0);
        st.acc2_b.emplace_back(b.size(), 0.0);
    }
    return st;
}

namespace {

void check_finite(const std::vector<double>& grad, std::size_t layer, const char* what) {
    for (double v : grad) {
        if (!std::isfinite(v))
            throw NumericFault(std::string("optimizer_step: non-finite ") + what +
                               " gradient in layer " + std::to_string(layer));
    }
}

void apply_update(std::vector<double>& param, const std::vector<double>& grad,
                  std::vector<double>& acc, std::vector<double>& acc2,
                  const OptimizerState& st) {
    switch (st.kind) {
        case OptimizerKind::sgd:
            for (std::size_t i = 0; i < param.size(); ++i)
                param[i] -= st.learning_rate * grad[i];
            break;
        case OptimizerKind::rmsprop:
            for (std::size_t i = 0; i < param.size(); ++i) {
                acc[i] = st.decay * acc[i] + (1.0 - st.decay) * grad[i] * grad[i];
                param[i] -= st.learning_rate * grad[i] / (std::sqrt(acc[i]) + st.epsilon);
            }
            break;
        case OptimizerKind::adam: {
            const double t = static_cast<double>(st.step); // already incremented
            const double bc1 = 1.0 - std::pow(st.beta1, t);
            const double bc2 = 1.0 - std::pow(st.beta2, t);
            for (std::size_t i = 0; i < param.size(); ++i) {
                acc[i] = st.beta1 * acc[i] + (1.0 - st.beta1) * grad[i];
                acc2[i] = st.beta2 * acc2[i] + (1.0 - st.beta2) * grad[i] * grad[i];
                const double m_hat = acc[i] / bc1;
                const double v_hat = acc2[i] / bc2;
                param[i] -= st.learning_rate * m_hat / (std::sqrt(v_hat) + st.epsilon);
            }
            break;
        }
    }
}

} // namespace

void optimizer_step(MlpParams& params, const MlpGradients& grads, OptimizerState& state) {
    if (grads.weights.size() != params.weights.size())
        throw InvalidArgument("optimizer_step: gradient layer count mismatch");
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        if (!params.weights[l].same_shape(grads.weights[l]))
            throw InvalidArgument("optimizer_step: gradient shape mismatch at layer " +
                                  std::to_string(l));
        check_finite(grads.weights[l].data, l, "weight");
        check_finite(grads.biases[l], l, "bias");
    }
    ++state.step;
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        apply_update(params.weights[l].data, grads.weights[l].data,
                     state.acc_w[l].data, state.acc2_w[l].data, state);
        apply_update(params.biases[l], grads.biases[l],
                     state.acc_b[l], state.acc2_b[l], state);
    }
}

void clip_weights(MlpParams& params, double c) {
    if (!(c > 0.0)) throw InvalidArgument("clip_weights: c must be positive");
    for (auto& w : params.weights)
        for (double& v : w.data) v = std::clamp(v, -c, c);
    for (auto& b : params.biases)
        for (double& v : b) v = std::clamp(v, -c, c);
}

namespace {
constexpr double kLogisticClamp = 1e-7;
}

double loss_value(LossKind loss, const Matrix& output, const Matrix& target) {
    const double n = static_cast<double>(output.rows);
    double acc = 0.0;
    switch (loss) {
        case LossKind::squared_error:
            if (!output.same_shape(target))
                throw InvalidArgument("loss_value: target shape mismatch");
            for (std::size_t i = 0; i < output.data.size(); ++i) {
                const double d = output.data[i] - target.data[i];
                acc += d * d;
            }
            return acc / n;
        case LossKind::mean_score:
            for (double v : output.data) acc += v;
            return acc / n;
        case LossKind::logistic:
            if (!output.same_shape(target))
                throw InvalidArgument("loss_value: target shape mismatch");
            for (std::size_t i = 0; i < output.data.size(); ++i) {
                const double a =
                    std::clamp(output.data[i], kLogisticClamp, 1.0 - kLogisticClamp);
                const double t = target.data[i];
                acc -= t * std::log(a) + (1.0 - t) * std::log(1.0 - a);
            }
            return acc / n;
    }
    return 0.0;
}

Matrix loss_output_grad(LossKind loss, const Matrix& output, const Matrix& target) {
    const double n = static_cast<double>(output.rows);
    Matrix g(output.rows, output.cols);
    switch (loss) {
        case LossKind::squared_error:
            for (std::size_t i = 0; i < output.data.size(); ++i)
                g.data[i] = 2.0 * (output.data[i] - target.data[i]) / n;
            break;
        case LossKind::mean_score:
            for (double& v : g.data) v = 1.0 / n;
            break;
        case LossKind::logistic:
            for (std::size_t i = 0; i < output.data.size(); ++i) {
                const double a =
                    std::clamp(output.data[i], kLogisticClamp, 1.0 - kLogisticClamp);
                g.data[i] = (a - target.data[i]) / (a * (1.0 - a) * n);
            }
            break;
    }
    return g;
}

double gradient_check(const MlpParams& mlp, const Matrix& batch, LossKind loss,
                      const Matrix& target) {
    constexpr double kStep = 1e-5;
    const ActivationStack stack = forward(mlp, batch);
    const Matrix out_grad = loss_output_grad(loss, stack.output(), target);
    const MlpGradients analytic = backward(mlp, stack, out_grad);

    MlpParams probe = mlp;
    const auto loss_at = [&]() {
        return loss_value(loss, forward(probe, batch).output(), target);
    };

    double worst = 0.0;
    const auto check_entry = [&](double& p, double analytic_g) {
        const double saved = p;
        p = saved + kStep;
        const double hi = loss_at();
        p = saved - kStep;
        const double lo = loss_at();
        p = saved;
        const double numeric = (hi - lo) / (2.0 * kStep);
        const double denom = std::max({std::abs(analytic_g), std::abs(numeric), 1e-8});
        worst = std::max(worst, std::abs(analytic_g - numeric) / denom);
    };

    for (std::size_t l = 0; l < probe.weights.size(); ++l) {
        for (std::size_t i = 0; i < probe.weights[l].data.size(); ++i)
            check_entry(probe.weights[l].data[i], analytic.weights[l].data[i]);
        for (std::size_t i = 0; i < probe.biases[l].size(); ++i)
            check_entry(probe.biases[l][i], analytic.biases[l][i]);
    }
    return worst;
}

const char* to_string(OptimizerKind k) {
    switch (k) {
        case OptimizerKind::sgd: return "sgd";
        case OptimizerKind::rmsprop: return "rmsprop";
        case OptimizerKind::adam: return "adam";
    }
    return "?";
}

OptimizerKind optimizer_from_string(const std::string& s) {
    if (s == "sgd") return OptimizerKind::sgd;
    if (s == "rmsprop") return OptimizerKind::rmsprop;
    if (s == "adam") return OptimizerKind::adam;
    throw InvalidArgument("unknown optimizer: " + s);
}

} // namespace tabaug
