#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "tabaug/errors.hpp"
#include "tabaug/nn.hpp"

using namespace tabaug;
using test_helpers::oracle_forward;
using test_helpers::random_matrix;

namespace {

MlpParams zero_net(const std::vector<std::size_t>& widths, Activation hidden, Activation output) {
    Rng rng(0);
    MlpParams net = init_mlp(widths, hidden, output, rng);
    for (auto& w : net.weights) std::fill(w.data.begin(), w.data.end(), 0.0);
    for (auto& b : net.biases) std::fill(b.begin(), b.end(), 0.0);
    return net;
}

// Finite differences of a test-local loss; independent of backward() and the
// library's loss helpers.
double numeric_gradient(MlpParams net, double* param, const Matrix& batch, const Matrix& target) {
    constexpr double h = 1e-5;
    const auto loss = [&]() {
        const Matrix out = oracle_forward(net, batch);
        double acc = 0.0;
        for (std::size_t i = 0; i < out.data.size(); ++i) {
            const double d = out.data[i] - target.data[i];
            acc += d * d;
        }
        return acc / static_cast<double>(out.rows);
    };
    const double saved = *param;
    *param = saved + h;
    const double hi = loss();
    *param = saved - h;
    const double lo = loss();
    *param = saved;
    return (hi - lo) / (2.0 * h);
}

} // namespace

TEST_CASE("forward: all-zero weights with sigmoid output give 0.5 everywhere") {
    MlpParams net = zero_net({3, 5, 2}, Activation::relu, Activation::sigmoid);
    Rng rng(1);
    const Matrix batch = random_matrix(4, 3, rng);
    const Matrix out = forward(net, batch).output();
    for (double v : out.data) CHECK(v == 0.5);
}

TEST_CASE("forward: identity layer with identity weights reproduces the input") {
    MlpParams net = zero_net({3, 3}, Activation::identity, Activation::identity);
    for (std::size_t i = 0; i < 3; ++i) net.weights[0](i, i) = 1.0;
    Rng rng(2);
    const Matrix batch = random_matrix(5, 3, rng);
    const Matrix out = forward(net, batch).output();
    for (std::size_t i = 0; i < batch.data.size(); ++i) CHECK(out.data[i] == batch.data[i]);
}

TEST_CASE("forward: random 3-layer net matches the straight-line oracle") {
    Rng rng(3);
    MlpParams net = init_mlp({4, 6, 5, 2}, Activation::tanh, Activation::sigmoid, rng);
    const Matrix batch = random_matrix(7, 4, rng);
    const Matrix out = forward(net, batch).output();
    const Matrix expected = oracle_forward(net, batch);
    REQUIRE(out.same_shape(expected));
    for (std::size_t i = 0; i < out.data.size(); ++i)
        CHECK(out.data[i] == doctest::Approx(expected.data[i]).epsilon(1e-12));
}

TEST_CASE("forward: deterministic, bit-identical reruns") {
    Rng rng(4);
    MlpParams net = init_mlp({3, 8, 1}, Activation::relu, Activation::identity, rng);
    const Matrix batch = random_matrix(6, 3, rng);
    const Matrix a = forward(net, batch).output();
    const Matrix b = forward(net, batch).output();
    CHECK(a.data == b.data);
}

TEST_CASE("forward: input width mismatch is rejected") {
    MlpParams net = zero_net({3, 2}, Activation::relu, Activation::identity);
    CHECK_THROWS_AS(forward(net, Matrix(2, 4)), InvalidArgument);
}

TEST_CASE("backward: linear layer squared-error gradient has its closed form") {
    // loss = (Wx + b - y)^2 on one sample; dW = 2(Wx + b - y) x^T
    Rng rng(5);
    MlpParams net = init_mlp({3, 1}, Activation::identity, Activation::identity, rng);
    Matrix x(1, 3);
    x.data = {0.4, -0.2, 0.7};
    const double y = 0.3;

    const ActivationStack stack = forward(net, x);
    const double out = stack.output()(0, 0);
    Matrix out_grad(1, 1);
    out_grad(0, 0) = 2.0 * (out - y);
    const MlpGradients grads = backward(net, stack, out_grad);

    for (std::size_t i = 0; i < 3; ++i)
        CHECK(grads.weights[0](0, i) ==
              doctest::Approx(2.0 * (out - y) * x(0, i)).epsilon(1e-12));
    CHECK(grads.biases[0][0] == doctest::Approx(2.0 * (out - y)).epsilon(1e-12));
}

TEST_CASE("backward: zero output gradient gives all-zero parameter gradients") {
    Rng rng(6);
    MlpParams net = init_mlp({3, 4, 2}, Activation::sigmoid, Activation::identity, rng);
    const Matrix batch = random_matrix(5, 3, rng);
    const ActivationStack stack = forward(net, batch);
    const MlpGradients grads = backward(net, stack, Matrix(5, 2, 0.0));
    for (const auto& w : grads.weights)
        for (double v : w.data) CHECK(v == 0.0);
    for (const auto& b : grads.biases)
        for (double v : b) CHECK(v == 0.0);
}

TEST_CASE("backward: random nets agree with central finite differences") {
    Rng rng(7);
    const Activation kinds[] = {Activation::relu, Activation::sigmoid, Activation::tanh,
                                Activation::identity};
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t layers = 1 + rng.below(3);
        std::vector<std::size_t> widths{1 + rng.below(6)};
        for (std::size_t l = 0; l < layers; ++l) widths.push_back(1 + rng.below(8));
        MlpParams net = init_mlp(widths, kinds[trial % 4], kinds[(trial + 1) % 4], rng);

        const Matrix batch = random_matrix(3, widths.front(), rng);
        const Matrix target = random_matrix(3, widths.back(), rng, 0.0, 1.0);

        const ActivationStack stack = forward(net, batch);
        const Matrix out_grad = loss_output_grad(LossKind::squared_error, stack.output(), target);
        const MlpGradients analytic = backward(net, stack, out_grad);

        double worst = 0.0;
        for (std::size_t l = 0; l < net.weights.size(); ++l) {
            for (std::size_t i = 0; i < net.weights[l].data.size(); ++i) {
                const double numeric =
                    numeric_gradient(net, &net.weights[l].data[i], batch, target);
                const double a = analytic.weights[l].data[i];
                worst = std::max(worst, std::abs(a - numeric) /
                                            std::max({std::abs(a), std::abs(numeric), 1e-8}));
            }
        }
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("backward: shape mismatch is rejected") {
    Rng rng(8);
    MlpParams net = init_mlp({2, 3}, Activation::relu, Activation::identity, rng);
    const ActivationStack stack = forward(net, random_matrix(2, 2, rng));
    CHECK_THROWS_AS(backward(net, stack, Matrix(2, 2)), InvalidArgument);
}

TEST_CASE("backward: input gradient matches finite differences of the input") {
    Rng rng(9);
    MlpParams net = init_mlp({3, 5, 1}, Activation::tanh, Activation::identity, rng);
    Matrix batch = random_matrix(2, 3, rng);
    const Matrix target(2, 1, 0.25);

    const ActivationStack stack = forward(net, batch);
    const Matrix out_grad = loss_output_grad(LossKind::squared_error, stack.output(), target);
    Matrix input_grad;
    backward(net, stack, out_grad, &input_grad);

    constexpr double h = 1e-5;
    for (std::size_t i = 0; i < batch.data.size(); ++i) {
        const double saved = batch.data[i];
        batch.data[i] = saved + h;
        const double hi = loss_value(LossKind::squared_error, oracle_forward(net, batch), target);
        batch.data[i] = saved - h;
        const double lo = loss_value(LossKind::squared_error, oracle_forward(net, batch), target);
        batch.data[i] = saved;
        const double numeric = (hi - lo) / (2.0 * h);
        CHECK(std::abs(input_grad.data[i] - numeric) < 1e-6);
    }
}

TEST_CASE("optimizer_step: one sgd step") {
    MlpParams net = zero_net({1, 1}, Activation::identity, Activation::identity);
    net.weights[0](0, 0) = 1.0;
    OptimizerState opt = make_optimizer(OptimizerKind::sgd, net, 0.1);
    MlpGradients grads = zero_gradients(net);
    grads.weights[0](0, 0) = 0.5;
    optimizer_step(net, grads, opt);
    CHECK(net.weights[0](0, 0) == doctest::Approx(0.95).epsilon(1e-15));
    CHECK(opt.step == 1);
}

TEST_CASE("optimizer_step: rmsprop with zero gradient leaves parameters, decays accumulators") {
    MlpParams net = zero_net({1, 1}, Activation::identity, Activation::identity);
    net.weights[0](0, 0) = 0.7;
    OptimizerState opt = make_optimizer(OptimizerKind::rmsprop, net, 0.01);

    MlpGradients grads = zero_gradients(net);
    grads.weights[0](0, 0) = 2.0;
    optimizer_step(net, grads, opt);
    const double acc_after_first = opt.acc_w[0](0, 0);
    CHECK(acc_after_first == doctest::Approx((1.0 - opt.decay) * 4.0));

    const double param = net.weights[0](0, 0);
    grads.weights[0](0, 0) = 0.0;
    optimizer_step(net, grads, opt);
    CHECK(net.weights[0](0, 0) == param);
    CHECK(opt.acc_w[0](0, 0) == doctest::Approx(opt.decay * acc_after_first));
}

TEST_CASE("optimizer_step: two rmsprop steps match the scalar recurrence") {
    MlpParams net = zero_net({1, 1}, Activation::identity, Activation::identity);
    net.weights[0](0, 0) = 1.0;
    OptimizerState opt = make_optimizer(OptimizerKind::rmsprop, net, 0.1);

    // Oracle recurrence computed scalar-wise alongside.
    double w = 1.0, acc = 0.0;
    for (double g : {0.5, -0.25}) {
        acc = opt.decay * acc + (1.0 - opt.decay) * g * g;
        w -= opt.learning_rate * g / (std::sqrt(acc) + opt.epsilon);

        MlpGradients grads = zero_gradients(net);
        grads.weights[0](0, 0) = g;
        optimizer_step(net, grads, opt);
        CHECK(net.weights[0](0, 0) == doctest::Approx(w).epsilon(1e-15));
    }
}

TEST_CASE("optimizer_step: adam bias correction matches the scalar recurrence") {
    MlpParams net = zero_net({1, 1}, Activation::identity, Activation::identity);
    net.weights[0](0, 0) = 0.2;
    OptimizerState opt = make_optimizer(OptimizerKind::adam, net, 0.05);

    double w = 0.2, m = 0.0, v = 0.0;
    int t = 0;
    for (double g : {0.3, 0.3, -0.1}) {
        ++t;
        m = opt.beta1 * m + (1 - opt.beta1) * g;
        v = opt.beta2 * v + (1 - opt.beta2) * g * g;
        const double mh = m / (1 - std::pow(opt.beta1, t));
        const double vh = v / (1 - std::pow(opt.beta2, t));
        w -= opt.learning_rate * mh / (std::sqrt(vh) + opt.epsilon);

        MlpGradients grads = zero_gradients(net);
        grads.weights[0](0, 0) = g;
        optimizer_step(net, grads, opt);
        CHECK(net.weights[0](0, 0) == doctest::Approx(w).epsilon(1e-14));
    }
}

TEST_CASE("optimizer_step: non-finite gradient names the offending layer") {
    Rng rng(10);
    MlpParams net = init_mlp({2, 3, 1}, Activation::relu, Activation::identity, rng);
    OptimizerState opt = make_optimizer(OptimizerKind::sgd, net, 0.1);
    MlpGradients grads = zero_gradients(net);
    grads.weights[1](0, 0) = std::numeric_limits<double>::quiet_NaN();
    try {
        optimizer_step(net, grads, opt);
        FAIL("expected NumericFault");
    } catch (const NumericFault& e) {
        CHECK(std::string(e.what()).find("layer 1") != std::string::npos);
    }
}

TEST_CASE("clip_weights: clamps, leaves interior points, idempotent") {
    MlpParams net = zero_net({1, 2}, Activation::identity, Activation::identity);
    net.weights[0](0, 0) = 0.5;
    net.weights[0](1, 0) = -0.004;
    clip_weights(net, 0.01);
    CHECK(net.weights[0](0, 0) == 0.01);
    CHECK(net.weights[0](1, 0) == -0.004);

    Rng rng(11);
    MlpParams random_net = init_mlp({4, 16, 4}, Activation::relu, Activation::identity, rng);
    bool any_exceeded = false;
    for (const auto& w : random_net.weights)
        for (double v : w.data) any_exceeded = any_exceeded || std::abs(v) > 0.01;
    REQUIRE(any_exceeded);

    clip_weights(random_net, 0.01);
    double max_abs = 0.0;
    for (const auto& w : random_net.weights)
        for (double v : w.data) max_abs = std::max(max_abs, std::abs(v));
    CHECK(max_abs == 0.01);

    MlpParams twice = random_net;
    clip_weights(twice, 0.01);
    for (std::size_t l = 0; l < random_net.weights.size(); ++l) {
        CHECK(twice.weights[l].data == random_net.weights[l].data);
        CHECK(twice.biases[l] == random_net.biases[l]);
    }

    CHECK_THROWS_AS(clip_weights(random_net, 0.0), InvalidArgument);
}

TEST_CASE("gradient_check: exact on a linear net with squared error") {
    Rng rng(12);
    MlpParams net = init_mlp({4, 1}, Activation::identity, Activation::identity, rng);
    const Matrix batch = random_matrix(6, 4, rng);
    const Matrix target = random_matrix(6, 1, rng);
    CHECK(gradient_check(net, batch, LossKind::squared_error, target) < 1e-9);
}

TEST_CASE("gradient_check: relu net away from kinks passes at 1e-6") {
    Rng rng(13);
    for (int trial = 0; trial < 5; ++trial) {
        MlpParams net = init_mlp({3, 10, 1}, Activation::relu, Activation::identity, rng);
        Matrix batch = random_matrix(4, 3, rng);
        // Nudge inputs until no relu pre-activation sits near zero.
        for (int attempt = 0; attempt < 50; ++attempt) {
            const ActivationStack stack = forward(net, batch);
            double min_abs = 1e9;
            for (double v : stack.pre[0].data) min_abs = std::min(min_abs, std::abs(v));
            if (min_abs > 1e-3) break;
            for (double& v : batch.data) v += 0.01;
        }
        const Matrix target = random_matrix(4, 1, rng);
        CHECK(gradient_check(net, batch, LossKind::squared_error, target) < 1e-6);
    }
}

TEST_CASE("gradient_check: a sign-flipped gradient is caught (error above 0.1)") {
    Rng rng(14);
    MlpParams net = init_mlp({3, 6, 1}, Activation::tanh, Activation::identity, rng);
    const Matrix batch = random_matrix(4, 3, rng);
    const Matrix target = random_matrix(4, 1, rng);

    const ActivationStack stack = forward(net, batch);
    const Matrix out_grad = loss_output_grad(LossKind::squared_error, stack.output(), target);
    MlpGradients corrupted = backward(net, stack, out_grad);
    for (auto& w : corrupted.weights)
        for (double& v : w.data) v = -v; // the mutation

    double worst = 0.0;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        for (std::size_t i = 0; i < net.weights[l].data.size(); ++i) {
            const double numeric = numeric_gradient(net, &net.weights[l].data[i], batch, target);
            const double a = corrupted.weights[l].data[i];
            worst = std::max(worst, std::abs(a - numeric) /
                                        std::max({std::abs(a), std::abs(numeric), 1e-8}));
        }
    }
    CHECK(worst > 0.1);
}

TEST_CASE("activation derivatives match numeric slopes away from kinks") {
    const Activation kinds[] = {Activation::relu, Activation::sigmoid, Activation::tanh,
                                Activation::identity};
    constexpr double h = 1e-6;
    for (Activation a : kinds) {
        for (double x = -3.0; x <= 3.0; x += 0.37) {
            if (a == Activation::relu && std::abs(x) < 0.01) continue;
            const double numeric =
                (apply_activation(a, x + h) - apply_activation(a, x - h)) / (2.0 * h);
            CHECK(std::abs(activation_derivative(a, x) - numeric) < 1e-7);
        }
    }
    CHECK(activation_derivative(Activation::relu, 0.0) == 0.0);
}

TEST_CASE("init_mlp: glorot bounds, zero biases, seed-deterministic") {
    Rng rng_a(15), rng_b(15);
    const MlpParams a = init_mlp({8, 16, 4}, Activation::relu, Activation::sigmoid, rng_a);
    const MlpParams b = init_mlp({8, 16, 4}, Activation::relu, Activation::sigmoid, rng_b);
    for (std::size_t l = 0; l < a.weights.size(); ++l) {
        CHECK(a.weights[l].data == b.weights[l].data);
        const double limit =
            std::sqrt(6.0 / static_cast<double>(a.layer_widths[l] + a.layer_widths[l + 1]));
        for (double v : a.weights[l].data) CHECK(std::abs(v) <= limit);
        for (double v : a.biases[l]) CHECK(v == 0.0);
    }
    CHECK(a.parameter_count() == 8 * 16 + 16 + 16 * 4 + 4);
}
