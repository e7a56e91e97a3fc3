#include "tabaug/gan.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "tabaug/errors.hpp"
#include "tabaug/rng.hpp"

namespace tabaug {

namespace {

constexpr double kDivergenceGuard = 1e6;
constexpr double kProbClamp = 1e-7;

void validate_config(const TrainConfig& cfg) {
    if (cfg.batch_size < 2) throw InvalidArgument("train: batch_size must be >= 2");
    if (cfg.n_critic < 1) throw InvalidArgument("train: n_critic must be >= 1");
    if (!(cfg.clip_c > 0.0)) throw InvalidArgument("train: clip_c must be positive");
    if (!(cfg.learning_rate > 0.0)) throw InvalidArgument("train: learning_rate must be positive");
}

void validate_data(const Matrix& data, const ArchSpec& spec, const TrainConfig& cfg) {
    if (data.rows < cfg.batch_size)
        throw InvalidArgument("train: data has " + std::to_string(data.rows) +
                              " rows, batch_size is " + std::to_string(cfg.batch_size));
    if (data.cols != spec.data_dim)
        throw InvalidArgument("train: data has " + std::to_string(data.cols) +
                              " columns, spec.data_dim is " + std::to_string(spec.data_dim));
    for (double v : data.data) {
        if (!(v >= 0.0 && v <= 1.0))
            throw InvalidArgument("train: data entries must lie in [0,1]");
    }
    const auto violations = validate(spec);
    if (!violations.empty())
        throw InvalidArgument("train: invalid ArchSpec: " + violations.front());
}

Matrix draw_real_batch(const Matrix& data, std::size_t batch, Rng& rng) {
    std::vector<std::size_t> idx(batch);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.below(data.rows));
    return take_rows(data, idx);
}

Matrix draw_noise(std::size_t batch, std::size_t dim, Rng& rng) {
    Matrix z(batch, dim);
    for (double& v : z.data) v = rng.uniform(-1.0, 1.0);
    return z;
}

double mean_of(const Matrix& m) {
    double acc = 0.0;
    for (double v : m.data) acc += v;
    return acc / static_cast<double>(m.rows);
}

void guard(double value, const char* what, std::size_t iter) {
    if (!std::isfinite(value) || std::abs(value) > kDivergenceGuard)
        throw NumericFault(std::string("train: ") + what + " diverged at iteration " +
                           std::to_string(iter) + " (value " + std::to_string(value) + ")");
}

struct Nets {
    MlpParams generator;
    MlpParams critic;
    OptimizerState opt_g;
    OptimizerState opt_d;
};

Nets initialize(const ArchSpec& spec, const TrainConfig& cfg, Activation critic_output, Rng& rng) {
    Nets nets;
    nets.generator = init_mlp(spec.g_widths, Activation::relu, Activation::sigmoid, rng);
    nets.critic = init_mlp(spec.d_widths, Activation::relu, critic_output, rng);
    nets.opt_g = make_optimizer(cfg.optimizer, nets.generator, cfg.learning_rate);
    nets.opt_d = make_optimizer(cfg.optimizer, nets.critic, cfg.learning_rate);
    return nets;
}

// Backprop the generator through the frozen critic. loss_grad_at_critic_out is
// dLoss/d(critic output) for the fake batch.
void generator_step(Nets& nets, const ActivationStack& g_stack, const ActivationStack& d_stack,
                    const Matrix& loss_grad_at_critic_out) {
    Matrix input_grad;
    backward(nets.critic, d_stack, loss_grad_at_critic_out, &input_grad);
    const MlpGradients g_grads = backward(nets.generator, g_stack, input_grad);
    optimizer_step(nets.generator, g_grads, nets.opt_g);
}

} // namespace

const char* to_string(GanLoss k) { return k == GanLoss::wgan ? "wgan" : "gan"; }

GanLoss gan_loss_from_string(const std::string& s) {
    if (s == "wgan") return GanLoss::wgan;
    if (s == "gan") return GanLoss::gan;
    throw InvalidArgument("unknown loss kind: " + s);
}

TrainConfig default_wgan_config() { return TrainConfig{}; }

TrainConfig default_gan_config() {
    TrainConfig cfg;
    cfg.n_critic = 1;
    cfg.learning_rate = 2e-4;
    cfg.optimizer = OptimizerKind::adam;
    cfg.loss_kind = GanLoss::gan;
    return cfg;
}

std::string describe(const TrainConfig& cfg) {
    std::ostringstream os;
    os << "loss=" << to_string(cfg.loss_kind) << " seed=" << cfg.seed
       << " iterations=" << cfg.iterations << " batch_size=" << cfg.batch_size
       << " n_critic=" << cfg.n_critic << " clip_c=" << cfg.clip_c
       << " learning_rate=" << cfg.learning_rate
       << " optimizer=" << to_string(cfg.optimizer);
    return os.str();
}

void write_trace_csv(std::ostream& os, const LossTrace& trace) {
    os << "iter,critic_obj,gen_loss\n";
    char buf[96];
    for (const auto& p : trace.points) {
        std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f\n", p.iter, p.critic_obj, p.gen_loss);
        os << buf;
    }
}

std::pair<GanModel, LossTrace> train_wgan(const Matrix& data, const ArchSpec& spec,
                                          const TrainConfig& cfg, const TrainHooks& hooks) {
    if (cfg.loss_kind != GanLoss::wgan) throw InvalidArgument("train_wgan: cfg.loss_kind != wgan");
    validate_config(cfg);
    validate_data(data, spec, cfg);

    Rng rng(cfg.seed);
    Nets nets = initialize(spec, cfg, Activation::identity, rng);

    LossTrace trace;
    const double inv_n = 1.0 / static_cast<double>(cfg.batch_size);

    for (std::size_t iter = 0; iter < cfg.iterations; ++iter) {
        // critic: ascend E[f(real)] - E[f(fake)]
        for (std::size_t t = 0; t < cfg.n_critic; ++t) {
            const Matrix real = draw_real_batch(data, cfg.batch_size, rng);
            const Matrix noise = draw_noise(cfg.batch_size, spec.noise_dim, rng);
            const Matrix fake = forward(nets.generator, noise).output();

            const ActivationStack real_stack = forward(nets.critic, real);
            const ActivationStack fake_stack = forward(nets.critic, fake);
            Matrix grad_real(real_stack.output().rows, 1, -inv_n);
            Matrix grad_fake(fake_stack.output().rows, 1, +inv_n);
            MlpGradients d_grads = backward(nets.critic, real_stack, grad_real);
            add_gradients(d_grads, backward(nets.critic, fake_stack, grad_fake));
            optimizer_step(nets.critic, d_grads, nets.opt_d);
            clip_weights(nets.critic, cfg.clip_c);
            if (hooks.after_critic_step) hooks.after_critic_step(nets.critic, iter, t);
        }

        // generator: descend -E[f(g(z))]
        const Matrix noise = draw_noise(cfg.batch_size, spec.noise_dim, rng);
        const ActivationStack g_stack = forward(nets.generator, noise);
        const ActivationStack d_stack = forward(nets.critic, g_stack.output());
        const double fake_score = mean_of(d_stack.output());
        const double gen_loss = -fake_score;
        guard(gen_loss, "generator loss", iter);

        // Trace both objective terms before the generator moves: one fresh
        // real batch against the generator-step fake batch.
        const Matrix trace_real = draw_real_batch(data, cfg.batch_size, rng);
        const double critic_obj = mean_of(forward(nets.critic, trace_real).output()) - fake_score;
        guard(critic_obj, "critic objective", iter);

        Matrix loss_grad(d_stack.output().rows, 1, -inv_n);
        generator_step(nets, g_stack, d_stack, loss_grad);

        const TracePoint point{iter, critic_obj, gen_loss};
        if (hooks.on_trace_point) hooks.on_trace_point(point);
        trace.points.push_back(point);
    }

    GanModel model{std::move(nets.generator), std::move(nets.critic), spec, cfg.iterations};
    return {std::move(model), std::move(trace)};
}

std::pair<GanModel, LossTrace> train_gan(const Matrix& data, const ArchSpec& spec,
                                         const TrainConfig& cfg, const TrainHooks& hooks) {
    if (cfg.loss_kind != GanLoss::gan) throw InvalidArgument("train_gan: cfg.loss_kind != gan");
    validate_config(cfg);
    validate_data(data, spec, cfg);

    Rng rng(cfg.seed);
    Nets nets = initialize(spec, cfg, Activation::sigmoid, rng);

    LossTrace trace;
    const double inv_n = 1.0 / static_cast<double>(cfg.batch_size);
    const auto clamp_prob = [](double a) { return std::clamp(a, kProbClamp, 1.0 - kProbClamp); };

    for (std::size_t iter = 0; iter < cfg.iterations; ++iter) {
        // discriminator: ascend log D(x) + log(1 - D(G(z)))
        for (std::size_t t = 0; t < cfg.n_critic; ++t) {
            const Matrix real = draw_real_batch(data, cfg.batch_size, rng);
            const Matrix noise = draw_noise(cfg.batch_size, spec.noise_dim, rng);
            const Matrix fake = forward(nets.generator, noise).output();

            const ActivationStack real_stack = forward(nets.critic, real);
            const ActivationStack fake_stack = forward(nets.critic, fake);
            Matrix grad_real(real_stack.output().rows, 1);
            for (std::size_t i = 0; i < grad_real.rows; ++i)
                grad_real(i, 0) = -inv_n / clamp_prob(real_stack.output()(i, 0));
            Matrix grad_fake(fake_stack.output().rows, 1);
            for (std::size_t i = 0; i < grad_fake.rows; ++i)
                grad_fake(i, 0) = inv_n / (1.0 - clamp_prob(fake_stack.output()(i, 0)));
            MlpGradients d_grads = backward(nets.critic, real_stack, grad_real);
            add_gradients(d_grads, backward(nets.critic, fake_stack, grad_fake));
            optimizer_step(nets.critic, d_grads, nets.opt_d);
            if (hooks.after_critic_step) hooks.after_critic_step(nets.critic, iter, t);
        }

        // generator: descend -log D(G(z)) (non-saturating)
        const Matrix noise = draw_noise(cfg.batch_size, spec.noise_dim, rng);
        const ActivationStack g_stack = forward(nets.generator, noise);
        const ActivationStack d_stack = forward(nets.critic, g_stack.output());

        double gen_loss = 0.0;
        for (std::size_t i = 0; i < d_stack.output().rows; ++i)
            gen_loss -= std::log(clamp_prob(d_stack.output()(i, 0)));
        gen_loss *= inv_n;
        guard(gen_loss, "generator loss", iter);

        const Matrix trace_real = draw_real_batch(data, cfg.batch_size, rng);
        const ActivationStack trace_stack = forward(nets.critic, trace_real);
        double critic_obj = 0.0;
        for (std::size_t i = 0; i < trace_stack.output().rows; ++i)
            critic_obj += std::log(clamp_prob(trace_stack.output()(i, 0)));
        for (std::size_t i = 0; i < d_stack.output().rows; ++i)
            critic_obj += std::log(1.0 - clamp_prob(d_stack.output()(i, 0)));
        critic_obj *= inv_n;
        guard(critic_obj, "discriminator objective", iter);

        Matrix loss_grad(d_stack.output().rows, 1);
        for (std::size_t i = 0; i < loss_grad.rows; ++i)
            loss_grad(i, 0) = -inv_n / clamp_prob(d_stack.output()(i, 0));
        generator_step(nets, g_stack, d_stack, loss_grad);

        const TracePoint point{iter, critic_obj, gen_loss};
        if (hooks.on_trace_point) hooks.on_trace_point(point);
        trace.points.push_back(point);
    }

    GanModel model{std::move(nets.generator), std::move(nets.critic), spec, cfg.iterations};
    return {std::move(model), std::move(trace)};
}

Matrix sample(const GanModel& model, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw InvalidArgument("sample: n must be >= 1");
    Rng rng(seed);
    const Matrix noise = draw_noise(n, model.spec.noise_dim, rng);
    return forward(model.generator, noise).output();
}

double critic_estimate(const GanModel& model, const Matrix& real, const Matrix& fake) {
    if (real.rows == 0 || fake.rows == 0)
        throw InvalidArgument("critic_estimate: empty batch");
    if (real.cols != model.spec.data_dim || fake.cols != model.spec.data_dim)
        throw InvalidArgument("critic_estimate: column count != data_dim");
    return mean_of(forward(model.critic, real).output()) -
           mean_of(forward(model.critic, fake).output());
}

namespace {

nlohmann::ordered_json mlp_to_json(const MlpParams& mlp) {
    nlohmann::ordered_json j;
    j["layer_widths"] = mlp.layer_widths;
    j["hidden_activation"] = to_string(mlp.hidden_activation);
    j["output_activation"] = to_string(mlp.output_activation);
    nlohmann::ordered_json weights = nlohmann::ordered_json::array();
    for (const auto& w : mlp.weights) weights.push_back(w.data);
    j["weights"] = std::move(weights);
    j["biases"] = mlp.biases;
    return j;
}

MlpParams mlp_from_json(const nlohmann::json& j) {
    MlpParams mlp;
    mlp.layer_widths = j.at("layer_widths").get<std::vector<std::size_t>>();
    mlp.hidden_activation = activation_from_string(j.at("hidden_activation").get<std::string>());
    mlp.output_activation = activation_from_string(j.at("output_activation").get<std::string>());
    const auto& weights = j.at("weights");
    const auto& biases = j.at("biases");
    if (mlp.layer_widths.size() < 2 || weights.size() + 1 != mlp.layer_widths.size() ||
        biases.size() != weights.size())
        throw DataError("gan_model_from_json: inconsistent layer structure");
    for (std::size_t l = 0; l + 1 < mlp.layer_widths.size(); ++l) {
        Matrix w(mlp.layer_widths[l + 1], mlp.layer_widths[l]);
        const auto flat = weights[l].get<std::vector<double>>();
        if (flat.size() != w.data.size())
            throw DataError("gan_model_from_json: weight array size mismatch at layer " +
                            std::to_string(l));
        w.data = flat;
        mlp.weights.push_back(std::move(w));
        auto b = biases[l].get<std::vector<double>>();
        if (b.size() != mlp.layer_widths[l + 1])
            throw DataError("gan_model_from_json: bias size mismatch at layer " +
                            std::to_string(l));
        mlp.biases.push_back(std::move(b));
    }
    return mlp;
}

} // namespace

std::string to_json(const GanModel& model) {
    nlohmann::ordered_json j;
    j["spec"] = nlohmann::ordered_json::parse(to_json(model.spec));
    j["generator"] = mlp_to_json(model.generator);
    j["critic"] = mlp_to_json(model.critic);
    j["trained_for"] = model.trained_for;
    return j.dump(2);
}

GanModel gan_model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("gan_model_from_json: ") + e.what());
    }
    try {
        GanModel model;
        model.spec = arch_from_json(j.at("spec").dump());
        model.generator = mlp_from_json(j.at("generator"));
        model.critic = mlp_from_json(j.at("critic"));
        model.trained_for = j.at("trained_for").get<std::size_t>();
        if (model.generator.layer_widths != model.spec.g_widths ||
            model.critic.layer_widths != model.spec.d_widths)
            throw DataError("gan_model_from_json: parameter shapes disagree with spec");
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("gan_model_from_json: missing or mistyped field: ") + e.what());
    }
}

} // namespace tabaug
