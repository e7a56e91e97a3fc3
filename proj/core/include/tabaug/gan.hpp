#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tabaug/arch.hpp"
#include "tabaug/matrix.hpp"
#include "tabaug/nn.hpp"

namespace tabaug {

enum class GanLoss { gan, wgan };

const char* to_string(GanLoss k);
GanLoss gan_loss_from_string(const std::string& s);

struct TrainConfig {
    std::size_t iterations = 2000;
    std::size_t batch_size = 64;
    std::size_t n_critic = 5;      // critic steps per generator step
    double clip_c = 0.01;          // critic weight clamp (wgan only)
    double learning_rate = 5e-5;
    OptimizerKind optimizer = OptimizerKind::rmsprop;
    std::uint64_t seed = 42;
    GanLoss loss_kind = GanLoss::wgan;
};

TrainConfig default_wgan_config();
TrainConfig default_gan_config();

/// One-line hyperparameter summary, embedded in artifact headers.
std::string describe(const TrainConfig& cfg);

struct TracePoint {
    std::size_t iter = 0;
    double critic_obj = 0.0; // critic/discriminator objective estimate
    double gen_loss = 0.0;   // generator loss; for wgan this is -E[f(g(z))]
};

struct LossTrace {
    std::vector<TracePoint> points;
};

/// Writes "iter,critic_obj,gen_loss" rows, floats with 6 decimals.
void write_trace_csv(std::ostream& os, const LossTrace& trace);

struct GanModel {
    MlpParams generator;
    MlpParams critic;
    ArchSpec spec;
    std::size_t trained_for = 0;
};

/// Observation points for tests and partial-trace capture. after_critic_step
/// fires after each critic update (post-clip for wgan); on_trace_point fires
/// once per outer iteration with the record that also lands in the returned
/// trace.
struct TrainHooks {
    std::function<void(const MlpParams& critic, std::size_t iter, std::size_t critic_step)>
        after_critic_step;
    std::function<void(const TracePoint& point)> on_trace_point;
};

/// WGAN training: per outer iteration, n_critic critic ascent steps (each
/// followed by weight clipping) then one generator descent step. Data entries
/// must lie in [0,1]; rows are drawn with replacement. Deterministic given
/// (data, spec, cfg).
std::pair<GanModel, LossTrace> train_wgan(const Matrix& data, const ArchSpec& spec,
                                          const TrainConfig& cfg, const TrainHooks& hooks = {});

/// Standard cross-entropy adversarial game; the generator uses the
/// non-saturating -log D(G(z)) objective. The discriminator ends in a sigmoid.
std::pair<GanModel, LossTrace> train_gan(const Matrix& data, const ArchSpec& spec,
                                         const TrainConfig& cfg, const TrainHooks& hooks = {});

/// n rows drawn from the noise prior (uniform on [-1,1]^noise_dim) and mapped
/// through the generator. Entries land in [0,1] via the sigmoid output.
Matrix sample(const GanModel& model, std::size_t n, std::uint64_t seed);

/// Empirical dual objective: mean f(real) - mean f(fake).
double critic_estimate(const GanModel& model, const Matrix& real, const Matrix& fake);

std::string to_json(const GanModel& model);
GanModel gan_model_from_json(const std::string& text);

} // namespace tabaug
