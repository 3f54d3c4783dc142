#pragma once

#include <array>
#include <span>

#include "mtrec/mdp/features.hpp"
#include "mtrec/numerics/net.hpp"

namespace mtrec::align {

struct AlignConfig {
    double kappa = 0.5;     // classification alignment weight
    double rl_kappa = 0.2;  // reward-augmentation weight for the RL agent
    double learning_rate = 1e-3;
    int batch_size = 256;
    int epochs = 10;
    std::vector<int> hidden = {64, 64};
    // policy-gradient agent
    int policy_iterations = 300;
    int policy_episodes = 16;
    double policy_learning_rate = 1e-2;

    void validate() const;
};

// CTR scorer F(i|h): state features through a sigmoid head, clamped to
// (1e-7, 1 - 1e-7) before any log.
FeedForwardNet make_rec_net(int feature_dim, const std::vector<int>& hidden,
                            SeededRng& rng);

double clamp_prob(double f);

double score(const FeedForwardNet& rec,
             std::span<const mdp::InteractionStep> history, const mdp::Item& item,
             const mdp::Dataset& data, const mdp::FeaturizerConfig& fcfg);

// Highest-scoring catalog item; ties broken by lowest item id.
int rank_top_item(const FeedForwardNet& rec,
                  std::span<const mdp::InteractionStep> history,
                  const mdp::Dataset& data, const mdp::FeaturizerConfig& fcfg);

// Featurized training rows with labels and any recovered rewards.
struct RecBatch {
    int dim = 0;
    std::size_t n = 0;
    std::vector<double> x;  // n x dim
    std::vector<double> label;
    std::vector<double> r_pos, r_neg;
    std::vector<uint8_t> annotated;
    std::vector<std::array<int, 3>> ref;  // (user, traj, t) for diagnostics
};

RecBatch build_rec_batch(const mdp::Dataset& data,
                         const mdp::FeaturizerConfig& fcfg);

// Mean cross entropy -[a log F + (1-a) log(1-F)].
double ce_loss(const FeedForwardNet& rec, const RecBatch& batch,
               std::span<const std::size_t> indices, Exec mode,
               std::vector<double>* grad);

// Mean alignment loss -[r_pos * F + r_neg * (1-F)]; dL/dF = -(r_pos - r_neg).
double align_loss(const FeedForwardNet& rec, const RecBatch& batch,
                  std::span<const std::size_t> indices, Exec mode,
                  std::vector<double>* grad);

// CE + kappa * align; bit-exact CE when kappa is zero. Optionally reports
// the two components.
double final_loss(const FeedForwardNet& rec, const RecBatch& batch,
                  std::span<const std::size_t> indices, double kappa, Exec mode,
                  std::vector<double>* grad, double* ce_part = nullptr,
                  double* align_part = nullptr);

struct RecEpochStats {
    int epoch = 0;
    double ce = 0.0;
    double align = 0.0;
    double final = 0.0;
};

struct TrainRecResult {
    FeedForwardNet net;
    std::vector<RecEpochStats> epochs;
};

TrainRecResult train_rec(const mdp::Dataset& train, const AlignConfig& cfg,
                         double kappa, const mdp::FeaturizerConfig& fcfg,
                         uint64_t seed, Exec mode = Exec::parallel);

}  // namespace mtrec::align
