#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "scoutrl/mlp.hpp"
#include "scoutrl/rng.hpp"

namespace scoutrl {

struct Transition {
    Vector state;
    Vector action;
    double reward = 0.0;
    Vector next_state;
    bool terminal = false;
};

// Bounded FIFO store with independent Bernoulli thinning at insertion and
// uniform-with-replacement sampling.
class ReplayBuffer {
public:
    ReplayBuffer() = default;
    ReplayBuffer(size_t capacity, double loss_prob);

    // Returns true when the transition was accepted (probability 1 - p_loss).
    bool push(Transition t, Rng& rng);
    std::vector<const Transition*> sample(int batch, Rng& rng) const;

    size_t size() const { return storage_.size(); }
    size_t capacity() const { return capacity_; }
    double loss_prob() const { return loss_prob_; }
    long pushes() const { return pushes_; }
    long accepts() const { return accepts_; }
    const std::deque<Transition>& storage() const { return storage_; }
    void seed_from(const std::vector<Transition>& demos);
    void clear() { storage_.clear(); }

private:
    size_t capacity_ = 10000;
    double loss_prob_ = 0.0;
    std::deque<Transition> storage_;
    long pushes_ = 0;
    long accepts_ = 0;
};

struct SacSettings {
    std::vector<int> hidden{256, 256};
    double learning_rate = 3e-4;
    double discount = 0.99;
    double polyak = 0.005;  // tau_soft
    int batch = 256;
    double log_std_min = -20.0;
    double log_std_max = 2.0;
    double alpha_init = 1.0;
    int learning_starts = 100;
};

// Reparameterized squashed-Gaussian sample with everything the backward
// pass needs.
struct PolicySample {
    Matrix actions;   // tanh(z), rows = batch
    Vector log_probs;
    Matrix mean, log_std, sigma, noise, z, tanh_z;
    Matrix log_std_gate;  // 1 where the raw log-std was inside the clamp
    Mlp::Cache cache;
};

struct SacLosses {
    double q1 = 0.0, q2 = 0.0, actor = 0.0, alpha_loss = 0.0;
    bool skipped = false;
};

class SacAgent {
public:
    SacAgent() = default;
    SacAgent(int state_dim, int action_dim, const SacSettings& settings, Rng& rng);

    int state_dim() const { return state_dim_; }
    int action_dim() const { return action_dim_; }
    double alpha() const { return std::exp(log_alpha_); }
    double log_alpha() const { return log_alpha_; }
    void set_log_alpha(double v) { log_alpha_ = v; }
    double target_entropy() const { return target_entropy_; }
    const SacSettings& settings() const { return settings_; }

    PolicySample policy_sample(const Matrix& states, Rng& rng) const;
    PolicySample policy_sample_with_noise(const Matrix& states, const Matrix& noise) const;

    // Stochastic rollout action for one state.
    Vector act(const Vector& state, Rng& rng) const;

    // Squashed-Gaussian log-density of given actions (inverse-tanh with the
    // inward nudge for endpoints); used by behavior cloning.
    Vector log_prob_of(const Matrix& states, const Matrix& actions) const;

    // Soft-Bellman targets r + gamma(1-d)(min_j targetQ_j(s',a') - alpha log pi).
    Vector critic_targets(const Matrix& next_states, const Vector& rewards,
                          const Vector& not_done, const PolicySample& next_sample) const;

    struct CriticGrads {
        double loss1 = 0.0, loss2 = 0.0;
        Mlp::Grads g1, g2;
    };
    CriticGrads critic_loss_and_grads(const Matrix& states, const Matrix& actions,
                                      const Vector& targets) const;

    struct ActorGrads {
        double loss = 0.0;
        Mlp::Grads grads;
    };
    // Gradient of mean(alpha log pi - min Q) through the reparameterized
    // sample; noise is held fixed so the result is finite-difference checkable.
    ActorGrads actor_loss_and_grads(const Matrix& states, const Matrix& noise) const;

    double alpha_loss(const Vector& log_probs) const;
    double alpha_grad(const Vector& log_probs) const;

    // One soft-Bellman regression step on both critics. Returns losses, or
    // skipped=true when the target went non-finite.
    SacLosses critic_update(const std::vector<const Transition*>& batch, Rng& rng);
    double actor_update(const Matrix& states, Rng& rng);
    double temperature_update(const Vector& log_probs);
    void polyak_update();

    // Critic/actor/temperature/targets in order, on one sampled mini-batch.
    SacLosses train_step(const ReplayBuffer& buffer, Rng& rng);

    void save_checkpoint(const std::string& path) const;
    static SacAgent load_checkpoint(const std::string& path);

    const Mlp& actor() const { return actor_; }
    Mlp& mutable_actor() { return actor_; }
    const Mlp& critic(int i) const { return i == 0 ? q1_ : q2_; }
    Mlp& mutable_critic(int i) { return i == 0 ? q1_ : q2_; }
    const Mlp& target(int i) const { return i == 0 ? q1_target_ : q2_target_; }
    long skipped_batches() const { return skipped_batches_; }

    // Supervised warm start of the actor on (state, action) pairs;
    // returns the mean negative log-likelihood per epoch.
    std::vector<double> bc_pretrain(const std::vector<const Transition*>& demos, int epochs,
                                    Rng& rng);

private:
    struct HeadGrad {
        Matrix d_mean;
        Matrix d_log_std;
    };
    HeadGrad head_backward(const PolicySample& ps, const Matrix& dL_da,
                           const Vector& dL_dlogp) const;
    PolicySample run_head(const Matrix& states, const Matrix& noise) const;

    int state_dim_ = 0;
    int action_dim_ = 0;
    SacSettings settings_;
    Mlp actor_, q1_, q2_, q1_target_, q2_target_;
    Adam actor_opt_, q1_opt_, q2_opt_;
    double log_alpha_ = 0.0;
    ScalarAdam alpha_opt_;
    double target_entropy_ = 0.0;
    long skipped_batches_ = 0;
};

}  // namespace scoutrl
