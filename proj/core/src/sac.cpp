#include "scoutrl/sac.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace scoutrl {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;  // log(2*pi)/2

// log(1 - tanh(z)^2) in a form stable for large |z|.
inline double log_one_minus_tanh_sq(double z) {
    return 2.0 * (std::numbers::ln2 - z - std::log1p(std::exp(-2.0 * z)));
}

}  // namespace

ReplayBuffer::ReplayBuffer(size_t capacity, double loss_prob)
    : capacity_(capacity), loss_prob_(loss_prob) {
    if (capacity_ == 0) throw std::invalid_argument("ReplayBuffer: capacity must be > 0");
    if (loss_prob_ < 0.0 || loss_prob_ >= 1.0)
        throw std::invalid_argument("ReplayBuffer: loss probability must be in [0,1)");
}

bool ReplayBuffer::push(Transition t, Rng& rng) {
    ++pushes_;
    if (loss_prob_ > 0.0) {
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        if (uni(rng) < loss_prob_) return false;
    }
    ++accepts_;
    storage_.push_back(std::move(t));
    if (storage_.size() > capacity_) storage_.pop_front();
    return true;
}

std::vector<const Transition*> ReplayBuffer::sample(int batch, Rng& rng) const {
    if (storage_.empty()) throw std::logic_error("ReplayBuffer::sample: buffer is empty");
    std::uniform_int_distribution<size_t> pick(0, storage_.size() - 1);
    std::vector<const Transition*> out;
    out.reserve(batch);
    for (int i = 0; i < batch; ++i) out.push_back(&storage_[pick(rng)]);
    return out;
}

void ReplayBuffer::seed_from(const std::vector<Transition>& demos) {
    for (const auto& t : demos) {
        storage_.push_back(t);
        if (storage_.size() > capacity_) storage_.pop_front();
    }
}

SacAgent::SacAgent(int state_dim, int action_dim, const SacSettings& settings, Rng& rng)
    : state_dim_(state_dim), action_dim_(action_dim), settings_(settings) {
    actor_ = Mlp(state_dim, settings.hidden, 2 * action_dim, rng);
    q1_ = Mlp(state_dim + action_dim, settings.hidden, 1, rng);
    q2_ = Mlp(state_dim + action_dim, settings.hidden, 1, rng);
    q1_target_ = q1_;
    q2_target_ = q2_;
    actor_opt_ = Adam(actor_, settings.learning_rate);
    q1_opt_ = Adam(q1_, settings.learning_rate);
    q2_opt_ = Adam(q2_, settings.learning_rate);
    log_alpha_ = std::log(settings.alpha_init);
    alpha_opt_ = ScalarAdam(settings.learning_rate);
    target_entropy_ = -static_cast<double>(action_dim);
}

PolicySample SacAgent::run_head(const Matrix& states, const Matrix& noise) const {
    PolicySample ps;
    const Matrix out = actor_.forward(states, ps.cache);
    const int a = action_dim_;
    ps.mean = out.leftCols(a);
    const Matrix raw_log_std = out.rightCols(a);
    ps.log_std = raw_log_std.cwiseMax(settings_.log_std_min).cwiseMin(settings_.log_std_max);
    ps.log_std_gate = ((raw_log_std.array() > settings_.log_std_min) &&
                       (raw_log_std.array() < settings_.log_std_max))
                          .cast<double>()
                          .matrix();
    ps.sigma = ps.log_std.array().exp().matrix();
    ps.noise = noise;
    ps.z = ps.mean + ps.sigma.cwiseProduct(noise);
    ps.tanh_z = ps.z.array().tanh().matrix();
    ps.actions = ps.tanh_z;

    ps.log_probs = Vector::Zero(states.rows());
    for (Eigen::Index b = 0; b < states.rows(); ++b) {
        double lp = 0.0;
        for (int i = 0; i < a; ++i) {
            const double eps = noise(b, i);
            lp += -0.5 * eps * eps - ps.log_std(b, i) - kHalfLog2Pi;
            lp -= log_one_minus_tanh_sq(ps.z(b, i));
        }
        ps.log_probs[b] = lp;
    }
    return ps;
}

PolicySample SacAgent::policy_sample(const Matrix& states, Rng& rng) const {
    Matrix noise(states.rows(), action_dim_);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Eigen::Index b = 0; b < noise.rows(); ++b)
        for (int i = 0; i < action_dim_; ++i) noise(b, i) = gauss(rng);
    return run_head(states, noise);
}

PolicySample SacAgent::policy_sample_with_noise(const Matrix& states, const Matrix& noise) const {
    return run_head(states, noise);
}

Vector SacAgent::act(const Vector& state, Rng& rng) const {
    PolicySample ps = policy_sample(state.transpose(), rng);
    return ps.actions.row(0).transpose();
}

Vector SacAgent::log_prob_of(const Matrix& states, const Matrix& actions) const {
    const Matrix out = actor_.forward(states);
    const int a = action_dim_;
    const Matrix mean = out.leftCols(a);
    const Matrix log_std =
        out.rightCols(a).cwiseMax(settings_.log_std_min).cwiseMin(settings_.log_std_max);
    Vector lp = Vector::Zero(states.rows());
    for (Eigen::Index b = 0; b < states.rows(); ++b) {
        for (int i = 0; i < a; ++i) {
            const double nudged = std::clamp(actions(b, i), -1.0 + 1e-6, 1.0 - 1e-6);
            const double z = std::atanh(nudged);
            const double w = (z - mean(b, i)) / std::exp(log_std(b, i));
            lp[b] += -0.5 * w * w - log_std(b, i) - kHalfLog2Pi - log_one_minus_tanh_sq(z);
        }
    }
    return lp;
}

SacAgent::HeadGrad SacAgent::head_backward(const PolicySample& ps, const Matrix& dL_da,
                                           const Vector& dL_dlogp) const {
    const Matrix sech2 = (1.0 - ps.tanh_z.array().square()).matrix();
    // dz collects the action path and the tanh-correction part of log-prob.
    Matrix dz = dL_da.cwiseProduct(sech2);
    dz += 2.0 * (ps.tanh_z.array().colwise() * dL_dlogp.array()).matrix();
    HeadGrad g;
    g.d_mean = dz;
    g.d_log_std = dz.cwiseProduct(ps.sigma.cwiseProduct(ps.noise));
    g.d_log_std.array() -=
        (Matrix::Ones(ps.mean.rows(), ps.mean.cols()).array().colwise() * dL_dlogp.array());
    g.d_log_std = g.d_log_std.cwiseProduct(ps.log_std_gate);  // clamp passes no gradient
    return g;
}

Vector SacAgent::critic_targets(const Matrix& next_states, const Vector& rewards,
                                const Vector& not_done, const PolicySample& next_sample) const {
    const int B = static_cast<int>(next_states.rows());
    Matrix next_input(B, state_dim_ + action_dim_);
    next_input << next_states, next_sample.actions;
    const Vector tq1 = q1_target_.forward(next_input).col(0);
    const Vector tq2 = q2_target_.forward(next_input).col(0);
    return rewards.array() +
           settings_.discount * not_done.array() *
               (tq1.cwiseMin(tq2).array() - alpha() * next_sample.log_probs.array());
}

SacAgent::CriticGrads SacAgent::critic_loss_and_grads(const Matrix& states, const Matrix& actions,
                                                      const Vector& targets) const {
    const int B = static_cast<int>(states.rows());
    Matrix input(B, state_dim_ + action_dim_);
    input << states, actions;
    Mlp::Cache c1, c2;
    const Vector pred1 = q1_.forward(input, c1).col(0);
    const Vector pred2 = q2_.forward(input, c2).col(0);
    CriticGrads out;
    out.loss1 = (pred1 - targets).squaredNorm() / B;
    out.loss2 = (pred2 - targets).squaredNorm() / B;
    out.g1 = q1_.zero_grads();
    out.g2 = q2_.zero_grads();
    q1_.backward(c1, (2.0 / B) * (pred1 - targets), out.g1);
    q2_.backward(c2, (2.0 / B) * (pred2 - targets), out.g2);
    return out;
}

SacLosses SacAgent::critic_update(const std::vector<const Transition*>& batch, Rng& rng) {
    const int B = static_cast<int>(batch.size());
    Matrix states(B, state_dim_), next_states(B, state_dim_), actions(B, action_dim_);
    Vector rewards(B), not_done(B);
    for (int b = 0; b < B; ++b) {
        states.row(b) = batch[b]->state.transpose();
        next_states.row(b) = batch[b]->next_state.transpose();
        actions.row(b) = batch[b]->action.transpose();
        rewards[b] = batch[b]->reward;
        not_done[b] = batch[b]->terminal ? 0.0 : 1.0;
    }

    const PolicySample next = policy_sample(next_states, rng);
    const Vector y = critic_targets(next_states, rewards, not_done, next);

    SacLosses losses;
    if (!y.allFinite()) {
        ++skipped_batches_;
        losses.skipped = true;
        return losses;
    }

    CriticGrads grads = critic_loss_and_grads(states, actions, y);
    losses.q1 = grads.loss1;
    losses.q2 = grads.loss2;
    q1_opt_.step(q1_, grads.g1);
    q2_opt_.step(q2_, grads.g2);
    return losses;
}

SacAgent::ActorGrads SacAgent::actor_loss_and_grads(const Matrix& states,
                                                    const Matrix& noise) const {
    const int B = static_cast<int>(states.rows());
    PolicySample ps = run_head(states, noise);
    Matrix input(B, state_dim_ + action_dim_);
    input << states, ps.actions;
    Mlp::Cache c1, c2;
    const Vector v1 = q1_.forward(input, c1).col(0);
    const Vector v2 = q2_.forward(input, c2).col(0);

    ActorGrads out;
    const double a = alpha();
    out.loss = (a * ps.log_probs.array() - v1.cwiseMin(v2).array()).mean();
    if (!std::isfinite(out.loss)) return out;

    // dL/dQ_min = -1/B routed to the per-sample argmin critic.
    Matrix d1 = Matrix::Zero(B, 1), d2 = Matrix::Zero(B, 1);
    for (int b = 0; b < B; ++b) (v1[b] <= v2[b] ? d1 : d2)(b, 0) = -1.0 / B;
    const Matrix dIn1 = q1_.backward_input(c1, d1);
    const Matrix dIn2 = q2_.backward_input(c2, d2);
    const Matrix dL_da = dIn1.rightCols(action_dim_) + dIn2.rightCols(action_dim_);
    const Vector dL_dlogp = Vector::Constant(B, a / B);

    const HeadGrad head = head_backward(ps, dL_da, dL_dlogp);
    Matrix dY(B, 2 * action_dim_);
    dY << head.d_mean, head.d_log_std;
    out.grads = actor_.zero_grads();
    actor_.backward(ps.cache, dY, out.grads);
    return out;
}

double SacAgent::actor_update(const Matrix& states, Rng& rng) {
    Matrix noise(states.rows(), action_dim_);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Eigen::Index b = 0; b < noise.rows(); ++b)
        for (int i = 0; i < action_dim_; ++i) noise(b, i) = gauss(rng);
    ActorGrads grads = actor_loss_and_grads(states, noise);
    if (!std::isfinite(grads.loss)) {
        ++skipped_batches_;
        return grads.loss;
    }
    actor_opt_.step(actor_, grads.grads);
    return grads.loss;
}

double SacAgent::alpha_loss(const Vector& log_probs) const {
    return -alpha() * (log_probs.array() + target_entropy_).mean();
}

// d/d(log alpha) of -exp(log alpha) * c equals the loss itself.
double SacAgent::alpha_grad(const Vector& log_probs) const { return alpha_loss(log_probs); }

double SacAgent::temperature_update(const Vector& log_probs) {
    const double loss = alpha_loss(log_probs);
    log_alpha_ = alpha_opt_.step(log_alpha_, alpha_grad(log_probs));
    return loss;
}

void SacAgent::polyak_update() {
    const double t = settings_.polyak;
    for (int i = 0; i < 2; ++i) {
        Mlp& online = i == 0 ? q1_ : q2_;
        Mlp& target = i == 0 ? q1_target_ : q2_target_;
        for (size_t l = 0; l < online.weights().size(); ++l) {
            target.mutable_weights()[l] =
                t * online.weights()[l] + (1.0 - t) * target.weights()[l];
            target.mutable_biases()[l] = t * online.biases()[l] + (1.0 - t) * target.biases()[l];
        }
    }
}

SacLosses SacAgent::train_step(const ReplayBuffer& buffer, Rng& rng) {
    const auto batch = buffer.sample(settings_.batch, rng);
    SacLosses losses = critic_update(batch, rng);
    if (losses.skipped) return losses;

    Matrix states(batch.size(), state_dim_);
    for (size_t b = 0; b < batch.size(); ++b) states.row(b) = batch[b]->state.transpose();
    losses.actor = actor_update(states, rng);

    // Fresh sample for the temperature objective (log pi detached).
    PolicySample ps = policy_sample(states, rng);
    losses.alpha_loss = temperature_update(ps.log_probs);
    polyak_update();
    return losses;
}

std::vector<double> SacAgent::bc_pretrain(const std::vector<const Transition*>& demos,
                                          int epochs, Rng& rng) {
    if (demos.empty()) throw std::invalid_argument("bc_pretrain: empty demonstration set");
    std::vector<double> nll_per_epoch;
    const int n = static_cast<int>(demos.size());
    const int batch = std::min(settings_.batch, n);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;

    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double nll_sum = 0.0;
        int seen = 0;
        for (int start = 0; start < n; start += batch) {
            const int m = std::min(batch, n - start);
            Matrix states(m, state_dim_), actions(m, action_dim_);
            for (int b = 0; b < m; ++b) {
                states.row(b) = demos[order[start + b]]->state.transpose();
                actions.row(b) = demos[order[start + b]]->action.transpose();
            }

            Mlp::Cache cache;
            const Matrix out = actor_.forward(states, cache);
            const Matrix mean = out.leftCols(action_dim_);
            const Matrix raw_log_std = out.rightCols(action_dim_);
            const Matrix log_std =
                raw_log_std.cwiseMax(settings_.log_std_min).cwiseMin(settings_.log_std_max);
            const Matrix gate = ((raw_log_std.array() > settings_.log_std_min) &&
                                 (raw_log_std.array() < settings_.log_std_max))
                                    .cast<double>()
                                    .matrix();

            Matrix d_mean(m, action_dim_), d_log_std(m, action_dim_);
            for (int b = 0; b < m; ++b) {
                for (int i = 0; i < action_dim_; ++i) {
                    const double nudged = std::clamp(actions(b, i), -1.0 + 1e-6, 1.0 - 1e-6);
                    const double z = std::atanh(nudged);
                    const double sigma = std::exp(log_std(b, i));
                    const double w = (z - mean(b, i)) / sigma;
                    nll_sum += 0.5 * w * w + log_std(b, i) + kHalfLog2Pi +
                               log_one_minus_tanh_sq(z);
                    d_mean(b, i) = -w / sigma / m;
                    d_log_std(b, i) = (1.0 - w * w) * gate(b, i) / m;
                }
            }
            Matrix dY(m, 2 * action_dim_);
            dY << d_mean, d_log_std;
            Mlp::Grads grads = actor_.zero_grads();
            actor_.backward(cache, dY, grads);
            actor_opt_.step(actor_, grads);
            seen += m;
        }
        nll_per_epoch.push_back(nll_sum / seen);
    }
    return nll_per_epoch;
}

namespace {

void write_block(std::ofstream& out, const std::vector<double>& data) {
    const uint64_t n = data.size();
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(n * sizeof(double)));
}

std::vector<double> read_block(std::ifstream& in) {
    uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    std::vector<double> data(n);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw std::runtime_error("checkpoint: truncated block");
    return data;
}

}  // namespace

void SacAgent::save_checkpoint(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("checkpoint: cannot open for writing: " + path);
    const char magic[4] = {'S', 'C', 'R', 'L'};
    out.write(magic, 4);
    const uint32_t version = 1;
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    const int32_t dims[3] = {static_cast<int32_t>(state_dim_), static_cast<int32_t>(action_dim_),
                             static_cast<int32_t>(settings_.hidden.size())};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    for (int h : settings_.hidden) {
        const int32_t v = h;
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
    write_block(out, {settings_.learning_rate, settings_.discount, settings_.polyak,
                      static_cast<double>(settings_.batch), settings_.log_std_min,
                      settings_.log_std_max, settings_.alpha_init,
                      static_cast<double>(settings_.learning_starts)});
    for (const Mlp* net : {&actor_, &q1_, &q2_, &q1_target_, &q2_target_})
        write_block(out, net->flatten());
    for (const Adam* opt : {&actor_opt_, &q1_opt_, &q2_opt_})
        write_block(out, opt->flatten_state());
    write_block(out, {log_alpha_, alpha_opt_.m, alpha_opt_.v, static_cast<double>(alpha_opt_.t)});
}

SacAgent SacAgent::load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (std::string(magic, 4) != "SCRL") throw std::runtime_error("checkpoint: bad magic");
    uint32_t version = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    if (version != 1) throw std::runtime_error("checkpoint: unsupported version");
    int32_t dims[3];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    SacSettings settings;
    settings.hidden.clear();
    for (int i = 0; i < dims[2]; ++i) {
        int32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        settings.hidden.push_back(v);
    }
    const auto hyper = read_block(in);
    settings.learning_rate = hyper.at(0);
    settings.discount = hyper.at(1);
    settings.polyak = hyper.at(2);
    settings.batch = static_cast<int>(hyper.at(3));
    settings.log_std_min = hyper.at(4);
    settings.log_std_max = hyper.at(5);
    settings.alpha_init = hyper.at(6);
    settings.learning_starts = static_cast<int>(hyper.at(7));

    Rng dummy(0);
    SacAgent agent(dims[0], dims[1], settings, dummy);
    for (Mlp* net : {&agent.actor_, &agent.q1_, &agent.q2_, &agent.q1_target_, &agent.q2_target_})
        net->unflatten(read_block(in));
    for (Adam* opt : {&agent.actor_opt_, &agent.q1_opt_, &agent.q2_opt_})
        opt->unflatten_state(read_block(in));
    const auto alpha_state = read_block(in);
    agent.log_alpha_ = alpha_state.at(0);
    agent.alpha_opt_.m = alpha_state.at(1);
    agent.alpha_opt_.v = alpha_state.at(2);
    agent.alpha_opt_.t = static_cast<long>(alpha_state.at(3));
    return agent;
}

}  // namespace scoutrl
