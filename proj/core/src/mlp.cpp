#include "scoutrl/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace scoutrl {

Mlp::Mlp(int input, const std::vector<int>& hidden, int output, Rng& rng) {
    std::vector<int> sizes;
    sizes.push_back(input);
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(output);
    for (size_t l = 0; l + 1 < sizes.size(); ++l) {
        const int in = sizes[l];
        const int out = sizes[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        std::uniform_real_distribution<double> uni(-bound, bound);
        Matrix w(out, in);
        for (int r = 0; r < out; ++r)
            for (int c = 0; c < in; ++c) w(r, c) = uni(rng);
        Vector b(out);
        for (int r = 0; r < out; ++r) b[r] = uni(rng);
        weights_.push_back(std::move(w));
        biases_.push_back(std::move(b));
    }
}

Matrix Mlp::forward(const Matrix& x) const {
    Cache cache;
    return forward(x, cache);
}

Matrix Mlp::forward(const Matrix& x, Cache& cache) const {
    cache.inputs.clear();
    Matrix h = x;
    for (size_t l = 0; l < weights_.size(); ++l) {
        cache.inputs.push_back(h);
        Matrix z = (h * weights_[l].transpose()).rowwise() + biases_[l].transpose();
        if (l + 1 < weights_.size()) z = z.cwiseMax(0.0);  // ReLU on hidden layers
        h = std::move(z);
    }
    return h;
}

Matrix Mlp::backward(const Cache& cache, const Matrix& dY, Grads& grads) const {
    if (grads.dW.empty()) grads = zero_grads();
    Matrix delta = dY;
    for (size_t l = weights_.size(); l-- > 0;) {
        grads.dW[l] += delta.transpose() * cache.inputs[l];
        grads.db[l] += delta.colwise().sum().transpose();
        if (l == 0) return delta * weights_[0];
        Matrix dH = delta * weights_[l];
        // ReLU gate: the stored input of layer l is the post-activation of l-1.
        delta = dH.cwiseProduct((cache.inputs[l].array() > 0.0).cast<double>().matrix());
    }
    return {};
}

Matrix Mlp::backward_input(const Cache& cache, const Matrix& dY) const {
    Matrix delta = dY;
    for (size_t l = weights_.size(); l-- > 0;) {
        if (l == 0) return delta * weights_[0];
        Matrix dH = delta * weights_[l];
        delta = dH.cwiseProduct((cache.inputs[l].array() > 0.0).cast<double>().matrix());
    }
    return {};
}

Mlp::Grads Mlp::zero_grads() const {
    Grads g;
    for (size_t l = 0; l < weights_.size(); ++l) {
        g.dW.push_back(Matrix::Zero(weights_[l].rows(), weights_[l].cols()));
        g.db.push_back(Vector::Zero(biases_[l].size()));
    }
    return g;
}

void Mlp::Grads::scale(double s) {
    for (auto& w : dW) w *= s;
    for (auto& b : db) b *= s;
}

void Mlp::Grads::add(const Grads& other) {
    for (size_t l = 0; l < dW.size(); ++l) {
        dW[l] += other.dW[l];
        db[l] += other.db[l];
    }
}

size_t Mlp::param_count() const {
    size_t n = 0;
    for (size_t l = 0; l < weights_.size(); ++l)
        n += static_cast<size_t>(weights_[l].size()) + biases_[l].size();
    return n;
}

std::vector<double> Mlp::flatten() const {
    std::vector<double> flat;
    flat.reserve(param_count());
    for (size_t l = 0; l < weights_.size(); ++l) {
        flat.insert(flat.end(), weights_[l].data(), weights_[l].data() + weights_[l].size());
        flat.insert(flat.end(), biases_[l].data(), biases_[l].data() + biases_[l].size());
    }
    return flat;
}

void Mlp::unflatten(const std::vector<double>& flat) {
    if (flat.size() != param_count()) throw std::invalid_argument("Mlp::unflatten: size mismatch");
    size_t pos = 0;
    for (size_t l = 0; l < weights_.size(); ++l) {
        std::copy(flat.begin() + pos, flat.begin() + pos + weights_[l].size(),
                  weights_[l].data());
        pos += weights_[l].size();
        std::copy(flat.begin() + pos, flat.begin() + pos + biases_[l].size(), biases_[l].data());
        pos += biases_[l].size();
    }
}

Adam::Adam(const Mlp& net, double lr) : lr_(lr) {
    for (size_t l = 0; l < net.weights().size(); ++l) {
        mW_.push_back(Matrix::Zero(net.weights()[l].rows(), net.weights()[l].cols()));
        vW_.push_back(Matrix::Zero(net.weights()[l].rows(), net.weights()[l].cols()));
        mb_.push_back(Vector::Zero(net.biases()[l].size()));
        vb_.push_back(Vector::Zero(net.biases()[l].size()));
    }
}

void Adam::step(Mlp& net, const Mlp::Grads& grads) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    for (size_t l = 0; l < mW_.size(); ++l) {
        mW_[l] = beta1_ * mW_[l] + (1.0 - beta1_) * grads.dW[l];
        vW_[l] = beta2_ * vW_[l] + (1.0 - beta2_) * grads.dW[l].cwiseProduct(grads.dW[l]);
        net.mutable_weights()[l] -=
            (lr_ * (mW_[l] / bc1).array() / ((vW_[l] / bc2).array().sqrt() + eps_)).matrix();
        mb_[l] = beta1_ * mb_[l] + (1.0 - beta1_) * grads.db[l];
        vb_[l] = beta2_ * vb_[l] + (1.0 - beta2_) * grads.db[l].cwiseProduct(grads.db[l]);
        net.mutable_biases()[l] -=
            (lr_ * (mb_[l] / bc1).array() / ((vb_[l] / bc2).array().sqrt() + eps_)).matrix();
    }
}

std::vector<double> Adam::flatten_state() const {
    std::vector<double> flat;
    flat.push_back(static_cast<double>(t_));
    auto append_mat = [&flat](const Matrix& m) {
        flat.insert(flat.end(), m.data(), m.data() + m.size());
    };
    auto append_vec = [&flat](const Vector& v) {
        flat.insert(flat.end(), v.data(), v.data() + v.size());
    };
    for (size_t l = 0; l < mW_.size(); ++l) {
        append_mat(mW_[l]);
        append_mat(vW_[l]);
        append_vec(mb_[l]);
        append_vec(vb_[l]);
    }
    return flat;
}

void Adam::unflatten_state(const std::vector<double>& flat) {
    size_t pos = 0;
    t_ = static_cast<long>(flat.at(pos++));
    auto read_mat = [&](Matrix& m) {
        std::copy(flat.begin() + pos, flat.begin() + pos + m.size(), m.data());
        pos += m.size();
    };
    auto read_vec = [&](Vector& v) {
        std::copy(flat.begin() + pos, flat.begin() + pos + v.size(), v.data());
        pos += v.size();
    };
    for (size_t l = 0; l < mW_.size(); ++l) {
        read_mat(mW_[l]);
        read_mat(vW_[l]);
        read_vec(mb_[l]);
        read_vec(vb_[l]);
    }
    if (pos != flat.size()) throw std::invalid_argument("Adam::unflatten_state: size mismatch");
}

double ScalarAdam::step(double value, double grad) {
    ++t;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad * grad;
    const double mhat = m / (1.0 - std::pow(beta1, t));
    const double vhat = v / (1.0 - std::pow(beta2, t));
    return value - lr * mhat / (std::sqrt(vhat) + eps);
}

}  // namespace scoutrl
