#pragma once

#include <Eigen/Core>
#include <vector>

#include "scoutrl/rng.hpp"

namespace scoutrl {

using Matrix = Eigen::MatrixXd;  // batches are rows
using Vector = Eigen::VectorXd;

// Fully connected net with ReLU hidden layers and a linear output layer.
// Forward/backward are hand-rolled; gradients are checked against central
// finite differences in the test suite.
class Mlp {
public:
    Mlp() = default;
    // hidden = sizes of the hidden layers, e.g. {256, 256}.
    Mlp(int input, const std::vector<int>& hidden, int output, Rng& rng);

    struct Cache {
        std::vector<Matrix> inputs;  // input to each linear layer (post-ReLU)
    };

    struct Grads {
        std::vector<Matrix> dW;
        std::vector<Vector> db;

        void scale(double s);
        void add(const Grads& other);
    };

    Matrix forward(const Matrix& x) const;
    Matrix forward(const Matrix& x, Cache& cache) const;

    // dY = dLoss/dOutput. Accumulates parameter gradients into `grads`
    // (resized/zeroed when empty) and returns dLoss/dInput.
    Matrix backward(const Cache& cache, const Matrix& dY, Grads& grads) const;
    // Input gradient only.
    Matrix backward_input(const Cache& cache, const Matrix& dY) const;

    Grads zero_grads() const;
    int input_dim() const { return weights_.empty() ? 0 : static_cast<int>(weights_.front().cols()); }
    int output_dim() const { return weights_.empty() ? 0 : static_cast<int>(weights_.back().rows()); }
    size_t layer_count() const { return weights_.size(); }
    size_t param_count() const;

    std::vector<double> flatten() const;
    void unflatten(const std::vector<double>& flat);

    const std::vector<Matrix>& weights() const { return weights_; }
    const std::vector<Vector>& biases() const { return biases_; }
    std::vector<Matrix>& mutable_weights() { return weights_; }
    std::vector<Vector>& mutable_biases() { return biases_; }

private:
    std::vector<Matrix> weights_;  // rows = out, cols = in
    std::vector<Vector> biases_;
};

// Adaptive-moment gradient descent over one Mlp's parameters.
class Adam {
public:
    Adam() = default;
    Adam(const Mlp& net, double lr);

    void step(Mlp& net, const Mlp::Grads& grads);

    double learning_rate() const { return lr_; }
    long step_count() const { return t_; }

    std::vector<double> flatten_state() const;
    void unflatten_state(const std::vector<double>& flat);

private:
    double lr_ = 3e-4;
    double beta1_ = 0.9;
    double beta2_ = 0.999;
    double eps_ = 1e-8;
    long t_ = 0;
    std::vector<Matrix> mW_, vW_;
    std::vector<Vector> mb_, vb_;
};

// Adam on a single scalar (used for the entropy temperature).
struct ScalarAdam {
    ScalarAdam() = default;
    explicit ScalarAdam(double lr_) : lr(lr_) {}

    double step(double value, double grad);

    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long t = 0;
    double m = 0.0, v = 0.0;
};

}  // namespace scoutrl
