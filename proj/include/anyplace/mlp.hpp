#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "anyplace/work.hpp"

namespace anyplace {

enum class Loss { Mse, Huber };

/// Dense network, ReLU on hidden layers, linear scalar or vector output.
/// Weights are row-major [out x in].
template <class S>
struct BasicMlp {
    using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;
    using RowVector = Eigen::Matrix<S, 1, Eigen::Dynamic>;

    std::vector<int> sizes;
    std::vector<Matrix> weights;
    std::vector<Vector> biases;

    BasicMlp() = default;
    explicit BasicMlp(std::vector<int> layer_sizes) : sizes(std::move(layer_sizes))
    {
        if (sizes.size() < 2) {
            throw std::invalid_argument("an MLP needs at least input and output sizes");
        }
        for (std::size_t l = 1; l < sizes.size(); ++l) {
            weights.push_back(Matrix::Zero(sizes[l], sizes[l - 1]));
            biases.push_back(Vector::Zero(sizes[l]));
        }
    }

    int layers() const { return static_cast<int>(weights.size()); }
    int inputs() const { return sizes.front(); }
    int outputs() const { return sizes.back(); }

    std::size_t parameter_count() const
    {
        std::size_t n = 0;
        for (int l = 0; l < layers(); ++l) {
            n += weights[l].size() + biases[l].size();
        }
        return n;
    }

    std::uint64_t macs_per_sample() const
    {
        std::uint64_t n = 0;
        for (const auto& w : weights) {
            n += static_cast<std::uint64_t>(w.size());
        }
        return n;
    }

    /// He-uniform weights, zero biases.
    void init(std::mt19937_64& rng)
    {
        for (int l = 0; l < layers(); ++l) {
            const double bound = std::sqrt(6.0 / sizes[l]);
            std::uniform_real_distribution<double> u(-bound, bound);
            for (Eigen::Index i = 0; i < weights[l].size(); ++i) {
                weights[l].data()[i] = static_cast<S>(u(rng));
            }
            biases[l].setZero();
        }
    }

    bool finite() const
    {
        for (int l = 0; l < layers(); ++l) {
            if (!weights[l].allFinite() || !biases[l].allFinite()) {
                return false;
            }
        }
        return true;
    }

    /// Batch forward, one sample per row.
    Matrix forward(const Matrix& x) const
    {
        work::charge(work::Op::MlpMac, macs_per_sample() * static_cast<std::uint64_t>(x.rows()));
        Matrix a = x;
        for (int l = 0; l < layers(); ++l) {
            Matrix z = a * weights[l].transpose();
            z.rowwise() += biases[l].transpose();
            if (l + 1 < layers()) {
                z = z.cwiseMax(S(0));
            }
            a = std::move(z);
        }
        return a;
    }

    S forward1(const Vector& x) const
    {
        work::charge(work::Op::MlpMac, macs_per_sample());
        Vector a = x;
        for (int l = 0; l < layers(); ++l) {
            Vector z = weights[l] * a + biases[l];
            if (l + 1 < layers()) {
                z = z.cwiseMax(S(0));
            }
            a = std::move(z);
        }
        return a(0);
    }

    struct Gradients {
        std::vector<Matrix> weights;
        std::vector<Vector> biases;
    };

    /// Loss (mean over rows) and parameter gradients for a single-output net.
    S loss_and_gradients(const Matrix& x, const Vector& target, Loss loss, Gradients& g) const
    {
        const Eigen::Index n = x.rows();
        work::charge(work::Op::MlpMac, 3 * macs_per_sample() * static_cast<std::uint64_t>(n));
        std::vector<Matrix> acts{x};
        for (int l = 0; l < layers(); ++l) {
            Matrix z = acts.back() * weights[l].transpose();
            z.rowwise() += biases[l].transpose();
            if (l + 1 < layers()) {
                z = z.cwiseMax(S(0));
            }
            acts.push_back(std::move(z));
        }
        const Vector err = acts.back().col(0) - target;
        S value = 0;
        Matrix delta(n, 1);
        for (Eigen::Index i = 0; i < n; ++i) {
            const S e = err(i);
            if (loss == Loss::Mse) {
                value += e * e;
                delta(i, 0) = S(2) * e / S(n);
            } else if (std::abs(e) <= S(1)) {
                value += S(0.5) * e * e;
                delta(i, 0) = e / S(n);
            } else {
                value += std::abs(e) - S(0.5);
                delta(i, 0) = (e > 0 ? S(1) : S(-1)) / S(n);
            }
        }
        value /= S(n);
        g.weights.resize(layers());
        g.biases.resize(layers());
        for (int l = layers() - 1; l >= 0; --l) {
            if (l + 1 < layers()) {
                // acts[l + 1] is post-ReLU; its zero pattern is the ReLU mask.
                delta = delta.cwiseProduct((acts[l + 1].array() > S(0)).template cast<S>().matrix());
            }
            g.weights[l] = delta.transpose() * acts[l];
            g.biases[l] = delta.colwise().sum().transpose();
            if (l > 0) {
                delta = delta * weights[l];
            }
        }
        return value;
    }

    template <class T>
    BasicMlp<T> cast() const
    {
        BasicMlp<T> out(sizes);
        for (int l = 0; l < layers(); ++l) {
            out.weights[l] = weights[l].template cast<T>();
            out.biases[l] = biases[l].template cast<T>();
        }
        return out;
    }

    bool operator==(const BasicMlp& o) const
    {
        if (sizes != o.sizes) {
            return false;
        }
        for (int l = 0; l < layers(); ++l) {
            if (weights[l] != o.weights[l] || biases[l] != o.biases[l]) {
                return false;
            }
        }
        return true;
    }
};

using Mlp = BasicMlp<float>;

struct AdamOptions {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double weight_decay = 0.03125;  ///< decoupled, weights only
    double eps = 1e-8;
};

/// Adam moments, bias-corrected, with decoupled weight decay on weight
/// matrices (biases are not decayed).
template <class S>
struct BasicAdam {
    using Net = BasicMlp<S>;
    AdamOptions opts;
    std::vector<typename Net::Matrix> m_w, v_w;
    std::vector<typename Net::Vector> m_b, v_b;
    long long step_count = 0;

    BasicAdam() = default;
    BasicAdam(const Net& net, AdamOptions o) : opts(o) { reset(net); }

    void reset(const Net& net)
    {
        m_w.clear();
        v_w.clear();
        m_b.clear();
        v_b.clear();
        for (int l = 0; l < net.layers(); ++l) {
            m_w.push_back(Net::Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
            v_w.push_back(m_w.back());
            m_b.push_back(Net::Vector::Zero(net.biases[l].size()));
            v_b.push_back(m_b.back());
        }
        step_count = 0;
    }

    void step(Net& net, const typename Net::Gradients& g)
    {
        ++step_count;
        const S b1 = static_cast<S>(opts.beta1);
        const S b2 = static_cast<S>(opts.beta2);
        const S c1 = static_cast<S>(1.0 - std::pow(opts.beta1, static_cast<double>(step_count)));
        const S c2 = static_cast<S>(1.0 - std::pow(opts.beta2, static_cast<double>(step_count)));
        const S lr = static_cast<S>(opts.lr);
        const S eps = static_cast<S>(opts.eps);
        const S decay = static_cast<S>(opts.lr * opts.weight_decay);
        auto update = [&](auto& p, auto& m, auto& v, const auto& grad, bool decayed) {
            m = b1 * m + (S(1) - b1) * grad;
            v = b2 * v + (S(1) - b2) * grad.cwiseProduct(grad);
            const auto mhat = (m / c1).array();
            const auto vhat = (v / c2).array();
            if (decayed) {
                p *= S(1) - decay;
            }
            p.array() -= lr * mhat / (vhat.sqrt() + eps);
        };
        for (int l = 0; l < net.layers(); ++l) {
            update(net.weights[l], m_w[l], v_w[l], g.weights[l], true);
            update(net.biases[l], m_b[l], v_b[l], g.biases[l], false);
        }
    }
};

using Adam = BasicAdam<float>;

}  // namespace anyplace
