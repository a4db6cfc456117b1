#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "xnet/dataset.hpp"
#include "xnet/error.hpp"
#include "xnet/eval.hpp"

namespace xnet {

enum class MlpActivation { Tanh, Relu, Sigmoid };

struct MlpSpec {
    std::vector<int> layer_sizes; // input -> hidden... -> output
    MlpActivation activation = MlpActivation::Tanh;
    double learning_rate = 0.005;
    int epochs = 10000;
    unsigned long long seed = 0;

    void validate() const
    {
        if (layer_sizes.size() < 2)
            throw ConfigError("mlp needs at least input and output layers");
        for (int s : layer_sizes)
            if (s < 1)
                throw ConfigError("mlp layer sizes must be >= 1");
        if (learning_rate <= 0.0 || epochs < 1)
            throw ConfigError("mlp learning_rate/epochs out of range");
    }
};

// Weights + biases over every layer transition.
inline int mlp_param_count(const MlpSpec& spec)
{
    spec.validate();
    int total = 0;
    for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l)
        total += spec.layer_sizes[l] * spec.layer_sizes[l + 1] + spec.layer_sizes[l + 1];
    return total;
}

struct MlpResult {
    double r2_train = -std::numeric_limits<double>::infinity();
    int param_count = 0;
    int hidden_nodes = 0; // hidden + output units
    int epochs_used = 0;
    bool diverged = false;
};

// Dense feedforward net with a linear output unit, trained by full-batch
// gradient descent on the mean squared error. Exposed (not just mlp_train)
// so tests can check its gradients against finite differences.
struct Mlp {
    MlpSpec spec;
    // W[l][j*fan_in + i] maps unit i of layer l to unit j of layer l+1.
    std::vector<std::vector<double>> W;
    std::vector<std::vector<double>> B;

    explicit Mlp(const MlpSpec& s) : spec(s)
    {
        spec.validate();
        std::mt19937_64 rng(spec.seed);
        for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
            int fan_in = spec.layer_sizes[l];
            int fan_out = spec.layer_sizes[l + 1];
            double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
            std::uniform_real_distribution<double> u(-bound, bound);
            std::vector<double> w(static_cast<std::size_t>(fan_in * fan_out));
            for (auto& v : w)
                v = u(rng);
            W.push_back(std::move(w));
            B.push_back(std::vector<double>(static_cast<std::size_t>(fan_out), 0.0));
        }
    }

    double act(double z) const
    {
        switch (spec.activation) {
        case MlpActivation::Tanh:
            return std::tanh(z);
        case MlpActivation::Relu:
            return z > 0.0 ? z : 0.0;
        case MlpActivation::Sigmoid:
            return 1.0 / (1.0 + std::exp(-z));
        }
        return z;
    }
    double act_grad(double a, double z) const
    {
        switch (spec.activation) {
        case MlpActivation::Tanh:
            return 1.0 - a * a;
        case MlpActivation::Relu:
            return z > 0.0 ? 1.0 : 0.0;
        case MlpActivation::Sigmoid:
            return a * (1.0 - a);
        }
        return 1.0;
    }

    // Activations per layer for one sample; layer 0 is the input itself.
    // The last layer is linear.
    void forward_sample(const std::vector<double>& x, std::vector<std::vector<double>>& a,
                        std::vector<std::vector<double>>& z) const
    {
        a.assign(spec.layer_sizes.size(), {});
        z.assign(spec.layer_sizes.size(), {});
        a[0].assign(x.begin(), x.begin() + spec.layer_sizes[0]);
        for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
            int fan_in = spec.layer_sizes[l];
            int fan_out = spec.layer_sizes[l + 1];
            a[l + 1].assign(static_cast<std::size_t>(fan_out), 0.0);
            z[l + 1].assign(static_cast<std::size_t>(fan_out), 0.0);
            bool output_layer = l + 2 == spec.layer_sizes.size();
            for (int j = 0; j < fan_out; ++j) {
                double s = B[l][static_cast<std::size_t>(j)];
                for (int i = 0; i < fan_in; ++i)
                    s += W[l][static_cast<std::size_t>(j * fan_in + i)] *
                         a[l][static_cast<std::size_t>(i)];
                z[l + 1][static_cast<std::size_t>(j)] = s;
                a[l + 1][static_cast<std::size_t>(j)] = output_layer ? s : act(s);
            }
        }
    }

    double predict_one(const std::vector<double>& x) const
    {
        std::vector<std::vector<double>> a, z;
        forward_sample(x, a, z);
        return a.back()[0];
    }

    // Full-batch MSE gradients; returns the current MSE.
    double compute_grads(const Dataset& ds, std::vector<std::vector<double>>& gW,
                         std::vector<std::vector<double>>& gB) const
    {
        gW.clear();
        gB.clear();
        for (std::size_t l = 0; l < W.size(); ++l) {
            gW.push_back(std::vector<double>(W[l].size(), 0.0));
            gB.push_back(std::vector<double>(B[l].size(), 0.0));
        }
        double n = static_cast<double>(ds.n());
        double mse = 0.0;
        std::vector<std::vector<double>> a, z;
        for (std::size_t s = 0; s < ds.n(); ++s) {
            forward_sample(ds.x[s], a, z);
            double err = a.back()[0] - ds.y[s];
            mse += err * err;
            // delta over the output layer, then backwards.
            std::vector<double> delta(1, 2.0 * err / n);
            for (std::size_t l = W.size(); l-- > 0;) {
                int fan_in = spec.layer_sizes[l];
                int fan_out = spec.layer_sizes[l + 1];
                for (int j = 0; j < fan_out; ++j) {
                    gB[l][static_cast<std::size_t>(j)] += delta[static_cast<std::size_t>(j)];
                    for (int i = 0; i < fan_in; ++i)
                        gW[l][static_cast<std::size_t>(j * fan_in + i)] +=
                            delta[static_cast<std::size_t>(j)] * a[l][static_cast<std::size_t>(i)];
                }
                if (l == 0)
                    break;
                std::vector<double> prev(static_cast<std::size_t>(fan_in), 0.0);
                for (int i = 0; i < fan_in; ++i) {
                    double s2 = 0.0;
                    for (int j = 0; j < fan_out; ++j)
                        s2 += delta[static_cast<std::size_t>(j)] *
                              W[l][static_cast<std::size_t>(j * fan_in + i)];
                    prev[static_cast<std::size_t>(i)] =
                        s2 * act_grad(a[l][static_cast<std::size_t>(i)],
                                      z[l][static_cast<std::size_t>(i)]);
                }
                delta = std::move(prev);
            }
        }
        return mse / n;
    }

    void step(const std::vector<std::vector<double>>& gW,
              const std::vector<std::vector<double>>& gB, double lr)
    {
        for (std::size_t l = 0; l < W.size(); ++l) {
            for (std::size_t k = 0; k < W[l].size(); ++k)
                W[l][k] -= lr * gW[l][k];
            for (std::size_t k = 0; k < B[l].size(); ++k)
                B[l][k] -= lr * gB[l][k];
        }
    }
};

// Train to R-squared >= 0.99 or the epoch budget. Divergence (non-finite
// loss) is reported, not thrown.
inline MlpResult mlp_train(const Dataset& ds, const MlpSpec& spec)
{
    spec.validate();
    ds.validate();
    Mlp net(spec);
    MlpResult res;
    res.param_count = mlp_param_count(spec);
    for (std::size_t l = 1; l < spec.layer_sizes.size(); ++l)
        res.hidden_nodes += spec.layer_sizes[l];
    std::vector<std::vector<double>> gW, gB;
    for (int e = 1; e <= spec.epochs; ++e) {
        double mse = net.compute_grads(ds, gW, gB);
        if (!std::isfinite(mse)) {
            res.diverged = true;
            res.epochs_used = e;
            return res;
        }
        net.step(gW, gB, spec.learning_rate);
        res.epochs_used = e;
        if (e % 10 == 0 || e == spec.epochs) {
            std::vector<double> yhat;
            yhat.reserve(ds.n());
            for (const auto& x : ds.x)
                yhat.push_back(net.predict_one(x));
            res.r2_train = r_squared(ds.y, yhat);
            if (res.r2_train >= 0.99)
                return res;
        }
    }
    std::vector<double> yhat;
    yhat.reserve(ds.n());
    for (const auto& x : ds.x)
        yhat.push_back(net.predict_one(x));
    res.r2_train = r_squared(ds.y, yhat);
    return res;
}

struct MlpSweepResult {
    bool found = false;
    int hidden_size = 0;
    MlpResult result;
    std::vector<MlpResult> attempts;
};

// Single-hidden-layer capacity sweep: smallest hidden width reaching
// R-squared >= 0.99 under a fixed training protocol.
inline MlpSweepResult mlp_sweep(const Dataset& ds, const std::vector<int>& hidden_sizes,
                                const MlpSpec& proto)
{
    MlpSweepResult out;
    for (int h : hidden_sizes) {
        MlpSpec spec = proto;
        spec.layer_sizes = {static_cast<int>(ds.d()), h, 1};
        MlpResult r = mlp_train(ds, spec);
        out.attempts.push_back(r);
        if (!out.found && r.r2_train >= 0.99) {
            out.found = true;
            out.hidden_size = h;
            out.result = r;
            break;
        }
    }
    return out;
}

inline std::vector<int> default_hidden_sweep()
{
    return {4, 8, 14, 20, 26, 32, 40, 52, 64};
}

} // namespace xnet
