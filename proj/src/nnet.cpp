#include "adaptrust/nnet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adaptrust/rng.hpp"

namespace adaptrust {

namespace {

double activate(Activation a, double z) {
    return a == Activation::Sigmoid ? 1.0 / (1.0 + std::exp(-z)) : std::tanh(z);
}

// Derivative expressed through the activation value.
double derivative(Activation a, double y) { return a == Activation::Sigmoid ? y * (1.0 - y) : 1.0 - y * y; }

std::vector<Layer> zero_like(const std::vector<Layer>& layers) {
    std::vector<Layer> g = layers;
    for (auto& l : g) {
        std::fill(l.weights.begin(), l.weights.end(), 0.0);
        std::fill(l.biases.begin(), l.biases.end(), 0.0);
    }
    return g;
}

void check_sample(const Network& net, const Sample& s) {
    if (s.input.size() != net.input_size())
        throw Error(ErrorKind::DimensionMismatch, "sample input width " + std::to_string(s.input.size()) +
                                                      " != network input " + std::to_string(net.input_size()));
    if (s.target.size() != net.output_size() || s.mask.size() != net.output_size())
        throw Error(ErrorKind::DimensionMismatch, "sample target/mask width != network output");
}

std::size_t observed(const Sample& s) {
    return static_cast<std::size_t>(std::count_if(s.mask.begin(), s.mask.end(), [](unsigned char m) { return m != 0; }));
}

// Adds scale * d/dtheta sum_k mask_k (y_k - t_k)^2 into grads.
void accumulate(const Network& net, const Sample& s, double scale, std::vector<Layer>& grads) {
    const auto& layers = net.layers();
    std::vector<std::vector<double>> acts{s.input};
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& L = layers[l];
        const Activation a = l + 1 == layers.size() ? net.output_activation() : net.hidden_activation();
        std::vector<double> next(L.out);
        for (std::size_t r = 0; r < L.out; ++r) {
            double z = L.biases[r];
            for (std::size_t c = 0; c < L.in; ++c) z += L.w(r, c) * acts.back()[c];
            next[r] = activate(a, z);
        }
        acts.push_back(std::move(next));
    }

    std::vector<double> delta(layers.back().out);
    const auto& y = acts.back();
    for (std::size_t k = 0; k < delta.size(); ++k)
        delta[k] = s.mask[k] ? 2.0 * scale * (y[k] - s.target[k]) * derivative(net.output_activation(), y[k]) : 0.0;

    for (std::size_t l = layers.size(); l-- > 0;) {
        const auto& L = layers[l];
        auto& G = grads[l];
        const auto& x = acts[l];
        for (std::size_t r = 0; r < L.out; ++r) {
            G.biases[r] += delta[r];
            for (std::size_t c = 0; c < L.in; ++c) G.w(r, c) += delta[r] * x[c];
        }
        if (l == 0) break;
        std::vector<double> prev(L.in, 0.0);
        for (std::size_t c = 0; c < L.in; ++c) {
            double sum = 0.0;
            for (std::size_t r = 0; r < L.out; ++r) sum += L.w(r, c) * delta[r];
            prev[c] = sum * derivative(net.hidden_activation(), x[c]);
        }
        delta = std::move(prev);
    }
}

} // namespace

std::string activation_name(Activation a) { return a == Activation::Sigmoid ? "sigmoid" : "tanh"; }

Activation activation_from_name(const std::string& name) {
    if (name == "sigmoid") return Activation::Sigmoid;
    if (name == "tanh") return Activation::Tanh;
    throw Error(ErrorKind::ParseError, "unknown activation '" + name + "'");
}

Network Network::create(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed, Activation hidden) {
    if (layer_sizes.size() < 2) throw Error(ErrorKind::BadArchitecture, "need at least input and output layers");
    for (auto n : layer_sizes)
        if (n == 0) throw Error(ErrorKind::BadArchitecture, "layer sizes must be positive");

    Rng rng(seed);
    std::vector<Layer> layers;
    for (std::size_t i = 1; i < layer_sizes.size(); ++i) {
        Layer L;
        L.in = layer_sizes[i - 1];
        L.out = layer_sizes[i];
        const double limit = std::sqrt(3.0 / static_cast<double>(L.in));
        L.weights.resize(L.in * L.out);
        for (auto& w : L.weights) w = rng.uniform(-limit, limit);
        L.biases.assign(L.out, 0.0);
        layers.push_back(std::move(L));
    }
    return Network(std::move(layers), hidden, Activation::Sigmoid, seed);
}

Network::Network(std::vector<Layer> layers, Activation hidden, Activation output, std::uint64_t seed)
    : layers_(std::move(layers)), hidden_(hidden), output_(output), seed_(seed) {
    if (layers_.empty()) throw Error(ErrorKind::BadArchitecture, "network has no layers");
    if (output_ != Activation::Sigmoid) throw Error(ErrorKind::BadArchitecture, "output activation must be sigmoid");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const auto& L = layers_[i];
        if (L.in == 0 || L.out == 0) throw Error(ErrorKind::BadArchitecture, "layer sizes must be positive");
        if (L.weights.size() != L.in * L.out || L.biases.size() != L.out)
            throw Error(ErrorKind::BadArchitecture, "layer " + std::to_string(i) + " has inconsistent shapes");
        if (i > 0 && layers_[i - 1].out != L.in)
            throw Error(ErrorKind::BadArchitecture, "layer " + std::to_string(i) + " input does not match previous output");
    }
}

std::vector<std::size_t> Network::layer_sizes() const {
    std::vector<std::size_t> sizes{layers_.front().in};
    for (const auto& L : layers_) sizes.push_back(L.out);
    return sizes;
}

std::vector<double> Network::forward(std::span<const double> input) const {
    if (input.size() != input_size())
        throw Error(ErrorKind::DimensionMismatch, "input width " + std::to_string(input.size()) +
                                                      " != network input " + std::to_string(input_size()));
    std::vector<double> x(input.begin(), input.end());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& L = layers_[l];
        const Activation a = l + 1 == layers_.size() ? output_ : hidden_;
        std::vector<double> y(L.out);
        for (std::size_t r = 0; r < L.out; ++r) {
            double z = L.biases[r];
            for (std::size_t c = 0; c < L.in; ++c) z += L.w(r, c) * x[c];
            y[r] = activate(a, z);
        }
        x = std::move(y);
    }
    return x;
}

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
        throw Error(ErrorKind::ConfigInvalid, "learning rate must be a nonnegative finite number");
    if (epochs == 0) throw Error(ErrorKind::ConfigInvalid, "epochs must be positive");
    if (batch_size == 0) throw Error(ErrorKind::ConfigInvalid, "batch size must be positive");
}

double sample_loss(const Network& net, const Sample& sample) {
    check_sample(net, sample);
    const auto y = net.forward(sample.input);
    double sum = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k)
        if (sample.mask[k]) sum += (y[k] - sample.target[k]) * (y[k] - sample.target[k]);
    return sum / static_cast<double>(std::max<std::size_t>(1, observed(sample)));
}

double dataset_loss(const Network& net, std::span<const Sample> samples) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : samples) {
        check_sample(net, s);
        const auto y = net.forward(s.input);
        for (std::size_t k = 0; k < y.size(); ++k) {
            if (!s.mask[k]) continue;
            sum += (y[k] - s.target[k]) * (y[k] - s.target[k]);
            ++n;
        }
    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

std::vector<Layer> backprop(const Network& net, const Sample& sample) {
    check_sample(net, sample);
    auto grads = zero_like(net.layers());
    accumulate(net, sample, 1.0 / static_cast<double>(std::max<std::size_t>(1, observed(sample))), grads);
    return grads;
}

std::vector<double> train(Network& net, std::span<const Sample> samples, const TrainConfig& config) {
    config.validate();
    if (samples.empty()) throw Error(ErrorKind::NoSamples, "no training samples");
    for (const auto& s : samples) check_sample(net, s);

    Rng rng(config.seed);
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> history;
    history.reserve(config.epochs);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            std::size_t count = 0;
            for (std::size_t i = start; i < end; ++i) count += observed(samples[order[i]]);
            if (count == 0) continue;
            auto grads = zero_like(net.layers());
            const double scale = 1.0 / static_cast<double>(count);
            for (std::size_t i = start; i < end; ++i) accumulate(net, samples[order[i]], scale, grads);
            auto& layers = net.mutable_layers();
            for (std::size_t l = 0; l < layers.size(); ++l) {
                for (std::size_t j = 0; j < layers[l].weights.size(); ++j)
                    layers[l].weights[j] -= config.learning_rate * grads[l].weights[j];
                for (std::size_t j = 0; j < layers[l].biases.size(); ++j)
                    layers[l].biases[j] -= config.learning_rate * grads[l].biases[j];
            }
        }
        history.push_back(dataset_loss(net, samples));
    }
    return history;
}

double gradient_check(const Network& net, const Sample& sample, double delta) {
    if (!(delta > 0.0)) throw Error(ErrorKind::OutOfRange, "finite-difference delta must be positive");
    const auto analytic = backprop(net, sample);
    Network probe = net;
    double worst = 0.0;
    auto compare = [&](double& param, double grad) {
        const double saved = param;
        param = saved + delta;
        const double up = sample_loss(probe, sample);
        param = saved - delta;
        const double down = sample_loss(probe, sample);
        param = saved;
        const double numeric = (up - down) / (2.0 * delta);
        const double denom = std::max({std::abs(grad), std::abs(numeric), 1e-12});
        worst = std::max(worst, std::abs(grad - numeric) / denom);
    };
    auto& layers = probe.mutable_layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        for (std::size_t j = 0; j < layers[l].weights.size(); ++j) compare(layers[l].weights[j], analytic[l].weights[j]);
        for (std::size_t j = 0; j < layers[l].biases.size(); ++j) compare(layers[l].biases[j], analytic[l].biases[j]);
    }
    return worst;
}

} // namespace adaptrust
