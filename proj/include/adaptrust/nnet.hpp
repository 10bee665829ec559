// Small dense feedforward network with masked-MSE gradient descent.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adaptrust/error.hpp"

namespace adaptrust {

enum class Activation { Sigmoid, Tanh };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

// Dense layer: weights are out x in, row-major.
struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> weights;
    std::vector<double> biases;

    double& w(std::size_t row, std::size_t col) { return weights[row * in + col]; }
    double w(std::size_t row, std::size_t col) const { return weights[row * in + col]; }
    bool operator==(const Layer&) const = default;
};

class Network {
public:
    // Seeded uniform init with limit sqrt(3 / fan_in); biases start at zero.
    static Network create(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed,
                          Activation hidden = Activation::Tanh);

    // Validates shapes; output activation must be Sigmoid.
    Network(std::vector<Layer> layers, Activation hidden, Activation output, std::uint64_t seed);

    std::vector<double> forward(std::span<const double> input) const;

    std::vector<std::size_t> layer_sizes() const;
    std::size_t input_size() const { return layers_.front().in; }
    std::size_t output_size() const { return layers_.back().out; }
    const std::vector<Layer>& layers() const { return layers_; }
    std::vector<Layer>& mutable_layers() { return layers_; }
    Activation hidden_activation() const { return hidden_; }
    Activation output_activation() const { return output_; }
    std::uint64_t seed() const { return seed_; }

    bool operator==(const Network&) const = default;

private:
    std::vector<Layer> layers_;
    Activation hidden_ = Activation::Tanh;
    Activation output_ = Activation::Sigmoid;
    std::uint64_t seed_ = 0;
};

struct TrainConfig {
    double learning_rate = 0.5;
    std::size_t epochs = 300;
    std::size_t batch_size = 16;
    std::uint64_t seed = 42;

    void validate() const;
};

// mask[k] != 0 marks target[k] as observed.
struct Sample {
    std::vector<double> input;
    std::vector<double> target;
    std::vector<unsigned char> mask;
};

// Masked squared error of one sample, averaged over its observed components.
double sample_loss(const Network& net, const Sample& sample);

// Mean of squared error over every observed component of the set.
double dataset_loss(const Network& net, std::span<const Sample> samples);

// Gradients of sample_loss, same layout as the network's layers.
std::vector<Layer> backprop(const Network& net, const Sample& sample);

// Returns loss on the full sample set after each epoch.
std::vector<double> train(Network& net, std::span<const Sample> samples, const TrainConfig& config);

// Max relative error between analytic and central-difference gradients over
// every weight and bias.
double gradient_check(const Network& net, const Sample& sample, double delta);

} // namespace adaptrust
