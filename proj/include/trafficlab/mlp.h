#ifndef TRAFFICLAB_MLP_H
#define TRAFFICLAB_MLP_H

#include <filesystem>
#include <vector>

#include "trafficlab/errors.h"
#include "trafficlab/rng.h"

namespace trafficlab {

struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;  // row-major

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}
    double &at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
};

enum class OutputActivation { Linear, SteepSigmoid };

// Hidden layers are ReLU. SteepSigmoid(t) computes 1/(1+exp(-t*x)) clamped
// to the open interval (0,1); its training derivative t*y*(1-y) is floored
// at 1e-8 so saturated outputs keep a usable gradient.
struct MlpLayout {
    std::vector<int> sizes;  // input, hidden..., output
    OutputActivation output = OutputActivation::Linear;
    double steepness = 10.0;

    bool operator==(const MlpLayout &) const = default;
};

struct LayerParams {
    Matrix weights;  // out x in
    std::vector<double> bias;
};

struct Gradients {
    std::vector<LayerParams> layers;
    void setZero();
};

// Cached intermediate values from one forward pass; required by backward().
struct ForwardTrace {
    std::vector<double> input;
    std::vector<std::vector<double>> preacts;
    std::vector<std::vector<double>> acts;
    bool valid = false;
};

class MlpNetwork {
public:
    MlpNetwork() = default;
    static MlpNetwork randomInit(const MlpLayout &layout, RngStream &rng);
    static MlpNetwork zeros(const MlpLayout &layout);

    std::vector<double> forward(const std::vector<double> &input) const;
    std::vector<double> forward(const std::vector<double> &input,
                                ForwardTrace &trace) const;

    // Exact reverse-mode derivatives of sum(upstream * output) w.r.t. every
    // parameter, and optionally w.r.t. the input.
    void backward(const ForwardTrace &trace, const std::vector<double> &upstream,
                  Gradients &grads, std::vector<double> *inputGrad = nullptr) const;

    Gradients zeroGradients() const;

    const MlpLayout &layout() const { return layout_; }
    int inputSize() const { return layout_.sizes.front(); }
    int outputSize() const { return layout_.sizes.back(); }
    size_t paramCount() const;

    std::vector<LayerParams> &layers() { return params; }
    const std::vector<LayerParams> &layers() const { return params; }

    void saveJson(const std::filesystem::path &path) const;
    static MlpNetwork loadJson(const std::filesystem::path &path);

private:
    MlpLayout layout_;
    std::vector<LayerParams> params;
};

// theta_target <- tau * theta_online + (1 - tau) * theta_target
void softUpdate(MlpNetwork &target, const MlpNetwork &online, double tau);

// 1 if value >= 0.5 else 0 (ties switch)
int binarize(double value);

class AdamOptimizer {
public:
    explicit AdamOptimizer(const MlpNetwork &net, double beta1 = 0.9,
                           double beta2 = 0.999, double epsilon = 1e-8);
    // descent step; pass negated gradients to ascend
    void step(MlpNetwork &net, const Gradients &grads, double learningRate);

private:
    double beta1, beta2, epsilon;
    int64_t t = 0;
    Gradients m, v;
};

}  // namespace trafficlab

#endif
