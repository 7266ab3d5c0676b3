#include "trafficlab/mlp.h"

#include <cmath>
#include <fstream>

#include "json.hpp"

namespace trafficlab {

namespace {

constexpr int kCheckpointVersion = 1;
constexpr double kSigmoidClamp = 1e-12;
constexpr double kSigmoidGradFloor = 1e-8;

double steepSigmoid(double x, double t) {
    double z = t * x;
    double y;
    if (z >= 0) {
        y = 1.0 / (1.0 + std::exp(-z));
    } else {
        double e = std::exp(z);
        y = e / (1.0 + e);
    }
    if (y < kSigmoidClamp) y = kSigmoidClamp;
    if (y > 1.0 - kSigmoidClamp) y = 1.0 - kSigmoidClamp;
    return y;
}

void checkLayout(const MlpLayout &layout) {
    if (layout.sizes.size() < 2)
        throw InvalidArgument("network needs at least input and output sizes");
    for (int s : layout.sizes)
        if (s <= 0) throw InvalidArgument("layer sizes must be positive");
    if (layout.steepness <= 0)
        throw InvalidArgument("sigmoid steepness must be positive");
}

}  // namespace

void Gradients::setZero() {
    for (auto &layer : layers) {
        std::fill(layer.weights.data.begin(), layer.weights.data.end(), 0.0);
        std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
    }
}

MlpNetwork MlpNetwork::zeros(const MlpLayout &layout) {
    checkLayout(layout);
    MlpNetwork net;
    net.layout_ = layout;
    for (size_t l = 0; l + 1 < layout.sizes.size(); ++l) {
        LayerParams p;
        p.weights = Matrix(layout.sizes[l + 1], layout.sizes[l]);
        p.bias.assign(layout.sizes[l + 1], 0.0);
        net.params.push_back(std::move(p));
    }
    return net;
}

MlpNetwork MlpNetwork::randomInit(const MlpLayout &layout, RngStream &rng) {
    MlpNetwork net = zeros(layout);
    for (auto &layer : net.params) {
        double bound = 1.0 / std::sqrt(static_cast<double>(layer.weights.cols));
        for (double &w : layer.weights.data) w = (2.0 * rng.u01() - 1.0) * bound;
        for (double &b : layer.bias) b = (2.0 * rng.u01() - 1.0) * bound;
    }
    return net;
}

std::vector<double> MlpNetwork::forward(const std::vector<double> &input) const {
    ForwardTrace scratch;
    return forward(input, scratch);
}

std::vector<double> MlpNetwork::forward(const std::vector<double> &input,
                                        ForwardTrace &trace) const {
    if (static_cast<int>(input.size()) != inputSize())
        throw InvalidArgument("input size " + std::to_string(input.size()) +
                              " does not match network input " +
                              std::to_string(inputSize()));
    trace.input = input;
    trace.preacts.assign(params.size(), {});
    trace.acts.assign(params.size(), {});
    const std::vector<double> *x = &trace.input;
    for (size_t l = 0; l < params.size(); ++l) {
        const LayerParams &layer = params[l];
        auto &pre = trace.preacts[l];
        pre.assign(layer.weights.rows, 0.0);
        for (int r = 0; r < layer.weights.rows; ++r) {
            const double *w = &layer.weights.data[static_cast<size_t>(r) *
                                                  layer.weights.cols];
            double sum = layer.bias[r];
            for (int c = 0; c < layer.weights.cols; ++c) sum += w[c] * (*x)[c];
            pre[r] = sum;
        }
        auto &act = trace.acts[l];
        act.resize(pre.size());
        const bool last = (l + 1 == params.size());
        if (!last) {
            for (size_t i = 0; i < pre.size(); ++i)
                act[i] = pre[i] > 0 ? pre[i] : 0.0;
        } else if (layout_.output == OutputActivation::SteepSigmoid) {
            for (size_t i = 0; i < pre.size(); ++i)
                act[i] = steepSigmoid(pre[i], layout_.steepness);
        } else {
            act = pre;
        }
        x = &act;
    }
    trace.valid = true;
    return trace.acts.back();
}

void MlpNetwork::backward(const ForwardTrace &trace,
                          const std::vector<double> &upstream, Gradients &grads,
                          std::vector<double> *inputGrad) const {
    if (!trace.valid || trace.acts.size() != params.size())
        throw InvalidArgument("backward requires a cached forward pass");
    if (static_cast<int>(trace.input.size()) != inputSize())
        throw InvalidArgument("cached forward does not match this network");
    if (static_cast<int>(upstream.size()) != outputSize())
        throw InvalidArgument("upstream gradient size mismatch");
    if (grads.layers.size() != params.size()) grads = zeroGradients();

    std::vector<double> delta = upstream;
    for (size_t li = params.size(); li-- > 0;) {
        const LayerParams &layer = params[li];
        const bool last = (li + 1 == params.size());
        // activation derivative
        if (last) {
            if (layout_.output == OutputActivation::SteepSigmoid) {
                for (size_t i = 0; i < delta.size(); ++i) {
                    double y = trace.acts[li][i];
                    double dy = layout_.steepness * y * (1.0 - y);
                    if (dy < kSigmoidGradFloor) dy = kSigmoidGradFloor;
                    delta[i] *= dy;
                }
            }
        } else {
            for (size_t i = 0; i < delta.size(); ++i)
                if (trace.preacts[li][i] <= 0) delta[i] = 0.0;
        }
        const std::vector<double> &below =
            li == 0 ? trace.input : trace.acts[li - 1];
        LayerParams &g = grads.layers[li];
        for (int r = 0; r < layer.weights.rows; ++r) {
            double d = delta[r];
            g.bias[r] += d;
            if (d == 0.0) continue;
            double *gw = &g.weights.data[static_cast<size_t>(r) * layer.weights.cols];
            for (int c = 0; c < layer.weights.cols; ++c) gw[c] += d * below[c];
        }
        if (li > 0 || inputGrad) {
            std::vector<double> next(layer.weights.cols, 0.0);
            for (int r = 0; r < layer.weights.rows; ++r) {
                double d = delta[r];
                if (d == 0.0) continue;
                const double *w = &layer.weights.data[static_cast<size_t>(r) *
                                                      layer.weights.cols];
                for (int c = 0; c < layer.weights.cols; ++c) next[c] += d * w[c];
            }
            if (li == 0) {
                *inputGrad = std::move(next);
                return;
            }
            delta = std::move(next);
        }
    }
}

Gradients MlpNetwork::zeroGradients() const {
    Gradients g;
    for (const auto &layer : params) {
        LayerParams p;
        p.weights = Matrix(layer.weights.rows, layer.weights.cols);
        p.bias.assign(layer.bias.size(), 0.0);
        g.layers.push_back(std::move(p));
    }
    return g;
}

size_t MlpNetwork::paramCount() const {
    size_t n = 0;
    for (const auto &layer : params)
        n += layer.weights.data.size() + layer.bias.size();
    return n;
}

void MlpNetwork::saveJson(const std::filesystem::path &path) const {
    nlohmann::json doc;
    doc["format_version"] = kCheckpointVersion;
    doc["layer_sizes"] = layout_.sizes;
    doc["output_activation"] =
        layout_.output == OutputActivation::SteepSigmoid ? "steep_sigmoid"
                                                         : "linear";
    doc["steepness"] = layout_.steepness;
    nlohmann::json layersJson = nlohmann::json::array();
    for (const auto &layer : params) {
        nlohmann::json lj;
        lj["weights"] = layer.weights.data;  // row-major
        lj["bias"] = layer.bias;
        layersJson.push_back(std::move(lj));
    }
    doc["layers"] = std::move(layersJson);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write checkpoint " + path.string());
    out << doc.dump() << "\n";
}

MlpNetwork MlpNetwork::loadJson(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read checkpoint " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception &e) {
        throw IoError("malformed checkpoint " + path.string() + ": " + e.what());
    }
    if (doc.value("format_version", -1) != kCheckpointVersion)
        throw IoError("unsupported checkpoint version in " + path.string());
    MlpLayout layout;
    layout.sizes = doc.at("layer_sizes").get<std::vector<int>>();
    layout.output = doc.at("output_activation").get<std::string>() == "steep_sigmoid"
                        ? OutputActivation::SteepSigmoid
                        : OutputActivation::Linear;
    layout.steepness = doc.at("steepness").get<double>();
    MlpNetwork net = zeros(layout);
    const auto &layersJson = doc.at("layers");
    if (layersJson.size() != net.params.size())
        throw IoError("layer count mismatch in " + path.string());
    for (size_t l = 0; l < net.params.size(); ++l) {
        auto w = layersJson[l].at("weights").get<std::vector<double>>();
        auto b = layersJson[l].at("bias").get<std::vector<double>>();
        if (w.size() != net.params[l].weights.data.size() ||
            b.size() != net.params[l].bias.size())
            throw IoError("layer shape mismatch in " + path.string());
        net.params[l].weights.data = std::move(w);
        net.params[l].bias = std::move(b);
    }
    return net;
}

void softUpdate(MlpNetwork &target, const MlpNetwork &online, double tau) {
    if (target.layout() != online.layout())
        throw InvalidArgument("soft update requires identical architectures");
    if (tau < 0.0 || tau > 1.0)
        throw InvalidArgument("tau must lie in [0, 1]");
    for (size_t l = 0; l < target.layers().size(); ++l) {
        auto &t = target.layers()[l];
        const auto &o = online.layers()[l];
        for (size_t i = 0; i < t.weights.data.size(); ++i)
            t.weights.data[i] = tau * o.weights.data[i] + (1 - tau) * t.weights.data[i];
        for (size_t i = 0; i < t.bias.size(); ++i)
            t.bias[i] = tau * o.bias[i] + (1 - tau) * t.bias[i];
    }
}

int binarize(double value) { return value >= 0.5 ? 1 : 0; }

AdamOptimizer::AdamOptimizer(const MlpNetwork &net, double b1, double b2,
                             double eps)
    : beta1(b1), beta2(b2), epsilon(eps), m(net.zeroGradients()),
      v(net.zeroGradients()) {}

void AdamOptimizer::step(MlpNetwork &net, const Gradients &grads,
                         double learningRate) {
    if (grads.layers.size() != net.layers().size())
        throw InvalidArgument("gradient shape mismatch");
    ++t;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (size_t l = 0; l < net.layers().size(); ++l) {
        auto &p = net.layers()[l];
        const auto &g = grads.layers[l];
        if (g.weights.data.size() != p.weights.data.size() ||
            g.bias.size() != p.bias.size())
            throw InvalidArgument("gradient shape mismatch");
        auto &mw = m.layers[l];
        auto &vw = v.layers[l];
        for (size_t i = 0; i < p.weights.data.size(); ++i) {
            double gi = g.weights.data[i];
            mw.weights.data[i] = beta1 * mw.weights.data[i] + (1 - beta1) * gi;
            vw.weights.data[i] = beta2 * vw.weights.data[i] + (1 - beta2) * gi * gi;
            p.weights.data[i] -= learningRate * (mw.weights.data[i] / c1) /
                                 (std::sqrt(vw.weights.data[i] / c2) + epsilon);
        }
        for (size_t i = 0; i < p.bias.size(); ++i) {
            double gi = g.bias[i];
            mw.bias[i] = beta1 * mw.bias[i] + (1 - beta1) * gi;
            vw.bias[i] = beta2 * vw.bias[i] + (1 - beta2) * gi * gi;
            p.bias[i] -= learningRate * (mw.bias[i] / c1) /
                         (std::sqrt(vw.bias[i] / c2) + epsilon);
        }
    }
}

}  // namespace trafficlab
