#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "uam/core.hpp"

namespace uam {

enum class Activation { sigmoid, linear };

/// Activation vector with the trailing bias channel: phi(u) = [sig(u); 1].
/// The linear kind exists for tests where the chain rule degenerates to a
/// plain matrix product.
inline Eigen::VectorXd activation(const Eigen::VectorXd& u, Activation kind = Activation::sigmoid) {
    Eigen::VectorXd out(u.size() + 1);
    if (kind == Activation::sigmoid)
        out.head(u.size()) = (1. + (-u.array()).exp()).inverse();
    else
        out.head(u.size()) = u;
    out(u.size()) = 1.;
    return out;
}

/// Gradient of the augmented activation, (n+1) x n: elementwise slope on the
/// first n rows, zero row for the bias channel.
inline Eigen::MatrixXd activation_gradient(const Eigen::VectorXd& u,
                                           Activation kind = Activation::sigmoid) {
    const auto n = u.size();
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n + 1, n);
    if (kind == Activation::sigmoid) {
        const Eigen::ArrayXd s = (1. + (-u.array()).exp()).inverse();
        grad.topRows(n).diagonal() = s * (1. - s);
    } else {
        grad.topRows(n).setIdentity();
    }
    return grad;
}

/// Weight store of the k-hidden-layer network together with the per-layer
/// adaptation gains and Frobenius bounds the online update law maintains.
/// Widths are [N0, N1, ..., Nk, Nk+1]; weight i has shape (Ni+1) x Ni+1
/// because every layer input carries the bias channel.
struct DnnParameters {
    std::vector<int> layer_widths;
    std::vector<Eigen::MatrixXd> weights;            // V_i estimates
    std::vector<double> frobenius_bounds;            // Vbar_i (bound on |V|_F^2)
    std::vector<Eigen::VectorXd> adaptation_gains;   // Gamma_i diagonals
    Activation kind = Activation::sigmoid;

    int hidden_layers() const { return static_cast<int>(layer_widths.size()) - 2; }
    int input_dim() const { return layer_widths.front(); }
    int output_dim() const { return layer_widths.back(); }

    void validate() const {
        const auto k = hidden_layers();
        if (k < 1) throw std::invalid_argument("dnn: need at least one hidden layer");
        for (int w : layer_widths)
            if (w < 1) throw std::invalid_argument("dnn: layer widths must be positive");
        if (weights.size() != static_cast<size_t>(k + 1) ||
            frobenius_bounds.size() != weights.size() || adaptation_gains.size() != weights.size())
            throw std::invalid_argument("dnn: per-layer containers must have k+1 entries");
        for (int i = 0; i <= k; ++i) {
            if (weights[i].rows() != layer_widths[i] + 1 ||
                weights[i].cols() != layer_widths[i + 1])
                throw std::invalid_argument("dnn: weight shape mismatch at layer " +
                                            std::to_string(i));
            if (!(frobenius_bounds[i] > 0.))
                throw std::invalid_argument("dnn: Frobenius bounds must be positive");
            if (adaptation_gains[i].size() != layer_widths[i] + 1 ||
                (adaptation_gains[i].array() <= 0.).any())
                throw std::invalid_argument("dnn: adaptation gains must be positive diagonals");
        }
    }

    static DnnParameters sized(const std::vector<int>& widths, double vbar, double gamma) {
        DnnParameters p;
        p.layer_widths = widths;
        const int k = p.hidden_layers();
        if (k < 1) throw std::invalid_argument("dnn: need at least one hidden layer");
        for (int i = 0; i <= k; ++i) {
            p.weights.emplace_back(Eigen::MatrixXd::Zero(widths[i] + 1, widths[i + 1]));
            p.frobenius_bounds.push_back(vbar);
            p.adaptation_gains.emplace_back(
                Eigen::VectorXd::Constant(widths[i] + 1, gamma));
        }
        p.validate();
        return p;
    }

    /// Seeded uniform initialization in [-scale, scale].
    static DnnParameters random_init(const std::vector<int>& widths, double vbar, double gamma,
                                     double scale, std::mt19937_64& rng) {
        DnnParameters p = sized(widths, vbar, gamma);
        std::uniform_real_distribution<double> dist(-scale, scale);
        for (auto& w : p.weights)
            for (Eigen::Index c = 0; c < w.cols(); ++c)
                for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = dist(rng);
        return p;
    }

    /// Four-layer sizing used by the tracking experiments: widths 3-4-4-4-3.
    static DnnParameters default_sizing(std::mt19937_64& rng, double vbar = 100.,
                                        double gamma = 2.0e6, double scale = 0.1) {
        return random_init({3, 4, 4, 4, 3}, vbar, gamma, scale, rng);
    }
};

/// Input pair for the network: x = [v_d; 1], x_dot = [a_d; 0].
struct DnnInput {
    Eigen::VectorXd x;
    Eigen::VectorXd x_dot;

    static DnnInput from_reference(const Vec3& v_d, const Vec3& a_d) {
        DnnInput in;
        in.x.resize(4);
        in.x << v_d, 1.;
        in.x_dot.resize(4);
        in.x_dot << a_d, 0.;
        return in;
    }
};

/// Per-layer intermediates of one forward pass, reused by the derivative
/// and adaptation operations.
struct DnnForwardCache {
    std::vector<Eigen::VectorXd> Phi;        // Phi_j, j = 0..k
    std::vector<Eigen::VectorXd> phi;        // phi_j, j = 1..k (index j-1)
    std::vector<Eigen::MatrixXd> phi_grad;   // phi'_j, j = 1..k (index j-1)

    const Eigen::VectorXd& output() const { return Phi.back(); }
    Vec3 output3() const {
        if (Phi.back().size() != 3) throw std::logic_error("dnn: output is not 3-dimensional");
        return Vec3(Phi.back()(0), Phi.back()(1), Phi.back()(2));
    }
};

/// Recursive evaluation Phi_0 = V0' x, Phi_j = Vj' phi_j(Phi_{j-1}).
inline DnnForwardCache dnn_forward(const DnnParameters& p, const Eigen::VectorXd& x) {
    if (x.size() != p.input_dim() + 1)
        throw std::invalid_argument("dnn: input must have N0+1 entries");
    const int k = p.hidden_layers();
    DnnForwardCache c;
    c.Phi.reserve(k + 1);
    c.phi.reserve(k);
    c.phi_grad.reserve(k);
    c.Phi.push_back(p.weights[0].transpose() * x);
    for (int j = 1; j <= k; ++j) {
        c.phi.push_back(activation(c.Phi[j - 1], p.kind));
        c.phi_grad.push_back(activation_gradient(c.Phi[j - 1], p.kind));
        c.Phi.push_back(p.weights[j].transpose() * c.phi.back());
    }
    return c;
}

/// Weight-frozen time derivative of the network output:
/// Vk' phik' ... V1' phi1' V0' x_dot.
inline Eigen::VectorXd dnn_frozen_time_derivative(const DnnParameters& p,
                                                  const DnnForwardCache& c,
                                                  const Eigen::VectorXd& x_dot) {
    const int k = p.hidden_layers();
    Eigen::VectorXd d = p.weights[0].transpose() * x_dot;
    for (int j = 1; j <= k; ++j) d = p.weights[j].transpose() * (c.phi_grad[j - 1] * d);
    return d;
}

namespace detail {

/// Radial retraction onto the Frobenius ball |V|_F <= sqrt(vbar).
inline void project_weight(Eigen::MatrixXd& V, double vbar) {
    const double bound = std::sqrt(vbar);
    const double n = V.norm();
    if (n > bound) V *= bound / n;
}

}  // namespace detail

struct AdaptResult {
    bool frozen = false;   // update discarded because it went non-finite
};

/// One Euler step of the per-layer update law
///   dV_i = -Gamma_i [phi'_i V_{i-1}' ... phi'_1 V_0' x_dot] e2' [Vk' phi'_k ... V_{i+1}' phi'_{i+1}]
/// followed by the continuous projection keeping |V_i|_F^2 <= Vbar_i. The
/// leading chain collapses to x_dot at i = 0 and the trailing chain to the
/// identity at i = k; both ends are pinned by the shape-audit tests.
inline AdaptResult dnn_adapt(DnnParameters& p, const DnnForwardCache& c,
                             const Eigen::VectorXd& e2, const Eigen::VectorXd& x_dot, double dt) {
    const int k = p.hidden_layers();
    if (e2.size() != p.output_dim())
        throw std::invalid_argument("dnn: e2 must match the output width");
    if (x_dot.size() != p.input_dim() + 1)
        throw std::invalid_argument("dnn: x_dot must have N0+1 entries");

    // left chains: L[0] = x_dot, L[i] = phi'_i * D_{i-1} with the frozen
    // derivative recursion D_j = Vj' phi'_j D_{j-1}
    std::vector<Eigen::VectorXd> left(k + 1);
    left[0] = x_dot;
    Eigen::VectorXd d = p.weights[0].transpose() * x_dot;
    for (int i = 1; i <= k; ++i) {
        left[i] = c.phi_grad[i - 1] * d;
        if (i < k) d = p.weights[i].transpose() * left[i];
    }

    // right chains: P[k] = I, P[i] = P[i+1] V_{i+1}' phi'_{i+1}
    std::vector<Eigen::MatrixXd> right(k + 1);
    right[k] = Eigen::MatrixXd::Identity(p.output_dim(), p.output_dim());
    for (int i = k - 1; i >= 0; --i)
        right[i] = right[i + 1] * p.weights[i + 1].transpose() * c.phi_grad[i];

    std::vector<Eigen::MatrixXd> updated(k + 1);
    for (int i = 0; i <= k; ++i) {
        const Eigen::RowVectorXd row = e2.transpose() * right[i];
        const Eigen::MatrixXd rate =
            -(p.adaptation_gains[i].asDiagonal() * (left[i] * row));
        updated[i] = p.weights[i] + dt * rate;
        if (!updated[i].allFinite()) return {true};
    }
    for (int i = 0; i <= k; ++i) {
        detail::project_weight(updated[i], p.frobenius_bounds[i]);
        p.weights[i] = updated[i];
    }
    return {false};
}

/// Frobenius norms of V_i - Vhat_i against a reference weight set.
inline std::vector<double> weight_error_norms(const DnnParameters& p,
                                              const std::vector<Eigen::MatrixXd>& reference) {
    if (reference.size() != p.weights.size())
        throw std::invalid_argument("dnn: reference layer count mismatch");
    std::vector<double> out;
    out.reserve(reference.size());
    for (size_t i = 0; i < reference.size(); ++i) {
        if (reference[i].rows() != p.weights[i].rows() ||
            reference[i].cols() != p.weights[i].cols())
            throw std::invalid_argument("dnn: reference shape mismatch at layer " +
                                        std::to_string(i));
        out.push_back((reference[i] - p.weights[i]).norm());
    }
    return out;
}

inline std::vector<double> weight_norms(const DnnParameters& p) {
    std::vector<double> out;
    out.reserve(p.weights.size());
    for (const auto& w : p.weights) out.push_back(w.norm());
    return out;
}

/// Writes the weight matrices as a flat, layer-tagged numeric file.
inline void save_weights(const DnnParameters& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("dnn: cannot write " + path);
    out << "uam-dnn-weights 1\n";
    out << "layers " << p.weights.size() << "\n";
    char buf[32];
    for (size_t i = 0; i < p.weights.size(); ++i) {
        const auto& w = p.weights[i];
        out << "layer " << i << " " << w.rows() << " " << w.cols() << "\n";
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                std::snprintf(buf, sizeof buf, "%.17g", w(r, c));
                out << buf << (c + 1 < w.cols() ? " " : "\n");
            }
        }
    }
}

/// Loads weights saved by save_weights into a parameter set with matching
/// shapes.
inline void load_weights(DnnParameters& p, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("dnn: cannot read " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "uam-dnn-weights" || version != 1)
        throw std::runtime_error("dnn: unrecognized weight file " + path);
    std::string tag;
    size_t layers = 0;
    in >> tag >> layers;
    if (tag != "layers" || layers != p.weights.size())
        throw std::runtime_error("dnn: layer count mismatch in " + path);
    for (size_t i = 0; i < layers; ++i) {
        size_t idx = 0;
        Eigen::Index rows = 0, cols = 0;
        in >> tag >> idx >> rows >> cols;
        if (tag != "layer" || idx != i || rows != p.weights[i].rows() ||
            cols != p.weights[i].cols())
            throw std::runtime_error("dnn: shape mismatch in " + path);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c)
                if (!(in >> p.weights[i](r, c)))
                    throw std::runtime_error("dnn: truncated weight file " + path);
    }
}

}  // namespace uam
