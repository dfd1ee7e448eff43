#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cdrl/nn.hpp"
#include "cdrl/tensor.hpp"

namespace cdrl {

struct GateConfig {
    bool enabled = true;
    int num_branches = 32;        // M
    double select_fraction = 0.25;  // rho; K = round(rho * M)
    double sigmoid_temp = 4.0;      // beta
    double ema_decay = 0.99;        // tau
    double gain_strength = 0.5;     // alpha
    int grc_dim = 0;                // D, set by the owning network

    int k() const {
        return std::max(1, static_cast<int>(std::lround(select_fraction * num_branches)));
    }

    void validate() const {
        auto fail = [](const char* field) {
            throw ConfigError(std::string("gate config: invalid ") + field);
        };
        if (num_branches < 1) fail("num_branches");
        if (!(select_fraction > 0 && select_fraction <= 1)) fail("select_fraction");
        if (!(sigmoid_temp > 0) || !std::isfinite(sigmoid_temp)) fail("sigmoid_temp");
        if (!(ema_decay > 0 && ema_decay < 1)) fail("ema_decay");
        if (!(gain_strength >= 0) || !std::isfinite(gain_strength)) fail("gain_strength");
        if (grc_dim < 1) fail("grc_dim");
    }
};

template <class T>
inline T sigmoid(T x) {
    return T(1) / (T(1) + std::exp(-x));
}

// Population-driven, non-trainable gain on the GrC->PC pathway: fixed
// random unit hyperplanes, top-k branch selection, sigmoidal integration,
// slow EMA state, multiplicative modulation. Fully outside backprop.
template <class T>
class DendriticGate {
  public:
    GateConfig cfg;
    Param<T> hyperplanes;  // [M, D], unit rows, fixed
    Tensor<T> ema;         // [D]
    bool initialized = false;
    bool freeze_ema = false;  // test hook: apply() without advancing state

    DendriticGate() = default;
    DendriticGate(GateConfig c, std::uint64_t seed) : cfg(c) {
        cfg.validate();
        hyperplanes = Param<T>("gate.hyperplanes", {cfg.num_branches, cfg.grc_dim}, false);
        ema = Tensor<T>({cfg.grc_dim});
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> dist(0.0, 1.0);
        for (int m = 0; m < cfg.num_branches; ++m) {
            T* row = hyperplanes.value.ptr() + static_cast<std::size_t>(m) * cfg.grc_dim;
            double ss = 0;
            for (int d = 0; d < cfg.grc_dim; ++d) {
                row[d] = static_cast<T>(dist(rng));
                ss += static_cast<double>(row[d]) * static_cast<double>(row[d]);
            }
            const T inv = static_cast<T>(1.0 / std::sqrt(ss));
            for (int d = 0; d < cfg.grc_dim; ++d) row[d] *= inv;
        }
    }

    static Tensor<T> population_mean(const Tensor<T>& G) {
        require_rank(G, 2, "population_mean");
        const int B = G.dim(0), D = G.dim(1);
        if (B < 1) throw UsageError("population_mean: empty batch");
        Tensor<T> g({D});
        for (int b = 0; b < B; ++b)
            for (int d = 0; d < D; ++d) g[d] += G[static_cast<std::size_t>(b) * D + d];
        for (int d = 0; d < D; ++d) g[d] /= static_cast<T>(B);
        return g;
    }

    static Tensor<T> normalize(const Tensor<T>& g) {
        double ss = 0;
        for (T v : g.data) ss += static_cast<double>(v) * static_cast<double>(v);
        const double norm = std::sqrt(ss);
        Tensor<T> out(g.shape);
        if (norm < 1e-8) return out;  // degenerate guard: zero vector
        for (std::size_t i = 0; i < g.numel(); ++i) out[i] = static_cast<T>(g[i] / norm);
        return out;
    }

    Tensor<T> branch_projections(const Tensor<T>& g_tilde) const {
        if (static_cast<int>(g_tilde.numel()) != cfg.grc_dim)
            throw ShapeError("branch_projections: got " + g_tilde.shape_str() + ", expected D=" +
                             std::to_string(cfg.grc_dim));
        Tensor<T> p({cfg.num_branches});
        ConstMatMap<T> H(hyperplanes.value.ptr(), cfg.num_branches, cfg.grc_dim);
        ConstMatMap<T> g(g_tilde.ptr(), cfg.grc_dim, 1);
        MatMap<T>(p.ptr(), cfg.num_branches, 1).noalias() = H * g;
        return p;
    }

    // Top-K branch selection (ties -> lowest index), sigmoidal integration,
    // elementwise squashing into (0,1).
    Tensor<T> select_and_integrate(const Tensor<T>& p) const {
        const int M = cfg.num_branches;
        const int K = cfg.k();
        std::vector<int> idx(M);
        std::iota(idx.begin(), idx.end(), 0);
        std::partial_sort(idx.begin(), idx.begin() + K, idx.end(), [&](int a, int b) {
            return p[a] > p[b] || (p[a] == p[b] && a < b);
        });
        Tensor<T> d({cfg.grc_dim});
        for (int s = 0; s < K; ++s) {
            const int m = idx[s];
            const T w = sigmoid(static_cast<T>(cfg.sigmoid_temp) * p[m]);
            const T* row = hyperplanes.value.ptr() + static_cast<std::size_t>(m) * cfg.grc_dim;
            for (int j = 0; j < cfg.grc_dim; ++j) d[j] += w * row[j];
        }
        for (auto& v : d.data) v = sigmoid(v);
        return d;  // z
    }

    void ema_update(const Tensor<T>& z) {
        if (!(cfg.ema_decay > 0 && cfg.ema_decay < 1))
            throw ConfigError("gate config: invalid ema_decay");
        if (!initialized) {
            ema = z;
            initialized = true;
            return;
        }
        const T tau = static_cast<T>(cfg.ema_decay);
        for (std::size_t i = 0; i < ema.numel(); ++i)
            ema[i] = tau * ema[i] + (T(1) - tau) * z[i];
    }

    // Gain vector from current EMA: 1 + alpha * (e - 0.5).
    Tensor<T> gain() const {
        Tensor<T> g(ema.shape);
        const T a = static_cast<T>(cfg.gain_strength);
        for (std::size_t i = 0; i < ema.numel(); ++i)
            g[i] = T(1) + a * (ema[i] - T(0.5));
        return g;
    }

    // Modulates G with the current EMA; the gain is constant w.r.t. backprop.
    Tensor<T> modulate(const Tensor<T>& G) const {
        if (!initialized) throw UsageError("gate modulate: EMA state not initialized");
        return modulate_with(G, gain());
    }

    // Full pipeline (population mean -> normalize -> project -> select ->
    // integrate -> EMA -> gain). EMA advances exactly once per call unless
    // the gate is disabled or frozen.
    Tensor<T> apply(const Tensor<T>& G) {
        if (!cfg.enabled) {
            last_gain_ = Tensor<T>();
            last_global_gain_ = T(1);
            return G;
        }
        if (!freeze_ema) {
            const Tensor<T> z =
                select_and_integrate(branch_projections(normalize(population_mean(G))));
            ema_update(z);
        } else if (!initialized) {
            throw UsageError("gate apply: frozen before first EMA update");
        }
        last_gain_ = gain();
        last_global_gain_ = static_cast<T>(
            std::accumulate(last_gain_.data.begin(), last_gain_.data.end(), 0.0) /
            static_cast<double>(last_gain_.numel()));
        return modulate_with(G, last_gain_);
    }

    // Stop-gradient boundary: dG = dGhat * gain (gain is a constant).
    Tensor<T> backward(const Tensor<T>& dGhat) const {
        if (!cfg.enabled || last_gain_.numel() == 0) return dGhat;
        Tensor<T> dG(dGhat.shape);
        const int B = dGhat.dim(0), D = dGhat.dim(1);
        for (int b = 0; b < B; ++b)
            for (int d = 0; d < D; ++d)
                dG[static_cast<std::size_t>(b) * D + d] =
                    dGhat[static_cast<std::size_t>(b) * D + d] * last_gain_[d];
        return dG;
    }

    T global_gain() const { return last_global_gain_; }

    void reset_ema() {
        ema.zero();
        initialized = false;
        last_gain_ = Tensor<T>();
        last_global_gain_ = T(1);
    }

  private:
    static Tensor<T> modulate_with(const Tensor<T>& G, const Tensor<T>& gainv) {
        require_rank(G, 2, "gate modulate");
        const int B = G.dim(0), D = G.dim(1);
        if (static_cast<int>(gainv.numel()) != D)
            throw ShapeError("gate modulate: gain length mismatch");
        Tensor<T> out(G.shape);
        for (int b = 0; b < B; ++b)
            for (int d = 0; d < D; ++d)
                out[static_cast<std::size_t>(b) * D + d] =
                    G[static_cast<std::size_t>(b) * D + d] * gainv[d];
        return out;
    }

    Tensor<T> last_gain_;
    T last_global_gain_ = T(1);
};

}  // namespace cdrl
