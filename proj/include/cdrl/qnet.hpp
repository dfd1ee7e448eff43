#pragma once

#include <algorithm>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "cdrl/checkpoint.hpp"
#include "cdrl/gate.hpp"
#include "cdrl/pong.hpp"
#include "cdrl/nn.hpp"
#include "cdrl/tensor.hpp"

namespace cdrl {

// Keeps the K largest entries of h (ties -> lowest index), zeros the rest.
// Selected values pass through unchanged. Fills sel with the kept indices.
template <class T>
Tensor<T> topk_activate(const Tensor<T>& h, int K, std::vector<int>* sel = nullptr) {
    if (K < 0) throw UsageError("topk_activate: negative K");
    const int n = static_cast<int>(h.numel());
    K = std::min(K, n);
    Tensor<T> out(h.shape);
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + K, idx.end(), [&](int a, int b) {
        return h[a] > h[b] || (h[a] == h[b] && a < b);
    });
    if (sel) sel->assign(idx.begin(), idx.begin() + K);
    for (int s = 0; s < K; ++s) out[idx[s]] = h[idx[s]];
    return out;
}

// Fixed sparse random projection: every output row reads exactly fan_in
// distinct input indices. Values are non-trainable by construction.
template <class T>
struct SparseProjection {
    int out_dim = 0, in_dim = 0, fan_in = 0;
    std::vector<int32_t> indices;  // [out_dim * fan_in]
    Param<T> values;               // same layout, trainable=false

    SparseProjection() = default;
    SparseProjection(const std::string& name, int out, int in, int fan, std::mt19937_64& rng)
        : out_dim(out), in_dim(in), fan_in(fan) {
        if (fan_in > in_dim)
            throw ConfigError("sparse projection: fan_in " + std::to_string(fan_in) +
                              " exceeds input dim " + std::to_string(in_dim));
        if (fan_in < 1) throw ConfigError("sparse projection: fan_in must be >= 1");
        values = Param<T>(name + ".values", {out_dim, fan_in}, false);
        init_uniform_fan_in(values.value, fan_in, rng);
        indices.resize(static_cast<std::size_t>(out_dim) * fan_in);
        std::vector<int32_t> pool(in_dim);
        std::iota(pool.begin(), pool.end(), 0);
        for (int r = 0; r < out_dim; ++r) {
            // partial Fisher-Yates: first fan_in entries are a distinct sample
            for (int j = 0; j < fan_in; ++j) {
                std::uniform_int_distribution<int> pick(j, in_dim - 1);
                std::swap(pool[j], pool[pick(rng)]);
                indices[static_cast<std::size_t>(r) * fan_in + j] = pool[j];
            }
        }
    }

    Tensor<T> forward(const Tensor<T>& x) const {
        require_rank(x, 2, "sparse projection");
        if (x.dim(1) != in_dim) throw ShapeError("sparse projection: input dim mismatch");
        const int B = x.dim(0);
        Tensor<T> y({B, out_dim});
        for (int b = 0; b < B; ++b) {
            const T* xr = x.ptr() + static_cast<std::size_t>(b) * in_dim;
            T* yr = y.ptr() + static_cast<std::size_t>(b) * out_dim;
            for (int r = 0; r < out_dim; ++r) {
                T acc = 0;
                const std::size_t base = static_cast<std::size_t>(r) * fan_in;
                for (int j = 0; j < fan_in; ++j)
                    acc += values.value[base + j] * xr[indices[base + j]];
                yr[r] = acc;
            }
        }
        return y;
    }

    // dx only; the projection itself is fixed.
    Tensor<T> backward(const Tensor<T>& dy) const {
        const int B = dy.dim(0);
        Tensor<T> dx({B, in_dim});
        for (int b = 0; b < B; ++b) {
            const T* dyr = dy.ptr() + static_cast<std::size_t>(b) * out_dim;
            T* dxr = dx.ptr() + static_cast<std::size_t>(b) * in_dim;
            for (int r = 0; r < out_dim; ++r) {
                if (dyr[r] == T(0)) continue;
                const std::size_t base = static_cast<std::size_t>(r) * fan_in;
                for (int j = 0; j < fan_in; ++j)
                    dxr[indices[base + j]] += values.value[base + j] * dyr[r];
            }
        }
        return dx;
    }
};

// Sparse trainable matrix with a frozen pattern: each output row connects
// to a fixed subset of inputs sampled once at construction; only the
// nonzero values receive gradients.
template <class T>
struct SparseLinear {
    int out_dim = 0, in_dim = 0, row_nnz = 0;
    std::vector<int32_t> indices;  // [out_dim * row_nnz]
    Param<T> values;               // trainable
    Tensor<T> x_cache;

    SparseLinear() = default;
    SparseLinear(const std::string& name, int out, int in, double density,
                 std::mt19937_64& rng)
        : out_dim(out), in_dim(in) {
        row_nnz = std::max(1, static_cast<int>(std::lround(density * in)));
        row_nnz = std::min(row_nnz, in);
        values = Param<T>(name + ".values", {out_dim, row_nnz}, true);
        init_uniform_fan_in(values.value, row_nnz, rng);
        indices.resize(static_cast<std::size_t>(out_dim) * row_nnz);
        std::vector<int32_t> pool(in_dim);
        std::iota(pool.begin(), pool.end(), 0);
        for (int r = 0; r < out_dim; ++r)
            for (int j = 0; j < row_nnz; ++j) {
                std::uniform_int_distribution<int> pick(j, in_dim - 1);
                std::swap(pool[j], pool[pick(rng)]);
                indices[static_cast<std::size_t>(r) * row_nnz + j] = pool[j];
            }
    }

    Tensor<T> forward(const Tensor<T>& x) {
        require_rank(x, 2, "sparse linear");
        if (x.dim(1) != in_dim) throw ShapeError("sparse linear: input dim mismatch");
        x_cache = x;
        const int B = x.dim(0);
        Tensor<T> y({B, out_dim});
        for (int b = 0; b < B; ++b) {
            const T* xr = x.ptr() + static_cast<std::size_t>(b) * in_dim;
            T* yr = y.ptr() + static_cast<std::size_t>(b) * out_dim;
            for (int r = 0; r < out_dim; ++r) {
                T acc = 0;
                const std::size_t base = static_cast<std::size_t>(r) * row_nnz;
                for (int j = 0; j < row_nnz; ++j)
                    acc += values.value[base + j] * xr[indices[base + j]];
                yr[r] = acc;
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) {
        if (x_cache.shape.size() != 2)
            throw UsageError("sparse linear backward: backward before forward");
        const int B = dy.dim(0);
        Tensor<T> dx({B, in_dim});
        for (int b = 0; b < B; ++b) {
            const T* dyr = dy.ptr() + static_cast<std::size_t>(b) * out_dim;
            const T* xr = x_cache.ptr() + static_cast<std::size_t>(b) * in_dim;
            T* dxr = dx.ptr() + static_cast<std::size_t>(b) * in_dim;
            for (int r = 0; r < out_dim; ++r) {
                const T g = dyr[r];
                if (g == T(0)) continue;
                const std::size_t base = static_cast<std::size_t>(r) * row_nnz;
                for (int j = 0; j < row_nnz; ++j) {
                    values.grad[base + j] += g * xr[indices[base + j]];
                    dxr[indices[base + j]] += values.value[base + j] * g;
                }
            }
        }
        return dx;
    }
};

enum class ModelKind { Baseline, Cdrl, CdrlNoDendrite };

inline std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::Baseline: return "baseline";
        case ModelKind::Cdrl: return "cdrl";
        case ModelKind::CdrlNoDendrite: return "cdrl_no_dendrite";
    }
    return "?";
}

inline ModelKind model_kind_from(const std::string& s) {
    if (s == "baseline") return ModelKind::Baseline;
    if (s == "cdrl") return ModelKind::Cdrl;
    if (s == "cdrl_no_dendrite") return ModelKind::CdrlNoDendrite;
    throw ConfigError("unknown model kind: " + s);
}

struct ConvSpec {
    int out_c, k, stride;
};

struct ModelConfig {
    ModelKind kind = ModelKind::Cdrl;
    int in_channels = 4;
    int obs_side = 84;
    std::vector<ConvSpec> convs = {{32, 8, 4}, {64, 4, 2}, {64, 3, 1}};
    // cerebellar head
    int mf_dim = 512;
    int grc_dim = 4096;           // D
    int fan_in = 5;               // 0 => fully connected rows
    double mask_p = 0.5;          // Bernoulli structural mask probability
    double topk_fraction = 0.05;  // fraction of GrCs kept active
    int pc_count = 64;
    double pc_conn_fraction = 0.25;
    int cn_dim = 1280;
    double alpha_pc_init = -1.0;
    GateConfig gate;
    // baseline head
    int baseline_hidden1 = 2560;
    int baseline_hidden2 = 2048;

    int effective_fan_in() const { return fan_in <= 0 ? mf_dim : fan_in; }

    void validate() const {
        auto fail = [](const std::string& m) { throw ConfigError("model config: " + m); };
        if (in_channels < 1) fail("invalid in_channels");
        if (obs_side < 1) fail("invalid obs_side");
        if (mf_dim < 1 || grc_dim < 1 || pc_count < 1 || cn_dim < 1) fail("invalid head dims");
        if (effective_fan_in() > mf_dim) fail("fan_in exceeds mf_dim");
        if (!(mask_p >= 0 && mask_p <= 1)) fail("mask_p outside [0,1]");
        if (!(topk_fraction > 0 && topk_fraction <= 1)) fail("topk_fraction outside (0,1]");
        if (!(pc_conn_fraction > 0 && pc_conn_fraction <= 1))
            fail("pc_conn_fraction outside (0,1]");
        if (baseline_hidden1 < 1 || baseline_hidden2 < 1) fail("invalid baseline widths");
    }
};

// Common interface for everything the DDQN trainer can optimize.
template <class T>
class QNet {
  public:
    virtual ~QNet() = default;
    virtual Tensor<T> forward(const Tensor<T>& obs) = 0;  // [B, dims] -> [B, actions]
    virtual void backward(const Tensor<T>& dq) = 0;
    virtual std::vector<Param<T>*> params() = 0;  // trainable and fixed
    virtual int num_actions() const = 0;
    virtual DendriticGate<T>* gate() { return nullptr; }
    virtual std::vector<CkptArray> extra_arrays() const { return {}; }
    virtual void load_extra(const std::vector<CkptArray>&) {}

    void zero_grad() {
        for (auto* p : params()) p->zero_grad();
    }

    // Bit-exact snapshot of all parameters plus gate state.
    void copy_from(QNet<T>& other) {
        auto dst = params();
        auto src = other.params();
        if (dst.size() != src.size()) throw UsageError("copy_from: parameter set mismatch");
        for (std::size_t i = 0; i < dst.size(); ++i) {
            if (dst[i]->name != src[i]->name ||
                dst[i]->value.shape != src[i]->value.shape)
                throw UsageError("copy_from: parameter mismatch at " + dst[i]->name);
            dst[i]->value = src[i]->value;
        }
        load_extra(other.extra_arrays());  // sparse index patterns travel too
        if (gate() && other.gate()) {
            gate()->ema = other.gate()->ema;
            gate()->initialized = other.gate()->initialized;
        }
    }
};

struct ParamCount {
    long trainable = 0;
    long total = 0;
};

template <class T>
ParamCount param_count(QNet<T>& net) {
    ParamCount c;
    for (auto* p : net.params()) {
        c.total += static_cast<long>(p->value.numel());
        if (p->trainable) c.trainable += static_cast<long>(p->value.numel());
    }
    return c;
}

// Shared three-layer conv feature extractor.
template <class T>
struct ConvBackbone {
    std::vector<Conv2d<T>> convs;
    std::vector<ReLU<T>> relus;
    int in_channels = 0, side = 0, feature_dim = 0;
    std::vector<int> spatial;  // per-layer output side

    ConvBackbone() = default;
    ConvBackbone(const ModelConfig& cfg, std::mt19937_64& rng)
        : in_channels(cfg.in_channels), side(cfg.obs_side) {
        int c = cfg.in_channels, s = cfg.obs_side;
        int li = 0;
        for (const auto& spec : cfg.convs) {
            convs.emplace_back("backbone.conv" + std::to_string(++li), c, spec.out_c, spec.k,
                               spec.stride, rng);
            relus.emplace_back();
            s = Conv2d<T>::out_size(s, spec.k, spec.stride);
            if (s < 1)
                throw ConfigError("model config: conv stack does not fit obs_side " +
                                  std::to_string(cfg.obs_side));
            spatial.push_back(s);
            c = spec.out_c;
        }
        feature_dim = c * s * s;
    }

    Tensor<T> forward(const Tensor<T>& obs) {
        require_rank(obs, 2, "q_forward");
        const int B = obs.dim(0);
        if (obs.dim(1) != in_channels * side * side)
            throw ShapeError("q_forward: observation " + obs.shape_str() + " vs expected " +
                             std::to_string(in_channels * side * side));
        Tensor<T> x({B, in_channels, side, side}, obs.data);
        for (std::size_t i = 0; i < convs.size(); ++i) x = relus[i].forward(convs[i].forward(x));
        return Tensor<T>({B, feature_dim}, std::move(x.data));
    }

    void backward(const Tensor<T>& dfeature) {
        const int B = dfeature.dim(0);
        const int s = spatial.back();
        Tensor<T> d({B, convs.back().out_c(), s, s}, dfeature.data);
        for (int i = static_cast<int>(convs.size()) - 1; i >= 0; --i)
            d = convs[i].backward(relus[i].backward(d));
    }

    void collect(std::vector<Param<T>*>& out) {
        for (auto& cv : convs) {
            out.push_back(&cv.W);
            out.push_back(&cv.b);
        }
    }
};

// MF -> GrC expansion -> PC -> CN network with optional dendritic gate,
// plus the matched dense baseline in the same class family.
template <class T>
class CerebellarNet : public QNet<T> {
  public:
    CerebellarNet(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
        cfg_.validate();
        std::mt19937_64 rng(seed);
        backbone_ = ConvBackbone<T>(cfg_, rng);
        mf_ = Dense<T>("mf", backbone_.feature_dim, cfg_.mf_dim, rng);
        phi_ = SparseProjection<T>("phi", cfg_.grc_dim, cfg_.mf_dim, cfg_.effective_fan_in(),
                                   rng);
        mask_ = Param<T>("grc.mask", {cfg_.grc_dim}, false);
        std::bernoulli_distribution bern(cfg_.mask_p);
        for (auto& v : mask_.value.data) v = bern(rng) ? T(1) : T(0);
        topk_ = std::max(1, static_cast<int>(std::lround(cfg_.topk_fraction * cfg_.grc_dim)));
        grc_pc_ = SparseLinear<T>("grc_pc", cfg_.pc_count, cfg_.grc_dim, cfg_.pc_conn_fraction,
                                  rng);
        f_pc_cn_ = Dense<T>("f_pc_cn", cfg_.pc_count, cfg_.cn_dim, rng);
        alpha_pc_ = Param<T>("alpha_pc", {1}, true);
        alpha_pc_.value[0] = static_cast<T>(cfg_.alpha_pc_init);
        f_mf_cn_ = Dense<T>("f_mf_cn", backbone_.feature_dim, cfg_.cn_dim, rng);
        out_ = Dense<T>("cn_out", cfg_.cn_dim, kNumActions, rng);
        if (cfg_.kind == ModelKind::Cdrl) {
            GateConfig gc = cfg_.gate;
            gc.grc_dim = cfg_.grc_dim;
            gc.enabled = true;
            gate_ = std::make_unique<DendriticGate<T>>(gc, rng());
        }
    }

    int topk() const { return topk_; }
    const SparseProjection<T>& phi() const { return phi_; }
    const Param<T>& mask() const { return mask_; }
    const SparseLinear<T>& grc_pc() const { return grc_pc_; }
    int num_actions() const override { return kNumActions; }
    DendriticGate<T>* gate() override { return gate_.get(); }
    const ModelConfig& config() const { return cfg_; }

    // MF activity -> GrC: ReLU(Phi(mf)) masked then top-k thinned per sample.
    Tensor<T> grc_forward(const Tensor<T>& mf_act) {
        grc_pre_ = phi_.forward(mf_act);
        const int B = grc_pre_.dim(0), D = cfg_.grc_dim;
        Tensor<T> raw(grc_pre_.shape);
        for (int b = 0; b < B; ++b)
            for (int d = 0; d < D; ++d) {
                const std::size_t k = static_cast<std::size_t>(b) * D + d;
                raw[k] = grc_pre_[k] > T(0) ? grc_pre_[k] * mask_.value[d] : T(0);
            }
        Tensor<T> h(raw.shape);
        topk_sel_.assign(static_cast<std::size_t>(B) * topk_, 0);
        for (int b = 0; b < B; ++b) {
            Tensor<T> row({D});
            std::copy_n(raw.ptr() + static_cast<std::size_t>(b) * D, D, row.ptr());
            std::vector<int> sel;
            Tensor<T> kept = topk_activate(row, topk_, &sel);
            std::copy_n(kept.ptr(), D, h.ptr() + static_cast<std::size_t>(b) * D);
            std::copy_n(sel.begin(), topk_, topk_sel_.begin() + static_cast<std::size_t>(b) * topk_);
        }
        return h;
    }

    Tensor<T> forward(const Tensor<T>& obs) override {
        feature_ = backbone_.forward(obs);
        mf_act_ = mf_relu_.forward(mf_.forward(feature_));
        Tensor<T> h = grc_forward(mf_act_);
        Tensor<T> ghat = gate_ ? gate_->apply(h) : h;
        Tensor<T> h_pc = grc_pc_.forward(ghat);
        pc_lin_ = f_pc_cn_.forward(h_pc);
        Tensor<T> cn_excite = f_mf_cn_.forward(feature_);
        const int B = obs.dim(0);
        cn_pre_ = Tensor<T>({B, cfg_.cn_dim});
        const T a = alpha_pc_.value[0];
        for (std::size_t i = 0; i < cn_pre_.numel(); ++i)
            cn_pre_[i] = cn_excite[i] + a * pc_lin_[i];
        Tensor<T> cn = cn_relu_.forward(cn_pre_);
        Tensor<T> q = out_.forward(cn);
        require_finite(q, "q_forward");
        return q;
    }

    void backward(const Tensor<T>& dq) override {
        Tensor<T> dcn = out_.backward(dq);
        Tensor<T> dpre = cn_relu_.backward(dcn);
        Tensor<T> dfeat = f_mf_cn_.backward(dpre);
        // alpha_pc and the indirect pathway
        const T a = alpha_pc_.value[0];
        Tensor<T> dpc_lin(dpre.shape);
        T dalpha = 0;
        for (std::size_t i = 0; i < dpre.numel(); ++i) {
            dalpha += dpre[i] * pc_lin_[i];
            dpc_lin[i] = dpre[i] * a;
        }
        alpha_pc_.grad[0] += dalpha;
        Tensor<T> dghat = grc_pc_.backward(f_pc_cn_.backward(dpc_lin));
        Tensor<T> dh = gate_ ? gate_->backward(dghat) : dghat;
        // undo top-k selection, mask, and ReLU
        const int B = dh.dim(0), D = cfg_.grc_dim;
        Tensor<T> dpre_grc(grc_pre_.shape);
        for (int b = 0; b < B; ++b)
            for (int s = 0; s < topk_; ++s) {
                const int d = topk_sel_[static_cast<std::size_t>(b) * topk_ + s];
                const std::size_t k = static_cast<std::size_t>(b) * D + d;
                if (grc_pre_[k] > T(0)) dpre_grc[k] = dh[k] * mask_.value[d];
            }
        Tensor<T> dmf = mf_relu_.backward(phi_.backward(dpre_grc));
        Tensor<T> dfeat2 = mf_.backward(dmf);
        for (std::size_t i = 0; i < dfeat.numel(); ++i) dfeat[i] += dfeat2[i];
        backbone_.backward(dfeat);
    }

    std::vector<Param<T>*> params() override {
        std::vector<Param<T>*> out;
        backbone_.collect(out);
        out.push_back(&mf_.W);
        out.push_back(&mf_.b);
        out.push_back(&phi_.values);
        out.push_back(&mask_);
        out.push_back(&grc_pc_.values);
        out.push_back(&f_pc_cn_.W);
        out.push_back(&f_pc_cn_.b);
        out.push_back(&alpha_pc_);
        out.push_back(&f_mf_cn_.W);
        out.push_back(&f_mf_cn_.b);
        out.push_back(&out_.W);
        out.push_back(&out_.b);
        if (gate_) out.push_back(&gate_->hyperplanes);
        return out;
    }

    std::vector<CkptArray> extra_arrays() const override;
    void load_extra(const std::vector<CkptArray>& arrays) override;

  private:
    ModelConfig cfg_;
    ConvBackbone<T> backbone_;
    Dense<T> mf_;
    ReLU<T> mf_relu_;
    SparseProjection<T> phi_;
    Param<T> mask_;
    int topk_ = 1;
    SparseLinear<T> grc_pc_;
    Dense<T> f_pc_cn_;
    Param<T> alpha_pc_;
    Dense<T> f_mf_cn_;
    Dense<T> out_;
    ReLU<T> cn_relu_;
    std::unique_ptr<DendriticGate<T>> gate_;
    // caches
    Tensor<T> feature_, mf_act_, grc_pre_, pc_lin_, cn_pre_;
    std::vector<int> topk_sel_;
};

// Dense baseline: same backbone, matched feedforward depth, no sparsity.
template <class T>
class BaselineNet : public QNet<T> {
  public:
    BaselineNet(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
        cfg_.validate();
        std::mt19937_64 rng(seed);
        backbone_ = ConvBackbone<T>(cfg_, rng);
        h1_ = Dense<T>("head.h1", backbone_.feature_dim, cfg_.baseline_hidden1, rng);
        h2_ = Dense<T>("head.h2", cfg_.baseline_hidden1, cfg_.baseline_hidden2, rng);
        out_ = Dense<T>("head.out", cfg_.baseline_hidden2, kNumActions, rng);
    }

    int num_actions() const override { return kNumActions; }

    Tensor<T> forward(const Tensor<T>& obs) override {
        Tensor<T> f = backbone_.forward(obs);
        Tensor<T> a = r1_.forward(h1_.forward(f));
        Tensor<T> b = r2_.forward(h2_.forward(a));
        Tensor<T> q = out_.forward(b);
        require_finite(q, "q_forward");
        return q;
    }

    void backward(const Tensor<T>& dq) override {
        Tensor<T> d = h1_.backward(r1_.backward(h2_.backward(r2_.backward(out_.backward(dq)))));
        backbone_.backward(d);
    }

    std::vector<Param<T>*> params() override {
        std::vector<Param<T>*> out;
        backbone_.collect(out);
        for (Dense<T>* d : {&h1_, &h2_, &out_}) {
            out.push_back(&d->W);
            out.push_back(&d->b);
        }
        return out;
    }

  private:
    ModelConfig cfg_;
    ConvBackbone<T> backbone_;
    Dense<T> h1_, h2_, out_;
    ReLU<T> r1_, r2_;
};

// Small fully connected Q-net; unit tests and the toy-MDP oracle use it.
template <class T>
class MlpQNet : public QNet<T> {
  public:
    MlpQNet(int in_dim, int hidden, int actions, std::uint64_t seed) : actions_(actions) {
        std::mt19937_64 rng(seed);
        h_ = Dense<T>("mlp.h", in_dim, hidden, rng);
        out_ = Dense<T>("mlp.out", hidden, actions, rng);
    }

    int num_actions() const override { return actions_; }

    Tensor<T> forward(const Tensor<T>& obs) override {
        return out_.forward(relu_.forward(h_.forward(obs)));
    }

    void backward(const Tensor<T>& dq) override {
        h_.backward(relu_.backward(out_.backward(dq)));
    }

    std::vector<Param<T>*> params() override {
        return {&h_.W, &h_.b, &out_.W, &out_.b};
    }

  private:
    int actions_;
    Dense<T> h_, out_;
    ReLU<T> relu_;
};

template <class T>
std::vector<CkptArray> CerebellarNet<T>::extra_arrays() const {
    std::vector<CkptArray> out;
    CkptArray pi;
    pi.name = "phi.indices";
    pi.dtype = "i32";
    pi.shape = {phi_.out_dim, phi_.fan_in};
    pi.i = phi_.indices;
    out.push_back(std::move(pi));
    CkptArray gi;
    gi.name = "grc_pc.indices";
    gi.dtype = "i32";
    gi.shape = {grc_pc_.out_dim, grc_pc_.row_nnz};
    gi.i = grc_pc_.indices;
    out.push_back(std::move(gi));
    if (gate_) {
        CkptArray ge;
        ge.name = "gate.ema";
        ge.dtype = "f32";
        ge.shape = {cfg_.grc_dim};
        ge.f.reserve(gate_->ema.numel());
        for (T v : gate_->ema.data) ge.f.push_back(static_cast<float>(v));
        out.push_back(std::move(ge));
        CkptArray gs;
        gs.name = "gate.state";
        gs.dtype = "i32";
        gs.shape = {1};
        gs.i = {gate_->initialized ? 1 : 0};
        out.push_back(std::move(gs));
    }
    return out;
}

template <class T>
void CerebellarNet<T>::load_extra(const std::vector<CkptArray>& arrays) {
    phi_.indices = find_array(arrays, "phi.indices").i;
    grc_pc_.indices = find_array(arrays, "grc_pc.indices").i;
    if (gate_) {
        const auto& ge = find_array(arrays, "gate.ema");
        for (std::size_t i = 0; i < gate_->ema.numel(); ++i)
            gate_->ema[i] = static_cast<T>(ge.f[i]);
        gate_->initialized = find_array(arrays, "gate.state").i[0] != 0;
    }
}

std::unique_ptr<QNet<float>> build_qnet(const ModelConfig& cfg, std::uint64_t seed);

// Checkpoint glue: full state (params, fixed structures, sparse index
// patterns, gate EMA, model config) so evaluation reproduces from file alone.
std::vector<CkptArray> net_to_arrays(QNet<float>& net, const ModelConfig& cfg);
ModelConfig config_from_arrays(const std::vector<CkptArray>& arrays);
std::unique_ptr<QNet<float>> net_from_arrays(const std::vector<CkptArray>& arrays);

}  // namespace cdrl
