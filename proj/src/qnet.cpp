#include "cdrl/qnet.hpp"

namespace cdrl {

std::unique_ptr<QNet<float>> build_qnet(const ModelConfig& cfg, std::uint64_t seed) {
    if (cfg.kind == ModelKind::Baseline)
        return std::make_unique<BaselineNet<float>>(cfg, seed);
    return std::make_unique<CerebellarNet<float>>(cfg, seed);
}

namespace {

std::vector<float> encode_config(const ModelConfig& c) {
    std::vector<float> v;
    v.push_back(static_cast<float>(static_cast<int>(c.kind)));
    v.push_back(static_cast<float>(c.in_channels));
    v.push_back(static_cast<float>(c.obs_side));
    v.push_back(static_cast<float>(c.convs.size()));
    for (const auto& s : c.convs) {
        v.push_back(static_cast<float>(s.out_c));
        v.push_back(static_cast<float>(s.k));
        v.push_back(static_cast<float>(s.stride));
    }
    v.push_back(static_cast<float>(c.mf_dim));
    v.push_back(static_cast<float>(c.grc_dim));
    v.push_back(static_cast<float>(c.fan_in));
    v.push_back(static_cast<float>(c.mask_p));
    v.push_back(static_cast<float>(c.topk_fraction));
    v.push_back(static_cast<float>(c.pc_count));
    v.push_back(static_cast<float>(c.pc_conn_fraction));
    v.push_back(static_cast<float>(c.cn_dim));
    v.push_back(static_cast<float>(c.alpha_pc_init));
    v.push_back(static_cast<float>(c.gate.num_branches));
    v.push_back(static_cast<float>(c.gate.select_fraction));
    v.push_back(static_cast<float>(c.gate.sigmoid_temp));
    v.push_back(static_cast<float>(c.gate.ema_decay));
    v.push_back(static_cast<float>(c.gate.gain_strength));
    v.push_back(static_cast<float>(c.baseline_hidden1));
    v.push_back(static_cast<float>(c.baseline_hidden2));
    return v;
}

}  // namespace

std::vector<CkptArray> net_to_arrays(QNet<float>& net, const ModelConfig& cfg) {
    std::vector<CkptArray> out;
    CkptArray meta;
    meta.name = "meta.model_config";
    meta.dtype = "f32";
    meta.f = encode_config(cfg);
    meta.shape = {static_cast<int>(meta.f.size())};
    out.push_back(std::move(meta));
    for (auto* p : net.params()) {
        CkptArray a;
        a.name = p->name;
        a.dtype = "f32";
        a.shape = p->value.shape;
        a.trainable = p->trainable;
        a.f = p->value.data;
        out.push_back(std::move(a));
    }
    for (auto& a : net.extra_arrays()) out.push_back(std::move(a));
    return out;
}

ModelConfig config_from_arrays(const std::vector<CkptArray>& arrays) {
    const auto& meta = find_array(arrays, "meta.model_config");
    const std::vector<float>& v = meta.f;
    std::size_t i = 0;
    auto next = [&]() -> float {
        if (i >= v.size()) throw std::runtime_error("checkpoint: truncated model config");
        return v[i++];
    };
    ModelConfig c;
    c.kind = static_cast<ModelKind>(static_cast<int>(next()));
    c.in_channels = static_cast<int>(next());
    c.obs_side = static_cast<int>(next());
    const int n_convs = static_cast<int>(next());
    c.convs.clear();
    for (int k = 0; k < n_convs; ++k) {
        ConvSpec s{};
        s.out_c = static_cast<int>(next());
        s.k = static_cast<int>(next());
        s.stride = static_cast<int>(next());
        c.convs.push_back(s);
    }
    c.mf_dim = static_cast<int>(next());
    c.grc_dim = static_cast<int>(next());
    c.fan_in = static_cast<int>(next());
    c.mask_p = next();
    c.topk_fraction = next();
    c.pc_count = static_cast<int>(next());
    c.pc_conn_fraction = next();
    c.cn_dim = static_cast<int>(next());
    c.alpha_pc_init = next();
    c.gate.num_branches = static_cast<int>(next());
    c.gate.select_fraction = next();
    c.gate.sigmoid_temp = next();
    c.gate.ema_decay = next();
    c.gate.gain_strength = next();
    c.baseline_hidden1 = static_cast<int>(next());
    c.baseline_hidden2 = static_cast<int>(next());
    return c;
}

std::unique_ptr<QNet<float>> net_from_arrays(const std::vector<CkptArray>& arrays) {
    ModelConfig cfg = config_from_arrays(arrays);
    auto net = build_qnet(cfg, 0);
    for (auto* p : net->params()) {
        const auto& a = find_array(arrays, p->name);
        if (a.shape != p->value.shape)
            throw std::runtime_error("checkpoint: shape mismatch for " + p->name);
        p->value.data = a.f;
    }
    net->load_extra(arrays);
    return net;
}

}  // namespace cdrl
