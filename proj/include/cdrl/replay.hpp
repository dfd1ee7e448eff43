#pragma once

#include <cstdint>
#include <random>
#include <unordered_set>
#include <vector>

#include "cdrl/tensor.hpp"

namespace cdrl {

// Uniform ring-buffer replay. Observations are stored quantized to uint8
// to keep the default 100k capacity within memory; training observations
// are clean rasterized frames in [0,1], so quantization is lossless at
// the level the networks care about.
class ReplayBuffer {
  public:
    struct Stored {
        std::vector<std::uint8_t> s, s_next;
        std::uint8_t a = 0;
        std::int8_t r = 0;
        bool done = false;
    };

    struct Batch {
        Tensor<float> s;       // [B, dim]
        Tensor<float> s_next;  // [B, dim]
        std::vector<int> a;
        std::vector<float> r;
        std::vector<std::uint8_t> done;
        int size = 0;
    };

    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity_ < 1) throw ConfigError("replay buffer: capacity must be >= 1");
    }

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }

    void push(const std::vector<float>& s, int a, int r, const std::vector<float>& s_next,
              bool done) {
        Stored t;
        t.s = quantize(s);
        t.s_next = quantize(s_next);
        t.a = static_cast<std::uint8_t>(a);
        t.r = static_cast<std::int8_t>(r);
        t.done = done;
        if (buf_.size() < capacity_) {
            buf_.push_back(std::move(t));
        } else {
            buf_[cursor_] = std::move(t);  // oldest-overwrite
        }
        cursor_ = (cursor_ + 1) % capacity_;
        size_ = buf_.size();
    }

    // Uniform sample without replacement within the batch (Floyd's method).
    std::vector<std::size_t> sample_indices(int batch, std::mt19937_64& rng) const {
        if (batch < 1 || static_cast<std::size_t>(batch) > size_)
            throw UsageError("replay sample: batch exceeds buffer size");
        const std::size_t n = size_;
        std::unordered_set<std::size_t> chosen;
        std::vector<std::size_t> out;
        out.reserve(batch);
        for (std::size_t j = n - batch; j < n; ++j) {
            std::uniform_int_distribution<std::size_t> pick(0, j);
            const std::size_t t = pick(rng);
            if (chosen.insert(t).second)
                out.push_back(t);
            else {
                chosen.insert(j);
                out.push_back(j);
            }
        }
        return out;
    }

    Batch sample(int batch, std::mt19937_64& rng) const {
        const auto idx = sample_indices(batch, rng);
        const int dim = static_cast<int>(buf_[0].s.size());
        Batch b;
        b.size = batch;
        b.s = Tensor<float>({batch, dim});
        b.s_next = Tensor<float>({batch, dim});
        b.a.resize(batch);
        b.r.resize(batch);
        b.done.resize(batch);
        for (int i = 0; i < batch; ++i) {
            const Stored& t = buf_[idx[i]];
            dequantize(t.s, b.s.ptr() + static_cast<std::size_t>(i) * dim);
            dequantize(t.s_next, b.s_next.ptr() + static_cast<std::size_t>(i) * dim);
            b.a[i] = t.a;
            b.r[i] = t.r;
            b.done[i] = t.done ? 1 : 0;
        }
        return b;
    }

    const Stored& at(std::size_t i) const { return buf_.at(i); }

  private:
    static std::vector<std::uint8_t> quantize(const std::vector<float>& v) {
        std::vector<std::uint8_t> q(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            float x = v[i] * 255.0f + 0.5f;
            q[i] = static_cast<std::uint8_t>(x < 0 ? 0 : (x > 255 ? 255 : x));
        }
        return q;
    }

    static void dequantize(const std::vector<std::uint8_t>& q, float* out) {
        for (std::size_t i = 0; i < q.size(); ++i)
            out[i] = static_cast<float>(q[i]) * (1.0f / 255.0f);
    }

    std::size_t capacity_;
    std::vector<Stored> buf_;
    std::size_t cursor_ = 0;
    std::size_t size_ = 0;
};

}  // namespace cdrl
