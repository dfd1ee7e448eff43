#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cdrl/tensor.hpp"

namespace cdrl {

// Versioned checkpoint container: a textual manifest (name, dtype, shape,
// trainable flag per array) followed by raw little-endian payloads in
// manifest order. Round-trips bit-exactly.
struct CkptArray {
    std::string name;
    std::string dtype;  // "f32" or "i32"
    std::vector<int> shape;
    bool trainable = false;
    std::vector<float> f;
    std::vector<int32_t> i;

    std::size_t numel() const {
        std::size_t n = 1;
        for (int d : shape) n *= static_cast<std::size_t>(d);
        return n;
    }
};

inline void save_checkpoint(const std::string& path, const std::vector<CkptArray>& arrays) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("checkpoint: cannot open for write: " + path);
    out << "CDRL-CKPT 1\n" << arrays.size() << "\n";
    for (const auto& a : arrays) {
        out << a.name << " " << a.dtype << " " << a.shape.size();
        for (int d : a.shape) out << " " << d;
        out << " " << (a.trainable ? 1 : 0) << "\n";
    }
    out << "DATA\n";
    for (const auto& a : arrays) {
        if (a.dtype == "f32") {
            if (a.f.size() != a.numel())
                throw std::runtime_error("checkpoint: payload size mismatch for " + a.name);
            out.write(reinterpret_cast<const char*>(a.f.data()),
                      static_cast<std::streamsize>(a.f.size() * sizeof(float)));
        } else if (a.dtype == "i32") {
            if (a.i.size() != a.numel())
                throw std::runtime_error("checkpoint: payload size mismatch for " + a.name);
            out.write(reinterpret_cast<const char*>(a.i.data()),
                      static_cast<std::streamsize>(a.i.size() * sizeof(int32_t)));
        } else {
            throw std::runtime_error("checkpoint: unknown dtype " + a.dtype);
        }
    }
    if (!out) throw std::runtime_error("checkpoint: write failed: " + path);
}

inline std::vector<CkptArray> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open: " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "CDRL-CKPT" || version != 1)
        throw std::runtime_error("checkpoint: bad header in " + path);
    std::size_t count = 0;
    in >> count;
    std::vector<CkptArray> arrays(count);
    for (auto& a : arrays) {
        std::size_t ndim = 0;
        in >> a.name >> a.dtype >> ndim;
        a.shape.resize(ndim);
        for (auto& d : a.shape) in >> d;
        int tr = 0;
        in >> tr;
        a.trainable = tr != 0;
    }
    std::string data_tag;
    in >> data_tag;
    if (data_tag != "DATA") throw std::runtime_error("checkpoint: missing DATA marker");
    in.get();  // trailing newline
    for (auto& a : arrays) {
        const std::size_t n = a.numel();
        if (a.dtype == "f32") {
            a.f.resize(n);
            in.read(reinterpret_cast<char*>(a.f.data()),
                    static_cast<std::streamsize>(n * sizeof(float)));
        } else if (a.dtype == "i32") {
            a.i.resize(n);
            in.read(reinterpret_cast<char*>(a.i.data()),
                    static_cast<std::streamsize>(n * sizeof(int32_t)));
        } else {
            throw std::runtime_error("checkpoint: unknown dtype " + a.dtype);
        }
        if (!in) throw std::runtime_error("checkpoint: truncated payload in " + path);
    }
    return arrays;
}

inline const CkptArray& find_array(const std::vector<CkptArray>& arrays,
                                   const std::string& name) {
    for (const auto& a : arrays)
        if (a.name == name) return a;
    throw std::runtime_error("checkpoint: missing array " + name);
}

inline bool has_array(const std::vector<CkptArray>& arrays, const std::string& name) {
    for (const auto& a : arrays)
        if (a.name == name) return true;
    return false;
}

}  // namespace cdrl
