#include "spiked/models.hpp"

#include <stdexcept>

namespace spiked {

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::A: return "A";
        case ModelKind::B: return "B";
        case ModelKind::C: return "C";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "A" || s == "a") return ModelKind::A;
    if (s == "B" || s == "b") return ModelKind::B;
    if (s == "C" || s == "c") return ModelKind::C;
    throw std::invalid_argument("unknown model kind: " + s);
}

int SpikedModel::rank() const {
    int r = 0;
    for (const auto& s : spikes) r += s.multiplicity;
    return r;
}

std::vector<double> SpikedModel::expanded_spikes() const {
    std::vector<double> out;
    for (const auto& s : spikes)
        for (int i = 0; i < s.multiplicity; ++i) out.push_back(s.value);
    return out;
}

void SpikedModel::validate() const {
    if (n < 1) throw std::invalid_argument("model: requires n >= 1");
    if (kind == ModelKind::C) {
        if (m1 <= n || m2 <= n) throw std::invalid_argument("model C: requires m1 > n and m2 > n");
    } else {
        if (m < n) throw std::invalid_argument("model A/B: requires m >= n");
    }
    for (std::size_t i = 0; i < spikes.size(); ++i) {
        if (!(spikes[i].value > 0.0)) throw std::invalid_argument("model: spike values must be positive");
        if (spikes[i].multiplicity < 1)
            throw std::invalid_argument("model: spike multiplicities must be >= 1");
        if (i > 0 && !(spikes[i - 1].value > spikes[i].value))
            throw std::invalid_argument("model: spike values must be strictly decreasing");
    }
    if (rank() > n) throw std::invalid_argument("model: total spike multiplicity must not exceed n");
}

SpikedModel make_model_a(int n, int m, std::vector<Spike> spikes) {
    SpikedModel mod;
    mod.kind = ModelKind::A;
    mod.n = n;
    mod.m = m;
    mod.spikes = std::move(spikes);
    mod.validate();
    return mod;
}

SpikedModel make_model_b(int n, int m, std::vector<Spike> spikes) {
    SpikedModel mod = make_model_a(n, m, std::move(spikes));
    mod.kind = ModelKind::B;
    return mod;
}

SpikedModel make_model_c(int n, int m1, int m2, std::vector<Spike> spikes) {
    SpikedModel mod;
    mod.kind = ModelKind::C;
    mod.n = n;
    mod.m1 = m1;
    mod.m2 = m2;
    mod.spikes = std::move(spikes);
    mod.validate();
    return mod;
}

}  // namespace spiked
