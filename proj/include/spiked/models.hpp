#ifndef SPIKED_MODELS_HPP
#define SPIKED_MODELS_HPP

#include <string>
#include <vector>

namespace spiked {

enum class ModelKind { A, B, C };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

struct Spike {
    double value = 0.0;
    int multiplicity = 1;
};

/// One of the three spiked ensembles.  Models A and B use (n, m); Model C
/// uses (n, m1, m2).  Spike values are strictly decreasing and positive.
struct SpikedModel {
    ModelKind kind = ModelKind::A;
    int n = 0;
    int m = 0;
    int m1 = 0;
    int m2 = 0;
    std::vector<Spike> spikes;

    int rank() const;
    double ratio_c() const { return static_cast<double>(m) / n; }
    double ratio_c1() const { return static_cast<double>(m1) / n; }
    double ratio_c2() const { return static_cast<double>(m2) / n; }

    /// Spike values expanded with multiplicities, in decreasing order.
    std::vector<double> expanded_spikes() const;

    void validate() const;
};

SpikedModel make_model_a(int n, int m, std::vector<Spike> spikes);
SpikedModel make_model_b(int n, int m, std::vector<Spike> spikes);
SpikedModel make_model_c(int n, int m1, int m2, std::vector<Spike> spikes);

}  // namespace spiked

#endif
