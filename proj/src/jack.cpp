#include "spiked/jack.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>

namespace spiked {

namespace {

bool near_integer(double x, double tol = 1e-9) { return std::abs(x - std::round(x)) < tol; }

// Packs a partition into 6-bit fields; desk-scale limits enforced by callers.
std::uint64_t pack(const Partition& p) {
    std::uint64_t key = 0;
    for (int v : p.parts) key = (key << 6) | static_cast<std::uint64_t>(v);
    return key;
}

std::vector<int> conjugate(const Partition& p) {
    if (p.parts.empty()) return {};
    std::vector<int> c(p.parts[0], 0);
    for (int v : p.parts)
        for (int j = 0; j < v; ++j) c[j]++;
    return c;
}

// Hook-product normalization: C = alpha^k k! / cprime * P.
double c_prime(const Partition& kappa, double alpha) {
    const auto conj = conjugate(kappa);
    double prod = 1.0;
    for (int i = 0; i < kappa.length(); ++i)
        for (int j = 0; j < kappa.parts[i]; ++j) {
            const int arm = kappa.parts[i] - (j + 1);
            const int leg = conj[j] - (i + 1);
            prod *= alpha * (arm + 1) + leg;
        }
    return prod;
}

// Eigenvalue of the Laplace-Beltrami-type operator, up to n-dependent shifts
// that cancel in differences.
double rho_star(const Partition& p, double alpha) {
    double r = 0.0;
    for (int i = 0; i < p.length(); ++i) {
        const double v = p.parts[i];
        r += 0.5 * alpha * v * (v - 1.0) - (i + 1) * v;
    }
    return r;
}

struct Expansion {
    // Monomial coefficients of C_kappa^(alpha), dominance-triangular.
    std::vector<std::pair<Partition, double>> terms;
};

struct CacheKey {
    std::uint64_t kappa;
    double alpha;
    int max_len;
    bool operator==(const CacheKey& o) const {
        return kappa == o.kappa && alpha == o.alpha && max_len == o.max_len;
    }
};

struct CacheKeyHash {
    std::size_t operator()(const CacheKey& k) const {
        std::size_t h = std::hash<std::uint64_t>{}(k.kappa);
        h ^= std::hash<double>{}(k.alpha) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h ^= std::hash<int>{}(k.max_len) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

Expansion compute_expansion(const Partition& kappa, double alpha, int max_len) {
    const int k = kappa.weight();
    if (k > 60 || max_len > 10)
        throw std::invalid_argument("jack expansion: supports |kappa| <= 60 and spectra of length <= 10");

    std::vector<Partition> lams = partitions_of(k, max_len);
    std::erase_if(lams, [&](const Partition& l) { return !l.dominated_by(kappa); });
    std::sort(lams.begin(), lams.end(),
              [](const Partition& a, const Partition& b) { return b.lex_less(a); });

    std::unordered_map<std::uint64_t, int> index;
    index.reserve(lams.size() * 2);
    for (int i = 0; i < static_cast<int>(lams.size()); ++i) index.emplace(pack(lams[i]), i);

    std::vector<double> u(lams.size(), 0.0);
    u[0] = 1.0;  // monic leading coefficient of P_kappa
    const double rho_kappa = rho_star(kappa, alpha);

    for (std::size_t idx = 1; idx < lams.size(); ++idx) {
        const Partition& mu = lams[idx];

        // Distinct part values with multiplicities.
        std::vector<std::pair<int, int>> vals;
        for (int v : mu.parts) {
            if (!vals.empty() && vals.back().first == v)
                vals.back().second++;
            else
                vals.emplace_back(v, 1);
        }

        double num = 0.0;
        auto add_sources = [&](int v1, int v2, double count) {
            // Sources are one dominance up-move away: {v1, v2} came from
            // {v1 + t, v2 - t}.
            for (int t = 1; t <= v2; ++t) {
                std::vector<int> parts;
                parts.reserve(mu.parts.size() + 1);
                bool took1 = false, took2 = false;
                for (int w : mu.parts) {
                    if (!took1 && w == v1) {
                        took1 = true;
                        continue;
                    }
                    if (!took2 && w == v2) {
                        took2 = true;
                        continue;
                    }
                    parts.push_back(w);
                }
                parts.push_back(v1 + t);
                if (v2 - t > 0) parts.push_back(v2 - t);
                std::sort(parts.begin(), parts.end(), std::greater<int>());
                Partition src(std::move(parts));
                if (!src.dominated_by(kappa)) continue;
                auto it = index.find(pack(src));
                if (it == index.end()) continue;
                num += count * (v1 - v2 + 2.0 * t) * u[it->second];
            }
        };
        for (std::size_t ia = 0; ia < vals.size(); ++ia) {
            const auto [v1, m1] = vals[ia];
            if (m1 >= 2) add_sources(v1, v1, 0.5 * m1 * (m1 - 1));
            for (std::size_t ib = ia + 1; ib < vals.size(); ++ib) {
                const auto [v2, m2] = vals[ib];
                add_sources(v1, v2, static_cast<double>(m1) * m2);
            }
        }
        u[idx] = num / (rho_kappa - rho_star(mu, alpha));
    }

    double gamma = c_prime(kappa, alpha);
    for (int j = 1; j <= k; ++j) gamma = gamma / (alpha * j);
    // gamma now holds cprime / (alpha^k k!); coefficients divide by it.
    Expansion e;
    e.terms.reserve(lams.size());
    for (std::size_t i = 0; i < lams.size(); ++i) e.terms.emplace_back(lams[i], u[i] / gamma);
    return e;
}

std::shared_mutex g_cache_mutex;
std::unordered_map<CacheKey, Expansion, CacheKeyHash> g_cache;

const Expansion& jack_expansion(const Partition& kappa, double alpha, int max_len) {
    if (!(alpha > 0.0)) throw std::invalid_argument("jack: requires alpha > 0");
    const CacheKey key{pack(kappa), alpha, max_len};
    {
        std::shared_lock lock(g_cache_mutex);
        auto it = g_cache.find(key);
        if (it != g_cache.end()) return it->second;
    }
    Expansion e = compute_expansion(kappa, alpha, max_len);
    std::unique_lock lock(g_cache_mutex);
    return g_cache.emplace(key, std::move(e)).first->second;
}

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Monomial symmetric polynomial at x, using a per-variable power table.
template <typename Scalar>
Scalar m_eval(const Partition& lam, const std::vector<std::vector<Scalar>>& pw, int n) {
    if (lam.length() > n) return Scalar(0);
    std::vector<int> e(n, 0);
    for (int i = 0; i < lam.length(); ++i) e[i] = lam.parts[i];
    Scalar sum(0);
    do {
        Scalar p(1);
        for (int i = 0; i < n; ++i)
            if (e[i]) p *= pw[i][e[i]];
        sum += p;
    } while (std::prev_permutation(e.begin(), e.end()));
    return sum;
}

template <typename Scalar>
std::vector<std::vector<Scalar>> power_table(const Vec<Scalar>& x, int max_pow) {
    const int n = static_cast<int>(x.size());
    std::vector<std::vector<Scalar>> pw(n, std::vector<Scalar>(max_pow + 1, Scalar(1)));
    for (int i = 0; i < n; ++i)
        for (int e = 1; e <= max_pow; ++e) pw[i][e] = pw[i][e - 1] * x[i];
    return pw;
}

// Number of distinct rearrangements of lam padded to n slots: m_lam(1,...,1).
double m_count_ones(const Partition& lam, int n) {
    if (lam.length() > n) return 0.0;
    double c = 1.0;
    // n! / ((n - l)! * prod mult_v!)
    for (int i = 0; i < lam.length(); ++i) c *= static_cast<double>(n - i);
    int run = 1;
    for (int i = 1; i <= lam.length(); ++i) {
        if (i < lam.length() && lam.parts[i] == lam.parts[i - 1]) {
            ++run;
            continue;
        }
        for (int j = 2; j <= run; ++j) c /= j;
        run = 1;
    }
    return c;
}

template <typename Scalar>
Scalar jack_c_impl(const Partition& kappa, const Vec<Scalar>& x, double alpha) {
    const int n = static_cast<int>(x.size());
    if (kappa.length() > n) return Scalar(0);
    if (kappa.weight() == 0) return Scalar(1);
    const Expansion& e = jack_expansion(kappa, alpha, n);
    auto pw = power_table(x, kappa.parts[0] + 1);
    Scalar acc(0);
    for (const auto& [lam, coeff] : e.terms) {
        if (lam.length() > n) continue;
        acc += coeff * m_eval(lam, pw, n);
    }
    return acc;
}

template <typename Scalar>
MhgSum<Scalar> mhg_series_impl(const HypgeomSpec& spec, const Vec<Scalar>& x, const Vec<Scalar>& y,
                               int truncation) {
    if (x.size() != y.size())
        throw std::invalid_argument("mhg_series: spectra must have equal length");
    if (truncation < 1) throw std::invalid_argument("mhg_series: requires K >= 1");
    if (spec.p() > spec.q() + 1) throw std::domain_error("mhg_series: divergent series");
    if (!(spec.alpha > 0.0)) throw std::invalid_argument("mhg_series: requires alpha > 0");
    const int n = static_cast<int>(x.size());
    double xmax = 0.0, ymax = 0.0;
    for (int i = 0; i < n; ++i) {
        xmax = std::max(xmax, std::abs(x[i]));
        ymax = std::max(ymax, std::abs(y[i]));
    }
    if (spec.p() == spec.q() + 1 && !(xmax * ymax < 1.0))
        throw std::domain_error("mhg_series: series requires max|x| * max|y| < 1 when p = q+1");

    MhgSum<Scalar> out;
    out.value = Scalar(1);  // empty partition
    out.tail = 1.0;
    double kfact = 1.0;
    for (int k = 1; k <= truncation; ++k) {
        kfact *= k;
        Scalar shell(0);
        const auto kappas = partitions_of(k, n);
        if (kappas.empty()) break;
        auto pwx = power_table(x, k);
        auto pwy = power_table(y, k);
        // Monomial values shared across all partitions of this weight.
        std::unordered_map<std::uint64_t, std::pair<Scalar, Scalar>> mvals;
        for (const auto& lam : partitions_of(k, n))
            mvals.emplace(pack(lam), std::make_pair(m_eval(lam, pwx, n), m_eval(lam, pwy, n)));

        for (const auto& kappa : kappas) {
            double ratio = 1.0;
            for (double aj : spec.a) ratio *= gen_pochhammer(aj, kappa, spec.alpha);
            for (double bj : spec.b) {
                const double den = gen_pochhammer(bj, kappa, spec.alpha);
                if (den == 0.0) throw std::domain_error("mhg_series: pochhammer pole");
                ratio /= den;
            }
            if (ratio == 0.0) continue;

            const Expansion& e = jack_expansion(kappa, spec.alpha, n);
            Scalar cx(0), cy(0);
            double ci = 0.0;
            for (const auto& [lam, coeff] : e.terms) {
                if (lam.length() > n) continue;
                const auto& mv = mvals.at(pack(lam));
                cx += coeff * mv.first;
                cy += coeff * mv.second;
                ci += coeff * m_count_ones(lam, n);
            }
            shell += ratio * cx * cy / ci;
        }
        shell /= kfact;
        out.value += shell;
        out.tail = std::abs(shell);
    }
    return out;
}

}  // namespace

Partition::Partition(std::vector<int> p) : parts(std::move(p)) {
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i] < 1) throw std::invalid_argument("Partition: parts must be positive");
        if (i > 0 && parts[i] > parts[i - 1])
            throw std::invalid_argument("Partition: parts must be weakly decreasing");
    }
}

int Partition::weight() const {
    int w = 0;
    for (int v : parts) w += v;
    return w;
}

bool Partition::dominated_by(const Partition& other) const {
    int mine = 0, theirs = 0;
    const int len = std::max(length(), other.length());
    for (int i = 0; i < len; ++i) {
        mine += part(i);
        theirs += other.part(i);
        if (mine > theirs) return false;
    }
    return mine == theirs;
}

bool Partition::lex_less(const Partition& other) const {
    const int len = std::max(length(), other.length());
    for (int i = 0; i < len; ++i) {
        if (part(i) != other.part(i)) return part(i) < other.part(i);
    }
    return false;
}

std::vector<Partition> partitions_of(int k, int max_len) {
    if (k < 0 || max_len < 1) throw std::invalid_argument("partitions_of: invalid arguments");
    std::vector<Partition> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int remaining, int max_part) -> void {
        if (remaining == 0) {
            out.emplace_back(Partition{cur});
            return;
        }
        if (static_cast<int>(cur.size()) == max_len) return;
        for (int v = std::min(remaining, max_part); v >= 1; --v) {
            cur.push_back(v);
            self(self, remaining - v, v);
            cur.pop_back();
        }
    };
    rec(rec, k, k > 0 ? k : 1);
    return out;
}

std::vector<Partition> partitions_up_to(int k, int max_len) {
    std::vector<Partition> out;
    for (int w = 0; w <= k; ++w) {
        auto pw = partitions_of(w, max_len);
        out.insert(out.end(), pw.begin(), pw.end());
    }
    return out;
}

double gen_pochhammer(double a, const Partition& kappa, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("gen_pochhammer: requires alpha > 0");
    double prod = 1.0;
    for (int i = 0; i < kappa.length(); ++i) {
        const double w = a - i / alpha;
        if (near_integer(w) && std::round(w) <= -kappa.parts[i])
            throw std::domain_error("gen_pochhammer: pochhammer pole");
        for (int t = 0; t < kappa.parts[i]; ++t) prod *= w + t;
    }
    return prod;
}

double jack_c(const Partition& kappa, const Eigen::VectorXd& x, double alpha) {
    return jack_c_impl<double>(kappa, x, alpha);
}

std::complex<double> jack_c(const Partition& kappa, const Eigen::VectorXcd& x, double alpha) {
    return jack_c_impl<std::complex<double>>(kappa, x, alpha);
}

MhgSum<double> mhg_series(const HypgeomSpec& spec, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& y, int truncation) {
    return mhg_series_impl<double>(spec, x, y, truncation);
}

MhgSum<std::complex<double>> mhg_series(const HypgeomSpec& spec, const Eigen::VectorXcd& x,
                                        const Eigen::VectorXcd& y, int truncation) {
    return mhg_series_impl<std::complex<double>>(spec, x, y, truncation);
}

std::complex<double> scalar_pfq(const HypgeomSpec& spec, std::complex<double> z, int truncation) {
    if (spec.p() > spec.q() + 1) throw std::domain_error("scalar_pfq: divergent series");
    if (spec.p() == spec.q() + 1 && !(std::abs(z) < 1.0))
        throw std::domain_error("scalar_pfq: series requires |z| < 1 when p = q+1");
    std::complex<double> sum(1.0, 0.0), term(1.0, 0.0);
    for (int k = 0; k < truncation; ++k) {
        for (double aj : spec.a) term *= aj + k;
        if (term == 0.0) break;  // numerator terminated
        for (double bj : spec.b) {
            if (bj + k == 0.0) throw std::domain_error("scalar_pfq: pochhammer pole");
            term /= bj + k;
        }
        term *= z / static_cast<double>(k + 1);
        sum += term;
    }
    return sum;
}

}  // namespace spiked
