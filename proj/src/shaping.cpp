#include "pamsim/shaping.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>

#include "pamsim/dsp.hpp"
#include "pamsim/errors.hpp"

namespace pamsim::shaping {

PamConstellation PamConstellation::pam(int order) {
    if (order != 4 && order != 6 && order != 8)
        throw ConfigError("PAM order must be 4, 6 or 8");
    PamConstellation c;
    c.order = order;
    for (int k = 0; k < order; ++k) c.levels.push_back(static_cast<double>(2 * k - (order - 1)));
    c.label_bits = (order == 4) ? 2 : (order == 8) ? 3 : 5;
    return c;
}

double entropy_bits(const std::vector<double>& probs) {
    double h = 0.0;
    for (double p : probs)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

ShapedDistribution mb_distribution(const PamConstellation& c, double nu, Polarity pol) {
    if (nu < 0.0) throw ConfigError("shaping exponent nu must be nonnegative");
    const double sign = (pol == Polarity::cap) ? -1.0 : 1.0;
    std::vector<double> expo(c.levels.size());
    double emax = -1e300;
    for (std::size_t i = 0; i < c.levels.size(); ++i) {
        expo[i] = sign * nu * c.levels[i] * c.levels[i];
        emax = std::max(emax, expo[i]);
    }
    // Shift by the max exponent before exponentiating; keeps cup stable for
    // large nu.
    std::vector<double> p(expo.size());
    double z = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::exp(expo[i] - emax);
        z += p[i];
    }
    for (auto& v : p) v /= z;

    ShapedDistribution d;
    d.constellation = c;
    d.probs = std::move(p);
    d.nu = nu;
    d.polarity = pol;
    d.entropy_bits = entropy_bits(d.probs);
    return d;
}

double solve_nu(const PamConstellation& c, Polarity pol, double target, double tol) {
    if (tol <= 0.0) throw ConfigError("solve_nu: tolerance must be positive");
    const double hmax = std::log2(static_cast<double>(c.order));
    if (target <= 1.0 || target > hmax)
        throw InfeasiblePlanError("target entropy outside (1, log2 M]: the entropy of a "
                                  "symmetric MB family ranges from log2 M (nu=0) down to 1 bit "
                                  "(nu -> inf)");
    if (std::abs(target - hmax) <= tol) return 0.0;

    double lo = 0.0, hi = 64.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double h = mb_distribution(c, mid, pol).entropy_bits;
        if (std::abs(h - target) <= tol) return mid;
        if (h > target)
            lo = mid;
        else
            hi = mid;
    }
    throw NumericalError("solve_nu: bisection did not converge in 200 iterations");
}

double required_entropy(double net_rate_gbps, double symbol_rate_gbd, double fec_overhead,
                        double m) {
    if (net_rate_gbps <= 0.0 || symbol_rate_gbd <= 0.0 || fec_overhead < 0.0 || m <= 0.0)
        throw ConfigError("required_entropy: arguments must be positive");
    const double h = net_rate_gbps / symbol_rate_gbd + m * fec_overhead / (1.0 + fec_overhead);
    if (h <= 1.0 || h > m) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "required entropy %.4f bit/symbol outside (1, %.4f] for %.4g GBd at %.4g "
                      "Gbit/s net",
                      h, m, symbol_rate_gbd, net_rate_gbps);
        throw InfeasiblePlanError(buf);
    }
    return h;
}

double achievable_net_rate(double entropy, double symbol_rate_gbd, double fec_overhead,
                           double m) {
    if (entropy <= 0.0 || entropy > m)
        throw ConfigError("achievable_net_rate: entropy outside (0, m]");
    return symbol_rate_gbd * (entropy - m * fec_overhead / (1.0 + fec_overhead));
}

RatePlan make_rate_plan(double net_rate_gbps, double symbol_rate_gbd, double fec_overhead,
                        double m) {
    RatePlan p;
    p.symbol_rate_gbd = symbol_rate_gbd;
    p.fec_overhead = fec_overhead;
    p.bits_per_symbol_max = m;
    p.entropy_target = required_entropy(net_rate_gbps, symbol_rate_gbd, fec_overhead, m);
    p.net_rate_gbps = achievable_net_rate(p.entropy_target, symbol_rate_gbd, fec_overhead, m);
    p.ps_overhead = m - p.entropy_target;
    return p;
}

std::vector<int> sample_symbols(const ShapedDistribution& dist, std::size_t n,
                                std::uint64_t seed) {
    std::vector<double> cdf(dist.probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
        acc += dist.probs[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;

    std::mt19937_64 rng(seed);
    std::vector<int> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = dsp::uniform01(rng);
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        out[k] = static_cast<int>(it - cdf.begin());
    }
    return out;
}

std::uint32_t gray_label(int index) {
    const auto k = static_cast<std::uint32_t>(index);
    return k ^ (k >> 1);
}

namespace {

int gray_inverse(std::uint32_t g) {
    std::uint32_t k = g;
    for (std::uint32_t shift = 1; shift < 8; shift <<= 1) k ^= k >> shift;
    return static_cast<int>(k);
}

int bits_per_symbol(int order) {
    if (order == 4) return 2;
    if (order == 8) return 3;
    throw ConfigError("Gray mapping defined for PAM-4 and PAM-8 only");
}

} // namespace

std::vector<int> gray_map(const std::vector<std::uint8_t>& bits, int order) {
    const int b = bits_per_symbol(order);
    if (bits.size() % static_cast<std::size_t>(b) != 0)
        throw ConfigError("gray_map: bit count not divisible by log2 M");
    std::vector<int> out(bits.size() / static_cast<std::size_t>(b));
    for (std::size_t k = 0; k < out.size(); ++k) {
        std::uint32_t v = 0;
        for (int j = 0; j < b; ++j) v = (v << 1) | bits[k * static_cast<std::size_t>(b) + static_cast<std::size_t>(j)];
        out[k] = gray_inverse(v);
    }
    return out;
}

std::vector<std::uint8_t> gray_demap(const std::vector<int>& indices, int order) {
    const int b = bits_per_symbol(order);
    std::vector<std::uint8_t> out(indices.size() * static_cast<std::size_t>(b));
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const std::uint32_t g = gray_label(indices[k]);
        for (int j = 0; j < b; ++j)
            out[k * static_cast<std::size_t>(b) + static_cast<std::size_t>(j)] =
                static_cast<std::uint8_t>((g >> (b - 1 - j)) & 1u);
    }
    return out;
}

namespace {

// PAM-6 codeword table: the 32 index pairs kept out of 36, lexicographic
// order. Indices 0 and 5 are the maximal-magnitude levels (-5, +5); pairs
// with both symbols there are excluded.
struct Pam6Table {
    std::array<std::pair<int, int>, 32> pairs;
    std::array<int, 36> index_of; // -1 for excluded pairs

    Pam6Table() {
        index_of.fill(-1);
        int n = 0;
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b) {
                const bool extreme_a = (a == 0 || a == 5);
                const bool extreme_b = (b == 0 || b == 5);
                if (extreme_a && extreme_b) continue;
                pairs[static_cast<std::size_t>(n)] = {a, b};
                index_of[static_cast<std::size_t>(a * 6 + b)] = n;
                ++n;
            }
    }
};

const Pam6Table& pam6_table() {
    static const Pam6Table t;
    return t;
}

double pam6_level(int idx) { return static_cast<double>(2 * idx - 5); }

} // namespace

std::vector<int> pam6_encode(const std::vector<std::uint8_t>& bits) {
    if (bits.size() % 5 != 0) throw ConfigError("pam6_encode: bit count not divisible by 5");
    const auto& t = pam6_table();
    std::vector<int> out;
    out.reserve(bits.size() / 5 * 2);
    for (std::size_t k = 0; k < bits.size(); k += 5) {
        std::uint32_t v = 0;
        for (int j = 0; j < 5; ++j) v = (v << 1) | bits[k + static_cast<std::size_t>(j)];
        const auto [a, b] = t.pairs[v];
        out.push_back(a);
        out.push_back(b);
    }
    return out;
}

std::pair<int, int> pam6_nearest_valid(int a, int b) {
    const auto& t = pam6_table();
    if (t.index_of[static_cast<std::size_t>(a * 6 + b)] >= 0) return {a, b};
    double best = 1e300;
    std::pair<int, int> best_pair{0, 0};
    for (const auto& [pa, pb] : t.pairs) {
        const double da = pam6_level(pa) - pam6_level(a);
        const double db = pam6_level(pb) - pam6_level(b);
        const double d2 = da * da + db * db;
        // Strict less keeps the first (lexicographically smaller) pair on ties.
        if (d2 < best) {
            best = d2;
            best_pair = {pa, pb};
        }
    }
    return best_pair;
}

std::vector<std::uint8_t> pam6_decode(const std::vector<int>& indices) {
    if (indices.size() % 2 != 0) throw ConfigError("pam6_decode: symbol count must be even");
    const auto& t = pam6_table();
    std::vector<std::uint8_t> out;
    out.reserve(indices.size() / 2 * 5);
    for (std::size_t k = 0; k < indices.size(); k += 2) {
        auto [a, b] = pam6_nearest_valid(indices[k], indices[k + 1]);
        const int v = t.index_of[static_cast<std::size_t>(a * 6 + b)];
        for (int j = 4; j >= 0; --j) out.push_back(static_cast<std::uint8_t>((v >> j) & 1));
    }
    return out;
}

std::string distribution_text(const ShapedDistribution& dist) {
    std::string s;
    char line[64];
    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
        std::snprintf(line, sizeof(line), "%+g %.12g\n", dist.constellation.levels[i],
                      dist.probs[i]);
        s += line;
    }
    return s;
}

} // namespace pamsim::shaping
