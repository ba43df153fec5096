#pragma once
// PAM constellations, cap/cup Maxwell-Boltzmann distributions, entropy
// targeting, bit/symbol mappings and the rate-plan algebra.

#include <cstdint>
#include <string>
#include <vector>

namespace pamsim::shaping {

enum class Polarity { cap, cup };

struct PamConstellation {
    int order = 0;               // M
    std::vector<double> levels;  // ascending odd-integer grid, symmetric about 0
    int label_bits = 0;          // bits per mapping unit (PAM-6: 5 bits / 2 symbols)

    // M in {4, 6, 8}.
    static PamConstellation pam(int order);
};

struct ShapedDistribution {
    PamConstellation constellation;
    std::vector<double> probs;
    double nu = 0.0;
    Polarity polarity = Polarity::cap;
    double entropy_bits = 0.0;
};

double entropy_bits(const std::vector<double>& probs);

// p(x) proportional to exp(-nu*x^2) (cap) or exp(+nu*x^2) (cup).
ShapedDistribution mb_distribution(const PamConstellation& c, double nu, Polarity pol);

// Bisection on nu over [0, 64]; entropy is strictly decreasing in nu for both
// polarities on a symmetric grid. target must lie in (1, log2 M].
double solve_nu(const PamConstellation& c, Polarity pol, double target_entropy_bits,
                double tol_bits = 1e-9);

// H = net/Rs + m*oh/(1+oh). Throws when the result leaves (1, m].
double required_entropy(double net_rate_gbps, double symbol_rate_gbd, double fec_overhead,
                        double bits_per_symbol_max);

// Rs * (H - m*oh/(1+oh)); for H = m this reduces to Rs*m/(1+oh).
double achievable_net_rate(double entropy_bits, double symbol_rate_gbd, double fec_overhead,
                           double bits_per_symbol_max);

struct RatePlan {
    double symbol_rate_gbd = 0.0;
    double fec_overhead = 0.0;
    double bits_per_symbol_max = 0.0; // m
    double entropy_target = 0.0;
    double net_rate_gbps = 0.0;
    double ps_overhead = 0.0; // m - H
};

RatePlan make_rate_plan(double net_rate_gbps, double symbol_rate_gbd, double fec_overhead,
                        double bits_per_symbol_max);

// i.i.d. draws by inverse CDF on a seeded mt19937_64; returns level indices.
// Bit-exact reproducible for identical (dist, n, seed).
std::vector<int> sample_symbols(const ShapedDistribution& dist, std::size_t n, std::uint64_t seed);

// Binary-reflected Gray labeling over ascending levels, M in {4, 8}.
// gray_map consumes log2(M) bits per symbol, MSB first.
std::vector<int> gray_map(const std::vector<std::uint8_t>& bits, int order);
std::vector<std::uint8_t> gray_demap(const std::vector<int>& indices, int order);
std::uint32_t gray_label(int index);

// PAM-6: 5 bits onto 2 six-level symbols. The 32 codewords are the 36 level
// pairs minus the four with both symbols at maximal magnitude, enumerated in
// lexicographic order and indexed by the 5-bit value (MSB first).
std::vector<int> pam6_encode(const std::vector<std::uint8_t>& bits);
std::vector<std::uint8_t> pam6_decode(const std::vector<int>& indices);
// Snap an arbitrary index pair to the nearest valid codeword pair (squared
// Euclidean distance in level space; ties to the lexicographically smaller).
std::pair<int, int> pam6_nearest_valid(int a, int b);

// Plain-text export: one "level probability" line per level.
std::string distribution_text(const ShapedDistribution& dist);

} // namespace pamsim::shaping
