// Equivalence of the dispatched SIMD kernels against the scalar references.
#include <doctest.h>

#include <random>
#include <vector>

#include "pamsim/dsp.hpp"
#include "pamsim/kernels.hpp"

using namespace pamsim;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = 2.0 * dsp::uniform01(rng) - 1.0;
    return v;
}

} // namespace

TEST_SUITE("kernels") {

TEST_CASE("dot matches a naive sum") {
    std::vector<double> a{1.0, 2.0, 3.0}, b{4.0, -5.0, 6.0};
    CHECK(kernels::scalar::dot(a.data(), b.data(), 3) == doctest::Approx(12.0));
    CHECK(kernels::dot(a.data(), b.data(), 3) == doctest::Approx(12.0));
}

TEST_CASE("dispatched kernels agree with scalar for many lengths") {
    std::mt19937_64 rng(7);
    // Remainder handling matters: cover lengths around the vector widths.
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 63u, 64u, 65u,
                          100u, 311u, 663u, 1000u, 2048u}) {
        const auto a = random_vec(rng, n);
        const auto b = random_vec(rng, n);

        const double d0 = kernels::scalar::dot(a.data(), b.data(), n);
        const double d1 = kernels::dot(a.data(), b.data(), n);
        CHECK(std::abs(d0 - d1) <= 1e-12 * std::max(1.0, std::abs(d0)));

        auto y0 = random_vec(rng, n);
        auto y1 = y0;
        kernels::scalar::axpy(0.37, a.data(), y0.data(), n);
        kernels::axpy(0.37, a.data(), y1.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y0[i] == doctest::Approx(y1[i]).epsilon(1e-13));

        std::vector<std::complex<double>> e(n);
        for (std::size_t i = 0; i < n; ++i) e[i] = {a[i], b[i]};
        std::vector<double> m0(n), m1(n);
        kernels::scalar::magsq(e.data(), m0.data(), n);
        kernels::magsq(e.data(), m1.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(m0[i] == doctest::Approx(m1[i]).epsilon(1e-14));
    }
}

TEST_CASE("backend reports a known name") {
    const std::string b = kernels::backend();
    CHECK((b == "avx2" || b == "neon" || b == "scalar"));
}

} // TEST_SUITE

