#pragma once
// Arithmetic kernels for the hot inner loops (equalizer dot products, weight
// updates, Gram accumulation, square-law detection). A scalar reference
// implementation always exists; on x86-64 an AVX2+FMA variant is selected at
// runtime when the CPU supports it, on arm64 a NEON variant. The dispatched
// and scalar paths are equivalence-tested against each other.

#include <complex>
#include <cstddef>

namespace pamsim::kernels {

// sum_i a[i]*b[i]
double dot(const double* a, const double* b, std::size_t n);

// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

// out[i] = |e[i]|^2
void magsq(const std::complex<double>* e, double* out, std::size_t n);

// Name of the active backend: "avx2", "neon" or "scalar".
const char* backend();

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void magsq(const std::complex<double>* e, double* out, std::size_t n);
} // namespace scalar

} // namespace pamsim::kernels
