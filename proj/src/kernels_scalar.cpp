#include "pamsim/kernels.hpp"

namespace pamsim::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
    // Four independent accumulators; summed in a fixed order so results are
    // reproducible run to run.
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return ((s0 + s1) + (s2 + s3));
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void magsq(const std::complex<double>* e, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double re = e[i].real(), im = e[i].imag();
        out[i] = re * re + im * im;
    }
}

} // namespace pamsim::kernels::scalar
