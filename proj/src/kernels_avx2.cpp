// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma; it must only be entered after a runtime CPU check.
#include "pamsim/kernels.hpp"

#include <immintrin.h>

namespace pamsim::kernels::avx2 {

double dot(const double* a, const double* b, std::size_t n) {
    __m256d s0 = _mm256_setzero_pd();
    __m256d s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
        s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
    }
    for (; i + 4 <= n; i += 4)
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    alignas(32) double lane[4];
    _mm256_store_pd(lane, _mm256_add_pd(s0, s1));
    double s = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void magsq(const std::complex<double>* e, double* out, std::size_t n) {
    const double* p = reinterpret_cast<const double*>(e);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        // 4 complex values = 8 doubles (re0,im0,re1,im1,...)
        __m256d lo = _mm256_loadu_pd(p + 2 * i);      // re0 im0 re1 im1
        __m256d hi = _mm256_loadu_pd(p + 2 * i + 4);  // re2 im2 re3 im3
        __m256d sq_lo = _mm256_mul_pd(lo, lo);
        __m256d sq_hi = _mm256_mul_pd(hi, hi);
        __m256d sums = _mm256_hadd_pd(sq_lo, sq_hi);  // |e0|2 |e2|2 |e1|2 |e3|2
        __m256d res = _mm256_permute4x64_pd(sums, _MM_SHUFFLE(3, 1, 2, 0));
        _mm256_storeu_pd(out + i, res);
    }
    for (; i < n; ++i) {
        const double re = e[i].real(), im = e[i].imag();
        out[i] = re * re + im * im;
    }
}

} // namespace pamsim::kernels::avx2
