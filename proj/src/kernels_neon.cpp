// NEON kernel variants for arm64. NEON is architecturally guaranteed on
// aarch64, so no runtime probe is needed beyond the architecture itself.
#include "pamsim/kernels.hpp"

#include <arm_neon.h>

namespace pamsim::kernels::neon {

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t s0 = vdupq_n_f64(0.0);
    float64x2_t s1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 = vfmaq_f64(s0, vld1q_f64(a + i), vld1q_f64(b + i));
        s1 = vfmaq_f64(s1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double s = (vgetq_lane_f64(s0, 0) + vgetq_lane_f64(s0, 1)) +
               (vgetq_lane_f64(s1, 0) + vgetq_lane_f64(s1, 1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t vy = vld1q_f64(y + i);
        vy = vfmaq_f64(vy, va, vld1q_f64(x + i));
        vst1q_f64(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void magsq(const std::complex<double>* e, double* out, std::size_t n) {
    const double* p = reinterpret_cast<const double*>(e);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t c0 = vld1q_f64(p + 2 * i);
        float64x2_t c1 = vld1q_f64(p + 2 * i + 2);
        float64x2_t sq0 = vmulq_f64(c0, c0);
        float64x2_t sq1 = vmulq_f64(c1, c1);
        out[i] = vgetq_lane_f64(sq0, 0) + vgetq_lane_f64(sq0, 1);
        out[i + 1] = vgetq_lane_f64(sq1, 0) + vgetq_lane_f64(sq1, 1);
    }
    for (; i < n; ++i) {
        const double re = e[i].real(), im = e[i].imag();
        out[i] = re * re + im * im;
    }
}

} // namespace pamsim::kernels::neon
