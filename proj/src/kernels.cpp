// Runtime backend selection. The choice is made once per process; every call
// in a run goes through the same implementation, which keeps results
// reproducible between serial and parallel execution of the same binary.
#include "pamsim/kernels.hpp"

namespace pamsim::kernels {

#ifdef PAMSIM_HAVE_AVX2_TU
namespace avx2 {
double dot(const double*, const double*, std::size_t);
void axpy(double, const double*, double*, std::size_t);
void magsq(const std::complex<double>*, double*, std::size_t);
} // namespace avx2
#endif
#ifdef PAMSIM_HAVE_NEON_TU
namespace neon {
double dot(const double*, const double*, std::size_t);
void axpy(double, const double*, double*, std::size_t);
void magsq(const std::complex<double>*, double*, std::size_t);
} // namespace neon
#endif

namespace {

using dot_fn = double (*)(const double*, const double*, std::size_t);
using axpy_fn = void (*)(double, const double*, double*, std::size_t);
using magsq_fn = void (*)(const std::complex<double>*, double*, std::size_t);

struct Dispatch {
    dot_fn dot = scalar::dot;
    axpy_fn axpy = scalar::axpy;
    magsq_fn magsq = scalar::magsq;
    const char* name = "scalar";

    Dispatch() {
#ifdef PAMSIM_HAVE_AVX2_TU
        if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
            dot = avx2::dot;
            axpy = avx2::axpy;
            magsq = avx2::magsq;
            name = "avx2";
        }
#elif defined(PAMSIM_HAVE_NEON_TU)
        dot = neon::dot;
        axpy = neon::axpy;
        magsq = neon::magsq;
        name = "neon";
#endif
    }
};

const Dispatch& dispatch() {
    static const Dispatch d;
    return d;
}

} // namespace

double dot(const double* a, const double* b, std::size_t n) { return dispatch().dot(a, b, n); }

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    dispatch().axpy(alpha, x, y, n);
}

void magsq(const std::complex<double>* e, double* out, std::size_t n) {
    dispatch().magsq(e, out, n);
}

const char* backend() { return dispatch().name; }

} // namespace pamsim::kernels
