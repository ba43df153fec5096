#pragma once
// Transmit DSP: PRBS bit source, RRC pulse shaping straight onto the DAC
// sample grid, and DAC quantization with peak or RMS-backoff scaling.

#include <cstdint>
#include <vector>

#include "pamsim/waveform.hpp"

namespace pamsim::txchain {

// Maximal-length LFSR. Supported degrees: 7, 9, 11, 13, 15, 23, 31.
// Deterministic for (degree, seed); seed 0 is rejected.
std::vector<std::uint8_t> prbs_generate(int degree, std::uint32_t seed, std::size_t n);

// Root-raised-cosine taps at sps samples/symbol covering span symbols
// (length span*sps + 1, odd, even span required), unit energy, exactly
// symmetric. Singularities at t=0 and |t|=1/(4a) use their analytic limits.
std::vector<double> rrc_taps(double alpha, int sps, int span);

struct PulseShaperConfig {
    double rolloff = 0.4;        // alpha in [0, 1]
    int span = 64;               // symbols covered by the pulse (even)
    double symbol_rate_gbd = 0.0;
};

// Pulse-shapes a symbol stream directly at dac_rate via polyphase evaluation
// of the continuous unit-peak RRC pulse, with cyclic symbol extension so the
// output is steady-state and symbol k sits exactly at sample k*dac/Rs.
// Output length = floor(n_symbols * dac_rate / symbol_rate).
// Throws when the occupied band Rs*(1+alpha)/2 exceeds the DAC Nyquist.
DigitalWaveform shape_and_resample(const std::vector<double>& symbol_values,
                                   const PulseShaperConfig& shaper, double dac_rate_gsa);

enum class ClipMode { peak, rms_backoff };

// Scales to the DAC full scale (peak: max|x| -> vpp/2; rms_backoff: rms ->
// vpp/2 * 10^(-backoff/20), then hard clip), and quantizes to 2^bits uniform
// levels. bits in [4, 12].
DigitalWaveform dac_quantize(const DigitalWaveform& wf, int bits, double vpp, ClipMode mode,
                             double backoff_db = 0.0);

} // namespace pamsim::txchain
