#pragma once
// IM/DD channel model: bandwidth-limited electrical front end, quadrature-
// biased MZM, fiber attenuation + VOA, noisy optical pre-amplifier, optical
// filter, square-law photodetection, DSO capture.
//
// Conventions: optical power in mW (field samples in sqrt(mW)), photocurrent
// in mA, bandwidths in GHz, rates in GSa/s. A bandwidth value <= 0 disables
// that filter stage; a noise figure <= -900 dB or thermal PSD <= 0 disables
// the corresponding noise source.

#include <cstdint>

#include "pamsim/waveform.hpp"

namespace pamsim::channel {

struct ChannelConfig {
    double sim_rate_gsa = 480.0;   // common internal rate for analog stages
    double awg_bw_ghz = 46.0;
    double ea_bw_ghz = 60.0;
    double ea_gain_db = 22.0;
    double ea_sat_v = 0.0;         // memoryless tanh clipping level; 0 disables
    double mzm_bw_ghz = 33.0;
    double v_pi = 6.0;             // volts
    double laser_power_mw = 10.0;
    double fiber_km = 0.0;
    double atten_db_per_km = 0.33;
    double amp_out_dbm = 7.0;
    double amp_nf_db = 5.0;        // <= -900 disables ASE
    double wavelength_nm = 1310.0;
    double opt_filter_bw_ghz = 150.0;
    double pd_bw_ghz = 75.0;
    double pd_resp_a_w = 0.7;
    double thermal_psd_a2_hz = 0.0; // one-sided; 0 disables thermal noise
    double adc_rate_gsa = 256.0;
    double adc_bw_ghz = 110.0;
    int adc_bits = 8;              // <= 0 disables quantization
    int filter_order = 1;          // Gaussian order for every 3-dB stage
};

// E(t) = sqrt(P_laser) * cos(pi/4 + pi*v/(2*v_pi)): quadrature bias, so
// |E|^2 = P/2 at v=0, P at v=-v_pi/2, 0 at +v_pi/2.
OpticalField mzm_modulate(const DigitalWaveform& drive, double v_pi, double p_laser_mw);

// Fiber loss then VOA: scales mean power to exactly rop_dbm. Throws when the
// requested ROP exceeds the power available after fiber loss.
OpticalField fiber_and_rop(const OpticalField& field, double fiber_km, double atten_db_per_km,
                           double rop_dbm);

// Gain to amp_out_dbm plus circular complex white ASE with per-polarization
// PSD nsp*h*nu*(G-1), nsp = 10^(NF/10)/2, over the simulation band. Gain must
// be positive in dB.
OpticalField preamp(const OpticalField& field, double amp_out_dbm, double amp_nf_db,
                    double wavelength_nm, std::uint64_t seed);

// i = R*|E|^2 + thermal Gaussian current, then low-pass at pd_bw.
DigitalWaveform photodetect(const OpticalField& field, double pd_resp_a_w, double pd_bw_ghz,
                            double thermal_psd_a2_hz, std::uint64_t seed, int filter_order = 1);

// DSO capture: low-pass at adc_bw, band-limited resample to adc_rate, uniform
// quantization to adc_bits with full scale at the waveform peak.
DigitalWaveform adc_capture(const DigitalWaveform& wf, double adc_rate_gsa, double adc_bw_ghz,
                            int adc_bits, int filter_order = 1);

// Full Fig.-2-style chain from the DAC output to the captured waveform.
// Deterministic function of (input, config, rop, seed).
DigitalWaveform run_channel(const DigitalWaveform& dac_out, const ChannelConfig& cfg,
                            double rop_dbm, std::uint64_t seed);

} // namespace pamsim::channel
