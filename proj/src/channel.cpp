#include "pamsim/channel.hpp"

#include <cmath>
#include <cstdio>

#include "pamsim/dsp.hpp"
#include "pamsim/errors.hpp"
#include "pamsim/kernels.hpp"

namespace pamsim::channel {

namespace {

constexpr double kPlanck = 6.62607015e-34; // J*s
constexpr double kLightSpeed = 299792458.0; // m/s

} // namespace

OpticalField mzm_modulate(const DigitalWaveform& drive, double v_pi, double p_laser_mw) {
    if (v_pi <= 0.0) throw ConfigError("mzm_modulate: v_pi must be positive");
    if (p_laser_mw <= 0.0) throw ConfigError("mzm_modulate: laser power must be positive");
    OpticalField out;
    out.rate_gsa = drive.rate_gsa;
    out.samples.resize(drive.samples.size());
    const double amp = std::sqrt(p_laser_mw);
    const double k = M_PI / (2.0 * v_pi);
    for (std::size_t i = 0; i < drive.samples.size(); ++i)
        out.samples[i] = amp * std::cos(M_PI / 4.0 + k * drive.samples[i]);
    return out;
}

OpticalField fiber_and_rop(const OpticalField& field, double fiber_km, double atten_db_per_km,
                           double rop_dbm) {
    const double loss_db = fiber_km * atten_db_per_km;
    OpticalField out = field;
    const double fiber_scale = std::pow(10.0, -loss_db / 20.0);
    for (auto& s : out.samples) s *= fiber_scale;

    const double avail_mw = dsp::mean_power_mw(out);
    const double rop_mw = std::pow(10.0, rop_dbm / 10.0);
    if (rop_mw > avail_mw * (1.0 + 1e-12)) {
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "requested ROP %.2f dBm exceeds available %.2f dBm after %.2f dB fiber loss",
                      rop_dbm, dsp::db10(avail_mw), loss_db);
        throw InfeasiblePlanError(buf);
    }
    const double voa_scale = std::sqrt(rop_mw / avail_mw);
    for (auto& s : out.samples) s *= voa_scale;
    return out;
}

OpticalField preamp(const OpticalField& field, double amp_out_dbm, double amp_nf_db,
                    double wavelength_nm, std::uint64_t seed) {
    const double p_in_mw = dsp::mean_power_mw(field);
    const double p_out_mw = std::pow(10.0, amp_out_dbm / 10.0);
    if (p_in_mw <= 0.0 || p_out_mw <= p_in_mw)
        throw NumericalError("preamp: non-positive gain (input power at or above target)");
    const double gain = p_out_mw / p_in_mw;

    OpticalField out = field;
    const double amp_scale = std::sqrt(gain);
    for (auto& s : out.samples) s *= amp_scale;

    if (amp_nf_db > -900.0) {
        // Single-polarization ASE over the full simulation band.
        const double nsp = std::pow(10.0, amp_nf_db / 10.0) / 2.0;
        const double nu_hz = kLightSpeed / (wavelength_nm * 1e-9);
        const double psd_w_per_hz = nsp * kPlanck * nu_hz * (gain - 1.0);
        const double band_hz = out.rate_gsa * 1e9;
        const double var_mw = psd_w_per_hz * band_hz * 1e3; // total complex variance
        const double sigma = std::sqrt(var_mw / 2.0);       // per quadrature
        dsp::GaussianDraw g(seed);
        for (auto& s : out.samples) s += std::complex<double>(sigma * g(), sigma * g());
    }
    return out;
}

DigitalWaveform photodetect(const OpticalField& field, double pd_resp_a_w, double pd_bw_ghz,
                            double thermal_psd_a2_hz, std::uint64_t seed, int filter_order) {
    DigitalWaveform out;
    out.rate_gsa = field.rate_gsa;
    out.samples.resize(field.samples.size());
    // mW * A/W = mA
    kernels::magsq(field.samples.data(), out.samples.data(), field.samples.size());
    for (auto& v : out.samples) v *= pd_resp_a_w;

    if (thermal_psd_a2_hz > 0.0) {
        // One-sided PSD over the real-signal band [0, Fs/2]; amplitude in mA.
        const double sigma_ma = 1e3 * std::sqrt(thermal_psd_a2_hz * field.rate_gsa * 1e9 / 2.0);
        dsp::GaussianDraw g(seed);
        for (auto& v : out.samples) v += sigma_ma * g();
    }
    if (pd_bw_ghz > 0.0) dsp::gaussian_lowpass(out, pd_bw_ghz, filter_order);
    return out;
}

DigitalWaveform adc_capture(const DigitalWaveform& wf, double adc_rate_gsa, double adc_bw_ghz,
                            int adc_bits, int filter_order) {
    DigitalWaveform out = wf;
    if (adc_bw_ghz > 0.0) dsp::gaussian_lowpass(out, adc_bw_ghz, filter_order);
    if (out.rate_gsa != adc_rate_gsa) out = dsp::resample(out, adc_rate_gsa);
    if (adc_bits > 0) {
        double peak = 0.0;
        for (double x : out.samples) peak = std::max(peak, std::abs(x));
        if (peak > 0.0) {
            const double lsb = 2.0 * peak / std::pow(2.0, adc_bits);
            const double qmax = std::pow(2.0, adc_bits - 1) - 1.0;
            const double qmin = -std::pow(2.0, adc_bits - 1);
            for (auto& x : out.samples)
                x = std::clamp(std::round(x / lsb), qmin, qmax) * lsb;
        }
    }
    return out;
}

DigitalWaveform run_channel(const DigitalWaveform& dac_out, const ChannelConfig& cfg,
                            double rop_dbm, std::uint64_t seed) {
    // Band-limited DAC reconstruction onto the common simulation rate.
    DigitalWaveform drive = (dac_out.rate_gsa == cfg.sim_rate_gsa)
                                ? dac_out
                                : dsp::resample(dac_out, cfg.sim_rate_gsa);
    if (cfg.awg_bw_ghz > 0.0) dsp::gaussian_lowpass(drive, cfg.awg_bw_ghz, cfg.filter_order);

    const double ea_gain = std::pow(10.0, cfg.ea_gain_db / 20.0);
    for (auto& v : drive.samples) v *= ea_gain;
    if (cfg.ea_sat_v > 0.0)
        for (auto& v : drive.samples) v = cfg.ea_sat_v * std::tanh(v / cfg.ea_sat_v);
    if (cfg.ea_bw_ghz > 0.0) dsp::gaussian_lowpass(drive, cfg.ea_bw_ghz, cfg.filter_order);

    if (cfg.mzm_bw_ghz > 0.0) dsp::gaussian_lowpass(drive, cfg.mzm_bw_ghz, cfg.filter_order);
    OpticalField field = mzm_modulate(drive, cfg.v_pi, cfg.laser_power_mw);

    field = fiber_and_rop(field, cfg.fiber_km, cfg.atten_db_per_km, rop_dbm);
    field = preamp(field, cfg.amp_out_dbm, cfg.amp_nf_db, cfg.wavelength_nm,
                   dsp::mix_seed(seed, 0x61736531));
    if (cfg.opt_filter_bw_ghz > 0.0)
        dsp::gaussian_lowpass(field, cfg.opt_filter_bw_ghz, cfg.filter_order);

    DigitalWaveform current =
        photodetect(field, cfg.pd_resp_a_w, cfg.pd_bw_ghz, cfg.thermal_psd_a2_hz,
                    dsp::mix_seed(seed, 0x7468726d), cfg.filter_order);
    return adc_capture(current, cfg.adc_rate_gsa, cfg.adc_bw_ghz, cfg.adc_bits, cfg.filter_order);
}

} // namespace pamsim::channel
