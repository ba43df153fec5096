#pragma once
// BER waterfalls, receiver-sensitivity extraction at an HD-FEC threshold,
// eye and histogram diagnostics.

#include <cstdint>
#include <string>
#include <vector>

#include "pamsim/waveform.hpp"

namespace pamsim::metrics {

struct BerPoint {
    double rop_dbm = 0.0;
    double ber = 0.0;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    // Fewer than 100 counted errors makes the point statistically thin.
    bool reliable() const { return errors >= 100; }
};

struct BerCurve {
    std::vector<BerPoint> points; // strictly increasing ROP
    std::string descriptor;       // e.g. "pam8 cap 90GBd H=2.4185"
};

struct SensitivityResult {
    enum class Status { reached, not_reached, below_range } status = Status::not_reached;
    double rop_dbm = 0.0;          // valid when reached / below_range
    double threshold_ber = 3.8e-3;
    double bracket_lo_rop = 0.0, bracket_hi_rop = 0.0; // straddling points when reached
    std::vector<double> excluded_zero_ber_rops;        // BER=0 points left out of interpolation
};

// Threshold crossing by linear interpolation of log10(BER) vs ROP(dBm).
// A point exactly at the threshold returns that ROP. All points above the
// threshold -> not_reached; all below -> below_range at the lowest ROP.
// Multiple crossings raise NumericalError listing them.
SensitivityResult sensitivity(const BerCurve& curve, double threshold_ber = 3.8e-3);

struct EyeData {
    int n_cols = 0;
    int n_bins = 0;
    std::vector<std::uint64_t> counts; // row-major [col][bin]
    std::vector<double> col_mean;      // averaged trace per time bin
    double amp_min = 0.0, amp_max = 0.0;
    double span_ui = 2.0;

    std::uint64_t at(int col, int bin) const {
        return counts[static_cast<std::size_t>(col) * static_cast<std::size_t>(n_bins) +
                      static_cast<std::size_t>(bin)];
    }
};

// Folds the waveform modulo span_ui symbol periods into a time x amplitude
// histogram plus the per-column averaged trace. sps may be fractional.
EyeData eye_accumulate(const DigitalWaveform& wf, double sps, double span_ui = 2.0,
                       int n_cols = 128, int n_bins = 256);

struct HistogramData {
    std::vector<std::uint64_t> counts;
    std::vector<double> log10_counts; // log10(count + 1)
    double lo = 0.0, hi = 0.0;        // bin edges span [lo, hi] uniformly
    double bin_center(int i) const;
};

HistogramData log_histogram(const std::vector<double>& values, int bins);

// CSV/JSON emission helpers (schemas documented in the README).
std::string curve_csv(const BerCurve& curve, const std::string& header_comment);
std::string eye_csv(const EyeData& eye);
std::string histogram_csv(const HistogramData& h);

} // namespace pamsim::metrics
