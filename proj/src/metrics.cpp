#include "pamsim/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "pamsim/errors.hpp"

namespace pamsim::metrics {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace

SensitivityResult sensitivity(const BerCurve& curve, double threshold_ber) {
    if (curve.points.empty()) throw ConfigError("sensitivity: empty curve");
    for (std::size_t i = 1; i < curve.points.size(); ++i)
        if (curve.points[i].rop_dbm <= curve.points[i - 1].rop_dbm)
            throw ConfigError("sensitivity: ROP values must be strictly increasing");

    SensitivityResult res;
    res.threshold_ber = threshold_ber;

    // A point sitting exactly on the threshold decides immediately.
    for (const auto& p : curve.points) {
        if (p.ber == threshold_ber) {
            res.status = SensitivityResult::Status::reached;
            res.rop_dbm = p.rop_dbm;
            res.bracket_lo_rop = res.bracket_hi_rop = p.rop_dbm;
            return res;
        }
    }

    // BER = 0 has no log; such points are excluded and reported.
    std::vector<BerPoint> pts;
    for (const auto& p : curve.points) {
        if (p.ber == 0.0)
            res.excluded_zero_ber_rops.push_back(p.rop_dbm);
        else
            pts.push_back(p);
    }
    if (pts.empty()) {
        // Only zero-BER points: already below threshold everywhere measured.
        res.status = SensitivityResult::Status::below_range;
        res.rop_dbm = curve.points.front().rop_dbm;
        return res;
    }

    std::vector<std::size_t> crossings;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const bool hi_above = pts[i].ber > threshold_ber;
        const bool lo_below = pts[i + 1].ber < threshold_ber;
        const bool hi_below = pts[i].ber < threshold_ber;
        const bool lo_above = pts[i + 1].ber > threshold_ber;
        if ((hi_above && lo_below) || (hi_below && lo_above)) crossings.push_back(i);
    }
    if (crossings.size() > 1) {
        std::string msg = "sensitivity: BER curve crosses the threshold more than once at ROP";
        for (auto i : crossings) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), " [%.3f, %.3f]", pts[i].rop_dbm, pts[i + 1].rop_dbm);
            msg += buf;
        }
        throw NumericalError(msg);
    }
    if (crossings.empty()) {
        const bool all_above =
            std::all_of(pts.begin(), pts.end(),
                        [&](const BerPoint& p) { return p.ber > threshold_ber; });
        if (all_above && res.excluded_zero_ber_rops.empty()) {
            res.status = SensitivityResult::Status::not_reached;
        } else {
            // Everything measured at or below threshold (possibly via BER=0
            // points): the crossing lies at or below the lowest ROP.
            res.status = SensitivityResult::Status::below_range;
            res.rop_dbm = curve.points.front().rop_dbm;
        }
        return res;
    }

    const auto i = crossings.front();
    const BerPoint& a = pts[i];
    const BerPoint& b = pts[i + 1];
    const double la = std::log10(a.ber);
    const double lb = std::log10(b.ber);
    const double lt = std::log10(threshold_ber);
    const double t = (la - lt) / (la - lb);
    res.status = SensitivityResult::Status::reached;
    res.rop_dbm = a.rop_dbm + t * (b.rop_dbm - a.rop_dbm);
    res.bracket_lo_rop = a.rop_dbm;
    res.bracket_hi_rop = b.rop_dbm;
    return res;
}

EyeData eye_accumulate(const DigitalWaveform& wf, double sps, double span_ui, int n_cols,
                       int n_bins) {
    if (sps < 2.0) throw ConfigError("eye_accumulate: need at least 2 samples/symbol");
    if (n_cols < 2 || n_bins < 2) throw ConfigError("eye_accumulate: bad bin counts");

    EyeData eye;
    eye.n_cols = n_cols;
    eye.n_bins = n_bins;
    eye.span_ui = span_ui;
    eye.counts.assign(static_cast<std::size_t>(n_cols) * static_cast<std::size_t>(n_bins), 0);
    eye.col_mean.assign(static_cast<std::size_t>(n_cols), 0.0);
    if (wf.samples.empty()) return eye;

    auto [mn, mx] = std::minmax_element(wf.samples.begin(), wf.samples.end());
    eye.amp_min = *mn;
    eye.amp_max = *mx;
    const double range = (eye.amp_max > eye.amp_min) ? (eye.amp_max - eye.amp_min) : 1.0;

    const double period = span_ui * sps; // samples per eye window
    std::vector<std::uint64_t> col_n(static_cast<std::size_t>(n_cols), 0);
    for (std::size_t k = 0; k < wf.samples.size(); ++k) {
        const double phase = std::fmod(static_cast<double>(k), period) / period;
        const int col = std::min(n_cols - 1, static_cast<int>(phase * n_cols));
        const double a = (wf.samples[k] - eye.amp_min) / range;
        const int bin = std::min(n_bins - 1, std::max(0, static_cast<int>(a * n_bins)));
        eye.counts[static_cast<std::size_t>(col) * static_cast<std::size_t>(n_bins) +
                   static_cast<std::size_t>(bin)]++;
        eye.col_mean[static_cast<std::size_t>(col)] += wf.samples[k];
        col_n[static_cast<std::size_t>(col)]++;
    }
    for (int c = 0; c < n_cols; ++c)
        if (col_n[static_cast<std::size_t>(c)])
            eye.col_mean[static_cast<std::size_t>(c)] /=
                static_cast<double>(col_n[static_cast<std::size_t>(c)]);
    return eye;
}

double HistogramData::bin_center(int i) const {
    const double w = (hi - lo) / static_cast<double>(counts.size());
    return lo + (static_cast<double>(i) + 0.5) * w;
}

HistogramData log_histogram(const std::vector<double>& values, int bins) {
    if (bins < 16) throw ConfigError("log_histogram: need at least 16 bins");
    HistogramData h;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    if (values.empty()) {
        h.log10_counts.assign(static_cast<std::size_t>(bins), 0.0);
        return h;
    }
    auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    h.lo = *mn;
    h.hi = *mx;
    const double range = (h.hi > h.lo) ? (h.hi - h.lo) : 1.0;
    for (double v : values) {
        const int b = std::min(bins - 1,
                               std::max(0, static_cast<int>((v - h.lo) / range * bins)));
        h.counts[static_cast<std::size_t>(b)]++;
    }
    h.log10_counts.resize(h.counts.size());
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        h.log10_counts[i] = std::log10(static_cast<double>(h.counts[i]) + 1.0);
    return h;
}

std::string curve_csv(const BerCurve& curve, const std::string& header_comment) {
    std::string s;
    if (!header_comment.empty()) s += "# " + header_comment + "\n";
    s += "descriptor,rop_dbm,ber,bits,errors,reliable\n";
    for (const auto& p : curve.points) {
        s += curve.descriptor + "," + fmt_double(p.rop_dbm) + "," + fmt_double(p.ber) + "," +
             std::to_string(p.bits) + "," + std::to_string(p.errors) + "," +
             (p.reliable() ? "1" : "0") + "\n";
    }
    return s;
}

std::string eye_csv(const EyeData& eye) {
    // First row: column means. Remaining rows: the count grid, one row per
    // amplitude bin (low to high), columns = time bins.
    std::string s = "# eye span_ui=" + fmt_double(eye.span_ui) + " amp_min=" +
                    fmt_double(eye.amp_min) + " amp_max=" + fmt_double(eye.amp_max) + "\n";
    for (int c = 0; c < eye.n_cols; ++c) {
        if (c) s += ",";
        s += fmt_double(eye.col_mean[static_cast<std::size_t>(c)]);
    }
    s += "\n";
    for (int b = 0; b < eye.n_bins; ++b) {
        for (int c = 0; c < eye.n_cols; ++c) {
            if (c) s += ",";
            s += std::to_string(eye.at(c, b));
        }
        s += "\n";
    }
    return s;
}

std::string histogram_csv(const HistogramData& h) {
    std::string s = "bin_center,count,log10_count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        s += fmt_double(h.bin_center(static_cast<int>(i))) + "," + std::to_string(h.counts[i]) +
             "," + fmt_double(h.log10_counts[i]) + "\n";
    }
    return s;
}

} // namespace pamsim::metrics
