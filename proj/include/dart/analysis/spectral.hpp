#pragma once

// Vibration processing chain: fixed-window mean subtraction, averaged
// periodogram PSD with a Hann taper, frequency-averaged density in dB/Hz and
// peak-to-peak comparison.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <mutex>
#include <numeric>
#include <string>
#include <vector>

#include <fftw3.h>

#include "dart/error.hpp"
#include "dart/math.hpp"

namespace dart::analysis {

struct TimeSeries {
    double fs = 1.0;              // Hz
    std::vector<double> values;
    std::string unit;             // carried along, e.g. "N*m"

    std::size_t size() const { return values.size(); }

    void validate() const {
        if (!(fs > 0.0)) throw ParameterError("sample rate must be > 0");
        if (values.size() < 2) throw ParameterError("time series needs at least 2 samples");
    }
};

struct PsdResult {
    std::vector<double> freqs;    // Hz, ascending
    std::vector<double> density;  // unit^2/Hz, one-sided
    double avg_db = 0.0;          // dB/Hz
    std::size_t segments = 0;
};

inline constexpr double kDbFloor = -300.0;

inline TimeSeries mean_subtract(const TimeSeries& series, std::size_t window) {
    series.validate();
    if (window < 1 || window > series.size()) {
        throw ParameterError("mean-subtraction window must satisfy 1 <= window <= length");
    }
    TimeSeries out = series;
    for (std::size_t start = 0; start < series.size(); start += window) {
        const std::size_t end = std::min(start + window, series.size());
        const double mean = std::accumulate(series.values.begin() + start, series.values.begin() + end, 0.0) /
                            static_cast<double>(end - start);
        for (std::size_t i = start; i < end; ++i) out.values[i] = series.values[i] - mean;
    }
    return out;
}

namespace detail {

// FFTW planning is not thread-safe; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

class RealFft {
public:
    explicit RealFft(std::size_t n) : n_(n), in_(n), out_(n / 2 + 1) {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), in_.data(),
                                     reinterpret_cast<fftw_complex*>(out_.data()), FFTW_ESTIMATE);
        if (plan_ == nullptr) throw Error("FFTW plan creation failed");
    }
    ~RealFft() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    std::vector<double>& input() { return in_; }
    const std::vector<std::complex<double>>& execute() {
        fftw_execute(plan_);
        return out_;
    }

private:
    std::size_t n_;
    std::vector<double> in_;
    std::vector<std::complex<double>> out_;
    fftw_plan plan_ = nullptr;
};

}  // namespace detail

// Periodic Hann taper.
inline std::vector<double> hann_window(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n));
    }
    return w;
}

inline double avg_psd_db(const PsdResult& psd) {
    if (psd.density.empty()) throw ParameterError("empty PSD");
    const double mean = std::accumulate(psd.density.begin(), psd.density.end(), 0.0) /
                        static_cast<double>(psd.density.size());
    if (!(mean > 0.0)) return kDbFloor;
    return std::max(kDbFloor, 10.0 * std::log10(mean));
}

// Averaged periodogram. The one-sided density integrates to the series'
// mean-square value: sum(density) * df ~= mean(x^2).
inline PsdResult psd(const TimeSeries& series, std::size_t segment, double overlap) {
    series.validate();
    if (segment < 2 || segment > series.size()) {
        throw ParameterError("PSD segment must satisfy 2 <= segment <= length");
    }
    if (!(overlap >= 0.0 && overlap <= 0.9)) throw ParameterError("PSD overlap must lie in [0, 0.9]");
    const auto shift = static_cast<std::size_t>(
        std::max<long>(1, static_cast<long>(segment) - std::lround(overlap * static_cast<double>(segment))));

    const std::vector<double> w = hann_window(segment);
    const double w_power = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
    const std::size_t bins = segment / 2 + 1;

    PsdResult r;
    r.density.assign(bins, 0.0);
    r.freqs.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        r.freqs[k] = series.fs * static_cast<double>(k) / static_cast<double>(segment);
    }

    detail::RealFft fft(segment);
    for (std::size_t start = 0; start + segment <= series.size(); start += shift) {
        auto& in = fft.input();
        for (std::size_t i = 0; i < segment; ++i) in[i] = w[i] * series.values[start + i];
        const auto& spec = fft.execute();
        for (std::size_t k = 0; k < bins; ++k) r.density[k] += std::norm(spec[k]);
        ++r.segments;
    }
    const double scale = 1.0 / (series.fs * w_power * static_cast<double>(r.segments));
    for (std::size_t k = 0; k < bins; ++k) {
        const bool edge = k == 0 || (segment % 2 == 0 && k == bins - 1);
        r.density[k] *= scale * (edge ? 1.0 : 2.0);
    }
    r.avg_db = avg_psd_db(r);
    return r;
}

inline double integrated_power(const PsdResult& r) {
    if (r.freqs.size() < 2) return 0.0;
    const double df = r.freqs[1] - r.freqs[0];
    return std::accumulate(r.density.begin(), r.density.end(), 0.0) * df;
}

inline double peak_to_peak(const TimeSeries& s) {
    if (s.values.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
    return *hi - *lo;
}

// Percent reduction of b's peak-to-peak relative to a's (negative when b is larger).
inline double peak_to_peak_reduction(const TimeSeries& a, const TimeSeries& b) {
    const double pa = peak_to_peak(a);
    if (!(pa > 0.0)) throw UndefinedError("reference series has zero peak-to-peak");
    return 100.0 * (1.0 - peak_to_peak(b) / pa);
}

}  // namespace dart::analysis
