#pragma once

#include <cmath>

#include "magbloch/common.hpp"

namespace magbloch {

/// Averaging measure represented by its Fourier transform mu_hat. The defining
/// property is mu_hat(p) = 1 on (-h, h); only mu_hat values enter computations.
///   dirac:    mu_hat == 1, |mu| = 1.
///   windowed: mu_hat = 1 on [-h, h], raised-cosine taper down to 0 at |p| = H.
struct AveragingMeasure {
    enum class Kind { dirac, windowed };

    Kind kind = Kind::dirac;
    double h = 1.0;
    double H = 1.0;

    static AveragingMeasure dirac(double h = 1.0) {
        AveragingMeasure m;
        m.kind = Kind::dirac;
        m.h = h;
        m.H = h;
        return m;
    }

    static AveragingMeasure windowed(double h, double H) {
        if (!(h > 0) || !(H >= h)) throw std::invalid_argument("windowed measure needs 0 < h <= H");
        AveragingMeasure m;
        m.kind = Kind::windowed;
        m.h = h;
        m.H = H;
        return m;
    }

    double transform(double p) const {
        if (kind == Kind::dirac) return 1.0;
        const double q = std::abs(p);
        if (q <= h) return 1.0;
        if (q >= H) return 0.0;
        return 0.5 * (1.0 + std::cos(kPi * (q - h) / (H - h)));
    }

    std::string describe() const {
        if (kind == Kind::dirac) return "dirac";
        return "windowed(h=" + std::to_string(h) + ",H=" + std::to_string(H) + ")";
    }

    /// Density of the inverse transform (windowed kind, H > h). Closed form of
    /// (1/pi) int_0^H mu_hat(p) cos(p t) dp; decays like t^{-3}.
    double density(double t) const {
        if (kind != Kind::windowed || !(H > h))
            throw std::logic_error("density defined only for windowed measures with H > h");
        const double w = kPi / (H - h);
        const double at = std::abs(t);
        if (at < 1e-8) return (h + H) / (2.0 * kPi);
        if (std::abs(at - w) < 1e-7)
            return -(h * std::cos(h * w) + H * std::cos(H * w)) / (4.0 * kPi);
        return (std::sin(h * at) + std::sin(H * at)) * w * w /
               (2.0 * kPi * at * (w * w - at * at));
    }
};

struct MeasureReport {
    bool valid = false;
    std::string reason;
    double flat_residual = 0;      // max |mu_hat - 1| on the (-h, h) grid
    double evenness_residual = 0;  // max |mu_hat(p) - mu_hat(-p)|
    double total_variation = 0;    // quadrature estimate of |mu|
    double truncation_residual = 0;
};

namespace detail {

// Quadrature of |f| over [a, b] with a fixed node budget per unit oscillation.
template <typename F>
double abs_integral(F&& f, double a, double b, int panels) {
    // 8-point Gauss-Legendre per panel.
    static const double gx[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                 0.9602898564975363};
    static const double gw[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                 0.1012285362903763};
    const double hstep = (b - a) / panels;
    double acc = 0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * hstep;
        for (int i = 0; i < 4; ++i) {
            acc += gw[i] * std::abs(f(mid - 0.5 * hstep * gx[i]));
            acc += gw[i] * std::abs(f(mid + 0.5 * hstep * gx[i]));
        }
    }
    return acc * 0.5 * hstep;
}

}  // namespace detail

/// Checks membership in the admissible measure class: flat window on (-h, h),
/// evenness, and (windowed kind) integrability of the inverse transform. The
/// total variation is estimated by quadrature over dyadic rings; the diagnostic
/// rejects transforms whose ring integrals do not decay (sharp cutoffs).
inline MeasureReport validate_measure(const AveragingMeasure& mu, int samples) {
    if (samples < 2) throw std::invalid_argument("validate_measure needs samples >= 2");
    MeasureReport rep;
    for (int i = 0; i < samples; ++i) {
        const double p = -mu.h + (i + 0.5) * (2.0 * mu.h / samples);
        rep.flat_residual = std::max(rep.flat_residual, std::abs(mu.transform(p) - 1.0));
        rep.evenness_residual =
            std::max(rep.evenness_residual, std::abs(mu.transform(p) - mu.transform(-p)));
    }
    if (rep.flat_residual > 0) {
        rep.reason = "not in M_h: transform deviates from 1 inside (-h, h)";
        return rep;
    }
    if (mu.kind == AveragingMeasure::Kind::dirac) {
        rep.valid = true;
        rep.total_variation = 1.0;
        return rep;
    }

    // Windowed: H == h means a sharp cutoff, whose inverse transform
    // sin(ht)/(pi t) is not absolutely integrable.
    const bool sharp = !(mu.H > mu.h + 1e-12);
    auto dens = [&](double t) {
        if (sharp) return std::abs(t) < 1e-8 ? mu.h / kPi : std::sin(mu.h * t) / (kPi * t);
        return mu.density(t);
    };
    const double t0 = 16.0 / mu.h;
    const int rings = 7;
    double total = 2.0 * detail::abs_integral(dens, 0.0, t0, std::max(64, static_cast<int>(mu.H * t0)));
    double prev_ring = -1.0;
    bool decays = true;
    double last_ring = 0;
    for (int j = 0; j < rings; ++j) {
        const double a = t0 * std::pow(2.0, j), b = 2.0 * a;
        const int panels = std::max(64, static_cast<int>(mu.H * (b - a) / 4.0));
        last_ring = 2.0 * detail::abs_integral(dens, a, b, panels);
        total += last_ring;
        if (prev_ring >= 0 && last_ring > 0.75 * prev_ring) decays = false;
        prev_ring = last_ring;
    }
    rep.total_variation = total;
    rep.truncation_residual = last_ring;
    if (!decays) {
        rep.reason =
            "not in M_h: inverse-transform tail is not integrable (sharp cutoff is not the "
            "transform of a finite measure)";
        return rep;
    }
    rep.valid = true;
    return rep;
}

}  // namespace magbloch
