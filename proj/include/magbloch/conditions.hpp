#pragma once

#include <numeric>

#include "magbloch/measure.hpp"
#include "magbloch/potential.hpp"

namespace magbloch {

struct ThetaOptions {
    int x_grid = 24;       // points per dimension of the cell grid
    int sphere_grid = 64;  // points per angle of the transverse sphere grid
};

namespace detail {

/// Deterministic grid on S_{n-2}(gamma), the unit sphere of the hyperplane
/// orthogonal to gamma. Polar angles use pi i/m (endpoints included), the final
/// angle 2 pi i/m, so doubling m refines the grid in a nested way.
inline std::vector<Eigen::VectorXd> transverse_sphere_grid(const DirectionFrame& frame, int m) {
    const int n = static_cast<int>(frame.e.size());
    if (n < 3) throw std::invalid_argument("sphere grid empty: S_{n-2}(gamma) needs n >= 3");
    const auto u = frame.orthonormal_complement();  // n-1 vectors
    const int angles = n - 2;
    std::vector<Eigen::VectorXd> pts;
    std::vector<int> idx(angles, 0);
    while (true) {
        // Hyperspherical point in the u-basis coordinates.
        Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
        double sin_prod = 1.0;
        for (int a = 0; a < angles; ++a) {
            const bool last = a == angles - 1;
            const double th = last ? kTwoPi * idx[a] / m : kPi * idx[a] / m;
            w += sin_prod * std::cos(th) * u[a];
            sin_prod *= std::sin(th);
            if (last) w += sin_prod * u[a + 1];
        }
        pts.push_back(w);
        int a = angles - 1;
        while (a >= 0) {
            const int limit = (a == angles - 1) ? m - 1 : m;
            if (idx[a] == limit) {
                idx[a--] = 0;
            } else {
                ++idx[a];
                break;
            }
        }
        if (a < 0) break;
    }
    return pts;
}

inline long integer_dot(const IndexCoords& n, const IndexCoords& g) {
    long d = 0;
    for (std::size_t j = 0; j < n.size(); ++j) d += static_cast<long>(n[j]) * g[j];
    return d;
}

}  // namespace detail

/// theta(Lambda, gamma, h, mu; A): the line-and-measure average of A reduces in
/// Fourier space to the multiplier mu_hat(2 pi (N, e~)) on the modes with
/// (N, gamma) = 0, so
///   theta = (|gamma|/pi) max_{x, e~} | sum_{N != 0, (N,gamma)=0}
///            mu_hat(2 pi (N,e~)) A_N e^{2 pi i (N,x)} |.
/// The maxima are taken over deterministic nested grids.
inline double theta(const TrigPolynomial& a, const DirectionFrame& frame,
                    const AveragingMeasure& mu, const ThetaOptions& opts = {}) {
    if (!a.is_real()) throw std::invalid_argument("theta requires a real vector field");
    const int n = a.lattice.dim();
    if (n < 3) throw std::invalid_argument("sphere grid empty: theta needs n >= 3");

    // Surviving modes: (N, gamma) = 0, N != 0.
    std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXcd>> modes;  // (cartesian N, A_N)
    for (const auto& [m, c] : a.coeffs) {
        if (all_zero(m) || detail::integer_dot(m, frame.gamma_coords) != 0) continue;
        if (c.cwiseAbs().maxCoeff() == 0) continue;
        modes.emplace_back(a.lattice.reciprocal_vector(m), c);
    }
    if (modes.empty()) return 0.0;

    const auto sphere = detail::transverse_sphere_grid(frame, opts.sphere_grid);
    const auto xs = detail::uniform_cell_grid(a.lattice, opts.x_grid);

    double best = 0;
    std::vector<double> mult(modes.size());
    for (const auto& et : sphere) {
        for (std::size_t i = 0; i < modes.size(); ++i)
            mult[i] = mu.transform(kTwoPi * modes[i].first.dot(et));
        for (const auto& x : xs) {
            Eigen::VectorXcd v = Eigen::VectorXcd::Zero(a.components);
            for (std::size_t i = 0; i < modes.size(); ++i) {
                const double ph = kTwoPi * modes[i].first.dot(x);
                v += mult[i] * modes[i].second * complexd(std::cos(ph), std::sin(ph));
            }
            best = std::max(best, v.norm());
        }
    }
    return frame.gamma_norm / kPi * best;
}

struct FourierCriterion {
    double sum = 0;    // sum over N != 0, (N,gamma) = 0 of ||A_N||
    double bound = 0;  // pi / |gamma|
    bool ok = false;
};

/// Dirac-measure sufficient criterion: sum_{N != 0, (N,gamma)=0} ||A_N|| < pi/|gamma|.
inline FourierCriterion fourier_criterion(const TrigPolynomial& a, const DirectionFrame& frame) {
    if (!a.is_real()) throw std::invalid_argument("fourier_criterion requires a real vector field");
    FourierCriterion fc;
    for (const auto& [m, c] : a.coeffs) {
        if (all_zero(m) || detail::integer_dot(m, frame.gamma_coords) != 0) continue;
        fc.sum += c.norm();
    }
    fc.bound = kPi / frame.gamma_norm;
    fc.ok = fc.sum < fc.bound;
    return fc;
}

struct ConditionReport {
    IndexCoords gamma_coords;
    double theta_value = 0;
    bool theta_ok = false;  // theta < 1
    double fourier_sum = 0;
    double fourier_bound = 0;
    bool fourier_ok = false;
    std::string measure;
    int x_grid = 0;
    int sphere_grid = 0;
};

inline ConditionReport evaluate_conditions(const TrigPolynomial& a, const DirectionFrame& frame,
                                           const AveragingMeasure& mu, const ThetaOptions& opts = {}) {
    ConditionReport r;
    r.gamma_coords = frame.gamma_coords;
    r.theta_value = theta(a, frame, mu, opts);
    r.theta_ok = r.theta_value < 1.0;
    const auto fc = fourier_criterion(a, frame);
    r.fourier_sum = fc.sum;
    r.fourier_bound = fc.bound;
    r.fourier_ok = fc.ok;
    r.measure = mu.describe();
    r.x_grid = opts.x_grid;
    r.sphere_grid = opts.sphere_grid;
    return r;
}

/// Evaluates the hypotheses for every primitive gamma with coordinates in
/// [-max_coord, max_coord]^n, ranked by ascending theta (ties: |gamma|, then
/// lexicographic coordinates).
inline std::vector<ConditionReport> search_gamma(const TrigPolynomial& a, const Lattice& lat,
                                                 int max_coord, const AveragingMeasure& mu,
                                                 const ThetaOptions& opts = {}) {
    if (max_coord < 1) throw std::invalid_argument("search_gamma needs max_coord >= 1");
    const int n = lat.dim();
    std::vector<ConditionReport> out;
    IndexCoords g(n, -max_coord);
    while (true) {
        if (!all_zero(g)) {
            int gc = 0;
            for (int v : g) gc = std::gcd(gc, std::abs(v));
            if (gc == 1)
                out.push_back(evaluate_conditions(a, DirectionFrame::from_coords(lat, g), mu, opts));
        }
        int j = n - 1;
        while (j >= 0 && g[j] == max_coord) g[j--] = -max_coord;
        if (j < 0) break;
        ++g[j];
    }
    std::stable_sort(out.begin(), out.end(), [&lat](const ConditionReport& a_, const ConditionReport& b_) {
        if (a_.theta_value != b_.theta_value) return a_.theta_value < b_.theta_value;
        const double na = lat.lattice_vector(a_.gamma_coords).norm();
        const double nb = lat.lattice_vector(b_.gamma_coords).norm();
        if (na != nb) return na < nb;
        return a_.gamma_coords < b_.gamma_coords;
    });
    return out;
}

}  // namespace magbloch
