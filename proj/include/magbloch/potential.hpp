#pragma once

#include <cmath>
#include <functional>
#include <map>

#include "magbloch/lattice.hpp"

namespace magbloch {

/// Periodic field with finitely many Fourier modes: f(x) = sum_N c_N e^{2 pi i (N,x)}.
/// Physical (real-valued) fields keep the conjugate symmetry c_{-N} = conj(c_N).
struct TrigPolynomial {
    Lattice lattice;
    int components = 1;
    std::map<IndexCoords, Eigen::VectorXcd> coeffs;

    static TrigPolynomial zero(const Lattice& lat, int d) {
        TrigPolynomial p;
        p.lattice = lat;
        p.components = d;
        return p;
    }

    void set_coeff(const IndexCoords& m, const Eigen::VectorXcd& c) {
        if (c.size() != components) throw std::invalid_argument("coefficient has wrong component count");
        coeffs[m] = c;
    }

    void add_coeff(const IndexCoords& m, const Eigen::VectorXcd& c) {
        auto it = coeffs.find(m);
        if (it == coeffs.end())
            set_coeff(m, c);
        else
            it->second += c;
    }

    Eigen::VectorXcd coeff(const IndexCoords& m) const {
        auto it = coeffs.find(m);
        if (it == coeffs.end()) return Eigen::VectorXcd::Zero(components);
        return it->second;
    }

    Eigen::VectorXd mean() const { return coeff(IndexCoords(lattice.dim(), 0)).real(); }

    /// max |2 pi N| over the support.
    double degree() const {
        double d = 0;
        for (const auto& [m, c] : coeffs)
            if (c.norm() > 0) d = std::max(d, kTwoPi * lattice.reciprocal_vector(m).norm());
        return d;
    }

    double real_symmetry_residual() const {
        double r = 0;
        for (const auto& [m, c] : coeffs) {
            auto it = coeffs.find(negate(m));
            Eigen::VectorXcd mirror =
                it == coeffs.end() ? Eigen::VectorXcd::Zero(components) : it->second;
            r = std::max(r, (c - mirror.conjugate()).cwiseAbs().maxCoeff());
        }
        return r;
    }

    bool is_real(double tol = 1e-10) const { return real_symmetry_residual() <= tol; }

    /// Enforce c_{-N} = conj(c_N) by averaging each pair.
    void symmetrize() {
        std::map<IndexCoords, Eigen::VectorXcd> out;
        for (const auto& [m, c] : coeffs) {
            auto it = coeffs.find(negate(m));
            Eigen::VectorXcd mirror =
                it == coeffs.end() ? Eigen::VectorXcd::Zero(components) : it->second;
            out[m] = 0.5 * (c + mirror.conjugate());
        }
        coeffs = std::move(out);
    }

    void prune(double tol = 0.0) {
        for (auto it = coeffs.begin(); it != coeffs.end();)
            it = it->second.cwiseAbs().maxCoeff() <= tol ? coeffs.erase(it) : std::next(it);
    }

    Eigen::VectorXcd evaluate_complex(const Eigen::VectorXd& x) const {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(components);
        for (const auto& [m, c] : coeffs) {
            const double phase = kTwoPi * lattice.reciprocal_vector(m).dot(x);
            v += c * complexd(std::cos(phase), std::sin(phase));
        }
        return v;
    }

    /// Real value at x; rejects fields whose imaginary residual exceeds tol.
    Eigen::VectorXd evaluate(const Eigen::VectorXd& x, double imag_tol = 1e-10) const {
        Eigen::VectorXcd v = evaluate_complex(x);
        if (v.imag().cwiseAbs().maxCoeff() > imag_tol)
            throw std::runtime_error("non-real field: imaginary residual above tolerance");
        return v.real();
    }

    TrigPolynomial scaled(complexd s) const {
        TrigPolynomial p = *this;
        for (auto& [m, c] : p.coeffs) c *= s;
        return p;
    }

    TrigPolynomial minus(const TrigPolynomial& other) const {
        TrigPolynomial p = *this;
        for (const auto& [m, c] : other.coeffs) p.add_coeff(m, -c);
        return p;
    }
};

/// Real d-vector samples on the uniform grid x(i) = sum_j (i_j/m_j) E_j of K,
/// stored with the first coordinate fastest.
struct SampledField {
    Lattice lattice;
    std::vector<int> shape;
    int components = 1;
    Eigen::MatrixXd samples;  // (prod shape) x components

    long size() const {
        long s = 1;
        for (int m : shape) s *= m;
        return s;
    }

    long flat_index(const std::vector<int>& i) const {
        long idx = 0;
        for (int j = static_cast<int>(shape.size()) - 1; j >= 0; --j) idx = idx * shape[j] + i[j];
        return idx;
    }

    static SampledField from_function(const Lattice& lat, std::vector<int> shape, int d,
                                      const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f) {
        SampledField s;
        s.lattice = lat;
        s.components = d;
        for (int m : shape)
            if (m <= 0) throw std::invalid_argument("grid shape must be strictly positive");
        s.shape = std::move(shape);
        s.samples.resize(s.size(), d);
        const int n = lat.dim();
        std::vector<int> i(n, 0);
        for (long flat = 0; flat < s.size(); ++flat) {
            s.samples.row(flat) = f(lat.cell_point(i, s.shape)).transpose();
            int j = 0;
            while (j < n && ++i[j] == s.shape[j]) i[j++] = 0;
        }
        return s;
    }

    static SampledField sample(const TrigPolynomial& p, std::vector<int> shape) {
        return from_function(p.lattice, std::move(shape), p.components,
                             [&p](const Eigen::VectorXd& x) { return p.evaluate(x); });
    }
};

/// Discrete Fourier analysis of a sampled field over the index ball |2 pi N| <= cutoff.
/// phi_N = grid mean of phi(x) e^{-2 pi i (N,x)}; conjugate symmetry is enforced.
inline TrigPolynomial fourier_coefficients(const SampledField& f, double cutoff,
                                           long cap = kDefaultIndexCap) {
    const Lattice& lat = f.lattice;
    const int n = lat.dim();
    auto indices = enumerate_indices(lat, cutoff, cap);
    int max_coord = 0;
    for (const auto& idx : indices)
        for (int j = 0; j < n; ++j) max_coord = std::max(max_coord, std::abs(idx.coords[j]));
    for (int j = 0; j < n; ++j)
        if (f.shape[j] < 2 * max_coord + 1)
            throw std::runtime_error("aliasing risk: grid does not resolve the requested cutoff");

    // Per-dimension phase tables e^{-2 pi i q i_j / m_j}.
    std::vector<Eigen::MatrixXcd> table(n);
    for (int j = 0; j < n; ++j) {
        table[j].resize(2 * max_coord + 1, f.shape[j]);
        for (int q = -max_coord; q <= max_coord; ++q)
            for (int i = 0; i < f.shape[j]; ++i) {
                const double ph = -kTwoPi * q * static_cast<double>(i) / f.shape[j];
                table[j](q + max_coord, i) = complexd(std::cos(ph), std::sin(ph));
            }
    }

    TrigPolynomial p = TrigPolynomial::zero(lat, f.components);
    const long total = f.size();
    for (const auto& idx : indices) {
        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(f.components);
        std::vector<int> i(n, 0);
        for (long flat = 0; flat < total; ++flat) {
            complexd w = 1.0;
            for (int j = 0; j < n; ++j) w *= table[j](idx.coords[j] + max_coord, i[j]);
            acc += w * f.samples.row(flat).transpose().cast<complexd>();
            int j = 0;
            while (j < n && ++i[j] == f.shape[j]) i[j++] = 0;
        }
        p.set_coeff(idx.coords, acc / static_cast<double>(total));
    }
    p.symmetrize();
    return p;
}

struct MollifierSplit {
    TrigPolynomial smooth;    // A^(0): coefficients scaled by the frequency window
    TrigPolynomial residual;  // A^(1) = A - A^(0)
};

/// Tensor-product Fejer frequency window: w_r(N) = prod_j max(0, 1 - |2 pi N_j| / r),
/// applied diagonally to the coefficients. Window is 1 at N = 0, so the mean is kept.
inline MollifierSplit mollify(const TrigPolynomial& a, double r) {
    if (!(r > 0)) throw std::invalid_argument("mollifier bandwidth r must be positive");
    MollifierSplit out;
    out.smooth = TrigPolynomial::zero(a.lattice, a.components);
    out.residual = TrigPolynomial::zero(a.lattice, a.components);
    for (const auto& [m, c] : a.coeffs) {
        const Eigen::VectorXd cart = a.lattice.reciprocal_vector(m);
        double w = 1.0;
        for (int j = 0; j < a.lattice.dim(); ++j)
            w *= std::max(0.0, 1.0 - kTwoPi * std::abs(cart[j]) / r);
        out.smooth.set_coeff(m, c * w);
        out.residual.set_coeff(m, c * (1.0 - w));
    }
    return out;
}

inline MollifierSplit mollify(const SampledField& a, double r, double cutoff) {
    return mollify(fourier_coefficients(a, cutoff), r);
}

/// Weak-L^p norm of the empirical grid measure: with |samples| sorted descending
/// as w_1 >= ... >= w_m, the sup over levels is max_i w_i (i v(K)/m)^{1/p}.
inline double weak_norm(const SampledField& f, double p) {
    if (!(p >= 1)) throw std::invalid_argument("weak norm requires p >= 1");
    if (f.size() == 0) throw std::invalid_argument("weak norm of empty grid");
    std::vector<double> w(static_cast<std::size_t>(f.size()));
    for (long i = 0; i < f.size(); ++i) w[static_cast<std::size_t>(i)] = f.samples.row(i).norm();
    std::sort(w.begin(), w.end(), std::greater<double>());
    const double cell = f.lattice.cell_volume() / static_cast<double>(f.size());
    double best = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
        best = std::max(best, w[i] * std::pow(static_cast<double>(i + 1) * cell, 1.0 / p));
    return best;
}

/// Same sup restricted to the smallest superlevel sets: only the top
/// floor(tail_fraction * m) order statistics participate. This is the finite-grid
/// surrogate for the large-t limsup functional; for bounded fields it vanishes
/// as tail_fraction -> 0.
inline double weak_norm_tail(const SampledField& f, double p, double tail_fraction) {
    if (!(tail_fraction > 0 && tail_fraction <= 1))
        throw std::invalid_argument("tail_fraction must lie in (0, 1]");
    if (!(p >= 1)) throw std::invalid_argument("weak norm requires p >= 1");
    std::vector<double> w(static_cast<std::size_t>(f.size()));
    for (long i = 0; i < f.size(); ++i) w[static_cast<std::size_t>(i)] = f.samples.row(i).norm();
    std::sort(w.begin(), w.end(), std::greater<double>());
    const double cell = f.lattice.cell_volume() / static_cast<double>(f.size());
    const auto limit = static_cast<std::size_t>(std::floor(tail_fraction * static_cast<double>(w.size())));
    double best = 0;
    for (std::size_t i = 0; i < limit; ++i)
        best = std::max(best, w[i] * std::pow(static_cast<double>(i + 1) * cell, 1.0 / p));
    return best;
}

namespace detail {

// Nodes/weights of 8-point Gauss-Legendre on [0,1].
inline const std::vector<std::pair<double, double>>& gauss8() {
    static const std::vector<std::pair<double, double>> gl = [] {
        const double x[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                             0.9602898564975363};
        const double w[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                             0.1012285362903763};
        std::vector<std::pair<double, double>> out;
        for (int i = 3; i >= 0; --i) out.emplace_back(0.5 * (1.0 - x[i]), 0.5 * w[i]);
        for (int i = 0; i < 4; ++i) out.emplace_back(0.5 * (1.0 + x[i]), 0.5 * w[i]);
        return out;
    }();
    return gl;
}

inline std::vector<Eigen::VectorXd> uniform_cell_grid(const Lattice& lat, int per_dim) {
    const int n = lat.dim();
    std::vector<int> shape(n, per_dim);
    std::vector<Eigen::VectorXd> pts;
    std::vector<int> i(n, 0);
    long total = 1;
    for (int j = 0; j < n; ++j) total *= per_dim;
    pts.reserve(static_cast<std::size_t>(total));
    for (long flat = 0; flat < total; ++flat) {
        pts.push_back(lat.cell_point(i, shape));
        int j = 0;
        while (j < n && ++i[j] == per_dim) i[j++] = 0;
    }
    return pts;
}

}  // namespace detail

/// Directional norm: ess-sup over a uniform x-grid of (int_0^1 |f(x - xi gamma)|^p dxi)^{1/p}.
/// p = 2 uses the exact Fourier reduction of the xi-average; p = 1 uses composite
/// Gauss-Legendre quadrature in xi.
inline double directional_norm(const TrigPolynomial& f, const DirectionFrame& frame, int p,
                               int x_grid = 32) {
    if (p != 1 && p != 2) throw std::invalid_argument("directional norm supports p in {1, 2}");
    const auto pts = detail::uniform_cell_grid(f.lattice, x_grid);

    if (p == 2) {
        // int_0^1 |f|^2 dxi = sum over coefficient pairs with (N - M, gamma) = 0.
        std::map<IndexCoords, complexd> g;
        for (const auto& [mn, cn] : f.coeffs)
            for (const auto& [mm, cm] : f.coeffs) {
                long dot = 0;
                IndexCoords q(mn.size());
                for (std::size_t j = 0; j < mn.size(); ++j) {
                    q[j] = mn[j] - mm[j];
                    dot += static_cast<long>(q[j]) * frame.gamma_coords[j];
                }
                if (dot != 0) continue;
                g[q] += cm.dot(cn);  // sum_c cn_c conj(cm_c); Eigen dot conjugates its first argument
            }
        double best = 0;
        for (const auto& x : pts) {
            complexd v = 0;
            for (const auto& [q, c] : g) {
                const double ph = kTwoPi * f.lattice.reciprocal_vector(q).dot(x);
                v += c * complexd(std::cos(ph), std::sin(ph));
            }
            best = std::max(best, std::max(0.0, v.real()));
        }
        return std::sqrt(best);
    }

    // p = 1: the xi-integrand |f(x - xi gamma)| comes from a trig polynomial in xi
    // with integer frequencies (N, gamma); panel count tracks its degree.
    long qmax = 0;
    for (const auto& [m, c] : f.coeffs) {
        long dot = 0;
        for (std::size_t j = 0; j < m.size(); ++j) dot += static_cast<long>(m[j]) * frame.gamma_coords[j];
        qmax = std::max(qmax, std::abs(dot));
    }
    const int panels = std::max<long>(16, 4 * qmax);
    double best = 0;
    for (const auto& x : pts) {
        // a_N = c_N e^{2 pi i (N,x)}, then g(xi) = sum a_N e^{-2 pi i (N,gamma) xi}.
        std::vector<std::pair<long, Eigen::VectorXcd>> modes;
        modes.reserve(f.coeffs.size());
        for (const auto& [m, c] : f.coeffs) {
            long dot = 0;
            for (std::size_t j = 0; j < m.size(); ++j)
                dot += static_cast<long>(m[j]) * frame.gamma_coords[j];
            const double ph = kTwoPi * f.lattice.reciprocal_vector(m).dot(x);
            modes.emplace_back(dot, c * complexd(std::cos(ph), std::sin(ph)));
        }
        double integral = 0;
        for (int pa = 0; pa < panels; ++pa)
            for (const auto& [node, wt] : detail::gauss8()) {
                const double xi = (pa + node) / panels;
                Eigen::VectorXcd v = Eigen::VectorXcd::Zero(f.components);
                for (const auto& [q, a] : modes) {
                    const double ph = -kTwoPi * static_cast<double>(q) * xi;
                    v += a * complexd(std::cos(ph), std::sin(ph));
                }
                integral += wt / panels * v.norm();
            }
        best = std::max(best, integral);
    }
    return best;
}

/// Average of f over the line segment {x - xi gamma : xi in [0,1]}: keeps exactly
/// the coefficients with (N, gamma) = 0 (the xi-integral kills the rest).
inline TrigPolynomial line_average(const TrigPolynomial& f, const DirectionFrame& frame) {
    TrigPolynomial out = TrigPolynomial::zero(f.lattice, f.components);
    for (const auto& [m, c] : f.coeffs) {
        long dot = 0;
        for (std::size_t j = 0; j < m.size(); ++j) dot += static_cast<long>(m[j]) * frame.gamma_coords[j];
        if (dot == 0) out.set_coeff(m, c);
    }
    return out;
}

}  // namespace magbloch
