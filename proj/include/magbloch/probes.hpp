#pragma once

#include <limits>

#include "magbloch/spectrum.hpp"
#include "magbloch/rng.hpp"

namespace magbloch {

/// Ratio statistics of one inequality probe over a deterministic battery.
struct RatioReport {
    std::string probe;
    std::uint64_t seed = 0;
    int battery = 0;
    std::vector<std::pair<std::string, double>> params;
    std::vector<std::pair<std::string, double>> series;
    double max_ratio = 0;
    double min_ratio = 0;
    bool has_contract = false;
    bool pass = true;
    std::vector<std::string> notes;

    void finish() {
        max_ratio = 0;
        min_ratio = series.empty() ? 0 : std::numeric_limits<double>::infinity();
        for (const auto& [name, v] : series) {
            if (!std::isfinite(v) || v < 0)
                throw std::runtime_error("probe " + probe + " produced a non-finite ratio");
            max_ratio = std::max(max_ratio, v);
            min_ratio = std::min(min_ratio, v);
        }
    }
};

namespace detail {

inline void require_battery(int battery) {
    if (battery < 32) throw std::invalid_argument("probe batteries need at least 32 samples");
}

/// Multiplication by w as a dense map from `from`-basis coefficients into
/// `to`-basis coefficients: (w phi)_P = sum_M w_{P-M} phi_M. Exact whenever the
/// `to` ball contains supp(w) + `from` ball.
inline Eigen::MatrixXcd multiplication_matrix(const TrigPolynomial& w, const PlaneWaveBasis& from,
                                              const PlaneWaveBasis& to) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(to.size(), from.size());
    for (int j = 0; j < from.size(); ++j)
        for (const auto& [q, c] : w.coeffs) {
            IndexCoords p(q.size());
            for (std::size_t d = 0; d < q.size(); ++d) p[d] = q[d] + from.indices[j].coords[d];
            const int i = to.find(p);
            if (i >= 0) m(i, j) += c[0];
        }
    return m;
}

inline PlaneWaveBasis extended_basis(const PlaneWaveBasis& basis, double extra) {
    return PlaneWaveBasis::build(basis.lattice, basis.cutoff + extra + 1e-9);
}

inline std::string format_param(const std::string& name, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s=%.6g", name.c_str(), v);
    return buf;
}

}  // namespace detail

/// ||W phi|| <= C ||W||_{n,w} ||L^{1/2} phi||: max ratio over the battery per
/// kappa, with the non-increase of the max along the ascending kappa list (10%
/// slack) recorded as the contract.
inline RatioReport probe_thm12(const SampledField& w_samples, const TrigPolynomial& w_poly,
                               const DirectionFrame& frame, const PlaneWaveBasis& basis,
                               const std::vector<double>& kappa_list, int battery = 64,
                               std::uint64_t seed = 101) {
    detail::require_battery(battery);
    const int n = basis.lattice.dim();
    const double wnorm = weak_norm(w_samples, static_cast<double>(n));
    if (!(wnorm > 0)) {
        RatioReport rep;
        rep.probe = "thm12";
        rep.seed = seed;
        rep.battery = battery;
        rep.notes.push_back("weak norm vanishes; ratios identically zero");
        for (double kappa : kappa_list) rep.series.emplace_back(detail::format_param("kappa", kappa), 0.0);
        rep.finish();
        return rep;
    }
    const PlaneWaveBasis ext = detail::extended_basis(basis, w_poly.degree());
    const Eigen::MatrixXcd mult = detail::multiplication_matrix(w_poly, basis, ext);
    const Eigen::VectorXd k = thomas_k(frame);

    RatioReport rep;
    rep.probe = "thm12";
    rep.seed = seed;
    rep.battery = battery;
    rep.params.emplace_back("weak_norm", wnorm);
    // Single plane waves lead the battery; they are often the extremal vectors.
    std::vector<Eigen::VectorXcd> battery_phi;
    for (int b = 0; b < basis.size(); ++b) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(basis.size());
        e[b] = 1.0;
        battery_phi.push_back(std::move(e));
    }
    {
        DeterministicRng rng(seed);
        for (int s = 0; s < battery; ++s)
            battery_phi.push_back(rng.complex_gaussian_vector(basis.size()));
    }
    for (double kappa : kappa_list) {
        const FiberPoint fiber = FiberPoint::make(k, kappa, frame);
        const Eigen::VectorXcd w = weight_power(basis, fiber, complexd(0.5, 0.0));
        double worst = 0;
        for (const Eigen::VectorXcd& phi : battery_phi) {
            const double num = (mult * phi).norm();
            const double den = wnorm * (w.asDiagonal() * phi).norm();
            worst = std::max(worst, num / den);
        }
        rep.series.emplace_back(detail::format_param("kappa", kappa), worst);
    }
    rep.has_contract = true;
    for (std::size_t i = 1; i < rep.series.size(); ++i)
        if (rep.series[i].second > 1.10 * rep.series[i - 1].second) rep.pass = false;
    rep.finish();
    return rep;
}

/// Smallest empirical C_eps with
///   ||V phi|| <= ||V||_{2,gamma} (eps (sum_N |k_par + 2 pi N_par|^2 |phi_N|^2)^{1/2} + C_eps ||phi||),
/// coefficients in the orthonormal convention (the v(K) factor is absorbed).
inline RatioReport probe_lemma11(const TrigPolynomial& v, const DirectionFrame& frame,
                                 const PlaneWaveBasis& basis,
                                 const std::vector<Eigen::VectorXd>& k_list,
                                 const std::vector<double>& epsilon_list, int battery = 64,
                                 std::uint64_t seed = 102) {
    detail::require_battery(battery);
    const double dnorm = directional_norm(v, frame, 2);
    const PlaneWaveBasis ext = detail::extended_basis(basis, v.degree());
    const Eigen::MatrixXcd mult = detail::multiplication_matrix(v, basis, ext);

    RatioReport rep;
    rep.probe = "lemma11";
    rep.seed = seed;
    rep.battery = battery;
    rep.params.emplace_back("norm_2_gamma", dnorm);
    if (!(dnorm > 0)) {
        rep.notes.push_back("directional norm vanishes; C_eps identically zero");
        for (double eps : epsilon_list) rep.series.emplace_back(detail::format_param("epsilon", eps), 0.0);
        rep.finish();
        return rep;
    }

    // Per-sample data: ||V phi|| / ||V||_{2,gamma}, the parallel seminorm per k, and ||phi||.
    // Single plane waves lead the battery: modes with vanishing parallel momentum
    // are the extremal vectors of the inequality.
    struct Sample {
        double vnorm, phinorm;
        std::vector<double> dpar;
    };
    std::vector<Sample> samples;
    std::vector<Eigen::VectorXcd> battery_phi;
    for (int b = 0; b < basis.size(); ++b) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(basis.size());
        e[b] = 1.0;
        battery_phi.push_back(std::move(e));
    }
    DeterministicRng rng(seed);
    for (int s = 0; s < battery; ++s) battery_phi.push_back(rng.complex_gaussian_vector(basis.size()));
    for (const Eigen::VectorXcd& phi : battery_phi) {
        Sample smp;
        smp.vnorm = (mult * phi).norm() / dnorm;
        smp.phinorm = phi.norm();
        for (const auto& k : k_list) {
            double acc = 0;
            for (int i = 0; i < basis.size(); ++i) {
                const double par = (k + kTwoPi * basis.indices[i].cartesian).dot(frame.e);
                acc += par * par * std::norm(phi[i]);
            }
            smp.dpar.push_back(std::sqrt(acc));
        }
        samples.push_back(std::move(smp));
    }
    for (double eps : epsilon_list) {
        double c = 0;
        for (const auto& smp : samples)
            for (double dpar : smp.dpar)
                c = std::max(c, (smp.vnorm - eps * dpar) / smp.phinorm);
        rep.series.emplace_back(detail::format_param("epsilon", eps), std::max(0.0, c));
    }
    rep.has_contract = true;
    for (std::size_t i = 1; i < rep.series.size(); ++i)
        if (rep.series[i].second > rep.series[i - 1].second + 1e-12) rep.pass = false;
    rep.finish();
    return rep;
}

/// L^q/L^2 ratio for random fields on the momentum shell
///   K_a = {N : | kappa - |k_perp + 2 pi N_perp| | <= a, |k_par + 2 pi N_par| <= a},
/// against the scaling a^{1/2 + 1/n} kappa^{1/2 - 1/n}; q = 2n/(n-2). The L^q norm
/// uses oversampled grid quadrature and reports a refinement error estimate.
inline RatioReport probe_bernstein(const PlaneWaveBasis& basis, const FiberPoint& fiber, double a,
                                   int battery = 32, std::uint64_t seed = 103) {
    detail::require_battery(battery);
    const Lattice& lat = basis.lattice;
    const int n = lat.dim();
    if (n < 3) throw std::invalid_argument("Bernstein probe needs n >= 3");
    const double kappa = fiber.kappa;
    const double diam = lat.reciprocal_diameter();
    if (kappa < 4.0 * kPi * diam - 1e-12)
        throw std::invalid_argument("Bernstein probe needs kappa >= 4 pi diam K*");
    if (!(a >= kPi * diam - 1e-12 && a <= kappa / 2.0 + 1e-12))
        throw std::invalid_argument("Bernstein probe needs pi diam K* <= a <= kappa/2");

    RatioReport rep;
    rep.probe = "bernstein";
    rep.seed = seed;
    rep.battery = battery;
    rep.params.emplace_back("a", a);
    rep.params.emplace_back("kappa", kappa);

    std::vector<int> shell;
    for (int i = 0; i < basis.size(); ++i) {
        const Eigen::VectorXd p = fiber.k + kTwoPi * basis.indices[i].cartesian;
        const auto d = decompose(p, fiber.frame);
        if (std::abs(kappa - d.transverse.norm()) <= a && std::abs(d.parallel) <= a)
            shell.push_back(i);
    }
    rep.params.emplace_back("shell_size", static_cast<double>(shell.size()));
    if (shell.empty()) {
        rep.notes.push_back("degenerate: K_a does not intersect the basis");
        rep.finish();
        return rep;
    }

    const double q = 2.0 * n / (n - 2.0);
    const double scale = std::pow(a, 0.5 + 1.0 / n) * std::pow(kappa, 0.5 - 1.0 / n);

    // Oversampled quadrature grid for ||F||_q.
    std::vector<int> cmax(n, 0);
    for (int i : shell)
        for (int j = 0; j < n; ++j)
            cmax[j] = std::max(cmax[j], std::abs(basis.indices[i].coords[j]));
    auto lq_norm = [&](const Eigen::VectorXcd& coeffs, int oversample) {
        std::vector<int> shape(n);
        long total = 1;
        for (int j = 0; j < n; ++j) {
            shape[j] = oversample * (2 * cmax[j] + 1);
            total *= shape[j];
        }
        // Phase tables, then synthesis grouped by the first coordinate value.
        std::vector<Eigen::MatrixXcd> table(n);
        for (int j = 0; j < n; ++j) {
            table[j].resize(2 * cmax[j] + 1, shape[j]);
            for (int c = -cmax[j]; c <= cmax[j]; ++c)
                for (int i = 0; i < shape[j]; ++i) {
                    const double ph = kTwoPi * c * static_cast<double>(i) / shape[j];
                    table[j](c + cmax[j], i) = complexd(std::cos(ph), std::sin(ph));
                }
        }
        long rest_total = total / shape[0];
        std::map<int, Eigen::VectorXcd> partial;  // first coord -> values on the rest-grid
        for (std::size_t si = 0; si < shell.size(); ++si) {
            const IndexCoords& m = basis.indices[shell[si]].coords;
            auto [it, inserted] = partial.try_emplace(m[0], Eigen::VectorXcd::Zero(rest_total));
            Eigen::VectorXcd& target = it->second;
            std::vector<int> idx(n - 1, 0);
            for (long flat = 0; flat < rest_total; ++flat) {
                complexd w = coeffs[static_cast<long>(si)];
                for (int j = 1; j < n; ++j) w *= table[j](m[j] + cmax[j], idx[j - 1]);
                target[flat] += w;
                int j = 0;
                while (j < n - 1 && ++idx[j] == shape[j + 1]) idx[j++] = 0;
            }
        }
        double acc = 0;
        for (long i0 = 0; i0 < shape[0]; ++i0)
            for (long flat = 0; flat < rest_total; ++flat) {
                complexd val = 0;
                for (const auto& [c0, vals] : partial) val += table[0](c0 + cmax[0], i0) * vals[flat];
                acc += std::pow(std::abs(val), q);
            }
        return std::pow(lat.cell_volume() * acc / static_cast<double>(total), 1.0 / q);
    };

    DeterministicRng rng(seed);
    double envelope = 0;
    double quad_err = 0;
    for (int s = 0; s < battery; ++s) {
        const Eigen::VectorXcd coeffs = rng.complex_gaussian_vector(static_cast<int>(shell.size()));
        const double l2 = std::sqrt(lat.cell_volume()) * coeffs.norm();
        const double lq = lq_norm(coeffs, 4);
        if (s == 0) {
            const double fine = lq_norm(coeffs, 6);
            quad_err = std::abs(fine - lq) / std::max(1e-300, fine);
        }
        envelope = std::max(envelope, lq / (scale * l2));
    }
    rep.params.emplace_back("quadrature_rel_err", quad_err);
    rep.series.emplace_back("envelope", envelope);
    rep.finish();
    return rep;
}

/// Smallest empirical C_eps with
///   || |A| phi || <= eps (sum_j ||d phi/dx_j||^2)^{1/2} + C_eps ||phi||
/// on the k = 0 fiber; the L^2 norm of |A| phi is exact grid quadrature (the
/// integrand is band-limited).
inline RatioReport probe_relative_bound(const TrigPolynomial& a, const PlaneWaveBasis& basis,
                                        const std::vector<double>& epsilon_list, int battery = 64,
                                        std::uint64_t seed = 104) {
    detail::require_battery(battery);
    if (!a.is_real()) throw std::invalid_argument("relative bound probe requires a real field");
    const Lattice& lat = basis.lattice;
    const int n = lat.dim();

    std::vector<int> amax(n, 0), cmaxv(n, 0);
    for (const auto& [m, c] : a.coeffs)
        for (int j = 0; j < n; ++j) amax[j] = std::max(amax[j], std::abs(m[j]));
    for (const auto& idx : basis.indices)
        for (int j = 0; j < n; ++j) cmaxv[j] = std::max(cmaxv[j], std::abs(idx.coords[j]));
    std::vector<int> shape(n);
    long total = 1;
    for (int j = 0; j < n; ++j) {
        shape[j] = 2 * (amax[j] + cmaxv[j]) + 1;
        total *= shape[j];
    }

    // |A|(x) on the grid and per-point plane-wave phases for the basis.
    std::vector<double> amod(static_cast<std::size_t>(total));
    Eigen::MatrixXcd phases(total, basis.size());
    {
        std::vector<int> iv(n, 0);
        for (long flat = 0; flat < total; ++flat) {
            const Eigen::VectorXd x = lat.cell_point(iv, shape);
            amod[static_cast<std::size_t>(flat)] = a.evaluate(x).norm();
            for (int b = 0; b < basis.size(); ++b) {
                const double ph = kTwoPi * basis.indices[b].cartesian.dot(x);
                phases(flat, b) = complexd(std::cos(ph), std::sin(ph));
            }
            int j = 0;
            while (j < n && ++iv[j] == shape[j]) iv[j++] = 0;
        }
    }

    struct Sample {
        double anorm, dnorm, phinorm;
    };
    std::vector<Sample> samples;
    // Single plane waves first (they are extremal for multiplication bounds:
    // a constant phi realizes C_eps = |A| exactly), then the random battery.
    std::vector<Eigen::VectorXcd> probes_phi;
    for (int b = 0; b < basis.size(); ++b) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(basis.size());
        e[b] = 1.0;
        probes_phi.push_back(std::move(e));
    }
    DeterministicRng rng(seed);
    for (int s = 0; s < battery; ++s) probes_phi.push_back(rng.complex_gaussian_vector(basis.size()));
    for (const Eigen::VectorXcd& phi : probes_phi) {
        const Eigen::VectorXcd vals = phases * phi;
        double acc = 0;
        for (long flat = 0; flat < total; ++flat)
            acc += amod[static_cast<std::size_t>(flat)] * amod[static_cast<std::size_t>(flat)] *
                   std::norm(vals[flat]);
        Sample smp;
        smp.anorm = std::sqrt(acc / static_cast<double>(total));
        double grad = 0;
        for (int b = 0; b < basis.size(); ++b)
            grad += std::pow(kTwoPi * basis.indices[b].cartesian.norm(), 2) * std::norm(phi[b]);
        smp.dnorm = std::sqrt(grad);
        smp.phinorm = phi.norm();
        samples.push_back(smp);
    }

    RatioReport rep;
    rep.probe = "relative_bound";
    rep.seed = seed;
    rep.battery = battery;
    for (double eps : epsilon_list) {
        double c = 0;
        for (const auto& smp : samples) c = std::max(c, (smp.anorm - eps * smp.dnorm) / smp.phinorm);
        rep.series.emplace_back(detail::format_param("epsilon", eps), std::max(0.0, c));
    }
    rep.has_contract = true;
    for (std::size_t i = 1; i < rep.series.size(); ++i)
        if (rep.series[i].second > rep.series[i - 1].second + 1e-12) rep.pass = false;
    rep.finish();
    return rep;
}

/// Weighted invertibility per kappa: s_min of L^{-1/2}(H(A) + V1 + V2 - lambda) L^{-1/2},
/// the finite-dimensional transcription of the sup-form statement (the identity
/// sup_{||L^{1/2} psi|| <= 1} |psi^dag M phi| = ||L^{-1/2} M phi|| is asserted on
/// random phi along the way).
inline RatioReport probe_thm11(const TrigPolynomial& a, const TrigPolynomial& v1,
                               const TrigPolynomial& v2, double lambda,
                               const DirectionFrame& frame, const PlaneWaveBasis& basis,
                               const std::vector<double>& kappa_list, int battery = 32,
                               std::uint64_t seed = 105) {
    detail::require_battery(battery);
    TrigPolynomial v = v1;
    for (const auto& [m, c] : v2.coeffs) v.add_coeff(m, c);
    const Eigen::VectorXd k = thomas_k(frame);

    RatioReport rep;
    rep.probe = "thm11";
    rep.seed = seed;
    rep.battery = battery;
    rep.params.emplace_back("lambda", lambda);
    // Norm roles of the two potential parts: the weak-L^{n/2} size of V1 and the
    // directional L^1 size of V2 - lambda.
    {
        const int n = basis.lattice.dim();
        const int grid = n <= 3 ? 24 : 8;
        rep.params.emplace_back(
            "v1_weak_halfn",
            weak_norm(SampledField::sample(v1, std::vector<int>(n, grid)), n / 2.0));
        TrigPolynomial v2shift = v2;
        Eigen::VectorXcd mlam(1);
        mlam << -lambda;
        v2shift.add_coeff(IndexCoords(n, 0), mlam);
        rep.params.emplace_back("v2_minus_lambda_dir1", directional_norm(v2shift, frame, 1, 8));
    }

    double identity_residual = 0;
    for (double kappa : kappa_list) {
        const FiberPoint fiber = FiberPoint::make(k, kappa, frame);
        FiberMatrix fm = assemble_hamiltonian(a, v, fiber, basis);
        fm.m.diagonal().array() -= lambda;
        const Eigen::VectorXcd w = weight_power(basis, fiber, complexd(-0.5, 0.0));
        const Eigen::MatrixXcd scaled = w.asDiagonal() * fm.m * w.asDiagonal();
        rep.series.emplace_back(detail::format_param("kappa", kappa), smallest_singular_value(scaled));

        DeterministicRng rng(seed);
        for (int s = 0; s < battery; ++s) {
            const Eigen::VectorXcd phi = rng.complex_gaussian_vector(basis.size());
            const Eigen::VectorXcd resolventish = w.asDiagonal() * (fm.m * phi);
            const double r = resolventish.norm();
            if (r < 1e-300) continue;
            const Eigen::VectorXcd psi = w.asDiagonal() * (resolventish / r);
            identity_residual =
                std::max(identity_residual, std::abs(std::abs(psi.dot(fm.m * phi)) - r) / std::max(1.0, r));
        }
    }
    rep.params.emplace_back("sup_form_identity_residual", identity_residual);
    rep.has_contract = true;
    const std::size_t start = rep.series.size() / 2;
    double tail = std::numeric_limits<double>::infinity();
    for (std::size_t i = start; i < rep.series.size(); ++i) tail = std::min(tail, rep.series[i].second);
    rep.params.emplace_back("tail_min", tail);
    rep.pass = tail > 0 && identity_residual <= 1e-10;
    rep.finish();
    return rep;
}

}  // namespace magbloch
