#pragma once

#include <json.hpp>

#include "magbloch/config.hpp"
#include "magbloch/dirac.hpp"

namespace magbloch {

namespace detail {

inline ThetaOptions theta_options(const RunConfig& cfg) {
    ThetaOptions opts;
    opts.x_grid = cfg.x_grid;
    opts.sphere_grid = cfg.sphere_grid;
    return opts;
}

inline DirectionFrame choose_frame(const RunConfig& cfg) {
    if (!cfg.gamma.empty()) return DirectionFrame::from_coords(cfg.lattice, cfg.gamma);
    const auto ranked = search_gamma(cfg.a, cfg.lattice, cfg.search_max_coord, cfg.measure,
                                     theta_options(cfg));
    return DirectionFrame::from_coords(cfg.lattice, ranked.front().gamma_coords);
}

inline nlohmann::ordered_json condition_json(const ConditionReport& r) {
    nlohmann::ordered_json j;
    j["gamma_coords"] = r.gamma_coords;
    j["theta"] = r.theta_value;
    j["theta_ok"] = r.theta_ok;
    j["fourier_sum"] = r.fourier_sum;
    j["fourier_bound"] = r.fourier_bound;
    j["fourier_ok"] = r.fourier_ok;
    return j;
}

inline std::string out_path(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

/// Probe k on the |(k,gamma)| = pi face with a fixed transverse offset, so the
/// projection guard k in K(gamma) is generically satisfied.
inline Eigen::VectorXd probe_k(const DirectionFrame& frame) {
    Eigen::VectorXd k = thomas_k(frame);
    const auto u = frame.orthonormal_complement();
    const double off[] = {0.37, 0.23, 0.11, 0.07, 0.05};
    for (std::size_t i = 0; i < u.size() && i < 5; ++i) k += off[i] * u[i];
    return k;
}

}  // namespace detail

/// check-conditions: theta and the Fourier criterion, with the gamma search
/// table when enabled. Exit 0 when the best theta < 1, exit 2 otherwise.
inline int cmd_check_conditions(const RunConfig& cfg) {
    const ThetaOptions opts = detail::theta_options(cfg);
    std::vector<ConditionReport> reports;
    if (cfg.search_max_coord >= 1) {
        reports = search_gamma(cfg.a, cfg.lattice, cfg.search_max_coord, cfg.measure, opts);
    } else {
        reports.push_back(evaluate_conditions(
            cfg.a, DirectionFrame::from_coords(cfg.lattice, cfg.gamma), cfg.measure, opts));
    }

    nlohmann::ordered_json j;
    j["measure"] = cfg.measure.describe();
    j["x_grid"] = opts.x_grid;
    j["sphere_grid"] = opts.sphere_grid;
    j["best"] = detail::condition_json(reports.front());
    nlohmann::ordered_json table = nlohmann::ordered_json::array();
    for (const auto& r : reports) table.push_back(detail::condition_json(r));
    j["reports"] = table;
    write_text(detail::out_path(cfg, "conditions.json"), j.dump(2) + "\n");

    std::printf("check-conditions: best gamma %s theta=%.6g (%s), fourier sum=%.6g bound=%.6g\n",
                coords_to_string(reports.front().gamma_coords).c_str(), reports.front().theta_value,
                reports.front().theta_ok ? "theta<1" : "theta>=1", reports.front().fourier_sum,
                reports.front().fourier_bound);
    return reports.front().theta_ok ? 0 : 2;
}

/// bands: band structure CSV over the configured path plus the flat-band scan.
inline int cmd_bands(const RunConfig& cfg) {
    if (cfg.path.empty()) throw std::invalid_argument("bands command needs path.points");
    const PlaneWaveBasis basis = PlaneWaveBasis::build(cfg.lattice, cfg.cutoff, cfg.max_indices);
    const BandStructure bs = band_structure(cfg.a, cfg.v, basis, cfg.path);
    write_bands_csv(detail::out_path(cfg, "bands.csv"), bs);

    std::ostringstream flat;
    if (cfg.path.size() >= 2) {
        const FlatBandReport rep = flat_band_scan(bs, cfg.flat_band_tol);
        flat << "tol = " << fmt17(rep.tol) << "\n";
        for (std::size_t jb = 0; jb < rep.oscillation.size(); ++jb)
            flat << "band " << (jb + 1) << " osc = " << fmt17(rep.oscillation[jb]) << "\n";
        flat << "flagged =";
        for (int f : rep.flagged) flat << " " << (f + 1);
        flat << "\n";
    } else {
        flat << "flat-band scan skipped: single path point\n";
    }
    write_text(detail::out_path(cfg, "flat_bands.txt"), flat.str());
    std::printf("bands: %zu path points, %d plane waves\n", cfg.path.size(), basis.size());
    return 0;
}

/// thomas: s_min(kappa) of the weighted fiber family per lambda; CSV "kappa,s_min".
inline int cmd_thomas(const RunConfig& cfg) {
    const DirectionFrame frame = detail::choose_frame(cfg);
    const PlaneWaveBasis basis = PlaneWaveBasis::build(cfg.lattice, cfg.cutoff, cfg.max_indices);
    for (double lambda : cfg.thomas_lambda) {
        const ThomasProbeReport rep =
            thomas_probe(cfg.a, cfg.v, lambda, frame, basis, cfg.thomas_kappa);
        char name[64];
        std::snprintf(name, sizeof name, "thomas_lambda_%g.csv", lambda);
        write_thomas_csv(detail::out_path(cfg, name), rep);
        std::printf("thomas: lambda=%g gamma=%s tail s_min=%.6g\n", lambda,
                    coords_to_string(frame.gamma_coords).c_str(), rep.tail_min);
    }
    return 0;
}

/// verify: runs the selected probes, writes one report per probe, and returns 3
/// if any hard contract fails (naming the probes in the summary).
inline int cmd_verify(const RunConfig& cfg, std::vector<std::string> probe_names = {}) {
    static const std::vector<std::string> all = {"dirac_square", "projections", "thm31",
                                                 "thm12",        "lemma11",     "bernstein",
                                                 "relative_bound", "thm11"};
    if (probe_names.empty()) probe_names = all;
    for (const auto& p : probe_names)
        if (std::find(all.begin(), all.end(), p) == all.end())
            throw std::invalid_argument("unknown probe: " + p);

    const DirectionFrame frame = detail::choose_frame(cfg);
    const PlaneWaveBasis basis = PlaneWaveBasis::build(cfg.lattice, cfg.cutoff, cfg.max_indices);
    const int n = cfg.lattice.dim();
    std::vector<std::string> failures;
    std::ostringstream summary;

    auto record = [&](const RatioReport& rep) {
        write_text(detail::out_path(cfg, "probe_" + rep.probe + ".txt"), ratio_report_text(rep));
        summary << rep.probe << ": " << (rep.has_contract ? (rep.pass ? "pass" : "FAIL") : "recorded")
                << " max_ratio=" << fmt17(rep.max_ratio) << "\n";
        if (rep.has_contract && !rep.pass) failures.push_back(rep.probe);
    };

    for (const auto& name : probe_names) {
        if (name == "dirac_square") {
            const CliffordRep rep = CliffordRep::build(n);
            double residual = 0;
            std::vector<double> kappas = {0.0, cfg.probe_kappa.empty() ? 3.0 : cfg.probe_kappa.front()};
            for (double kappa : kappas) {
                const FiberPoint fiber = FiberPoint::make(thomas_k(frame), kappa, frame);
                residual = std::max(
                    residual, verify_dirac_square(cfg.a, fiber, basis, rep, 16, cfg.seed + 11));
            }
            const bool ok = residual < 1e-9;
            std::ostringstream txt;
            txt << "probe: dirac_square\nresidual = " << fmt17(residual)
                << "\ncontract: " << (ok ? "pass" : "FAIL") << "\n";
            write_text(detail::out_path(cfg, "probe_dirac_square.txt"), txt.str());
            summary << "dirac_square: " << (ok ? "pass" : "FAIL") << " residual=" << fmt17(residual)
                    << "\n";
            if (!ok) failures.push_back("dirac_square");
        } else if (name == "projections") {
            const CliffordRep rep = CliffordRep::build(n);
            const double kappa = cfg.probe_kappa.empty() ? 3.0 : cfg.probe_kappa.front();
            const FiberPoint fiber = FiberPoint::make(detail::probe_k(frame), kappa, frame);
            const auto [pp, pm] = projections(fiber, basis, rep);
            const GFactors g = g_factors(basis, fiber);
            double algebra = 0;
            algebra = std::max(algebra, (pp.m * pp.m - pp.m).cwiseAbs().maxCoeff());
            algebra = std::max(algebra, (pm.m * pm.m - pm.m).cwiseAbs().maxCoeff());
            algebra = std::max(algebra, (pp.m - pp.m.adjoint()).cwiseAbs().maxCoeff());
            algebra = std::max(algebra, (pp.m * pm.m).cwiseAbs().maxCoeff());
            algebra = std::max(
                algebra,
                (pp.m + pm.m - Eigen::MatrixXcd::Identity(pp.m.rows(), pp.m.cols())).cwiseAbs().maxCoeff());
            double zero313 = 0, norm314 = 0;
            DeterministicRng rng(cfg.seed + 13);
            for (int i = 0; i < basis.size(); ++i) {
                const Eigen::MatrixXcd d = dirac_symbol(basis.indices[i], fiber, rep);
                const Eigen::MatrixXcd bp = pp.m.block(i * rep.M, i * rep.M, rep.M, rep.M);
                const Eigen::MatrixXcd bm = pm.m.block(i * rep.M, i * rep.M, rep.M, rep.M);
                zero313 = std::max(zero313, (bp * d * bp).cwiseAbs().maxCoeff());
                zero313 = std::max(zero313, (bm * d * bm).cwiseAbs().maxCoeff());
                for (int s = 0; s < 3; ++s) {
                    const Eigen::VectorXcd u = rng.complex_gaussian_vector(rep.M);
                    norm314 = std::max(norm314,
                                       std::abs((d * (bp * u)).norm() - g.gplus[i] * (bp * u).norm()));
                    norm314 = std::max(norm314,
                                       std::abs((d * (bm * u)).norm() - g.gminus[i] * (bm * u).norm()));
                }
            }
            const bool ok = algebra < 1e-12 && zero313 < 1e-12 && norm314 < 1e-10;
            std::ostringstream txt;
            txt << "probe: projections\nalgebra_residual = " << fmt17(algebra)
                << "\nidentity_313_residual = " << fmt17(zero313)
                << "\nidentity_314_residual = " << fmt17(norm314)
                << "\ncontract: " << (ok ? "pass" : "FAIL") << "\n";
            write_text(detail::out_path(cfg, "probe_projections.txt"), txt.str());
            summary << "projections: " << (ok ? "pass" : "FAIL") << "\n";
            if (!ok) failures.push_back("projections");
        } else if (name == "thm31") {
            const CliffordRep crep = CliffordRep::build(n);
            std::vector<FiberPoint> fibers;
            for (double kappa : cfg.probe_kappa)
                fibers.push_back(FiberPoint::make(detail::probe_k(frame), kappa, frame));
            const Thm31Report rep = theorem31_probe(cfg.a, fibers, basis, crep, cfg.thm31_a,
                                                    cfg.thm31_delta, std::max(32, cfg.battery),
                                                    cfg.seed + 17);
            std::ostringstream txt;
            txt << "probe: thm31\nseed: " << rep.seed << "\nbattery: " << rep.battery
                << "\nparam a = " << fmt17(rep.a) << "\nparam delta = " << fmt17(rep.delta) << "\n";
            for (std::size_t i = 0; i < rep.kappas.size(); ++i)
                txt << "series kappa=" << rep.kappas[i] << " = " << fmt17(rep.c_envelope[i]) << "\n";
            write_text(detail::out_path(cfg, "probe_thm31.txt"), txt.str());
            summary << "thm31: recorded\n";
        } else if (name == "thm12") {
            const int grid = n <= 3 ? 48 : (n == 4 ? 16 : 8);
            const SampledField w = SampledField::sample(cfg.v, std::vector<int>(n, grid));
            record(probe_thm12(w, cfg.v, frame, basis, cfg.probe_kappa, std::max(32, cfg.battery),
                               cfg.seed + 19));
        } else if (name == "lemma11") {
            const std::vector<Eigen::VectorXd> ks = {Eigen::VectorXd::Zero(n), thomas_k(frame)};
            record(probe_lemma11(cfg.v, frame, basis, ks, cfg.probe_epsilon,
                                 std::max(32, cfg.battery), cfg.seed + 23));
        } else if (name == "bernstein") {
            const double kappa = cfg.bernstein_kappa, av = cfg.bernstein_a;
            auto run = [&](double kap, double aa) {
                const Eigen::VectorXd k = thomas_k(frame);
                const PlaneWaveBasis big = PlaneWaveBasis::build(
                    cfg.lattice, k.norm() + kap + aa + 1.0, cfg.max_indices);
                return probe_bernstein(big, FiberPoint::make(k, kap, frame), aa,
                                       std::max(32, cfg.battery), cfg.seed + 29);
            };
            const RatioReport base = run(kappa, av), a2 = run(kappa, 2.0 * av), k2 = run(2.0 * kappa, av);
            RatioReport rep;
            rep.probe = "bernstein";
            rep.seed = base.seed;
            rep.battery = base.battery;
            rep.params = base.params;
            rep.series.emplace_back("envelope_base", base.max_ratio);
            rep.series.emplace_back("envelope_a_doubled", a2.max_ratio);
            rep.series.emplace_back("envelope_kappa_doubled", k2.max_ratio);
            const double factor = std::pow(2.0, 0.5 + 1.0 / n) * 1.25;
            rep.has_contract = true;
            rep.pass = a2.max_ratio <= factor * base.max_ratio &&
                       k2.max_ratio <= 1.25 * base.max_ratio;
            for (const auto& nt : base.notes) rep.notes.push_back(nt);
            rep.finish();
            record(rep);
        } else if (name == "relative_bound") {
            record(probe_relative_bound(cfg.a, basis, cfg.probe_epsilon, std::max(32, cfg.battery),
                                        cfg.seed + 31));
        } else if (name == "thm11") {
            const TrigPolynomial v2 = TrigPolynomial::zero(cfg.lattice, 1);
            record(probe_thm11(cfg.a, cfg.v, v2, cfg.thomas_lambda.front(), frame, basis,
                               cfg.probe_kappa, std::max(32, cfg.battery), cfg.seed + 37));
        }
    }

    if (!failures.empty()) {
        summary << "FAILED:";
        for (const auto& f : failures) summary << " " << f;
        summary << "\n";
    } else {
        summary << "all contracts pass\n";
    }
    write_text(detail::out_path(cfg, "verify_summary.txt"), summary.str());
    std::printf("%s", summary.str().c_str());
    return failures.empty() ? 0 : 3;
}

}  // namespace magbloch
