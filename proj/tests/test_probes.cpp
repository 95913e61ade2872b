#include <catch2/catch_amalgamated.hpp>

#include "magbloch/io.hpp"
#include "magbloch/probes.hpp"

using namespace magbloch;

namespace {

Lattice cubic(int n) { return Lattice::build(Eigen::MatrixXd::Identity(n, n)); }

DirectionFrame e1_frame(const Lattice& lat) {
    IndexCoords g(lat.dim(), 0);
    g[0] = 1;
    return DirectionFrame::from_coords(lat, g);
}

TrigPolynomial constant_scalar(const Lattice& lat, double c) {
    TrigPolynomial p = TrigPolynomial::zero(lat, 1);
    Eigen::VectorXcd v(1);
    v << c;
    p.set_coeff(IndexCoords(lat.dim(), 0), v);
    return p;
}

TrigPolynomial two_cos_x1(const Lattice& lat) {
    TrigPolynomial p = TrigPolynomial::zero(lat, 1);
    Eigen::VectorXcd one(1);
    one << 1.0;
    p.set_coeff({1, 0, 0}, one);
    p.set_coeff({-1, 0, 0}, one);
    return p;
}

TrigPolynomial random_real_field(const Lattice& lat, int d, const std::vector<IndexCoords>& support,
                                 std::uint64_t seed) {
    DeterministicRng rng(seed);
    TrigPolynomial p = TrigPolynomial::zero(lat, d);
    for (const auto& m : support) {
        const Eigen::VectorXcd c = rng.complex_gaussian_vector(d);
        p.add_coeff(m, c);
        p.add_coeff(negate(m), c.conjugate());
    }
    return p;
}

}  // namespace

TEST_CASE("thm12 probe") {
    const Lattice lat = cubic(3);
    const DirectionFrame frame = e1_frame(lat);
    const PlaneWaveBasis basis = PlaneWaveBasis::build(lat, kTwoPi * 2.2);

    SECTION("constant W decays like kappa^{-1/2} under the closed-form ceiling") {
        const TrigPolynomial w = constant_scalar(lat, 1.4);
        const SampledField ws = SampledField::sample(w, {8, 8, 8});
        const RatioReport rep = probe_thm12(ws, w, frame, basis, {10.0, 40.0}, 32, 1);
        REQUIRE(rep.series.size() == 2);
        for (std::size_t i = 0; i < rep.series.size(); ++i) {
            const double kappa = i == 0 ? 10.0 : 40.0;
            const double ceiling = std::sqrt(frame.gamma_norm / (kTwoPi * kappa));
            CHECK(rep.series[i].second <= ceiling + 1e-12);
        }
        // quadrupling kappa halves the ceiling; the measured max follows within slack
        CHECK(rep.series[1].second <= 0.75 * rep.series[0].second);
        CHECK(rep.pass);
    }
    SECTION("zero W reports zero ratios") {
        const TrigPolynomial w = TrigPolynomial::zero(lat, 1);
        const SampledField ws = SampledField::sample(w, {4, 4, 4});
        const RatioReport rep = probe_thm12(ws, w, frame, basis, {10.0, 20.0}, 32, 2);
        CHECK(rep.max_ratio == 0.0);
    }
    SECTION("cosine W is bounded and non-increasing across doublings") {
        const TrigPolynomial w = two_cos_x1(lat);
        const SampledField ws = SampledField::sample(w, {32, 8, 8});
        const RatioReport rep = probe_thm12(ws, w, frame, basis, {10.0, 20.0, 40.0}, 64, 3);
        CHECK(rep.has_contract);
        CHECK(rep.pass);
        CHECK(rep.max_ratio > 0.0);
        CHECK(std::isfinite(rep.max_ratio));
    }
    SECTION("battery floor") {
        const TrigPolynomial w = constant_scalar(lat, 1.0);
        const SampledField ws = SampledField::sample(w, {4, 4, 4});
        CHECK_THROWS(probe_thm12(ws, w, frame, basis, {10.0}, 8, 4));
    }
}

TEST_CASE("lemma11 probe") {
    const Lattice lat = cubic(3);
    const DirectionFrame frame = e1_frame(lat);
    const PlaneWaveBasis basis = PlaneWaveBasis::build(lat, kTwoPi * 1.8);
    const std::vector<Eigen::VectorXd> ks = {Eigen::VectorXd::Zero(3), thomas_k(frame)};

    SECTION("constant V normalizes to C = 1 at eps = 0") {
        const RatioReport rep =
            probe_lemma11(constant_scalar(lat, -2.0), frame, basis, ks, {0.0, 0.1}, 32, 5);
        CHECK(rep.series[0].second == Catch::Approx(1.0).epsilon(1e-12));
        CHECK(rep.pass);
    }
    SECTION("doubling eps never raises C_eps") {
        const RatioReport rep = probe_lemma11(two_cos_x1(lat), frame, basis, ks,
                                              {0.0, 0.05, 0.1, 0.2, 0.4}, 64, 6);
        CHECK(rep.has_contract);
        CHECK(rep.pass);
        for (std::size_t i = 1; i < rep.series.size(); ++i)
            CHECK(rep.series[i].second <= rep.series[i - 1].second + 1e-12);
        CHECK(std::isfinite(rep.max_ratio));
    }
}

TEST_CASE("bernstein probe") {
    const Lattice lat = cubic(3);
    const DirectionFrame frame = e1_frame(lat);
    const Eigen::VectorXd k = thomas_k(frame);
    const double diam = lat.reciprocal_diameter();
    const double kappa = 24.0, a = 6.0;
    REQUIRE(kappa >= 4.0 * kPi * diam - 1e-12);

    auto run = [&](double kap, double aa, std::uint64_t seed) {
        const PlaneWaveBasis big = PlaneWaveBasis::build(lat, k.norm() + kap + aa + 1.0);
        return probe_bernstein(big, FiberPoint::make(k, kap, frame), aa, 32, seed);
    };

    SECTION("envelope is finite, positive, and exactly quadratured for n = 3") {
        const RatioReport rep = run(kappa, a, 7);
        CHECK(rep.max_ratio > 0.0);
        CHECK(std::isfinite(rep.max_ratio));
        for (const auto& [kname, v] : rep.params)
            if (kname == "quadrature_rel_err") CHECK(v < 1e-12);  // |F|^6 is band-limited
    }
    SECTION("scaling sweeps stay within the prescribed factors") {
        const RatioReport base = run(kappa, a, 7);
        const RatioReport a2 = run(kappa, 2.0 * a, 7);
        const RatioReport k2 = run(2.0 * kappa, a, 7);
        const double factor = std::pow(2.0, 0.5 + 1.0 / 3.0) * 1.25;
        CHECK(a2.max_ratio <= factor * base.max_ratio);
        CHECK(k2.max_ratio <= 1.25 * base.max_ratio);
    }
    SECTION("empty shell degenerates gracefully") {
        const PlaneWaveBasis tiny = PlaneWaveBasis::build(lat, kTwoPi * 1.25);
        const RatioReport rep = probe_bernstein(tiny, FiberPoint::make(k, kappa, frame), a, 32, 8);
        CHECK(rep.series.empty());
        CHECK(!rep.notes.empty());
    }
    SECTION("preconditions") {
        const PlaneWaveBasis big = PlaneWaveBasis::build(lat, kTwoPi * 3.0);
        CHECK_THROWS(probe_bernstein(big, FiberPoint::make(k, 10.0, frame), a, 32, 9));
        CHECK_THROWS(probe_bernstein(big, FiberPoint::make(k, kappa, frame), 1.0, 32, 10));
        CHECK_THROWS(probe_bernstein(big, FiberPoint::make(k, kappa, frame), 13.0, 32, 11));
    }
}

TEST_CASE("relative bound probe") {
    const Lattice lat = cubic(3);
    const PlaneWaveBasis basis = PlaneWaveBasis::build(lat, kTwoPi * 1.8);
    const std::vector<double> eps = {0.0, 0.1, 0.2, 0.4};

    SECTION("zero A gives zero C") {
        const RatioReport rep = probe_relative_bound(TrigPolynomial::zero(lat, 3), basis, eps, 32, 12);
        CHECK(rep.max_ratio == 0.0);
        CHECK(rep.pass);
    }
    SECTION("constant A gives |A| at every eps") {
        TrigPolynomial a = TrigPolynomial::zero(lat, 3);
        Eigen::VectorXcd a0(3);
        a0 << 0.3, -0.4, 1.2;
        a.set_coeff({0, 0, 0}, a0);
        const double mag = a0.real().norm();
        const RatioReport rep = probe_relative_bound(a, basis, eps, 32, 13);
        for (const auto& [name, v] : rep.series) CHECK(v == Catch::Approx(mag).epsilon(1e-10));
    }
    SECTION("two-mode A records a finite non-increasing curve") {
        const TrigPolynomial a = random_real_field(lat, 3, {{1, 0, 0}, {0, 1, 0}}, 57);
        const RatioReport rep = probe_relative_bound(a, basis, eps, 64, 14);
        CHECK(rep.pass);
        for (std::size_t i = 1; i < rep.series.size(); ++i)
            CHECK(rep.series[i].second <= rep.series[i - 1].second + 1e-12);
    }
}

TEST_CASE("thm11 probe") {
    const Lattice lat = cubic(3);
    const DirectionFrame frame = e1_frame(lat);
    const PlaneWaveBasis basis = PlaneWaveBasis::build(lat, kTwoPi * 2.2);
    const TrigPolynomial zeroA = TrigPolynomial::zero(lat, 3);
    const TrigPolynomial zeroV = TrigPolynomial::zero(lat, 1);

    SECTION("free case stays near 1 for lambda <= 0 and checks the sup-form identity") {
        const RatioReport rep =
            probe_thm11(zeroA, zeroV, zeroV, -1.0, frame, basis, {5.0, 10.0, 20.0}, 32, 15);
        CHECK(rep.pass);
        for (const auto& [name, v] : rep.series) CHECK(v >= 0.9);
        for (const auto& [name, v] : rep.params)
            if (name == "sup_form_identity_residual") CHECK(v <= 1e-10);
    }
    SECTION("constant V2 is absorbed into lambda") {
        const TrigPolynomial v1 = two_cos_x1(lat);
        const RatioReport with_c =
            probe_thm11(zeroA, v1, constant_scalar(lat, 2.5), 4.0, frame, basis, {6.0, 12.0}, 32, 16);
        const RatioReport shifted =
            probe_thm11(zeroA, v1, zeroV, 1.5, frame, basis, {6.0, 12.0}, 32, 16);
        REQUIRE(with_c.series.size() == shifted.series.size());
        for (std::size_t i = 0; i < with_c.series.size(); ++i)
            CHECK(with_c.series[i].second == Catch::Approx(shifted.series[i].second).margin(1e-10));
    }
    SECTION("small magnetic A with a cosine potential keeps a positive tail") {
        const TrigPolynomial a = random_real_field(lat, 3, {{0, 1, 0}}, 58).scaled(0.1);
        const RatioReport rep =
            probe_thm11(a, two_cos_x1(lat), zeroV, 0.0, frame, basis, {5.0, 10.0, 20.0, 40.0}, 32, 17);
        CHECK(rep.pass);
        double tail = 0;
        for (const auto& [name, v] : rep.params)
            if (name == "tail_min") tail = v;
        CHECK(tail > 1e-3);
    }
}

TEST_CASE("probe reports are deterministic") {
    const Lattice lat = cubic(3);
    const DirectionFrame frame = e1_frame(lat);
    const PlaneWaveBasis basis = PlaneWaveBasis::build(lat, kTwoPi * 1.8);
    const TrigPolynomial w = two_cos_x1(lat);
    const SampledField ws = SampledField::sample(w, {16, 8, 8});
    const RatioReport r1 = probe_thm12(ws, w, frame, basis, {10.0, 20.0}, 32, 424242);
    const RatioReport r2 = probe_thm12(ws, w, frame, basis, {10.0, 20.0}, 32, 424242);
    CHECK(ratio_report_text(r1) == ratio_report_text(r2));
}
