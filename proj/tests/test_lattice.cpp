#include <catch2/catch_amalgamated.hpp>

#include "magbloch/lattice.hpp"

using namespace magbloch;

namespace {

Lattice cubic(int n) { return Lattice::build(Eigen::MatrixXd::Identity(n, n)); }

// Independent oracle: count integer points m with |2 pi sum m_j E*_j| <= cutoff
// by scanning a generous box.
long ball_count_oracle(const Lattice& lat, double cutoff, int box) {
    const int n = lat.dim();
    long count = 0;
    std::vector<int> m(n, -box);
    while (true) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < n; ++j) v += m[j] * lat.reciprocal_basis().row(j).transpose();
        if (kTwoPi * v.norm() <= cutoff) ++count;
        int j = n - 1;
        while (j >= 0 && m[j] == box) m[j--] = -box;
        if (j < 0) break;
        ++m[j];
    }
    return count;
}

}  // namespace

TEST_CASE("cubic lattice is self-dual") {
    const Lattice lat = cubic(3);
    CHECK(lat.biorthogonality_residual() < 1e-12);
    CHECK(lat.cell_volume() == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(lat.reciprocal_cell_volume() == Catch::Approx(1.0).epsilon(1e-12));
    CHECK((lat.reciprocal_basis() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(lat.reciprocal_diameter() == Catch::Approx(std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("anisotropic lattice gets the inverse-transpose reciprocal") {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3, 3);
    b.diagonal() << 2, 1, 1;
    const Lattice lat = Lattice::build(b);
    CHECK(lat.cell_volume() == Catch::Approx(2.0).epsilon(1e-12));
    CHECK(lat.reciprocal_cell_volume() == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(lat.reciprocal_basis()(0, 0) == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(lat.reciprocal_basis()(1, 1) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("skew basis reciprocal matches the inverse-transpose oracle") {
    Eigen::MatrixXd b(3, 3);
    b << 1, 0, 0, 0.5, std::sqrt(3.0) / 2.0, 0, 0, 0, 1;
    const Lattice lat = Lattice::build(b);
    const Eigen::MatrixXd oracle = b.inverse().transpose();
    CHECK((lat.reciprocal_basis() - oracle).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(lat.biorthogonality_residual() < 1e-12);
    CHECK(lat.cell_volume() * lat.reciprocal_cell_volume() == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degenerate basis is rejected") {
    Eigen::MatrixXd b(3, 3);
    b << 1, 0, 0, 2, 0, 0, 0, 0, 1;
    CHECK_THROWS_WITH(Lattice::build(b), Catch::Matchers::ContainsSubstring("degenerate lattice"));
}

TEST_CASE("decompose splits along and across the direction") {
    const Lattice lat = cubic(3);
    const DirectionFrame frame = DirectionFrame::from_coords(lat, {1, 0, 0});
    CHECK(frame.e.norm() == Catch::Approx(1.0).epsilon(1e-14));

    SECTION("x = e") {
        const auto d = decompose(frame.e, frame);
        CHECK(d.parallel == Catch::Approx(1.0).epsilon(1e-14));
        CHECK(d.transverse.norm() < 1e-14);
    }
    SECTION("x orthogonal to e") {
        Eigen::Vector3d x(0, 2, -1);
        const auto d = decompose(x, frame);
        CHECK(d.parallel == 0.0);
        CHECK((d.transverse - x).norm() < 1e-14);
    }
    SECTION("mixed vector") {
        Eigen::Vector3d x(3, 4, 0);
        const auto d = decompose(x, frame);
        CHECK(d.parallel == Catch::Approx(3.0));
        CHECK((d.transverse - Eigen::Vector3d(0, 4, 0)).norm() < 1e-14);
    }
    SECTION("idempotent on the transverse part") {
        Eigen::Vector3d x(0.3, -1.2, 0.7);
        const auto d = decompose(x, frame);
        const auto dd = decompose(d.transverse, frame);
        CHECK(std::abs(dd.parallel) < 1e-14);
        CHECK((dd.transverse - d.transverse).norm() < 1e-14);
    }
}

TEST_CASE("index enumeration matches the brute-force ball scan") {
    const Lattice lat3 = cubic(3);
    auto idx = enumerate_indices(lat3, kTwoPi * 1.25);
    CHECK(idx.size() == 7);  // origin and the six +-E*_j (face diagonals enter at sqrt 2)
    CHECK(static_cast<long>(idx.size()) == ball_count_oracle(lat3, kTwoPi * 1.25, 3));
    CHECK(static_cast<long>(enumerate_indices(lat3, kTwoPi * 1.5).size()) ==
          ball_count_oracle(lat3, kTwoPi * 1.5, 3));

    const Lattice lat2 = cubic(2);
    auto idx2 = enumerate_indices(lat2, kTwoPi * 1.0);
    CHECK(idx2.size() == 5);
    CHECK(static_cast<long>(idx2.size()) == ball_count_oracle(lat2, kTwoPi * 1.0, 2));

    SECTION("tiny cutoff keeps only the origin") {
        auto only = enumerate_indices(lat3, 0.5 * kTwoPi * 0.9);
        REQUIRE(only.size() == 1);
        CHECK(all_zero(only[0].coords));
    }
    SECTION("deterministic lexicographic order and negation closure") {
        auto sorted = idx;
        std::sort(sorted.begin(), sorted.end(),
                  [](const ReciprocalIndex& a, const ReciprocalIndex& b) { return a.coords < b.coords; });
        for (std::size_t i = 0; i < idx.size(); ++i) CHECK(idx[i].coords == sorted[i].coords);
        for (const auto& r : idx) {
            const IndexCoords neg = negate(r.coords);
            CHECK(std::any_of(idx.begin(), idx.end(),
                              [&](const ReciprocalIndex& s) { return s.coords == neg; }));
        }
    }
    SECTION("cached cartesian agrees with recomputation") {
        for (const auto& r : idx)
            CHECK((r.cartesian - lat3.reciprocal_vector(r.coords)).norm() == 0.0);
    }
    SECTION("cap triggers the size guard") {
        CHECK_THROWS_WITH(enumerate_indices(lat3, kTwoPi * 20, 100),
                          Catch::Matchers::ContainsSubstring("basis too large"));
    }
}

TEST_CASE("skew lattice enumeration is negation-closed") {
    Eigen::MatrixXd b(3, 3);
    b << 1, 0, 0, 0.5, std::sqrt(3.0) / 2.0, 0, 0.1, 0.2, 1.3;
    const Lattice lat = Lattice::build(b);
    auto idx = enumerate_indices(lat, kTwoPi * 2.2);
    CHECK(static_cast<long>(idx.size()) == ball_count_oracle(lat, kTwoPi * 2.2, 8));
    for (const auto& r : idx) {
        const IndexCoords neg = negate(r.coords);
        CHECK(std::any_of(idx.begin(), idx.end(),
                          [&](const ReciprocalIndex& s) { return s.coords == neg; }));
    }
}
