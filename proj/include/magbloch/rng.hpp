#pragma once

#include <random>

#include "magbloch/common.hpp"

namespace magbloch {

/// Seeded generator with fully specified output (mt19937_64 + explicit
/// Box-Muller), so batteries reproduce bit-for-bit across platforms and runs.
class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t seed) : gen_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(kTwoPi * u2);
        have_spare_ = true;
        return r * std::cos(kTwoPi * u2);
    }

    complexd complex_gaussian() {
        const double re = gaussian();
        const double im = gaussian();
        return complexd(re, im) / std::sqrt(2.0);
    }

    Eigen::VectorXcd complex_gaussian_vector(int size) {
        Eigen::VectorXcd v(size);
        for (int i = 0; i < size; ++i) v[i] = complex_gaussian();
        return v;
    }

    /// Gaussian coefficients on the listed positions of a length-`size` vector.
    Eigen::VectorXcd complex_gaussian_on(const std::vector<int>& positions, int size) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(size);
        for (int p : positions) v[p] = complex_gaussian();
        return v;
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0;
    bool have_spare_ = false;
};

}  // namespace magbloch
