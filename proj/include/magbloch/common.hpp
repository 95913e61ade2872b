#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace magbloch {

using complexd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Integer coordinates of a lattice / reciprocal-lattice vector in its basis.
using IndexCoords = std::vector<int>;

inline std::string coords_to_string(const IndexCoords& c) {
    std::string s = "(";
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(c[i]);
    }
    return s + ")";
}

inline IndexCoords negate(const IndexCoords& c) {
    IndexCoords r(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) r[i] = -c[i];
    return r;
}

inline bool all_zero(const IndexCoords& c) {
    for (int v : c)
        if (v != 0) return false;
    return true;
}

}  // namespace magbloch
