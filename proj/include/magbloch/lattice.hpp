#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "magbloch/common.hpp"

namespace magbloch {

/// Period lattice with its reciprocal basis (E*_j, E_l) = delta_jl.
/// Rows of basis() are the period vectors E_j, rows of reciprocal_basis()
/// are the dual vectors E*_j. Immutable after construction.
class Lattice {
public:
    Lattice() = default;  // empty; real lattices come from build()

    static Lattice build(const Eigen::MatrixXd& basis_rows) {
        if (basis_rows.rows() != basis_rows.cols() || basis_rows.rows() < 2)
            throw std::invalid_argument("lattice basis must be a square matrix, n >= 2");
        const int n = static_cast<int>(basis_rows.rows());
        const double det = basis_rows.determinant();
        double scale = 1.0;
        for (int j = 0; j < n; ++j) scale *= basis_rows.row(j).norm();
        if (!(std::abs(det) > 1e-12 * scale))
            throw std::invalid_argument("degenerate lattice: basis vectors are linearly dependent");

        Lattice lat;
        lat.n_ = n;
        lat.basis_ = basis_rows;
        // Biorthogonality: R * B^T = I, so R = (B^T)^{-1} = (B^{-1})^T.
        lat.reciprocal_ = basis_rows.inverse().transpose();
        lat.cell_volume_ = std::abs(det);
        lat.reciprocal_cell_volume_ = 1.0 / lat.cell_volume_;
        lat.reciprocal_diameter_ = parallelepiped_diameter(lat.reciprocal_);
        return lat;
    }

    int dim() const { return n_; }
    const Eigen::MatrixXd& basis() const { return basis_; }
    const Eigen::MatrixXd& reciprocal_basis() const { return reciprocal_; }
    double cell_volume() const { return cell_volume_; }
    double reciprocal_cell_volume() const { return reciprocal_cell_volume_; }
    double reciprocal_diameter() const { return reciprocal_diameter_; }

    /// Cartesian vector of the reciprocal index N = sum m_j E*_j.
    Eigen::VectorXd reciprocal_vector(const IndexCoords& m) const {
        check_coords(m);
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n_);
        for (int j = 0; j < n_; ++j) v += m[j] * reciprocal_.row(j).transpose();
        return v;
    }

    /// Cartesian vector of the lattice point gamma = sum g_j E_j.
    Eigen::VectorXd lattice_vector(const IndexCoords& g) const {
        check_coords(g);
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n_);
        for (int j = 0; j < n_; ++j) v += g[j] * basis_.row(j).transpose();
        return v;
    }

    /// Uniform grid point x = sum (i_j / m_j) E_j of the fundamental cell.
    Eigen::VectorXd cell_point(const std::vector<int>& i, const std::vector<int>& shape) const {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n_);
        for (int j = 0; j < n_; ++j)
            v += (static_cast<double>(i[j]) / shape[j]) * basis_.row(j).transpose();
        return v;
    }

    double biorthogonality_residual() const {
        Eigen::MatrixXd g = reciprocal_ * basis_.transpose();
        return (g - Eigen::MatrixXd::Identity(n_, n_)).cwiseAbs().maxCoeff();
    }

private:
    void check_coords(const IndexCoords& c) const {
        if (static_cast<int>(c.size()) != n_)
            throw std::invalid_argument("coordinate vector has wrong dimension");
    }

    // Longest diagonal of the cell spanned by the rows: max over sign patterns
    // of |sum_j s_j R_j|.
    static double parallelepiped_diameter(const Eigen::MatrixXd& rows) {
        const int n = static_cast<int>(rows.rows());
        double best = 0.0;
        for (long mask = 0; mask < (1L << (n - 1)); ++mask) {
            Eigen::VectorXd v = rows.row(0).transpose();
            for (int j = 1; j < n; ++j) {
                const double s = (mask >> (j - 1)) & 1 ? -1.0 : 1.0;
                v += s * rows.row(j).transpose();
            }
            best = std::max(best, v.norm());
        }
        return best;
    }

    int n_ = 0;
    Eigen::MatrixXd basis_, reciprocal_;
    double cell_volume_ = 0, reciprocal_cell_volume_ = 0, reciprocal_diameter_ = 0;
};

/// Reciprocal-lattice index with its cached Cartesian vector.
struct ReciprocalIndex {
    IndexCoords coords;
    Eigen::VectorXd cartesian;

    static ReciprocalIndex make(const Lattice& lat, IndexCoords m) {
        ReciprocalIndex r;
        r.cartesian = lat.reciprocal_vector(m);
        r.coords = std::move(m);
        return r;
    }
};

/// Distinguished lattice direction gamma with unit vector e = gamma/|gamma|.
struct DirectionFrame {
    IndexCoords gamma_coords;
    Eigen::VectorXd gamma;
    Eigen::VectorXd e;
    double gamma_norm = 0;

    static DirectionFrame from_coords(const Lattice& lat, IndexCoords g) {
        if (all_zero(g)) throw std::invalid_argument("direction gamma must be a nonzero lattice vector");
        DirectionFrame f;
        f.gamma = lat.lattice_vector(g);
        f.gamma_norm = f.gamma.norm();
        f.e = f.gamma / f.gamma_norm;
        f.gamma_coords = std::move(g);
        return f;
    }

    /// Deterministic orthonormal basis of the hyperplane orthogonal to e
    /// (Gram-Schmidt over the standard basis, in order).
    std::vector<Eigen::VectorXd> orthonormal_complement() const {
        const int n = static_cast<int>(e.size());
        std::vector<Eigen::VectorXd> out;
        for (int j = 0; j < n && static_cast<int>(out.size()) < n - 1; ++j) {
            Eigen::VectorXd v = Eigen::VectorXd::Unit(n, j);
            v -= v.dot(e) * e;
            for (const auto& u : out) v -= v.dot(u) * u;
            const double norm = v.norm();
            if (norm > 1e-8) out.push_back(v / norm);
        }
        if (static_cast<int>(out.size()) != n - 1)
            throw std::runtime_error("failed to build orthonormal complement");
        return out;
    }
};

struct Decomposition {
    double parallel = 0;       // (x, e)
    Eigen::VectorXd transverse;  // x - (x,e) e
};

inline Decomposition decompose(const Eigen::VectorXd& x, const DirectionFrame& frame) {
    Decomposition d;
    d.parallel = x.dot(frame.e);
    d.transverse = x - d.parallel * frame.e;
    return d;
}

inline constexpr long kDefaultIndexCap = 200000;

/// All N in the reciprocal lattice with |2 pi (N + center)| <= cutoff, in
/// lexicographic coordinate order. The optional integer center re-centers the
/// truncation ball without changing the index labels.
inline std::vector<ReciprocalIndex> enumerate_indices(const Lattice& lat, double cutoff,
                                                      long cap = kDefaultIndexCap,
                                                      const IndexCoords* center = nullptr) {
    if (!(cutoff > 0)) throw std::invalid_argument("cutoff must be positive");
    const int n = lat.dim();
    IndexCoords c0(n, 0);
    if (center) {
        if (static_cast<int>(center->size()) != n)
            throw std::invalid_argument("center has wrong dimension");
        c0 = *center;
    }
    // |m_j + c_j| = |(N + C, E_j)| <= (cutoff / 2 pi) |E_j|.
    std::vector<int> lo(n), hi(n);
    for (int j = 0; j < n; ++j) {
        const int b = static_cast<int>(std::floor(cutoff / kTwoPi * lat.basis().row(j).norm() + 1e-12));
        lo[j] = -b - std::abs(c0[j]) - 1;
        hi[j] = b + std::abs(c0[j]) + 1;
    }
    std::vector<ReciprocalIndex> out;
    IndexCoords m(n, lo[0]);
    for (int j = 0; j < n; ++j) m[j] = lo[j];
    while (true) {
        IndexCoords shifted(n);
        for (int j = 0; j < n; ++j) shifted[j] = m[j] + c0[j];
        if (lat.reciprocal_vector(shifted).norm() * kTwoPi <= cutoff) {
            out.push_back(ReciprocalIndex::make(lat, m));
            if (static_cast<long>(out.size()) > cap)
                throw std::runtime_error("basis too large: index count exceeds cap " + std::to_string(cap));
        }
        int j = n - 1;
        while (j >= 0 && m[j] == hi[j]) m[j--] = lo[j];
        if (j < 0) break;
        ++m[j];
    }
    std::sort(out.begin(), out.end(),
              [](const ReciprocalIndex& a, const ReciprocalIndex& b) { return a.coords < b.coords; });
    return out;
}

}  // namespace magbloch
