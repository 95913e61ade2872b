#pragma once

#include "magbloch/potential.hpp"

namespace magbloch {

/// Complex quasimomentum k + i kappa e with the distinguished direction e = gamma/|gamma|.
struct FiberPoint {
    Eigen::VectorXd k;
    double kappa = 0;
    DirectionFrame frame;

    static FiberPoint make(Eigen::VectorXd k, double kappa, DirectionFrame frame) {
        if (kappa < 0) throw std::invalid_argument("kappa must be nonnegative");
        FiberPoint f;
        f.k = std::move(k);
        f.kappa = kappa;
        f.frame = std::move(frame);
        return f;
    }

    bool on_thomas_face(double tol = 1e-12) const {
        return std::abs(std::abs(k.dot(frame.gamma)) - kPi) <= tol;
    }
};

/// Center of the |(k, gamma)| = pi face: k = (pi/|gamma|) e.
inline Eigen::VectorXd thomas_k(const DirectionFrame& frame) {
    return (kPi / frame.gamma_norm) * frame.e;
}

/// Galerkin truncation of L^2(K): plane waves e^{2 pi i (N,x)} / sqrt(v(K)) for
/// all N with |2 pi (N + center)| <= cutoff, in deterministic order.
struct PlaneWaveBasis {
    Lattice lattice;
    double cutoff = 0;
    std::vector<ReciprocalIndex> indices;
    std::map<IndexCoords, int> index_of;

    static PlaneWaveBasis build(const Lattice& lat, double cutoff, long cap = kDefaultIndexCap,
                                const IndexCoords* center = nullptr) {
        PlaneWaveBasis b;
        b.lattice = lat;
        b.cutoff = cutoff;
        b.indices = enumerate_indices(lat, cutoff, cap, center);
        for (int i = 0; i < static_cast<int>(b.indices.size()); ++i)
            b.index_of[b.indices[i].coords] = i;
        return b;
    }

    int size() const { return static_cast<int>(indices.size()); }

    int find(const IndexCoords& m) const {
        auto it = index_of.find(m);
        return it == index_of.end() ? -1 : it->second;
    }
};

/// Diagonal symbol weights G+-_N = (|k_par + 2 pi N_par|^2 + (kappa +- |k_perp + 2 pi N_perp|)^2)^{1/2}.
struct GFactors {
    Eigen::VectorXd gplus, gminus;
};

inline GFactors g_factors(const PlaneWaveBasis& basis, const FiberPoint& fiber) {
    GFactors g;
    g.gplus.resize(basis.size());
    g.gminus.resize(basis.size());
    for (int i = 0; i < basis.size(); ++i) {
        const Eigen::VectorXd p = fiber.k + kTwoPi * basis.indices[i].cartesian;
        const auto d = decompose(p, fiber.frame);
        const double perp = d.transverse.norm();
        g.gplus[i] = std::hypot(d.parallel, fiber.kappa + perp);
        g.gminus[i] = std::hypot(d.parallel, fiber.kappa - perp);
    }
    if (fiber.on_thomas_face()) {
        const double floor_minus = kPi / fiber.frame.gamma_norm - 1e-12;
        const double floor_prod = kTwoPi * fiber.kappa / fiber.frame.gamma_norm - 1e-10;
        for (int i = 0; i < basis.size(); ++i) {
            if (g.gminus[i] < floor_minus)
                throw std::runtime_error("G- bound violated on the |(k,gamma)| = pi face");
            if (g.gplus[i] * g.gminus[i] < floor_prod)
                throw std::runtime_error("G+G- bound violated on the |(k,gamma)| = pi face");
        }
    }
    return g;
}

/// Dense operator matrix on a plane-wave basis, orthonormal convention
/// (coefficient l2 norms equal L^2 norms).
struct FiberMatrix {
    PlaneWaveBasis basis;
    Eigen::MatrixXcd m;
    bool hermitian = false;
    bool truncation_warning = false;
};

namespace detail {

/// Exact coefficient-space autocorrelation (|A|^2)_Q = sum_P A(P) . A(Q-P).
inline std::map<IndexCoords, complexd> autocorrelation(const TrigPolynomial& a) {
    std::map<IndexCoords, complexd> out;
    for (const auto& [p1, c1] : a.coeffs)
        for (const auto& [p2, c2] : a.coeffs) {
            IndexCoords q(p1.size());
            for (std::size_t j = 0; j < p1.size(); ++j) q[j] = p1[j] + p2[j];
            complexd dot = 0;
            for (int j = 0; j < a.components; ++j) dot += c1[j] * c2[j];
            out[q] += dot;
        }
    return out;
}

inline IndexCoords coord_diff(const IndexCoords& a, const IndexCoords& b) {
    IndexCoords q(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) q[j] = a[j] - b[j];
    return q;
}

}  // namespace detail

/// Galerkin matrix of H(A; k + i kappa e) + V:
///   M[N,M] = delta_{N,M} (k + 2 pi N + i kappa e)^2
///            - (A_{N-M}, 2k + 2 pi (N+M) + 2 i kappa e)
///            + (|A|^2)_{N-M} + V_{N-M},
/// with the complexified square |k+2piN|^2 - kappa^2 + 2 i kappa (k+2piN, e).
inline FiberMatrix assemble_hamiltonian(const TrigPolynomial& a, const TrigPolynomial& v,
                                        const FiberPoint& fiber, const PlaneWaveBasis& basis) {
    const int n = basis.lattice.dim();
    if (a.components != n) throw std::invalid_argument("magnetic potential must have n components");
    if (v.components != 1) throw std::invalid_argument("electric potential must be scalar");
    if (!a.is_real() || !v.is_real())
        throw std::invalid_argument("assemble_hamiltonian requires real potentials");

    const auto asq = detail::autocorrelation(a);
    double asq_degree = 0;
    for (const auto& [q, c] : asq)
        if (std::abs(c) > 0)
            asq_degree = std::max(asq_degree, kTwoPi * basis.lattice.reciprocal_vector(q).norm());

    FiberMatrix fm;
    fm.basis = basis;
    fm.truncation_warning =
        basis.cutoff < std::max({a.degree(), asq_degree, v.degree()});
    fm.hermitian = fiber.kappa == 0;

    const int size = basis.size();
    fm.m.setZero(size, size);
    const Eigen::VectorXd& e = fiber.frame.e;
    for (int i = 0; i < size; ++i) {
        const Eigen::VectorXd pi_ = fiber.k + kTwoPi * basis.indices[i].cartesian;
        for (int j = 0; j < size; ++j) {
            const IndexCoords q = detail::coord_diff(basis.indices[i].coords, basis.indices[j].coords);
            complexd entry = 0;
            if (i == j) {
                const double re = pi_.squaredNorm() - fiber.kappa * fiber.kappa;
                entry += complexd(re, 2.0 * fiber.kappa * pi_.dot(e));
            }
            if (auto it = a.coeffs.find(q); it != a.coeffs.end()) {
                const Eigen::VectorXd pj = fiber.k + kTwoPi * basis.indices[j].cartesian;
                complexd cross = 0;
                for (int l = 0; l < n; ++l)
                    cross += it->second[l] *
                             complexd(pi_[l] + pj[l], 2.0 * fiber.kappa * e[l]);
                entry -= cross;
            }
            if (auto it = asq.find(q); it != asq.end()) entry += it->second;
            if (auto it = v.coeffs.find(q); it != v.coeffs.end()) entry += it->second[0];
            fm.m(i, j) = entry;
        }
    }
    return fm;
}

/// Sesquilinear form value psi^dagger M phi in the orthonormal convention.
inline complexd form_eval(const TrigPolynomial& a, const TrigPolynomial& v, const FiberPoint& fiber,
                          const PlaneWaveBasis& basis, const Eigen::VectorXcd& psi,
                          const Eigen::VectorXcd& phi) {
    if (psi.size() != basis.size() || phi.size() != basis.size())
        throw std::invalid_argument("basis mismatch: coefficient vectors do not match the basis size");
    const FiberMatrix fm = assemble_hamiltonian(a, v, fiber, basis);
    return psi.dot(fm.m * phi);
}

enum class GSign { plus, minus };

/// Diagonal operator (G+-)^zeta, principal branch on the positive reals.
inline FiberMatrix diagonal_power(const PlaneWaveBasis& basis, const FiberPoint& fiber, GSign sign,
                                  complexd zeta) {
    const GFactors g = g_factors(basis, fiber);
    const Eigen::VectorXd& gv = sign == GSign::plus ? g.gplus : g.gminus;
    FiberMatrix fm;
    fm.basis = basis;
    fm.hermitian = zeta.imag() == 0;
    fm.m.setZero(basis.size(), basis.size());
    for (int i = 0; i < basis.size(); ++i) {
        if (!(gv[i] > 0))
            throw std::runtime_error("diagonal power undefined: some G_N vanishes at this fiber");
        fm.m(i, i) = std::pow(complexd(gv[i], 0.0), zeta);
    }
    return fm;
}

/// Diagonal weight L^zeta = (G+ G-)^zeta.
inline Eigen::VectorXcd weight_power(const PlaneWaveBasis& basis, const FiberPoint& fiber,
                                     complexd zeta) {
    const GFactors g = g_factors(basis, fiber);
    Eigen::VectorXcd d(basis.size());
    for (int i = 0; i < basis.size(); ++i) {
        const double prod = g.gplus[i] * g.gminus[i];
        if (!(prod > 0))
            throw std::runtime_error("diagonal power undefined: some G+G- vanishes at this fiber");
        d[i] = std::pow(complexd(prod, 0.0), zeta);
    }
    return d;
}

/// Dyadic shell split of the basis by G-:
///   K(m) = {N : G-_N <= h^m},   K(j) = {N : h^{j-1} < G-_N <= h^j},  j = m+1..l,
/// with h^l = kappa/2, h in [2,4). The deterministic rule takes the largest
/// admissible l = floor(log2(kappa/2)), i.e. the smallest admissible h.
struct ShellPartition {
    double h = 0;
    int l = 0, m = 0;
    std::vector<std::vector<int>> shells;  // shells[j - m] = basis positions of K(j)
    std::vector<int> complement;
};

inline ShellPartition shell_partition(const PlaneWaveBasis& basis, const FiberPoint& fiber) {
    const double kappa = fiber.kappa;
    const double diam = basis.lattice.reciprocal_diameter();
    if (kappa < std::max(8.0, 4.0 * kPi * diam) - 1e-12)
        throw std::invalid_argument("shell partition needs kappa >= max(8, 4 pi diam K*)");

    ShellPartition sp;
    sp.l = static_cast<int>(std::floor(std::log2(kappa / 2.0)));
    sp.h = std::pow(kappa / 2.0, 1.0 / sp.l);
    sp.m = 1;
    while (std::pow(sp.h, sp.m) < kPi * diam) ++sp.m;
    if (sp.m >= sp.l) throw std::runtime_error("shell partition degenerate: m >= l");

    sp.shells.assign(sp.l - sp.m + 1, {});
    const GFactors g = g_factors(basis, fiber);
    for (int i = 0; i < basis.size(); ++i) {
        const double gm = g.gminus[i];
        if (gm <= std::pow(sp.h, sp.m)) {
            sp.shells[0].push_back(i);
            continue;
        }
        bool placed = false;
        for (int j = sp.m + 1; j <= sp.l && !placed; ++j)
            if (gm <= std::pow(sp.h, j)) {
                sp.shells[j - sp.m].push_back(i);
                placed = true;
            }
        if (!placed) sp.complement.push_back(i);
    }
    return sp;
}

}  // namespace magbloch
