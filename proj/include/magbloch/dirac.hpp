#pragma once

#include <Eigen/SVD>

#include "magbloch/fiber.hpp"
#include "magbloch/rng.hpp"

namespace magbloch {

/// Hermitian matrices with alpha_j alpha_l + alpha_l alpha_j = 2 delta_jl I,
/// built by the Pauli tensor recursion; M = 2^floor(n/2).
struct CliffordRep {
    int n = 0;
    int M = 0;
    std::vector<Eigen::MatrixXcd> alphas;

    static CliffordRep build(int n) {
        if (n < 2) throw std::invalid_argument("Clifford representation needs n >= 2");
        const complexd i1(0, 1);
        Eigen::MatrixXcd s1(2, 2), s2(2, 2), s3(2, 2);
        s1 << 0, 1, 1, 0;
        s2 << 0, -i1, i1, 0;
        s3 << 1, 0, 0, -1;

        std::vector<Eigen::MatrixXcd> gen =
            n % 2 ? std::vector<Eigen::MatrixXcd>{s1, s2, s3} : std::vector<Eigen::MatrixXcd>{s1, s2};
        while (static_cast<int>(gen.size()) < n) {
            // {a_j} of size M -> {s1 x a_j, s2 x I, s3 x I} of size 2M.
            const long m = gen.front().rows();
            std::vector<Eigen::MatrixXcd> next;
            for (const auto& a : gen) next.push_back(kron(s1, a));
            next.push_back(kron(s2, Eigen::MatrixXcd::Identity(m, m)));
            next.push_back(kron(s3, Eigen::MatrixXcd::Identity(m, m)));
            gen = std::move(next);
        }

        CliffordRep rep;
        rep.n = n;
        rep.M = static_cast<int>(gen.front().rows());
        rep.alphas = std::move(gen);
        if (rep.anticommutation_residual() > 1e-12)
            throw std::logic_error("Clifford construction failed the anticommutation check");
        return rep;
    }

    double anticommutation_residual() const {
        double r = 0;
        const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(M, M);
        for (int j = 0; j < n; ++j) {
            r = std::max(r, (alphas[j] - alphas[j].adjoint()).cwiseAbs().maxCoeff());
            for (int l = 0; l < n; ++l) {
                const Eigen::MatrixXcd anti = alphas[j] * alphas[l] + alphas[l] * alphas[j];
                r = std::max(r, (anti - (j == l ? 2.0 : 0.0) * id).cwiseAbs().maxCoeff());
            }
        }
        return r;
    }

    /// sum_j v_j alpha_j for a complex vector v.
    Eigen::MatrixXcd contract(const Eigen::VectorXcd& v) const {
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(M, M);
        for (int j = 0; j < n; ++j) out += v[j] * alphas[j];
        return out;
    }

    static Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
        Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
        for (long i = 0; i < a.rows(); ++i)
            for (long j = 0; j < a.cols(); ++j)
                out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        return out;
    }
};

/// Symbol D_N(k; kappa) = sum_j (k_j + 2 pi N_j + i kappa e_j) alpha_j. Its singular
/// values are exactly {G-_N, G+_N}, each with multiplicity M/2 when the transverse
/// part of k + 2 pi N is nonzero.
inline Eigen::MatrixXcd dirac_symbol(const ReciprocalIndex& n, const FiberPoint& fiber,
                                     const CliffordRep& rep) {
    const Eigen::VectorXd p = fiber.k + kTwoPi * n.cartesian;
    Eigen::VectorXcd z(p.size());
    for (long j = 0; j < p.size(); ++j) z[j] = complexd(p[j], fiber.kappa * fiber.frame.e[j]);
    return rep.contract(z);
}

inline Eigen::VectorXd symbol_singular_values(const Eigen::MatrixXcd& symbol) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(symbol);
    return svd.singularValues();
}

/// Dense operator on the spinor space: (basis size x M) square blocks.
struct SpinorFiberMatrix {
    PlaneWaveBasis basis;
    int spinor_dim = 0;
    Eigen::MatrixXcd m;
};

/// D(A; k + i kappa e): block N,M' = delta * D_N(k;kappa) - sum_j (A_j)_{N-M'} alpha_j.
inline SpinorFiberMatrix assemble_dirac(const TrigPolynomial& a, const FiberPoint& fiber,
                                        const PlaneWaveBasis& basis, const CliffordRep& rep) {
    if (!a.is_real()) throw std::invalid_argument("assemble_dirac requires a real magnetic potential");
    if (a.components != rep.n) throw std::invalid_argument("component count mismatch");
    SpinorFiberMatrix sm;
    sm.basis = basis;
    sm.spinor_dim = rep.M;
    const int size = basis.size();
    sm.m.setZero(static_cast<long>(size) * rep.M, static_cast<long>(size) * rep.M);
    for (int i = 0; i < size; ++i) {
        sm.m.block(i * rep.M, i * rep.M, rep.M, rep.M) = dirac_symbol(basis.indices[i], fiber, rep);
        for (int j = 0; j < size; ++j) {
            const IndexCoords q = detail::coord_diff(basis.indices[i].coords, basis.indices[j].coords);
            auto it = a.coeffs.find(q);
            if (it == a.coeffs.end()) continue;
            sm.m.block(i * rep.M, j * rep.M, rep.M, rep.M) -= rep.contract(it->second);
        }
    }
    return sm;
}

/// Multiplication operator by the curvature field
/// B(A) = (i/2) sum_{j != l} (dA_l/dx_j - dA_j/dx_l) alpha_j alpha_l,
/// derivatives taken exactly in coefficient space.
inline SpinorFiberMatrix curvature_term(const TrigPolynomial& a, const CliffordRep& rep,
                                        const PlaneWaveBasis& basis) {
    const int n = rep.n;
    // Per-difference M x M curvature blocks (i/2) sum_{j != l} (B_jl)_Q alpha_j alpha_l.
    std::map<IndexCoords, Eigen::MatrixXcd> blocks;
    const complexd itp(0, kTwoPi);
    for (const auto& [q, c] : a.coeffs) {
        const Eigen::VectorXd cart = basis.lattice.reciprocal_vector(q);
        Eigen::MatrixXcd blk = Eigen::MatrixXcd::Zero(rep.M, rep.M);
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                if (j == l) continue;
                const complexd bjl = itp * cart[j] * c[l] - itp * cart[l] * c[j];
                blk += complexd(0, 0.5) * bjl * (rep.alphas[j] * rep.alphas[l]);
            }
        blocks[q] = blk;
    }

    SpinorFiberMatrix sm;
    sm.basis = basis;
    sm.spinor_dim = rep.M;
    const int size = basis.size();
    sm.m.setZero(static_cast<long>(size) * rep.M, static_cast<long>(size) * rep.M);
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) {
            const IndexCoords q = detail::coord_diff(basis.indices[i].coords, basis.indices[j].coords);
            auto it = blocks.find(q);
            if (it != blocks.end()) sm.m.block(i * rep.M, j * rep.M, rep.M, rep.M) = it->second;
        }
    return sm;
}

/// Basis positions allowed as test-vector support when products with fields of
/// the given degree must stay inside the truncation ball.
inline std::vector<int> inner_positions(const PlaneWaveBasis& basis, double margin) {
    std::vector<int> out;
    for (int i = 0; i < basis.size(); ++i)
        if (kTwoPi * basis.indices[i].cartesian.norm() <= basis.cutoff - margin + 1e-12)
            out.push_back(i);
    return out;
}

inline std::vector<int> spinor_positions(const std::vector<int>& base, int M) {
    std::vector<int> out;
    out.reserve(base.size() * M);
    for (int p : base)
        for (int s = 0; s < M; ++s) out.push_back(p * M + s);
    return out;
}

/// Residual of the square identity D^2 = H tensor I + B(A) over a deterministic
/// battery of test vectors supported on modes at distance >= 2 deg(A) from the
/// truncation boundary (there the Galerkin products are exact).
inline double verify_dirac_square(const TrigPolynomial& a, const FiberPoint& fiber,
                                  const PlaneWaveBasis& basis, const CliffordRep& rep,
                                  int battery = 16, std::uint64_t seed = 1234) {
    const auto inner = inner_positions(basis, 2.0 * a.degree());
    if (inner.empty())
        throw std::invalid_argument("cutoff too small to leave any inner modes for the square identity");
    const SpinorFiberMatrix d = assemble_dirac(a, fiber, basis, rep);
    const FiberMatrix h = assemble_hamiltonian(a, TrigPolynomial::zero(a.lattice, 1), fiber, basis);
    const SpinorFiberMatrix b = curvature_term(a, rep, basis);

    const auto support = spinor_positions(inner, rep.M);
    DeterministicRng rng(seed);
    double residual = 0;
    for (int s = 0; s < battery; ++s) {
        const Eigen::VectorXcd phi =
            rng.complex_gaussian_on(support, basis.size() * rep.M);
        const Eigen::VectorXcd lhs = d.m * (d.m * phi);
        Eigen::VectorXcd rhs = b.m * phi;
        // (H tensor I_M) phi, applied blockwise.
        for (int i = 0; i < basis.size(); ++i)
            for (int j = 0; j < basis.size(); ++j) {
                const complexd hij = h.m(i, j);
                if (hij == complexd(0, 0)) continue;
                rhs.segment(i * rep.M, rep.M) += hij * phi.segment(j * rep.M, rep.M);
            }
        residual = std::max(residual, (lhs - rhs).norm() / phi.norm());
    }
    return residual;
}

/// Blockwise projections P^+- = (1/2)(I -+ i (e.alpha)(e~(k+2piN).alpha)) with
/// e~(y) the normalized transverse part of y. Requires k in K(gamma):
/// k_perp + 2 pi N_perp != 0 for every basis index.
inline std::pair<SpinorFiberMatrix, SpinorFiberMatrix> projections(const FiberPoint& fiber,
                                                                   const PlaneWaveBasis& basis,
                                                                   const CliffordRep& rep) {
    SpinorFiberMatrix pp, pm;
    pp.basis = pm.basis = basis;
    pp.spinor_dim = pm.spinor_dim = rep.M;
    const long dim = static_cast<long>(basis.size()) * rep.M;
    pp.m.setZero(dim, dim);
    pm.m.setZero(dim, dim);
    const Eigen::MatrixXcd ealpha = rep.contract(fiber.frame.e.cast<complexd>());
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(rep.M, rep.M);
    for (int i = 0; i < basis.size(); ++i) {
        const Eigen::VectorXd p = fiber.k + kTwoPi * basis.indices[i].cartesian;
        const auto d = decompose(p, fiber.frame);
        const double perp = d.transverse.norm();
        if (perp <= 1e-10)
            throw std::runtime_error("k not in K(gamma): transverse part vanishes at index " +
                                     coords_to_string(basis.indices[i].coords));
        const Eigen::MatrixXcd talpha = rep.contract((d.transverse / perp).cast<complexd>());
        const Eigen::MatrixXcd x = complexd(0, 1) * ealpha * talpha;
        pp.m.block(i * rep.M, i * rep.M, rep.M, rep.M) = 0.5 * (id - x);
        pm.m.block(i * rep.M, i * rep.M, rep.M, rep.M) = 0.5 * (id + x);
    }
    return {pp, pm};
}

/// Empirical lower envelope for the projected Dirac inequality
///   ||(P+ + a P-) D(A) phi||^2 >= (1 - delta) ||(c G- P- + a G+ P+) phi||^2 :
/// per kappa, the largest c in (0, 1] making the bound hold across the battery.
struct Thm31Report {
    double a = 0, delta = 0;
    std::uint64_t seed = 0;
    int battery = 0;
    std::vector<double> kappas;
    std::vector<double> c_envelope;
};

inline Thm31Report theorem31_probe(const TrigPolynomial& a_field,
                                   const std::vector<FiberPoint>& fibers,
                                   const PlaneWaveBasis& basis, const CliffordRep& rep,
                                   double a_param, double delta, int battery = 32,
                                   std::uint64_t seed = 777) {
    if (!(a_param > 0 && a_param <= 1)) throw std::invalid_argument("need 0 < a <= 1");
    if (!(delta > 0 && delta < 1)) throw std::invalid_argument("need 0 < delta < 1");
    Thm31Report rep_out;
    rep_out.a = a_param;
    rep_out.delta = delta;
    rep_out.seed = seed;
    rep_out.battery = battery;

    const auto inner = inner_positions(basis, a_field.degree());
    if (inner.empty()) throw std::invalid_argument("cutoff too small for inner test vectors");
    const auto support = spinor_positions(inner, rep.M);

    for (const auto& fiber : fibers) {
        if (!fiber.on_thomas_face())
            throw std::invalid_argument("theorem31 probe requires |(k, gamma)| = pi");
        const auto [pp, pm] = projections(fiber, basis, rep);
        const SpinorFiberMatrix d = assemble_dirac(a_field, fiber, basis, rep);
        const GFactors g = g_factors(basis, fiber);
        Eigen::VectorXd gp(d.m.rows()), gm(d.m.rows());
        for (int i = 0; i < basis.size(); ++i)
            for (int s = 0; s < rep.M; ++s) {
                gp[i * rep.M + s] = g.gplus[i];
                gm[i * rep.M + s] = g.gminus[i];
            }

        DeterministicRng rng(seed);
        double envelope = 1.0;
        for (int s = 0; s < battery; ++s) {
            const Eigen::VectorXcd phi = rng.complex_gaussian_on(support, static_cast<int>(d.m.rows()));
            const Eigen::VectorXcd dphi = d.m * phi;
            const double lhs = (pp.m * dphi + a_param * (pm.m * dphi)).squaredNorm();
            const double bplus = (gp.asDiagonal() * (pp.m * phi)).squaredNorm();
            const double bminus = (gm.asDiagonal() * (pm.m * phi)).squaredNorm();
            if (bminus < 1e-300) continue;
            const double c2 = (lhs / (1.0 - delta) - a_param * a_param * bplus) / bminus;
            envelope = std::min(envelope, std::sqrt(std::max(0.0, c2)));
        }
        rep_out.kappas.push_back(fiber.kappa);
        rep_out.c_envelope.push_back(envelope);
    }
    return rep_out;
}

}  // namespace magbloch
