#pragma once

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "magbloch/fiber.hpp"

namespace magbloch {

/// Band functions lambda_j(k) over a list of quasimomenta, ascending in j per k.
struct BandStructure {
    std::vector<Eigen::VectorXd> path;  // Cartesian k-points
    Eigen::MatrixXd bands;              // (path points) x (basis size)
};

inline BandStructure band_structure(const TrigPolynomial& a, const TrigPolynomial& v,
                                    const PlaneWaveBasis& basis,
                                    const std::vector<Eigen::VectorXd>& path) {
    IndexCoords e1(basis.lattice.dim(), 0);
    e1[0] = 1;
    const DirectionFrame frame = DirectionFrame::from_coords(basis.lattice, e1);

    BandStructure bs;
    bs.path = path;
    bs.bands.resize(static_cast<long>(path.size()), basis.size());
    for (std::size_t ik = 0; ik < path.size(); ++ik) {
        const FiberMatrix fm = assemble_hamiltonian(a, v, FiberPoint::make(path[ik], 0.0, frame), basis);
        const double herm = (fm.m - fm.m.adjoint()).cwiseAbs().maxCoeff();
        if (herm > 1e-10)
            throw std::runtime_error("band structure fiber not Hermitian at path point " +
                                     std::to_string(ik));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(fm.m, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("eigensolver failure at path point " + std::to_string(ik));
        bs.bands.row(static_cast<long>(ik)) = es.eigenvalues().transpose();
    }
    return bs;
}

struct FlatBandReport {
    std::vector<double> oscillation;  // osc_j = max_k lambda_j - min_k lambda_j
    std::vector<int> flagged;         // bands with osc_j < tol
    double tol = 0;
};

inline FlatBandReport flat_band_scan(const BandStructure& bs, double tol) {
    if (bs.path.size() < 2) throw std::invalid_argument("flat band scan needs at least 2 path points");
    FlatBandReport rep;
    rep.tol = tol;
    for (long j = 0; j < bs.bands.cols(); ++j) {
        const double osc = bs.bands.col(j).maxCoeff() - bs.bands.col(j).minCoeff();
        rep.oscillation.push_back(osc);
        if (osc < tol) rep.flagged.push_back(static_cast<int>(j));
    }
    return rep;
}

/// Invertibility probe at complex quasimomentum: the smallest singular value of
/// L^{-1/2} (H(A; k + i kappa e) + V - lambda) L^{-1/2} per kappa.
struct ThomasProbeReport {
    double lambda = 0;
    IndexCoords gamma_coords;
    Eigen::VectorXd k;
    std::vector<double> kappas;
    std::vector<double> s_min;
    double tail_min = 0;  // min over the trailing half of the kappa list
};

inline double smallest_singular_value(const Eigen::MatrixXcd& m) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues().minCoeff();
}

inline ThomasProbeReport thomas_probe(const TrigPolynomial& a, const TrigPolynomial& v,
                                      double lambda, const DirectionFrame& frame,
                                      const PlaneWaveBasis& basis,
                                      const std::vector<double>& kappa_list,
                                      const Eigen::VectorXd* k_choice = nullptr) {
    ThomasProbeReport rep;
    rep.lambda = lambda;
    rep.gamma_coords = frame.gamma_coords;
    rep.k = k_choice ? *k_choice : thomas_k(frame);
    if (std::abs(std::abs(rep.k.dot(frame.gamma)) - kPi) > 1e-12)
        throw std::invalid_argument("thomas probe requires |(k, gamma)| = pi");

    for (double kappa : kappa_list) {
        const FiberPoint fiber = FiberPoint::make(rep.k, kappa, frame);
        FiberMatrix fm = assemble_hamiltonian(a, v, fiber, basis);
        fm.m.diagonal().array() -= lambda;
        const Eigen::VectorXcd w = weight_power(basis, fiber, complexd(-0.5, 0.0));
        const Eigen::MatrixXcd scaled = w.asDiagonal() * fm.m * w.asDiagonal();
        rep.kappas.push_back(kappa);
        rep.s_min.push_back(smallest_singular_value(scaled));
    }
    const std::size_t start = rep.s_min.size() / 2;
    rep.tail_min = rep.s_min.empty() ? 0.0 : rep.s_min[start];
    for (std::size_t i = start; i < rep.s_min.size(); ++i)
        rep.tail_min = std::min(rep.tail_min, rep.s_min[i]);
    return rep;
}

}  // namespace magbloch
