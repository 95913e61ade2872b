#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "magbloch/conditions.hpp"
#include "magbloch/probes.hpp"
#include "magbloch/spectrum.hpp"

namespace magbloch {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

inline std::string strip_comment(const std::string& line) {
    const auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace detail

/// Coefficient file: one record per line, n integers (index coordinates) then
/// 2 d decimals (re/im per component); '#' starts a comment. The result is
/// symmetrized to a real field and validated.
inline TrigPolynomial read_coefficient_file(const std::string& path, const Lattice& lat, int d) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open coefficient file: " + path);
    TrigPolynomial p = TrigPolynomial::zero(lat, d);
    const int n = lat.dim();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto toks = detail::tokenize(detail::strip_comment(line));
        if (toks.empty()) continue;
        if (static_cast<int>(toks.size()) != n + 2 * d)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected " + std::to_string(n + 2 * d) + " fields");
        IndexCoords m(n);
        for (int j = 0; j < n; ++j) m[j] = std::stoi(toks[j]);
        Eigen::VectorXcd c(d);
        for (int j = 0; j < d; ++j)
            c[j] = complexd(std::stod(toks[n + 2 * j]), std::stod(toks[n + 2 * j + 1]));
        p.add_coeff(m, c);
    }
    if (!p.is_real(1e-9))
        throw std::invalid_argument(path + ": coefficients are far from conjugate-symmetric");
    p.symmetrize();
    return p;
}

inline void write_coefficient_file(const std::string& path, const TrigPolynomial& p) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open for writing: " + path);
    out << "# index coords (" << p.lattice.dim() << "), then re/im per component ("
        << p.components << ")\n";
    for (const auto& [m, c] : p.coeffs) {
        for (int v : m) out << v << " ";
        for (int j = 0; j < p.components; ++j)
            out << fmt17(c[j].real()) << " " << fmt17(c[j].imag()) << (j + 1 == p.components ? "" : " ");
        out << "\n";
    }
}

/// Grid file: header "m_1 ... m_n d", then prod(m_j) lines of d decimals with
/// the first coordinate fastest.
inline SampledField read_grid_file(const std::string& path, const Lattice& lat) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open grid file: " + path);
    const int n = lat.dim();
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        header = detail::tokenize(detail::strip_comment(line));
        if (!header.empty()) break;
    }
    if (static_cast<int>(header.size()) != n + 1)
        throw std::invalid_argument(path + ": header must be m_1 ... m_n d");
    SampledField f;
    f.lattice = lat;
    f.shape.resize(n);
    for (int j = 0; j < n; ++j) {
        f.shape[j] = std::stoi(header[j]);
        if (f.shape[j] <= 0) throw std::invalid_argument(path + ": grid shape must be positive");
    }
    f.components = std::stoi(header[n]);
    f.samples.resize(f.size(), f.components);
    long row = 0;
    while (row < f.size() && std::getline(in, line)) {
        const auto toks = detail::tokenize(detail::strip_comment(line));
        if (toks.empty()) continue;
        if (static_cast<int>(toks.size()) != f.components)
            throw std::invalid_argument(path + ": expected " + std::to_string(f.components) +
                                        " values per sample line");
        for (int j = 0; j < f.components; ++j) f.samples(row, j) = std::stod(toks[j]);
        ++row;
    }
    if (row != f.size()) throw std::invalid_argument(path + ": fewer samples than the header promises");
    return f;
}

inline void write_bands_csv(const std::string& path, const BandStructure& bs) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open for writing: " + path);
    out << "k_index,j,lambda\n";
    for (long ik = 0; ik < bs.bands.rows(); ++ik)
        for (long j = 0; j < bs.bands.cols(); ++j)
            out << ik << "," << (j + 1) << "," << fmt17(bs.bands(ik, j)) << "\n";
}

inline void write_thomas_csv(const std::string& path, const ThomasProbeReport& rep) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open for writing: " + path);
    out << "kappa,s_min\n";
    for (std::size_t i = 0; i < rep.kappas.size(); ++i)
        out << fmt17(rep.kappas[i]) << "," << fmt17(rep.s_min[i]) << "\n";
}

inline std::string ratio_report_text(const RatioReport& rep) {
    std::ostringstream out;
    out << "probe: " << rep.probe << "\n";
    out << "seed: " << rep.seed << "\n";
    out << "battery: " << rep.battery << "\n";
    for (const auto& [k, v] : rep.params) out << "param " << k << " = " << fmt17(v) << "\n";
    for (const auto& [k, v] : rep.series) out << "series " << k << " = " << fmt17(v) << "\n";
    out << "max_ratio = " << fmt17(rep.max_ratio) << "\n";
    out << "min_ratio = " << fmt17(rep.min_ratio) << "\n";
    if (rep.has_contract) out << "contract: " << (rep.pass ? "pass" : "FAIL") << "\n";
    for (const auto& n : rep.notes) out << "note: " << n << "\n";
    return out.str();
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open for writing: " + path);
    out << text;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Debug dump of a dense complex matrix. Header: magic "MBFM", u32 version,
/// u32 rows, u32 cols, u8 hermitian flag; then row-major re/im doubles.
inline void dump_matrix(const std::string& path, const FiberMatrix& fm) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open for writing: " + path);
    out.write("MBFM", 4);
    const std::uint32_t version = 1;
    const std::uint32_t rows = static_cast<std::uint32_t>(fm.m.rows());
    const std::uint32_t cols = static_cast<std::uint32_t>(fm.m.cols());
    const std::uint8_t herm = fm.hermitian ? 1 : 0;
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&rows), 4);
    out.write(reinterpret_cast<const char*>(&cols), 4);
    out.write(reinterpret_cast<const char*>(&herm), 1);
    for (long i = 0; i < fm.m.rows(); ++i)
        for (long j = 0; j < fm.m.cols(); ++j) {
            const double re = fm.m(i, j).real(), im = fm.m(i, j).imag();
            out.write(reinterpret_cast<const char*>(&re), 8);
            out.write(reinterpret_cast<const char*>(&im), 8);
        }
}

inline Eigen::MatrixXcd load_matrix_dump(const std::string& path, bool* hermitian = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (std::string(magic, 4) != "MBFM") throw std::invalid_argument(path + ": bad magic");
    std::uint32_t version = 0, rows = 0, cols = 0;
    std::uint8_t herm = 0;
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&rows), 4);
    in.read(reinterpret_cast<char*>(&cols), 4);
    in.read(reinterpret_cast<char*>(&herm), 1);
    if (version != 1) throw std::invalid_argument(path + ": unsupported dump version");
    Eigen::MatrixXcd m(rows, cols);
    for (std::uint32_t i = 0; i < rows; ++i)
        for (std::uint32_t j = 0; j < cols; ++j) {
            double re = 0, im = 0;
            in.read(reinterpret_cast<char*>(&re), 8);
            in.read(reinterpret_cast<char*>(&im), 8);
            m(i, j) = complexd(re, im);
        }
    if (!in) throw std::invalid_argument(path + ": truncated dump");
    if (hermitian) *hermitian = herm != 0;
    return m;
}

}  // namespace magbloch
