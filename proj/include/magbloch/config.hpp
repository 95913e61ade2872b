#pragma once

#include <filesystem>
#include <optional>

#include "magbloch/io.hpp"
#include "magbloch/measure.hpp"

namespace magbloch {

/// Parsed key/value view of the sectioned config format:
///   [section]
///   key = value            # comment
/// Values are whitespace-separated tokens; rows are separated by ';'.
class ConfigFile {
public:
    static ConfigFile parse(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot open config: " + path);
        ConfigFile cfg;
        cfg.dir_ = std::filesystem::path(path).parent_path().string();
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string s = detail::strip_comment(line);
            const auto first = s.find_first_not_of(" \t\r\n");
            if (first == std::string::npos) continue;
            const auto last = s.find_last_not_of(" \t\r\n");
            s = s.substr(first, last - first + 1);
            if (s.front() == '[') {
                if (s.back() != ']')
                    throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": bad section header");
                section = s.substr(1, s.size() - 2);
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
            auto trim = [](std::string t) {
                const auto a = t.find_first_not_of(" \t");
                const auto b = t.find_last_not_of(" \t");
                return a == std::string::npos ? std::string() : t.substr(a, b - a + 1);
            };
            const std::string key = trim(s.substr(0, eq));
            const std::string value = trim(s.substr(eq + 1));
            if (key.empty()) throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": empty key");
            cfg.values_[section + "." + key] = value;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw std::invalid_argument("config key missing: " + key);
        return it->second;
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        return has(key) ? get_string(key) : fallback;
    }

    double get_double(const std::string& key) const { return std::stod(get_string(key)); }
    double get_double(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }
    long get_long(const std::string& key, long fallback) const {
        return has(key) ? std::stol(get_string(key)) : fallback;
    }

    std::vector<double> get_doubles(const std::string& key) const {
        std::vector<double> out;
        for (const auto& t : detail::tokenize(get_string(key))) out.push_back(std::stod(t));
        return out;
    }

    std::vector<int> get_ints(const std::string& key) const {
        std::vector<int> out;
        for (const auto& t : detail::tokenize(get_string(key))) out.push_back(std::stoi(t));
        return out;
    }

    /// Rows "a b c ; d e f" as a list of double vectors.
    std::vector<std::vector<double>> get_rows(const std::string& key) const {
        std::vector<std::vector<double>> rows;
        std::string s = get_string(key);
        std::size_t pos = 0;
        while (pos <= s.size()) {
            const auto semi = s.find(';', pos);
            const std::string part = s.substr(pos, semi == std::string::npos ? std::string::npos : semi - pos);
            std::vector<double> row;
            for (const auto& t : detail::tokenize(part)) row.push_back(std::stod(t));
            if (!row.empty()) rows.push_back(std::move(row));
            if (semi == std::string::npos) break;
            pos = semi + 1;
        }
        return rows;
    }

    /// Paths in the config are resolved relative to the config file location.
    std::string resolve_path(const std::string& rel) const {
        std::filesystem::path p(rel);
        if (p.is_absolute() || dir_.empty()) return rel;
        return (std::filesystem::path(dir_) / p).string();
    }

private:
    std::map<std::string, std::string> values_;
    std::string dir_;
};

/// Everything a batch run needs, loaded and validated.
struct RunConfig {
    Lattice lattice = Lattice::build(Eigen::MatrixXd::Identity(3, 3));
    TrigPolynomial a, v;
    IndexCoords gamma;
    int search_max_coord = 1;
    AveragingMeasure measure = AveragingMeasure::dirac();
    double cutoff = kTwoPi * 4;
    long max_indices = kDefaultIndexCap;
    std::vector<Eigen::VectorXd> path;
    std::vector<double> thomas_kappa{5, 10, 20, 40};
    std::vector<double> thomas_lambda{0};
    std::uint64_t seed = 20240901;
    int battery = 64;
    int x_grid = 24;
    int sphere_grid = 64;
    double flat_band_tol = 1e-6;
    std::vector<double> probe_epsilon{0.05, 0.1, 0.2, 0.4};
    std::vector<double> probe_kappa{10, 20, 40};
    double bernstein_kappa = 24;
    double bernstein_a = 6;
    double thm31_a = 0.25;
    double thm31_delta = 0.25;
    std::string out_dir = "out";
};

inline RunConfig load_run_config(const std::string& path) {
    const ConfigFile cfg = ConfigFile::parse(path);
    RunConfig rc;

    const auto rows = cfg.get_rows("lattice.basis");
    const int n = static_cast<int>(rows.size());
    Eigen::MatrixXd basis(n, n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n)
            throw std::invalid_argument("lattice.basis must be n rows of n numbers");
        for (int j = 0; j < n; ++j) basis(i, j) = rows[i][j];
    }
    rc.lattice = Lattice::build(basis);

    rc.a = TrigPolynomial::zero(rc.lattice, n);
    rc.v = TrigPolynomial::zero(rc.lattice, 1);
    if (cfg.has("basis.cutoff"))
        rc.cutoff = cfg.get_double("basis.cutoff");
    else
        rc.cutoff = kTwoPi * cfg.get_double("basis.cutoff_2pi", 4.0);
    if (!(rc.cutoff > 0)) throw std::invalid_argument("basis cutoff must be positive");
    rc.max_indices = cfg.get_long("basis.max_indices", kDefaultIndexCap);

    if (cfg.has("potential.A_coeffs"))
        rc.a = read_coefficient_file(cfg.resolve_path(cfg.get_string("potential.A_coeffs")), rc.lattice, n);
    else if (cfg.has("potential.A_grid"))
        rc.a = fourier_coefficients(read_grid_file(cfg.resolve_path(cfg.get_string("potential.A_grid")), rc.lattice),
                                    rc.cutoff, rc.max_indices);
    if (cfg.has("potential.V_coeffs"))
        rc.v = read_coefficient_file(cfg.resolve_path(cfg.get_string("potential.V_coeffs")), rc.lattice, 1);
    else if (cfg.has("potential.V_grid"))
        rc.v = fourier_coefficients(read_grid_file(cfg.resolve_path(cfg.get_string("potential.V_grid")), rc.lattice),
                                    rc.cutoff, rc.max_indices);

    if (cfg.has("gamma.coords")) {
        rc.gamma = cfg.get_ints("gamma.coords");
        if (static_cast<int>(rc.gamma.size()) != n || all_zero(rc.gamma))
            throw std::invalid_argument("gamma.coords must be n integers, not all zero");
    }
    rc.search_max_coord = static_cast<int>(cfg.get_long("gamma.search_max_coord", rc.gamma.empty() ? 1 : 0));
    if (rc.gamma.empty() && rc.search_max_coord < 1)
        throw std::invalid_argument("either gamma.coords or gamma.search_max_coord >= 1 is required");

    const std::string kind = cfg.get_string("measure.kind", "dirac");
    if (kind == "dirac")
        rc.measure = AveragingMeasure::dirac(cfg.get_double("measure.h", 1.0));
    else if (kind == "windowed")
        rc.measure = AveragingMeasure::windowed(cfg.get_double("measure.h"), cfg.get_double("measure.H"));
    else
        throw std::invalid_argument("measure.kind must be dirac or windowed");

    if (cfg.has("path.points")) {
        for (const auto& row : cfg.get_rows("path.points")) {
            if (static_cast<int>(row.size()) != n)
                throw std::invalid_argument("path.points rows must have n fractional coordinates");
            Eigen::VectorXd k = Eigen::VectorXd::Zero(n);
            for (int j = 0; j < n; ++j)
                k += kTwoPi * row[j] * rc.lattice.reciprocal_basis().row(j).transpose();
            rc.path.push_back(k);
        }
    }

    if (cfg.has("thomas.kappa")) rc.thomas_kappa = cfg.get_doubles("thomas.kappa");
    if (cfg.has("thomas.lambda")) rc.thomas_lambda = cfg.get_doubles("thomas.lambda");

    rc.seed = static_cast<std::uint64_t>(cfg.get_long("probes.seed", static_cast<long>(rc.seed)));
    rc.battery = static_cast<int>(cfg.get_long("probes.battery", rc.battery));
    rc.x_grid = static_cast<int>(cfg.get_long("probes.x_grid", rc.x_grid));
    rc.sphere_grid = static_cast<int>(cfg.get_long("probes.sphere_grid", rc.sphere_grid));
    rc.flat_band_tol = cfg.get_double("probes.flat_band_tol", rc.flat_band_tol);
    if (cfg.has("probes.epsilon")) rc.probe_epsilon = cfg.get_doubles("probes.epsilon");
    if (cfg.has("probes.kappa")) rc.probe_kappa = cfg.get_doubles("probes.kappa");
    rc.bernstein_kappa = cfg.get_double("probes.bernstein_kappa", rc.bernstein_kappa);
    rc.bernstein_a = cfg.get_double("probes.bernstein_a", rc.bernstein_a);
    rc.thm31_a = cfg.get_double("probes.thm31_a", rc.thm31_a);
    rc.thm31_delta = cfg.get_double("probes.thm31_delta", rc.thm31_delta);
    rc.out_dir = cfg.get_string("output.dir", rc.out_dir);
    return rc;
}

}  // namespace magbloch
