#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "supercube/matrix.hpp"
#include "supercube/rng.hpp"

namespace supercube {

struct MatrixSpec {
    std::string name;
    Matrix<double> matrix;
    int n1 = 1;
};

/// Everything a verification run needs, parsed from the key/value config
/// format below. Matrices come inline as `rows = a b ; c d` or from a CSV
/// file of rows.
struct RunConfig {
    std::vector<std::string> suites;
    std::vector<MatrixSpec> matrices;
    std::vector<double> tau_grid{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<int> k_list{1, 2, 3};
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string out;
    std::uint64_t qmc_points = 4096;
    int qmc_randomizations = 32;
    std::uint64_t mc_samples = 200000;
    std::uint64_t slice_samples = 1000000;
    double fd_step = 1e-3;
    double quad_tol = 1e-9;
    int profile_points = 21;
    double decomposition_rel_tol = 0.10;
    std::string raw_text;  // exact config bytes, for the report digest
};

inline const std::vector<std::string>& known_suites() {
    static const std::vector<std::string> names = {"identities", "lemmaA",    "gci",
                                                   "gamma",      "reduction", "decomposition"};
    return names;
}

namespace detail {

inline std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> items;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) items.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) items.push_back(cur);
    return items;
}

inline bool parse_double(const std::string& s, double& out) {
    std::istringstream in(s);
    in >> out;
    return static_cast<bool>(in) && in.eof();
}

inline bool parse_u64(const std::string& s, std::uint64_t& out) {
    std::istringstream in(s);
    in >> out;
    return static_cast<bool>(in) && in.eof();
}

inline bool parse_matrix_rows(const std::string& text, Matrix<double>& out, std::string& err) {
    std::vector<std::vector<double>> rows;
    std::vector<std::string> rowchunks;
    std::string cur;
    for (char c : text) {
        if (c == ';') {
            rowchunks.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    rowchunks.push_back(cur);
    for (const std::string& chunk : rowchunks) {
        std::vector<std::string> nums = split_list(chunk);
        if (nums.empty()) continue;
        std::vector<double> row;
        for (const std::string& n : nums) {
            double v;
            if (!parse_double(n, v)) {
                err = "non-numeric entry '" + n + "'";
                return false;
            }
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        err = "no rows";
        return false;
    }
    const size_t n = rows.size();
    for (const auto& r : rows)
        if (r.size() != n) {
            err = "matrix is not square";
            return false;
        }
    out = Matrix<double>(static_cast<int>(n), static_cast<int>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) out(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    return true;
}

inline bool load_matrix_csv(const std::string& path, Matrix<double>& out, std::string& err) {
    std::ifstream in(path);
    if (!in) {
        err = "cannot open file '" + path + "'";
        return false;
    }
    std::string line, joined;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!joined.empty()) joined += " ; ";
        joined += t;
    }
    return parse_matrix_rows(joined, out, err);
}

}  // namespace detail

/// Parses the config text. All problems are collected into `errors`
/// (field-by-field); an empty error list means the config is valid.
inline RunConfig parse_config(const std::string& text, const std::string& base_dir,
                              std::vector<std::string>& errors) {
    RunConfig cfg;
    cfg.raw_text = text;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;

    MatrixSpec pending;        // matrix being assembled
    bool pending_active = false;
    bool pending_has_rows = false;

    auto flush_matrix = [&]() {
        if (!pending_active) return;
        if (!pending_has_rows) {
            errors.push_back("matrix " + pending.name + ": missing rows= or file=");
        } else {
            cfg.matrices.push_back(pending);
        }
        pending = MatrixSpec{};
        pending_active = false;
        pending_has_rows = false;
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                errors.push_back("line " + std::to_string(lineno) + ": unterminated section header");
                continue;
            }
            std::vector<std::string> parts = detail::split_list(t.substr(1, t.size() - 2));
            if (parts.size() != 2 || parts[0] != "matrix") {
                errors.push_back("line " + std::to_string(lineno) + ": only [matrix NAME] sections are allowed");
                continue;
            }
            flush_matrix();
            pending_active = true;
            pending.name = parts[1];
            continue;
        }
        const size_t eq = t.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string value = detail::trim(t.substr(eq + 1));

        if (pending_active) {
            if (key == "n1") {
                std::uint64_t v;
                if (!detail::parse_u64(value, v) || v == 0)
                    errors.push_back("matrix " + pending.name + ": n1 must be a positive integer");
                else
                    pending.n1 = static_cast<int>(v);
            } else if (key == "rows") {
                std::string err;
                if (!detail::parse_matrix_rows(value, pending.matrix, err))
                    errors.push_back("matrix " + pending.name + ": " + err);
                else
                    pending_has_rows = true;
            } else if (key == "file") {
                std::string err;
                std::string path = value;
                if (!base_dir.empty() && !path.empty() && path[0] != '/') path = base_dir + "/" + path;
                if (!detail::load_matrix_csv(path, pending.matrix, err))
                    errors.push_back("matrix " + pending.name + ": " + err);
                else
                    pending_has_rows = true;
            } else {
                errors.push_back("matrix " + pending.name + ": unknown key '" + key + "'");
            }
            continue;
        }

        if (key == "suites") {
            cfg.suites = detail::split_list(value);
        } else if (key == "seed") {
            if (!detail::parse_u64(value, cfg.seed)) errors.push_back("seed: not an unsigned integer");
        } else if (key == "jobs") {
            std::uint64_t v;
            if (!detail::parse_u64(value, v))
                errors.push_back("jobs: not an unsigned integer");
            else
                cfg.jobs = static_cast<int>(v);
        } else if (key == "out") {
            cfg.out = value;
        } else if (key == "tau-grid") {
            cfg.tau_grid.clear();
            for (const std::string& s : detail::split_list(value)) {
                double v;
                if (!detail::parse_double(s, v) || v < 0.0 || v > 1.0)
                    errors.push_back("tau-grid: entry '" + s + "' not in [0,1]");
                else
                    cfg.tau_grid.push_back(v);
            }
        } else if (key == "k-list") {
            cfg.k_list.clear();
            for (const std::string& s : detail::split_list(value)) {
                std::uint64_t v;
                if (!detail::parse_u64(s, v) || v == 0)
                    errors.push_back("k-list: entry '" + s + "' not a positive integer");
                else
                    cfg.k_list.push_back(static_cast<int>(v));
            }
        } else if (key == "qmc-points") {
            if (!detail::parse_u64(value, cfg.qmc_points)) errors.push_back("qmc-points: not an unsigned integer");
        } else if (key == "qmc-randomizations") {
            std::uint64_t v;
            if (!detail::parse_u64(value, v) || v < 2)
                errors.push_back("qmc-randomizations: need an integer >= 2");
            else
                cfg.qmc_randomizations = static_cast<int>(v);
        } else if (key == "mc-samples") {
            if (!detail::parse_u64(value, cfg.mc_samples)) errors.push_back("mc-samples: not an unsigned integer");
        } else if (key == "slice-samples") {
            if (!detail::parse_u64(value, cfg.slice_samples))
                errors.push_back("slice-samples: not an unsigned integer");
        } else if (key == "fd-step") {
            if (!detail::parse_double(value, cfg.fd_step) || cfg.fd_step <= 0.0)
                errors.push_back("fd-step: must be a positive number");
        } else if (key == "quad-tol") {
            if (!detail::parse_double(value, cfg.quad_tol) || cfg.quad_tol <= 0.0)
                errors.push_back("quad-tol: must be a positive number");
        } else if (key == "profile-points") {
            std::uint64_t v;
            if (!detail::parse_u64(value, v) || v < 2)
                errors.push_back("profile-points: need an integer >= 2");
            else
                cfg.profile_points = static_cast<int>(v);
        } else if (key == "decomposition-rel-tol") {
            if (!detail::parse_double(value, cfg.decomposition_rel_tol) || cfg.decomposition_rel_tol <= 0.0)
                errors.push_back("decomposition-rel-tol: must be a positive number");
        } else {
            errors.push_back("unknown key '" + key + "'");
        }
    }
    flush_matrix();

    if (cfg.suites.empty()) errors.push_back("suites: at least one suite must be listed");
    for (const std::string& s : cfg.suites) {
        bool ok = false;
        for (const std::string& k : known_suites()) ok = ok || (k == s);
        if (!ok) errors.push_back("suites: unknown suite '" + s + "'");
    }
    auto needs_matrices = [&](std::string_view s) {
        return s == "lemmaA" || s == "gci" || s == "gamma" || s == "decomposition";
    };
    bool any_needs = false;
    for (const std::string& s : cfg.suites) any_needs = any_needs || needs_matrices(s);
    if (any_needs && cfg.matrices.empty())
        errors.push_back("matrix: the requested suites need at least one [matrix NAME] section");

    for (const MatrixSpec& m : cfg.matrices) {
        if (m.matrix.rows() == 0) continue;  // already reported
        if (!m.matrix.is_symmetric(1e-12))
            errors.push_back("matrix " + m.name + ": not symmetric within 1e-12");
        if (m.n1 >= m.matrix.rows())
            errors.push_back("matrix " + m.name + ": n1 must be smaller than the dimension");
    }
    return cfg;
}

inline RunConfig parse_config_file(const std::string& path, std::vector<std::string>& errors) {
    std::ifstream in(path);
    if (!in) {
        errors.push_back("config: cannot open '" + path + "'");
        return RunConfig{};
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string dir = ".";
    const size_t slash = path.find_last_of('/');
    if (slash != std::string::npos) dir = path.substr(0, slash);
    return parse_config(buf.str(), dir, errors);
}

}  // namespace supercube
