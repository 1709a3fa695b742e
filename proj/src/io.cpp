#include "wbpdq/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wbpdq {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::string tmp = s;
    std::replace(tmp.begin(), tmp.end(), ',', ' ');
    std::istringstream in(tmp);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

long long parse_int(const std::string& text, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("config: bad integer for '" + key + "': " + text);
    }
}

double parse_real(const std::string& text, const std::string& key) {
    try {
        return parse_double_or_inf(text);
    } catch (...) {
        throw ConfigError("config: bad number for '" + key + "': " + text);
    }
}

bool parse_bool(const std::string& text, const std::string& key) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError("config: bad boolean for '" + key + "': " + text);
}

}  // namespace

double parse_double_or_inf(const std::string& text) {
    const std::string t = trim(text);
    if (t == "inf" || t == "Inf" || t == "INF") return kInf;
    std::size_t pos = 0;
    const double v = std::stod(t, &pos);
    if (pos != t.size()) throw std::invalid_argument("trailing characters in number: " + text);
    return v;
}

Mat read_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    Index rows = 0, cols = 0;
    if (!(in >> rows >> cols) || rows < 1 || cols < 1)
        throw IoError("bad 'rows cols' header in " + path);
    Mat m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            if (!(in >> m(i, j))) throw IoError("truncated matrix data in " + path);
    return m;
}

void write_matrix(const std::string& path, const Mat& m) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << m.rows() << ' ' << m.cols() << '\n';
    char buf[32];
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
            out << buf << (j + 1 == m.cols() ? '\n' : ' ');
        }
    }
    if (!out) throw IoError("write failed for " + path);
}

Vec read_vector(const std::string& path) {
    const Mat m = read_matrix(path);
    if (m.cols() == 1) return m.col(0);
    if (m.rows() == 1) return m.row(0).transpose();
    throw IoError("expected a vector (rows x 1 or 1 x cols) in " + path);
}

void write_vector(const std::string& path, const Vec& v) {
    Mat m(v.size(), 1);
    m.col(0) = v;
    write_matrix(path, m);
}

ExperimentConfig parse_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: missing '=' on line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty())
            throw ConfigError("config: empty value for '" + key + "'");

        if (key == "n") {
            cfg.n = parse_int(value, key);
        } else if (key == "k") {
            cfg.k = parse_int(value, key);
        } else if (key == "m") {
            cfg.m_list.clear();
            for (const auto& tok : split_list(value))
                cfg.m_list.push_back(parse_int(tok, key));
        } else if (key == "p_list" || key == "p") {
            cfg.p_list.clear();
            for (const auto& tok : split_list(value))
                cfg.p_list.push_back(parse_real(tok, key));
        } else if (key == "theta") {
            cfg.theta = parse_real(value, key);
        } else if (key == "rho_prior") {
            cfg.rho_prior = parse_real(value, key);
        } else if (key == "alpha_overlap") {
            cfg.alpha_overlap = parse_real(value, key);
        } else if (key == "bin_divisor") {
            cfg.bin_divisor = parse_real(value, key);
        } else if (key == "trials") {
            cfg.trials = parse_int(value, key);
        } else if (key == "max_iters") {
            cfg.max_iters = static_cast<int>(parse_int(value, key));
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(parse_int(value, key));
        } else if (key == "mode") {
            if (value == "quantized")
                cfg.mode = ExperimentMode::quantized;
            else if (value == "noiseless")
                cfg.mode = ExperimentMode::noiseless;
            else
                throw ConfigError("config: mode must be 'quantized' or 'noiseless'");
        } else if (key == "epsilon_slack") {
            cfg.epsilon_slack = parse_real(value, key);
        } else if (key == "gamma") {
            cfg.gamma = parse_real(value, key);
        } else if (key == "fp_tol") {
            cfg.fp_tol = parse_real(value, key);
        } else if (key == "record_timing") {
            cfg.record_timing = parse_bool(value, key);
        } else if (key == "tube_method") {
            if (value == "iterative_dual")
                cfg.tube.method = TubeMethod::iterative_dual;
            else if (value == "tight_frame")
                cfg.tube.method = TubeMethod::tight_frame;
            else
                throw ConfigError("config: tube_method must be 'iterative_dual' or 'tight_frame'");
        } else if (key == "inner_max_iters") {
            cfg.tube.inner_max_iters = static_cast<int>(parse_int(value, key));
        } else if (key == "inner_tol") {
            cfg.tube.inner_tol = parse_real(value, key);
        } else {
            throw ConfigError("config: unknown key '" + key + "' on line " +
                              std::to_string(lineno));
        }
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("config: ") + ex.what());
    }
    return cfg;
}

}  // namespace wbpdq
