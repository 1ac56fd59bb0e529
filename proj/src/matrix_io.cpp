#include "angval/matrix_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "angval/errors.hpp"

namespace angval {

namespace {

bool parse_double(const std::string& tok, double& out) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool parse_index(const std::string& tok, long& out) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

// Reads one matrix; returns false on clean EOF before the header.
bool read_one(std::istream& in, Eigen::MatrixXd& m, long& lineno) {
    std::string line;
    long rows = 0, cols = 0;
    for (;;) {
        if (!std::getline(in, line)) return false;
        ++lineno;
        std::istringstream hdr(line);
        std::string a, b, extra;
        if (!(hdr >> a)) continue;  // skip blank lines between blocks
        if (!(hdr >> b) || (hdr >> extra)) {
            throw ParseError("line " + std::to_string(lineno) +
                             ": expected header `rows cols`");
        }
        if (!parse_index(a, rows) || !parse_index(b, cols) || rows <= 0 || cols <= 0) {
            throw ParseError("line " + std::to_string(lineno) +
                             ": invalid dimensions `" + line + "`");
        }
        break;
    }
    m.resize(rows, cols);
    for (long i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) {
            throw ParseError("line " + std::to_string(lineno) +
                             ": unexpected end of input inside matrix body");
        }
        ++lineno;
        std::istringstream row(line);
        std::string tok;
        for (long j = 0; j < cols; ++j) {
            if (!(row >> tok)) {
                throw ParseError("line " + std::to_string(lineno) + ": expected " +
                                 std::to_string(cols) + " entries, got " +
                                 std::to_string(j));
            }
            double v;
            if (!parse_double(tok, v)) {
                throw ParseError("line " + std::to_string(lineno) +
                                 ": bad number `" + tok + "`");
            }
            if (!std::isfinite(v)) {
                throw ParseError("line " + std::to_string(lineno) +
                                 ": non-finite entry `" + tok + "`");
            }
            m(i, j) = v;
        }
        std::string extra;
        if (row >> extra) {
            throw ParseError("line " + std::to_string(lineno) + ": trailing token `" +
                             extra + "`");
        }
    }
    return true;
}

}  // namespace

Eigen::MatrixXd read_matrix(std::istream& in) {
    Eigen::MatrixXd m;
    long lineno = 0;
    if (!read_one(in, m, lineno)) throw ParseError("empty input, expected a matrix");
    return m;
}

Eigen::MatrixXd read_matrix_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open `" + path + "`");
    try {
        return read_matrix(f);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::vector<Eigen::MatrixXd> read_matrix_list(std::istream& in) {
    std::vector<Eigen::MatrixXd> out;
    Eigen::MatrixXd m;
    long lineno = 0;
    while (read_one(in, m, lineno)) out.push_back(m);
    return out;
}

std::vector<Eigen::MatrixXd> read_matrix_list_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open `" + path + "`");
    try {
        return read_matrix_list(f);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
    out << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

void write_matrix_file(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream f(path);
    if (!f) throw ParseError("cannot open `" + path + "` for writing");
    write_matrix(f, m);
}

}  // namespace angval
