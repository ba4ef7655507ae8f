#include "rdseed/field_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rdseed/errors.hpp"

namespace rdseed {

std::string format_real(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

std::string format_field(const ScalarField& field) {
    const Grid& g = field.grid;
    std::string out;
    out.reserve(field.size() * 48);
    if (g.dim() == 1) {
        out += "# " + std::to_string(g.nx()) + ' ' + format_real(g.x().lo) + ' ' + format_real(g.x().hi) + '\n';
        for (std::size_t i = 0; i < field.size(); ++i) {
            out += format_real(g.x().node(i));
            out += ' ';
            out += format_real(field[i]);
            out += '\n';
        }
        return out;
    }
    out += "# " + std::to_string(g.nx()) + ' ' + std::to_string(g.ny()) + ' ' + format_real(g.x().lo) +
           ' ' + format_real(g.x().hi) + ' ' + format_real(g.y().lo) + ' ' + format_real(g.y().hi) + '\n';
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i < g.nx(); ++i) {
            if (i > 0) out += ' ';
            out += format_real(field[j * g.nx() + i]);
        }
        out += '\n';
    }
    return out;
}

namespace {

[[noreturn]] void bad(int line, const std::string& msg) {
    throw IoError("field file line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string> words(const std::string& s) {
    std::vector<std::string> w;
    std::istringstream in(s);
    std::string t;
    while (in >> t) w.push_back(t);
    return w;
}

double number(const std::string& s, int line) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) bad(line, "not a number: '" + s + "'");
    return v;
}

}  // namespace

ScalarField parse_field(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    std::vector<double> header;
    int header_line = 0;
    std::vector<std::vector<double>> rows;
    std::vector<int> row_lines;
    while (std::getline(in, raw)) {
        ++line;
        const auto w = words(raw);
        if (w.empty()) continue;
        if (w.front().front() == '#') {
            if (!header.empty() || !rows.empty()) continue;
            std::vector<std::string> body(w.begin(), w.end());
            if (body.front() == "#") body.erase(body.begin());
            else body.front().erase(0, 1);
            if (body.size() != 3 && body.size() != 6) continue;
            std::vector<double> h;
            bool numeric = true;
            for (const auto& b : body) {
                double v = 0.0;
                const auto r = std::from_chars(b.data(), b.data() + b.size(), v);
                if (r.ec != std::errc() || r.ptr != b.data() + b.size()) numeric = false;
                h.push_back(v);
            }
            if (numeric) {
                header = h;
                header_line = line;
            }
            continue;
        }
        std::vector<double> row;
        for (const auto& t : w) row.push_back(number(t, line));
        rows.push_back(std::move(row));
        row_lines.push_back(line);
    }
    if (rows.empty()) bad(line, "no values");

    if (header.size() == 6) {
        const auto nx = static_cast<std::size_t>(header[0]);
        const auto ny = static_cast<std::size_t>(header[1]);
        if (rows.size() != ny) {
            bad(header_line, "header declares ny = " + std::to_string(ny) + " but the file has " +
                                 std::to_string(rows.size()) + " rows");
        }
        std::vector<double> values;
        values.reserve(nx * ny);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != nx) {
                bad(row_lines[r], "expected " + std::to_string(nx) + " values, got " + std::to_string(rows[r].size()));
            }
            values.insert(values.end(), rows[r].begin(), rows[r].end());
        }
        try {
            return ScalarField(Grid::rect(header[2], header[3], nx, header[4], header[5], ny), std::move(values));
        } catch (const ConfigError& e) {
            bad(header_line, e.what());
        }
    }

    std::vector<double> xs, values;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != 2) bad(row_lines[r], "expected 'x value', got " + std::to_string(rows[r].size()) + " numbers");
        xs.push_back(rows[r][0]);
        values.push_back(rows[r][1]);
    }
    double lo = xs.front(), hi = xs.back();
    std::size_t n = xs.size();
    if (header.size() == 3) {
        if (static_cast<std::size_t>(header[0]) != n) {
            bad(header_line, "header declares nx = " + std::to_string(static_cast<std::size_t>(header[0])) +
                                 " but the file has " + std::to_string(n) + " values");
        }
        lo = header[1];
        hi = header[2];
    }
    try {
        Grid g = Grid::line(lo, hi, n);
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(g.x().node(i) - xs[i]) > 1e-9 * std::max(1.0, std::abs(hi - lo))) {
                bad(row_lines[i], "x = " + format_real(xs[i]) + " is off the uniform grid");
            }
        }
        return ScalarField(g, std::move(values));
    } catch (const ConfigError& e) {
        bad(header_line > 0 ? header_line : row_lines.front(), e.what());
    }
}

void dump_field(const std::string& path, const ScalarField& field) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write field file '" + path + "'");
    out << format_field(field);
    if (!out) throw IoError("write failed for '" + path + "'");
}

ScalarField load_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open field file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_field(ss.str());
    } catch (const IoError& e) {
        throw IoError(path + ": " + e.what());
    }
}

}  // namespace rdseed
