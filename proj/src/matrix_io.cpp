#include "sketchrec/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "sketchrec/errors.hpp"

namespace sketchrec {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) return "nan";
    return std::string(buf, end);
}

DenseMatrix parse_matrix_csv(std::string_view text, const std::string& source) {
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    std::size_t blank_run_start = 0;

    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);

        if (line.empty()) {
            if (blank_run_start == 0 && !rows.empty()) blank_run_start = line_no;
            continue;
        }
        if (blank_run_start != 0) throw ParseError(source, blank_run_start, "blank line inside matrix");

        std::vector<double> row;
        std::size_t column = 0;
        while (true) {
            ++column;
            const auto comma = line.find(',');
            const std::string_view field = trim(line.substr(0, comma));
            double value = 0.0;
            const auto* first = field.data();
            const auto* last = field.data() + field.size();
            auto [ptr, ec] = std::from_chars(first, last, value);
            if (field.empty() || ec != std::errc() || ptr != last) {
                throw ParseError(source, line_no,
                                 "field " + std::to_string(column) + " is not a number: '" + std::string(field) + "'");
            }
            if (!std::isfinite(value)) {
                throw ParseError(source, line_no, "field " + std::to_string(column) + " is not finite");
            }
            row.push_back(value);
            if (comma == std::string_view::npos) break;
            line.remove_prefix(comma + 1);
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError(source, line_no,
                             "row has " + std::to_string(row.size()) + " fields, expected " +
                                 std::to_string(rows.front().size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(source, 0, "empty matrix");

    DenseMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return m;
}

DenseMatrix read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string(), 0, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_matrix_csv(ss.str(), path.string());
}

std::string format_matrix_csv(const DenseMatrix& m) {
    std::string out;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out += ',';
            out += format_double(m(r, c));
        }
        out += '\n';
    }
    return out;
}

void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << format_matrix_csv(m);
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace sketchrec
