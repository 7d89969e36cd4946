#include "spotvol/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <utility>
#include <vector>

#include "spotvol/errors.hpp"

namespace spotvol::io {

std::string format_real(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

double parse_real(std::string_view field, std::size_t line) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto res = std::from_chars(first, last, value);
    if (field.empty() || res.ec != std::errc{} || res.ptr != last) {
        throw ParseError(line, "not a number: '" + std::string(field) + "'");
    }
    return value;
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

void check_sink(const std::ostream& sink, const char* what) {
    if (!sink) throw IoError(std::string("write failed: ") + what);
}

}  // namespace

PathSample read_path_csv(std::istream& source) {
    std::string line;
    if (!next_line(source, line)) throw InsufficientDataError("empty path file");
    const auto header = split(line);
    if (header.size() < 2 || header.front() != "t") {
        throw ParseError(1, "header must be t,<label1>,...,<labelD>");
    }
    std::vector<std::string> labels(header.begin() + 1, header.end());
    const std::size_t d = labels.size();

    std::vector<double> times;
    std::vector<double> values;
    std::size_t line_no = 1;
    while (next_line(source, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != d + 1) {
            throw ParseError(line_no, "expected " + std::to_string(d + 1) + " fields, got " +
                                          std::to_string(fields.size()));
        }
        times.push_back(parse_real(fields[0], line_no));
        for (std::size_t j = 0; j < d; ++j) values.push_back(parse_real(fields[j + 1], line_no));
    }
    if (times.size() < 3) throw InsufficientDataError("path file needs at least 3 rows");
    return PathSample(std::move(times), std::move(values), std::move(labels));
}

void write_path_csv(const PathSample& path, std::ostream& sink) {
    sink << 't';
    for (const auto& label : path.labels()) sink << ',' << label;
    sink << '\n';
    for (std::size_t i = 0; i <= path.steps(); ++i) {
        sink << format_real(path.times()[i]);
        for (std::size_t j = 0; j < path.dim(); ++j) sink << ',' << format_real(path(i, j));
        sink << '\n';
    }
    check_sink(sink, "path csv");
}

void write_series_csv(const SpotMatrixSeries& series, std::ostream& matrix_sink,
                      std::ostream& spectrum_sink) {
    matrix_sink << "t,u,v,sigma_uv\n";
    spectrum_sink << "t,rank,lambda\n";
    for (const SpotPoint& p : series.points) {
        const std::string t = format_real(p.time);
        const std::size_t d = p.sigma.dim();
        for (std::size_t u = 0; u < d; ++u)
            for (std::size_t v = u; v < d; ++v)
                matrix_sink << t << ',' << u + 1 << ',' << v + 1 << ','
                            << format_real(p.sigma(u, v)) << '\n';
        for (std::size_t r = 0; r < p.spectrum.size(); ++r)
            spectrum_sink << t << ',' << r + 1 << ',' << format_real(p.spectrum.values[r]) << '\n';
    }
    check_sink(matrix_sink, "series csv");
    check_sink(spectrum_sink, "spectrum csv");
}

SpotMatrixSeries read_series_csv(std::istream& matrix_source) {
    std::string line;
    if (!next_line(matrix_source, line) || line != "t,u,v,sigma_uv") {
        throw ParseError(1, "header must be t,u,v,sigma_uv");
    }
    struct Entry {
        std::size_t u, v;
        double value;
    };
    std::vector<std::pair<double, std::vector<Entry>>> groups;
    std::size_t line_no = 1;
    while (next_line(matrix_source, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != 4) throw ParseError(line_no, "expected 4 fields");
        const double t = parse_real(fields[0], line_no);
        const double u = parse_real(fields[1], line_no);
        const double v = parse_real(fields[2], line_no);
        if (u < 1 || v < u || u != std::floor(u) || v != std::floor(v)) {
            throw ParseError(line_no, "indices must satisfy 1 <= u <= v");
        }
        if (groups.empty() || groups.back().first != t) groups.push_back({t, {}});
        groups.back().second.push_back(
            {static_cast<std::size_t>(u) - 1, static_cast<std::size_t>(v) - 1,
             parse_real(fields[3], line_no)});
    }

    SpotMatrixSeries out;
    for (auto& [t, entries] : groups) {
        std::size_t d = 0;
        for (const auto& e : entries) d = std::max(d, e.v + 1);
        if (entries.size() != d * (d + 1) / 2) {
            throw ValidationError("series block at t = " + format_real(t) +
                                  " is not a full upper triangle");
        }
        SymMatrix m(d);
        for (const auto& e : entries) m.set(e.u, e.v, e.value);
        out.push(t, std::nullopt, std::move(m));
    }
    return out;
}

PathSample read_path_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file.string());
    return read_path_csv(in);
}

void write_path_file(const PathSample& path, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot create " + file.string());
    write_path_csv(path, out);
}

void write_series_files(const SpotMatrixSeries& series, const std::filesystem::path& stem) {
    const std::filesystem::path matrix = stem.string() + "_sigma.csv";
    const std::filesystem::path spectrum = stem.string() + "_spectrum.csv";
    std::ofstream m(matrix);
    std::ofstream s(spectrum);
    if (!m || !s) throw IoError("cannot create " + matrix.string());
    write_series_csv(series, m, s);
}

}  // namespace spotvol::io
