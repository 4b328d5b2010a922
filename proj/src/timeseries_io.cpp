#include "redcsd/timeseries_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <sstream>
#include <system_error>

#include "redcsd/error.hpp"

namespace redcsd {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_number(std::string_view field, std::size_t line) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
        throw InputError("not a number: '" + std::string(field) + "'", line);
    }
    if (!std::isfinite(v)) {
        throw InputError("non-finite value", line);
    }
    return v;
}

void append_double(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::string s;
    append_double(s, v);
    return s;
}

CsvSeries parse_series_csv(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (!have_header && std::getline(in, line)) {
        ++lineno;
        have_header = !trim(line).empty();
    }
    if (!have_header) {
        throw InputError("empty input");
    }
    const auto header = split_fields(line);
    if (header.size() < 2 || header.size() > 3 || header[0] != "t") {
        throw InputError("expected header 't,<value>' or 't,v,p'", lineno);
    }
    if (header.size() == 3 && (header[1] != "v" || header[2] != "p")) {
        throw InputError("paired input must have header 't,v,p'", lineno);
    }
    CsvSeries out;
    for (std::size_t k = 1; k < header.size(); ++k) {
        if (header[k].empty()) throw InputError("empty column name", lineno);
        out.columns.emplace_back(header[k]);
    }
    const bool paired = header.size() == 3;

    std::vector<double> t, a, b;
    std::vector<std::size_t> lines;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw InputError("expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()),
                             lineno);
        }
        t.push_back(parse_number(fields[0], lineno));
        a.push_back(parse_number(fields[1], lineno));
        if (paired) b.push_back(parse_number(fields[2], lineno));
        lines.push_back(lineno);
    }
    if (t.size() < 2) {
        throw InputError("need at least two samples", lineno);
    }
    const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    if (!(dt > 0.0)) {
        throw InputError("time column must increase", lines.back());
    }
    for (std::size_t k = 1; k < t.size(); ++k) {
        const double step = t[k] - t[k - 1];
        if (std::abs(step - dt) > SAMPLING_JITTER_REL * dt) {
            throw InputError("non-uniform sampling", lines[k]);
        }
    }
    out.first = TimeSeries{std::move(a), dt, t.front()};
    if (paired) out.second = TimeSeries{std::move(b), dt, t.front()};
    return out;
}

CsvSeries read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return parse_series_csv(in);
}

std::string format_series_csv(const TimeSeries& x, std::string_view column) {
    std::string out = "t,";
    out.append(column);
    out.push_back('\n');
    out.reserve(out.size() + x.size() * 32);
    for (std::size_t k = 0; k < x.size(); ++k) {
        append_double(out, x.time(k));
        out.push_back(',');
        append_double(out, x.values[k]);
        out.push_back('\n');
    }
    return out;
}

std::string format_paired_csv(const TimeSeries& v, const TimeSeries& p) {
    if (v.size() != p.size()) {
        throw DomainError("paired series differ in length");
    }
    std::string out = "t,v,p\n";
    for (std::size_t k = 0; k < v.size(); ++k) {
        append_double(out, v.time(k));
        out.push_back(',');
        append_double(out, v.values[k]);
        out.push_back(',');
        append_double(out, p.values[k]);
        out.push_back('\n');
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            throw IoError("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename onto " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

void put_le64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

std::uint64_t get_le64(const char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    }
    return v;
}

}  // namespace

std::string encode_binary(const TimeSeries& x) {
    std::string out;
    out.reserve(16 + 8 * x.size());
    put_le64(out, x.size());
    put_le64(out, std::bit_cast<std::uint64_t>(x.dt));
    for (double v : x.values) {
        put_le64(out, std::bit_cast<std::uint64_t>(v));
    }
    return out;
}

TimeSeries decode_binary(std::string_view bytes) {
    if (bytes.size() < 16) {
        throw InputError("binary series shorter than its header");
    }
    const std::uint64_t n = get_le64(bytes.data());
    if ((bytes.size() - 16) / 8 != n || (bytes.size() - 16) % 8 != 0) {
        throw InputError("binary series length does not match its header");
    }
    TimeSeries x;
    x.dt = std::bit_cast<double>(get_le64(bytes.data() + 8));
    x.values.resize(n);
    for (std::uint64_t k = 0; k < n; ++k) {
        x.values[k] = std::bit_cast<double>(get_le64(bytes.data() + 16 + 8 * k));
    }
    return x;
}

void write_series_binary(const std::filesystem::path& path, const TimeSeries& x) {
    write_file_atomic(path, encode_binary(x));
}

TimeSeries read_series_binary(const std::filesystem::path& path) {
    return decode_binary(read_file(path));
}

}  // namespace redcsd
