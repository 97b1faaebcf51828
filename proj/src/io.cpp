#include "rdsphere/io.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "rdsphere/errors.hpp"

namespace rdsphere {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view s) {
    std::string t = trim(s);
    if (t == "inf" || t == "+inf") return INFINITY;
    if (t == "-inf") return -INFINITY;
    double v = 0;
    const char* b = t.data();
    if (!t.empty() && t[0] == '+') ++b;
    auto res = std::from_chars(b, t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw PreconditionError("not a number: '" + t + "'");
    return v;
}

long long parse_int(std::string_view s) {
    std::string t = trim(s);
    long long v = 0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw PreconditionError("not an integer: '" + t + "'");
    return v;
}

cplx parse_complex(std::string_view s) {
    auto parts = split(s, ',');
    if (parts.size() == 1) return {parse_double(parts[0]), 0.0};
    if (parts.size() == 2) return {parse_double(parts[0]), parse_double(parts[1])};
    throw PreconditionError("not a complex number: '" + std::string(s) + "'");
}

std::string fmt_complex(cplx z) { return fmt(z.real()) + "," + fmt(z.imag()); }

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i)
        if (i == s.size() || s[i] == sep) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    return out;
}

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 15];
        v >>= 4;
    }
    return out;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw PreconditionError("cannot write '" + path + "'");
    for (const auto& h : header) *this << h;
    end_row();
}

void CsvWriter::sep() {
    if (!first_) out_ << ',';
    first_ = false;
}

CsvWriter& CsvWriter::operator<<(double v) {
    sep();
    out_ << fmt(v);
    return *this;
}

CsvWriter& CsvWriter::operator<<(long long v) {
    sep();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& v) {
    sep();
    out_ << v;
    return *this;
}

void CsvWriter::end_row() {
    out_ << '\n';
    first_ = true;
}

void CsvWriter::close() { out_.close(); }

void put_point(CsvWriter& w, const SpherePoint& p) {
    if (p.is_inf()) {
        w << 0.0 << 0.0 << 1;
    } else {
        w << p.value().real() << p.value().imag() << 0;
    }
}

}  // namespace rdsphere
