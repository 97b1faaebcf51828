#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "rdsphere/sphere.hpp"

namespace rdsphere {

// Shortest round-trip decimal form.
std::string fmt(double v);
double parse_double(std::string_view s);
long long parse_int(std::string_view s);
cplx parse_complex(std::string_view s);  // "re,im" or "re"
std::string fmt_complex(cplx z);

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_ws(std::string_view s);

std::uint64_t fnv1a(std::string_view s);
std::string hex64(std::uint64_t v);

// Minimal CSV writer: header row, comma separated, fixed number formatting.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    CsvWriter& operator<<(double v);
    CsvWriter& operator<<(long long v);
    CsvWriter& operator<<(int v) { return *this << static_cast<long long>(v); }
    CsvWriter& operator<<(std::size_t v) { return *this << static_cast<long long>(v); }
    CsvWriter& operator<<(const std::string& v);
    CsvWriter& operator<<(const char* v) { return *this << std::string(v); }
    void end_row();
    void close();

private:
    void sep();
    std::ofstream out_;
    bool first_ = true;
};

// Writes re, im, is_inf columns for a point.
void put_point(CsvWriter& w, const SpherePoint& p);

}  // namespace rdsphere
