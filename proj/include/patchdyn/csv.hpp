#pragma once

#include <charconv>
#include <concepts>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <string_view>

namespace patchdyn {

// Locale-free shortest round-trip formatting.
std::string format_number(double x);
std::string format_number(long long x);

inline void csv_field(std::ostream& os, double x) { os << format_number(x); }
inline void csv_field(std::ostream& os, std::integral auto x) { os << format_number(static_cast<long long>(x)); }
inline void csv_field(std::ostream& os, std::string_view s) { os << s; }
inline void csv_field(std::ostream& os, const char* s) { os << s; }
inline void csv_field(std::ostream& os, const std::string& s) { os << s; }

template <typename First, typename... Rest>
void csv_row(std::ostream& os, const First& first, const Rest&... rest) {
  csv_field(os, first);
  ((os << ',', csv_field(os, rest)), ...);
  os << '\n';
}

// Opens path for writing, creating parent directories; throws on failure.
std::ofstream open_csv(const std::filesystem::path& path);

}  // namespace patchdyn
