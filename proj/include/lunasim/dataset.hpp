#pragma once

// Weekly sales CSV (date,units) to monthly pools of daily demand in millions.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lunasim/demand.hpp"

namespace lunasim {

struct WeeklySalesDataset {
  MonthlyPools pools;
  long rows = 0;     // data rows read, excluding the header
  long skipped = 0;  // malformed rows
};

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// round(units / 7 / 10^6) with ties rounded up, in exact integer arithmetic.
inline std::uint64_t daily_demand_millions(std::uint64_t weekly_units) {
  return (2 * weekly_units + 7'000'000) / 14'000'000;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

inline bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) { return ch >= '0' && ch <= '9'; });
}

/// Month (1..12) of an ISO date YYYY-MM-DD, or 0 when malformed.
inline int iso_month(std::string_view d) {
  if (d.size() != 10 || d[4] != '-' || d[7] != '-') return 0;
  if (!all_digits(d.substr(0, 4)) || !all_digits(d.substr(5, 2)) || !all_digits(d.substr(8, 2))) return 0;
  const int month = (d[5] - '0') * 10 + (d[6] - '0');
  const int day = (d[8] - '0') * 10 + (d[9] - '0');
  if (month < 1 || month > 12 || day < 1 || day > 31) return 0;
  return month;
}

}  // namespace detail

inline WeeklySalesDataset ingest_weekly_sales(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DatasetError("ingest: empty input");
  {
    const std::string_view h(line);
    const auto comma = h.find(',');
    std::string a(detail::trim(h.substr(0, comma)));
    std::string b(comma == std::string_view::npos ? "" : detail::trim(h.substr(comma + 1)));
    for (auto* s : {&a, &b})
      std::transform(s->begin(), s->end(), s->begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (a != "date" || b != "units") throw DatasetError("ingest: header must be 'date,units'");
  }
  WeeklySalesDataset ds;
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max() / 4;
  while (std::getline(in, line)) {
    const std::string_view row(line);
    if (detail::trim(row).empty()) continue;
    ++ds.rows;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
      ++ds.skipped;
      continue;
    }
    const int month = detail::iso_month(detail::trim(row.substr(0, comma)));
    const auto units = detail::trim(row.substr(comma + 1));
    if (month == 0 || !detail::all_digits(units) || units.size() > 18) {
      ++ds.skipped;
      continue;
    }
    const std::uint64_t u = std::stoull(std::string(units));
    if (u > kMax) {
      ++ds.skipped;
      continue;
    }
    ds.pools.months[static_cast<std::size_t>(month - 1)].push_back(static_cast<double>(daily_demand_millions(u)));
  }
  return ds;
}

inline WeeklySalesDataset ingest_weekly_sales_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("ingest: cannot open " + path);
  return ingest_weekly_sales(in);
}

}  // namespace lunasim
