#pragma once

// Exact-vs-estimate comparison table and its CSV/JSON forms.
//
// CSV header:
//   x,theta,z,Theta,exact,s7,s8,ratio_s7,ratio_s8,sigma_v,F_v,elapsed_ms,ambiguous
// Reals are written with %.17g so a parse reproduces them bit for bit; absent
// values are empty fields in CSV and null in JSON.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nuclear/counts.hpp"

namespace nuclear {

enum class ReportFormat { csv, json };

ReportFormat parse_format(std::string_view text);

// Either a rational "a/b" or, for --theta-float rows, a plain real.
struct ThetaKey {
  ThetaRational rational{1, 2};
  std::optional<double> real;

  double value() const { return real ? *real : rational.value(); }
  std::string str() const;
  static ThetaKey parse(std::string_view text);

  friend bool operator==(const ThetaKey&, const ThetaKey&) = default;
};

struct CompareRow {
  double x = 0;
  ThetaKey theta;
  double z = 1;
  double Theta = 0;
  std::optional<u64> exact;
  std::optional<double> s7;
  std::optional<double> s8;
  std::optional<double> ratio_s7;
  std::optional<double> ratio_s8;
  std::optional<double> sigma_v;
  std::optional<double> F_v;
  std::optional<double> elapsed_ms;
  std::optional<u64> ambiguous;
  // Not serialized; reported on stderr by the CLI.
  std::string error;

  bool same_values(const CompareRow& o) const;
};

struct CompareReport {
  std::vector<CompareRow> rows;

  // Orders rows by (theta, x, z, Theta).
  void sort();
};

std::string format_csv(const CompareReport& report);
std::string format_json(const CompareReport& report);
CompareReport parse_csv(std::string_view text);
CompareReport parse_json(std::string_view text);

// Writes through a temporary sibling file and renames it into place.
void emit_report(const CompareReport& report, ReportFormat format,
                 const std::filesystem::path& path);

CompareReport read_report(const std::filesystem::path& path, ReportFormat format);

}  // namespace nuclear
