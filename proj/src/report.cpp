#include "nuclear/report.hpp"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "nuclear/error.hpp"

namespace nuclear {
namespace {

constexpr std::string_view kHeader =
    "x,theta,z,Theta,exact,s7,s8,ratio_s7,ratio_s8,sigma_v,F_v,elapsed_ms,ambiguous";
constexpr int kColumns = 13;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }
std::string opt_int(const std::optional<u64>& v) { return v ? std::to_string(*v) : std::string(); }

double parse_double(std::string_view s, std::string_view column) {
  const std::string copy(s);
  char* end = nullptr;
  const double v = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size()) {
    fail(ErrorKind::invalid_argument,
         "bad number '" + copy + "' in column " + std::string(column));
  }
  return v;
}

u64 parse_int(std::string_view s, std::string_view column) {
  u64 v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorKind::invalid_argument,
         "bad integer '" + std::string(s) + "' in column " + std::string(column));
  }
  return v;
}

std::optional<double> opt_double(std::string_view s, std::string_view column) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, column);
}

std::optional<u64> opt_u64(std::string_view s, std::string_view column) {
  if (s.empty()) return std::nullopt;
  return parse_int(s, column);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) fail(ErrorKind::io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorKind::io, "cannot move report into " + path.string() + ": " + ec.message());
  }
}

// nlohmann reads "-0" as the integer 0, so keep the sign with a fraction
std::string json_double(double v) { return v == 0 && std::signbit(v) ? "-0.0" : num(v); }
std::string json_num(const std::optional<double>& v) { return v ? json_double(*v) : "null"; }
std::string json_int(const std::optional<u64>& v) { return v ? std::to_string(*v) : "null"; }

std::optional<double> json_opt_double(const nlohmann::json& o, const char* key) {
  const auto& v = o.at(key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) fail(ErrorKind::invalid_argument, std::string("non-numeric ") + key);
  return v.get<double>();
}

std::optional<u64> json_opt_u64(const nlohmann::json& o, const char* key) {
  const auto& v = o.at(key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number_unsigned()) {
    fail(ErrorKind::invalid_argument, std::string("non-integer ") + key);
  }
  return v.get<u64>();
}

}  // namespace

ReportFormat parse_format(std::string_view text) {
  if (text == "csv") return ReportFormat::csv;
  if (text == "json") return ReportFormat::json;
  fail(ErrorKind::usage, "--format must be csv or json, got '" + std::string(text) + "'");
}

std::string ThetaKey::str() const { return real ? num(*real) : rational.str(); }

ThetaKey ThetaKey::parse(std::string_view text) {
  ThetaKey key;
  if (text.find('/') != std::string_view::npos) {
    key.rational = ThetaRational::parse(text);
  } else {
    key.real = parse_double(text, "theta");
  }
  return key;
}

bool CompareRow::same_values(const CompareRow& o) const {
  return std::tie(x, theta, z, Theta, exact, s7, s8, ratio_s7, ratio_s8, sigma_v, F_v,
                  elapsed_ms, ambiguous) ==
         std::tie(o.x, o.theta, o.z, o.Theta, o.exact, o.s7, o.s8, o.ratio_s7, o.ratio_s8,
                  o.sigma_v, o.F_v, o.elapsed_ms, o.ambiguous);
}

void CompareReport::sort() {
  std::stable_sort(rows.begin(), rows.end(), [](const CompareRow& a, const CompareRow& b) {
    return std::make_tuple(a.theta.value(), a.x, a.z, a.Theta) <
           std::make_tuple(b.theta.value(), b.x, b.z, b.Theta);
  });
}

std::string format_csv(const CompareReport& report) {
  std::string out(kHeader);
  out += '\n';
  for (const CompareRow& r : report.rows) {
    const std::string fields[kColumns] = {
        num(r.x),           r.theta.str(),        num(r.z),          num(r.Theta),
        opt_int(r.exact),   opt_num(r.s7),        opt_num(r.s8),     opt_num(r.ratio_s7),
        opt_num(r.ratio_s8), opt_num(r.sigma_v),  opt_num(r.F_v),    opt_num(r.elapsed_ms),
        opt_int(r.ambiguous)};
    for (int i = 0; i < kColumns; ++i) {
      if (i) out += ',';
      out += fields[i];
    }
    out += '\n';
  }
  return out;
}

std::string format_json(const CompareReport& report) {
  std::string out = "[";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const CompareRow& r = report.rows[i];
    out += i ? ",\n  {" : "\n  {";
    out += "\"x\": " + json_double(r.x);
    out += ", \"theta\": \"" + r.theta.str() + "\"";
    out += ", \"z\": " + json_double(r.z);
    out += ", \"Theta\": " + json_double(r.Theta);
    out += ", \"exact\": " + json_int(r.exact);
    out += ", \"s7\": " + json_num(r.s7);
    out += ", \"s8\": " + json_num(r.s8);
    out += ", \"ratio_s7\": " + json_num(r.ratio_s7);
    out += ", \"ratio_s8\": " + json_num(r.ratio_s8);
    out += ", \"sigma_v\": " + json_num(r.sigma_v);
    out += ", \"F_v\": " + json_num(r.F_v);
    out += ", \"elapsed_ms\": " + json_num(r.elapsed_ms);
    out += ", \"ambiguous\": " + json_int(r.ambiguous);
    out += "}";
  }
  out += report.rows.empty() ? "]\n" : "\n]\n";
  return out;
}

CompareReport parse_csv(std::string_view text) {
  CompareReport report;
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines.front() != kHeader) {
    fail(ErrorKind::invalid_argument, "CSV header does not match the report layout");
  }
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto f = split(lines[li], ',');
    if (f.size() != kColumns) {
      fail(ErrorKind::invalid_argument,
           "CSV line " + std::to_string(li + 1) + " has " + std::to_string(f.size()) +
               " fields, expected " + std::to_string(kColumns));
    }
    CompareRow r;
    r.x = parse_double(f[0], "x");
    r.theta = ThetaKey::parse(f[1]);
    r.z = parse_double(f[2], "z");
    r.Theta = parse_double(f[3], "Theta");
    r.exact = opt_u64(f[4], "exact");
    r.s7 = opt_double(f[5], "s7");
    r.s8 = opt_double(f[6], "s8");
    r.ratio_s7 = opt_double(f[7], "ratio_s7");
    r.ratio_s8 = opt_double(f[8], "ratio_s8");
    r.sigma_v = opt_double(f[9], "sigma_v");
    r.F_v = opt_double(f[10], "F_v");
    r.elapsed_ms = opt_double(f[11], "elapsed_ms");
    r.ambiguous = opt_u64(f[12], "ambiguous");
    report.rows.push_back(std::move(r));
  }
  return report;
}

CompareReport parse_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::invalid_argument, std::string("malformed JSON report: ") + e.what());
  }
  if (!doc.is_array()) fail(ErrorKind::invalid_argument, "JSON report must be an array");
  CompareReport report;
  try {
    for (const auto& o : doc) {
      CompareRow r;
      r.x = o.at("x").get<double>();
      r.theta = ThetaKey::parse(o.at("theta").get<std::string>());
      r.z = o.at("z").get<double>();
      r.Theta = o.at("Theta").get<double>();
      r.exact = json_opt_u64(o, "exact");
      r.s7 = json_opt_double(o, "s7");
      r.s8 = json_opt_double(o, "s8");
      r.ratio_s7 = json_opt_double(o, "ratio_s7");
      r.ratio_s8 = json_opt_double(o, "ratio_s8");
      r.sigma_v = json_opt_double(o, "sigma_v");
      r.F_v = json_opt_double(o, "F_v");
      r.elapsed_ms = json_opt_double(o, "elapsed_ms");
      r.ambiguous = json_opt_u64(o, "ambiguous");
      report.rows.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::invalid_argument, std::string("JSON report row: ") + e.what());
  }
  return report;
}

void emit_report(const CompareReport& report, ReportFormat format,
                 const std::filesystem::path& path) {
  write_atomic(path, format == ReportFormat::csv ? format_csv(report) : format_json(report));
}

CompareReport read_report(const std::filesystem::path& path, ReportFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return format == ReportFormat::csv ? parse_csv(buf.str()) : parse_json(buf.str());
}

}  // namespace nuclear
