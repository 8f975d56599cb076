#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "ecc/common.hpp"
#include "ecc/vcec.hpp"

namespace ecc {

// Euler characteristic curve: chi(K_<=t) at every distinct grayscale value t,
// thresholds strictly increasing. The final chi is 1 for any complete image.
template <class T>
struct EccCurve {
  std::vector<T> thresholds;
  std::vector<std::int64_t> chi;

  std::size_t size() const { return thresholds.size(); }
  bool operator==(const EccCurve&) const = default;
};

// Prefix-sums the VCEC in place; O(m).
template <class T>
EccCurve<T> vcec_to_ecc(GlobalVcec<T> vcec) {
  if (vcec.size() == 0) throw error("cannot build an ECC from an empty VCEC");
  EccCurve<T> curve{std::move(vcec.values), std::move(vcec.changes)};
  for (std::size_t i = 1; i < curve.chi.size(); ++i)
    curve.chi[i] += curve.chi[i - 1];
  return curve;
}

// Thresholds where the curve is exactly zero, plus right endpoints of strict
// sign changes. Used as heuristic segmentation thresholds.
template <class T>
std::vector<T> zero_crossings(const EccCurve<T>& curve) {
  std::vector<T> out;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve.chi[i] == 0) {
      out.push_back(curve.thresholds[i]);
    } else if (i > 0 && curve.chi[i - 1] != 0 &&
               (curve.chi[i] > 0) != (curve.chi[i - 1] > 0)) {
      out.push_back(curve.thresholds[i]);
    }
  }
  return out;
}

enum class CurveFormat { csv, json };

namespace detail {

// Shortest decimal representation that parses back to the identical value.
template <class T>
std::string format_value(T v) {
  char buf[48];
  std::to_chars_result r;
  if constexpr (std::is_floating_point_v<T>)
    r = std::to_chars(buf, buf + sizeof buf, v);
  else
    r = std::to_chars(buf, buf + sizeof buf, static_cast<std::int64_t>(v));
  return std::string(buf, r.ptr);
}

template <class T>
T parse_value(std::string_view s) {
  T v{};
  if constexpr (std::is_same_v<T, std::uint8_t>) {
    int x = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    if (r.ec != std::errc{} || x < 0 || x > 255)
      throw error("bad u8 value '" + std::string(s) + "'");
    return static_cast<std::uint8_t>(x);
  } else {
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{}) throw error("bad value '" + std::string(s) + "'");
    return v;
  }
}

}  // namespace detail

template <class T>
void write_curve(const EccCurve<T>& curve, CurveFormat format,
                 std::ostream& out) {
  std::string buf;
  buf.reserve(1 << 16);
  if (format == CurveFormat::csv) {
    buf += "threshold,euler_characteristic\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
      buf += detail::format_value(curve.thresholds[i]);
      buf += ',';
      buf += detail::format_value(curve.chi[i]);
      buf += '\n';
      if (buf.size() > (1 << 16)) {
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        buf.clear();
      }
    }
  } else {
    buf += '[';
    for (std::size_t i = 0; i < curve.size(); ++i) {
      if (i) buf += ',';
      buf += "{\"t\":";
      buf += detail::format_value(curve.thresholds[i]);
      buf += ",\"chi\":";
      buf += detail::format_value(curve.chi[i]);
      buf += '}';
      if (buf.size() > (1 << 16)) {
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        buf.clear();
      }
    }
    buf += "]\n";
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw error("curve write failure");
}

template <class T>
void write_curve(const EccCurve<T>& curve, CurveFormat format,
                 const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw error("cannot open '" + path + "' for writing");
  write_curve(curve, format, out);
}

template <class T>
EccCurve<T> read_curve_csv(std::istream& in) {
  EccCurve<T> curve;
  std::string line;
  if (!std::getline(in, line) || line != "threshold,euler_characteristic")
    throw error("bad curve CSV header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw error("bad curve CSV row");
    curve.thresholds.push_back(
        detail::parse_value<T>(std::string_view(line).substr(0, comma)));
    std::int64_t chi = 0;
    auto r = std::from_chars(line.data() + comma + 1,
                             line.data() + line.size(), chi);
    if (r.ec != std::errc{}) throw error("bad curve CSV row");
    curve.chi.push_back(chi);
  }
  return curve;
}

// CSV of the raw VCEC: value,change per row.
template <class T>
void write_vcec(const GlobalVcec<T>& vcec, std::ostream& out) {
  std::string buf = "value,change\n";
  for (std::size_t i = 0; i < vcec.size(); ++i) {
    buf += detail::format_value(vcec.values[i]);
    buf += ',';
    buf += detail::format_value(vcec.changes[i]);
    buf += '\n';
    if (buf.size() > (1 << 16)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw error("VCEC write failure");
}

}  // namespace ecc
