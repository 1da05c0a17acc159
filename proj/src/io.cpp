#include "solitonforge/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "solitonforge/errors.hpp"

namespace solitonforge {
namespace {

void put_le(std::ostream& out, double value) {
  auto bits = std::bit_cast<std::uint64_t>(value);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  char buf[8];
  std::memcpy(buf, &bits, 8);
  out.write(buf, 8);
}

double get_le(const char* p) {
  std::uint64_t bits;
  std::memcpy(&bits, p, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  return std::bit_cast<double>(bits);
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SolverError(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw SolverError(ErrorKind::IoError, "write failed for " + path.string());
}

struct RawFile {
  json header;
  std::string payload;
};

RawFile read_raw(const std::filesystem::path& path, std::string_view format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SolverError(ErrorKind::IoError, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  RawFile raw;
  try {
    raw.header = json::parse(line);
  } catch (const json::exception& e) {
    throw SolverError(ErrorKind::IoError, path.string() + ": bad header: " + e.what());
  }
  if (raw.header.value("format", std::string{}) != format) {
    throw SolverError(ErrorKind::IoError, path.string() + ": expected format " + std::string(format));
  }
  std::ostringstream rest;
  rest << in.rdbuf();
  raw.payload = rest.str();
  return raw;
}

std::vector<double> decode(const RawFile& raw, std::size_t count, const std::filesystem::path& path) {
  if (raw.payload.size() != 8 * count) {
    std::ostringstream msg;
    msg << path.string() << ": payload has " << raw.payload.size() << " bytes, expected " << 8 * count;
    throw SolverError(ErrorKind::IoError, msg.str());
  }
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = get_le(raw.payload.data() + 8 * i);
  return out;
}

void write_samples(const std::filesystem::path& path, const SampledProfile& s, json header) {
  header["format"] = "solitonforge.prof";
  header["version"] = 1;
  header["dx"] = s.dx;
  header["extent"] = s.extent;
  header["count"] = s.size();
  header["layout"] = "values then derivatives, little-endian float64";
  auto out = open_out(path);
  out << header.dump() << '\n';
  for (double v : s.values) put_le(out, v);
  for (double v : s.derivatives) put_le(out, v);
  finish(out, path);
}

}  // namespace

void write_profile(const std::filesystem::path& path, const BoundStateProfile& profile,
                   const json& extra) {
  json header = extra;
  header["kind"] = "bound_state";
  header["omega"] = profile.omega();
  header["method"] = profile.method;
  header["residual"] = profile.residual;
  header["fitted_decay"] = profile.fitted_decay;
  write_samples(path, profile.samples(), std::move(header));
}

void write_profile(const std::filesystem::path& path, const KinkProfile& profile, const json& extra) {
  json header = extra;
  header["kind"] = "kink";
  header["omega1"] = profile.omega1();
  header["zeta1"] = profile.zeta1();
  header["left_limit"] = profile.left_limit();
  header["right_limit"] = profile.right_limit();
  header["orientation"] = profile.orientation() == KinkOrientation::ZeroAtMinusInfinity
                              ? "zero_at_minus_infinity"
                              : "zero_at_plus_infinity";
  header["first_integral_constant"] = profile.first_integral_constant;
  header["fitted_decay_left"] = profile.fitted_decay_left;
  header["fitted_decay_right"] = profile.fitted_decay_right;
  write_samples(path, profile.samples(), std::move(header));
}

ProfileFile read_profile(const std::filesystem::path& path) {
  auto raw = read_raw(path, "solitonforge.prof");
  const auto n = raw.header.at("count").get<std::size_t>();
  auto data = decode(raw, 2 * n, path);
  ProfileFile file;
  file.samples.dx = raw.header.at("dx").get<double>();
  file.samples.extent = raw.header.at("extent").get<double>();
  file.samples.values.assign(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(n));
  file.samples.derivatives.assign(data.begin() + static_cast<std::ptrdiff_t>(n), data.end());
  file.header = std::move(raw.header);
  return file;
}

void write_field(const std::filesystem::path& path, const ComplexField& field, const json& extra) {
  json header = extra;
  header["format"] = "solitonforge.fld";
  header["version"] = 1;
  header["t"] = field.time();
  header["L"] = field.grid().length();
  header["N"] = field.size();
  header["dim"] = 1;
  header["layout"] = "interleaved re, im, little-endian float64";
  auto out = open_out(path);
  out << header.dump() << '\n';
  for (const auto& z : field.values()) {
    put_le(out, z.real());
    put_le(out, z.imag());
  }
  finish(out, path);
}

ComplexField read_field(const std::filesystem::path& path, json* header) {
  auto raw = read_raw(path, "solitonforge.fld");
  const auto n = raw.header.at("N").get<std::size_t>();
  auto data = decode(raw, 2 * n, path);
  std::vector<cplx> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = {data[2 * i], data[2 * i + 1]};
  Grid1D grid(raw.header.at("L").get<double>(), n);
  ComplexField field(grid, raw.header.at("t").get<double>(), std::move(values));
  if (header) *header = std::move(raw.header);
  return field;
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  auto out = open_out(path);
  for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << columns[j];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size()) {
      throw SolverError(ErrorKind::InvalidArgument, "CSV row width does not match header in " + path.string());
    }
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_number(row[j]);
    out << '\n';
  }
  finish(out, path);
}

void write_json(const std::filesystem::path& path, const json& value) {
  auto out = open_out(path);
  out << value.dump(2) << '\n';
  finish(out, path);
}

}  // namespace solitonforge
