#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "solitonforge/config.hpp"
#include "solitonforge/errors.hpp"
#include "solitonforge/io.hpp"

using namespace solitonforge;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "solitonforge_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string config_error(const std::string& text, ConfigFormat format) {
  try {
    parse_config(text, format, "cfg");
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
    return e.what();
  }
  ADD_FAILURE() << "config accepted";
  return {};
}

}  // namespace

TEST(Io, ProfileRoundTrip) {
  const auto p = ground_state_closed_form(NonlinearitySpec::power(2.0), 1.0);
  const auto path = scratch("cubic.prof");
  write_profile(path, p);
  const auto f = read_profile(path);
  EXPECT_EQ(f.header.at("kind"), "bound_state");
  EXPECT_EQ(f.samples.values, p.samples().values);
  EXPECT_EQ(f.samples.derivatives, p.samples().derivatives);
  EXPECT_EQ(f.samples.dx, p.samples().dx);
  // Header line, then 16 bytes per sample.
  std::ifstream in(path, std::ios::binary);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(fs::file_size(path), header.size() + 1 + 16 * p.samples().size());
}

TEST(Io, KinkHeaderFields) {
  const auto spec = NonlinearitySpec::combined(1.0, 2.0);
  const auto k = kink_profile(spec, 3.0 / 16.0);
  const auto path = scratch("kink.prof");
  write_profile(path, k);
  const auto f = read_profile(path);
  EXPECT_EQ(f.header.at("kind"), "kink");
  EXPECT_DOUBLE_EQ(f.header.at("zeta1").get<double>(), k.zeta1());
  EXPECT_EQ(f.header.at("orientation"), "zero_at_minus_infinity");
}

TEST(Io, FieldRoundTripIsLittleEndianInterleaved) {
  const Grid1D grid(10.0, 4);
  ComplexField u(grid, 0.25, {{1.0, -2.0}, {0.5, 0.0}, {3.0, 4.0}, {-1.0, 1e-300}});
  const auto path = scratch("u.fld");
  write_field(path, u);
  json header;
  const auto v = read_field(path, &header);
  EXPECT_EQ(header.at("N"), 4);
  EXPECT_DOUBLE_EQ(v.time(), 0.25);
  EXPECT_EQ(v.grid(), grid);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(v[i], u[i]);
  // The first payload byte is the least significant byte of Re u_0 = 1.0.
  std::ifstream in(path, std::ios::binary);
  std::string line;
  std::getline(in, line);
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  EXPECT_EQ(bytes[0], 0x00);
  EXPECT_EQ(bytes[7], 0x3f);
  EXPECT_EQ(bytes[6], 0xf0);
}

TEST(Io, TruncatedFileRejected) {
  const auto path = scratch("bad.fld");
  std::ofstream(path) << R"({"format":"solitonforge.fld","N":4,"L":1.0,"t":0.0})" << '\n' << "short";
  try {
    read_field(path);
    FAIL() << "expected IoError";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IoError);
  }
}

TEST(Io, CsvUsesSeventeenDigits) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(1.0), "1");
  const auto path = scratch("t.csv");
  write_csv(path, {"a", "b"}, {{0.1, 2.0}, {1.0 / 3.0, -1e-20}});
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  EXPECT_EQ(s.str(), "a,b\n0.10000000000000001,2\n0.33333333333333331,-9.9999999999999995e-21\n");
  EXPECT_THROW(write_csv(path, {"a"}, {{1.0, 2.0}}), SolverError);
}

TEST(Config, TomlAndJsonAgree) {
  const auto a = parse_config("job = \"glue\"\n[grid]\nN = 512\nL = 12.5\n[train]\nv_star = 16\n", ConfigFormat::Toml);
  const auto b = parse_config(R"({"job": "glue", "grid": {"N": 512, "L": 12.5}, "train": {"v_star": 16}})",
                              ConfigFormat::Json);
  EXPECT_EQ(a.data, b.data);
  EXPECT_EQ(a.integer("grid.N", 0), 512);
  EXPECT_DOUBLE_EQ(a.number("train.v_star", 0.0), 16.0);
  EXPECT_DOUBLE_EQ(a.number("glue.t_max", 7.0), 7.0);
}

TEST(Config, UnknownKeyReportsLineAndPath) {
  const auto msg = config_error("job = \"glue\"\n[glue]\nt_max = 10\ntmax = 3\n", ConfigFormat::Toml);
  EXPECT_NE(msg.find("cfg:4"), std::string::npos) << msg;
  EXPECT_NE(msg.find("glue.tmax"), std::string::npos) << msg;
  EXPECT_NE(msg.find("unknown key"), std::string::npos) << msg;
}

TEST(Config, UnknownKeyInJsonHasLine) {
  const auto msg = config_error("{\n  \"grid\": {\n    \"N\": 64,\n    \"M\": 3\n  }\n}\n", ConfigFormat::Json);
  EXPECT_NE(msg.find("cfg:4"), std::string::npos) << msg;
  EXPECT_NE(msg.find("grid.M"), std::string::npos) << msg;
}

TEST(Config, TypeAndChoiceErrors) {
  EXPECT_NE(config_error("[grid]\nN = 1.5\n", ConfigFormat::Toml).find("expected an integer"), std::string::npos);
  EXPECT_NE(config_error("[glue]\nmethod = \"newton\"\n", ConfigFormat::Toml).find("not one of"), std::string::npos);
  EXPECT_NE(config_error("[[train.solitons]]\nomega = 1\nspeed = 3\n", ConfigFormat::Toml).find("train.solitons[0].speed"),
            std::string::npos);
}

TEST(Config, SyntaxErrorsCarryLine) {
  EXPECT_NE(config_error("job = \"glue\"\n[grid\n", ConfigFormat::Toml).find("cfg:2"), std::string::npos);
  EXPECT_NE(config_error("{\n\"job\": \n}", ConfigFormat::Json).find("cfg:3"), std::string::npos);
}

TEST(Config, SetRevalidates) {
  auto c = parse_config("[train]\nv_star = 8\n", ConfigFormat::Toml);
  c.set("train.v_star", 32.0);
  EXPECT_DOUBLE_EQ(c.number("train.v_star", 0.0), 32.0);
  c.set("glue.dt", 2e-3);
  EXPECT_DOUBLE_EQ(c.number("glue.dt", 0.0), 2e-3);
  EXPECT_THROW(c.set("glue.bogus", 1.0), SolverError);
}

TEST(Config, LoadByExtension) {
  const auto path = scratch("c.toml");
  std::ofstream(path) << "job = \"check\"\n";
  EXPECT_EQ(load_config(path).string("job", ""), "check");
  const auto other = scratch("c.yaml");
  std::ofstream(other) << "job: check\n";
  EXPECT_THROW(load_config(other), SolverError);
}
