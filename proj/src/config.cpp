#include "solitonforge/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "solitonforge/errors.hpp"
#include "toml.hpp"

namespace solitonforge {
namespace {

enum class Type { Number, Integer, String, Bool, NumberArray, Table, TableArray };

struct Field {
  Type type;
  std::vector<std::string> choices = {};
};

const char* type_name(Type t) {
  switch (t) {
    case Type::Number: return "a number";
    case Type::Integer: return "an integer";
    case Type::String: return "a string";
    case Type::Bool: return "a boolean";
    case Type::NumberArray: return "an array of numbers";
    case Type::Table: return "a table";
    case Type::TableArray: return "an array of tables";
  }
  return "?";
}

const std::map<std::string, Field>& schema() {
  static const std::map<std::string, Field> table = [] {
    const std::vector<std::string> jobs = {"profile", "assemble", "evolve", "glue", "sweep", "check"};
    std::map<std::string, Field> s = {
        {"job", {Type::String, jobs}},
        {"seed", {Type::Integer}},
        {"description", {Type::String}},
        {"output", {Type::String}},

        {"nonlinearity", {Type::Table}},
        {"nonlinearity.kind", {Type::String, {"power", "combined", "gross_pitaevskii", "tabulated"}}},
        {"nonlinearity.alpha", {Type::Number}},
        {"nonlinearity.alpha1", {Type::Number}},
        {"nonlinearity.alpha2", {Type::Number}},
        {"nonlinearity.dim", {Type::Integer}},
        {"nonlinearity.table_s", {Type::NumberArray}},
        {"nonlinearity.table_g", {Type::NumberArray}},

        {"grid", {Type::Table}},
        {"grid.L", {Type::Number}},
        {"grid.L_over_pi", {Type::Number}},
        {"grid.N", {Type::Integer}},

        {"profile", {Type::Table}},
        {"profile.method", {Type::String, {"auto", "closed_form", "shooting", "kink"}}},
        {"profile.omega", {Type::Number}},
        {"profile.omega1", {Type::Number}},
        {"profile.extent", {Type::Number}},
        {"profile.dx", {Type::Number}},
        {"profile.tail_tolerance", {Type::Number}},
        {"profile.ode_tolerance", {Type::Number}},
        {"profile.anchor_fraction", {Type::Number}},

        {"train", {Type::Table}},
        {"train.v_star", {Type::Number}},
        {"train.omega", {Type::Number}},
        {"train.separation", {Type::Number}},
        {"train.collar_width", {Type::Number}},
        {"train.solitons", {Type::TableArray}},
        {"train.solitons[].omega", {Type::Number}},
        {"train.solitons[].v", {Type::Number}},
        {"train.solitons[].x0", {Type::Number}},
        {"train.solitons[].gamma", {Type::Number}},
        {"train.solitons[].profile", {Type::String, {"auto", "closed_form", "shooting"}}},

        {"generator", {Type::Table}},
        {"generator.ratio", {Type::Number}},
        {"generator.vbar", {Type::Number}},
        {"generator.gamma", {Type::Number}},
        {"generator.J", {Type::Integer}},
        {"generator.r1", {Type::Number}},
        {"generator.tail_threshold", {Type::Number}},

        {"assemble", {Type::Table}},
        {"assemble.times", {Type::NumberArray}},
        {"assemble.t_start", {Type::Number}},
        {"assemble.t_end", {Type::Number}},
        {"assemble.samples", {Type::Integer}},
        {"assemble.write_fields", {Type::Bool}},

        {"evolve", {Type::Table}},
        {"evolve.dt", {Type::Number}},
        {"evolve.t0", {Type::Number}},
        {"evolve.t1", {Type::Number}},
        {"evolve.snapshot_stride", {Type::Integer}},
        {"evolve.write_snapshots", {Type::Bool}},
        {"evolve.sponge_strength", {Type::Number}},
        {"evolve.sponge_width", {Type::Number}},
        {"evolve.max_step", {Type::Number}},

        {"glue", {Type::Table}},
        {"glue.method", {Type::String, {"picard", "final_data", "both"}}},
        {"glue.t_max", {Type::Number}},
        {"glue.t_min", {Type::Number}},
        {"glue.dt", {Type::Number}},
        {"glue.fd_dt", {Type::Number}},
        {"glue.lambda", {Type::Number}},
        {"glue.k_max", {Type::Integer}},
        {"glue.tol", {Type::Number}},
        {"glue.norm_exponent", {Type::Number}},
        {"glue.record_stride", {Type::Integer}},
        {"glue.auto_raise_t_min", {Type::Bool}},
        {"glue.sponge_strength", {Type::Number}},
        {"glue.sponge_width", {Type::Number}},
        {"glue.write_eta0", {Type::Bool}},

        {"sweep", {Type::Table}},
        {"sweep.axis", {Type::String}},
        {"sweep.values", {Type::NumberArray}},
        {"sweep.job", {Type::String, {"profile", "assemble", "evolve", "glue", "check"}}},

        {"check", {Type::Table}},
        {"check.kind",
         {Type::String,
          {"growth_bounds", "train_admissibility", "velocity_spread", "exponents", "kink_frequency"}}},
        {"check.r1", {Type::Number}},
        {"check.M", {Type::Number}},
        {"check.beta1", {Type::Number}},
        {"check.beta2", {Type::Number}},
        {"check.omega0", {Type::Number}},
        {"check.s_min", {Type::Number}},
        {"check.s_max", {Type::Number}},
        {"check.points", {Type::Integer}},
        {"check.constant_limit", {Type::Number}},
        {"check.partial_sum_terms", {Type::Integer}},
        {"check.pair_terms", {Type::Integer}},
        {"check.tail_threshold", {Type::Number}},
        {"check.truncation", {Type::Integer}},
        {"check.velocities", {Type::NumberArray}},
    };
    for (const char* side : {"train.left_kink", "train.right_kink"}) {
      const std::string p = side;
      s[p] = {Type::Table};
      s[p + ".omega"] = {Type::Number};
      s[p + ".v"] = {Type::Number};
      s[p + ".x0"] = {Type::Number};
      s[p + ".gamma"] = {Type::Number};
      s[p + ".profile"] = {Type::String, {"auto", "gross_pitaevskii"}};
    }
    return s;
  }();
  return table;
}

bool type_matches(const json& v, Type t) {
  switch (t) {
    case Type::Number: return v.is_number();
    case Type::Integer: return v.is_number_integer();
    case Type::String: return v.is_string();
    case Type::Bool: return v.is_boolean();
    case Type::NumberArray:
      return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); });
    case Type::Table: return v.is_object();
    case Type::TableArray:
      return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_object(); });
  }
  return false;
}

[[noreturn]] void fail(const ExperimentConfig& cfg, const std::string& path, const std::string& what) {
  throw SolverError(ErrorKind::ConfigError, cfg.locate(path) + ": " + what);
}

void walk(const ExperimentConfig& cfg, const json& node, const std::string& generic,
          const std::string& actual) {
  for (const auto& [key, value] : node.items()) {
    const std::string g = generic.empty() ? key : generic + "." + key;
    const std::string a = actual.empty() ? key : actual + "." + key;
    const auto it = schema().find(g);
    if (it == schema().end()) fail(cfg, a, "unknown key");
    const Field& field = it->second;
    if (!type_matches(value, field.type)) fail(cfg, a, std::string("expected ") + type_name(field.type));
    if (!field.choices.empty()) {
      const auto s = value.get<std::string>();
      if (std::find(field.choices.begin(), field.choices.end(), s) == field.choices.end()) {
        std::string allowed;
        for (const auto& c : field.choices) allowed += (allowed.empty() ? "" : ", ") + c;
        fail(cfg, a, "'" + s + "' is not one of " + allowed);
      }
    }
    if (field.type == Type::Table) walk(cfg, value, g, a);
    if (field.type == Type::TableArray) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        walk(cfg, value[i], g + "[]", a + "[" + std::to_string(i) + "]");
      }
    }
  }
}

json from_toml(const toml::node& node, const std::string& path, std::map<std::string, int>& lines) {
  if (!path.empty()) lines[path] = static_cast<int>(node.source().begin.line);
  if (const auto* t = node.as_table()) {
    json out = json::object();
    for (const auto& [k, v] : *t) {
      const std::string key(k.str());
      const std::string child = path.empty() ? key : path + "." + key;
      lines[child] = static_cast<int>(k.source().begin.line);
      out[key] = from_toml(v, child, lines);
      if (!v.is_table() && !v.is_array()) lines[child] = static_cast<int>(k.source().begin.line);
    }
    return out;
  }
  if (const auto* a = node.as_array()) {
    json out = json::array();
    std::size_t i = 0;
    for (const auto& v : *a) out.push_back(from_toml(v, path + "[" + std::to_string(i++) + "]", lines));
    return out;
  }
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  if (const auto* v = node.as_string()) return v->get();
  throw SolverError(ErrorKind::ConfigError, "line " + std::to_string(node.source().begin.line) + ": key '" +
                                                path + "': dates and times are not supported");
}

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// nlohmann does not track positions; keys are located by a forward textual
// search in document order.
void json_lines(const nlohmann::ordered_json& node, const std::string& path, const std::string& text,
                std::size_t& cursor, std::map<std::string, int>& lines) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) {
      const std::string child = path.empty() ? key : path + "." + key;
      const auto pos = text.find("\"" + key + "\"", cursor);
      if (pos != std::string::npos) {
        cursor = pos + key.size() + 2;
        lines[child] = line_of_offset(text, pos);
      }
      json_lines(value, child, text, cursor, lines);
    }
  } else if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      const std::string child = path + "[" + std::to_string(i) + "]";
      lines[child] = line_of_offset(text, cursor);
      json_lines(node[i], child, text, cursor, lines);
    }
  }
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path) {
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

// Resolves "a.b[2].c" against the tree.
const json* resolve(const json& root, const std::string& path) {
  const json* node = &root;
  for (const auto& part : split_path(path)) {
    std::string key = part;
    std::optional<std::size_t> index;
    if (const auto lb = part.find('['); lb != std::string::npos) {
      key = part.substr(0, lb);
      index = std::stoul(part.substr(lb + 1));
    }
    if (!node->is_object() || !node->contains(key)) return nullptr;
    node = &(*node)[key];
    if (index) {
      if (!node->is_array() || *index >= node->size()) return nullptr;
      node = &(*node)[*index];
    }
  }
  return node;
}

}  // namespace

bool ExperimentConfig::has(const std::string& path) const { return find(path) != nullptr; }

const json* ExperimentConfig::find(const std::string& path) const { return resolve(data, path); }

double ExperimentConfig::number(const std::string& path, double fallback) const {
  const json* v = find(path);
  return v ? v->get<double>() : fallback;
}

std::optional<double> ExperimentConfig::optional_number(const std::string& path) const {
  const json* v = find(path);
  if (!v) return std::nullopt;
  return v->get<double>();
}

long long ExperimentConfig::integer(const std::string& path, long long fallback) const {
  const json* v = find(path);
  return v ? v->get<long long>() : fallback;
}

std::string ExperimentConfig::string(const std::string& path, const std::string& fallback) const {
  const json* v = find(path);
  return v ? v->get<std::string>() : fallback;
}

bool ExperimentConfig::boolean(const std::string& path, bool fallback) const {
  const json* v = find(path);
  return v ? v->get<bool>() : fallback;
}

std::vector<double> ExperimentConfig::numbers(const std::string& path) const {
  const json* v = find(path);
  return v ? v->get<std::vector<double>>() : std::vector<double>{};
}

void ExperimentConfig::set(const std::string& path, const json& value) {
  json* node = &data;
  const auto parts = split_path(path);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (parts[i].find('[') != std::string::npos) {
      throw SolverError(ErrorKind::ConfigError, "cannot set indexed path '" + path + "'");
    }
    if (!node->contains(parts[i])) (*node)[parts[i]] = json::object();
    node = &(*node)[parts[i]];
    if (!node->is_object()) throw SolverError(ErrorKind::ConfigError, "'" + path + "' crosses a non-table value");
  }
  (*node)[parts.back()] = value;
  validate_config(*this);
}

std::string ExperimentConfig::locate(const std::string& path) const {
  std::ostringstream s;
  s << source_name;
  std::string probe = path;
  while (!probe.empty()) {
    if (const auto it = lines.find(probe); it != lines.end()) {
      s << ":" << it->second;
      break;
    }
    const auto cut = probe.find_last_of(".[");
    probe = cut == std::string::npos ? std::string{} : probe.substr(0, cut);
  }
  s << ": key '" << path << "'";
  return s.str();
}

void validate_config(const ExperimentConfig& config) {
  if (!config.data.is_object()) {
    throw SolverError(ErrorKind::ConfigError, config.source_name + ": top level must be a table");
  }
  walk(config, config.data, "", "");
}

ExperimentConfig parse_config(const std::string& text, ConfigFormat format, const std::string& source_name) {
  ExperimentConfig cfg;
  cfg.source_name = source_name;
  if (format == ConfigFormat::Toml) {
    try {
      const toml::table table = toml::parse(text, source_name);
      cfg.data = from_toml(table, "", cfg.lines);
    } catch (const toml::parse_error& e) {
      std::ostringstream s;
      s << source_name << ":" << e.source().begin.line << ": " << e.description();
      throw SolverError(ErrorKind::ConfigError, s.str());
    }
  } else {
    try {
      const auto ordered = nlohmann::ordered_json::parse(text);
      std::size_t cursor = 0;
      json_lines(ordered, "", text, cursor, cfg.lines);
      cfg.data = json::parse(ordered.dump());
    } catch (const json::parse_error& e) {
      std::ostringstream s;
      s << source_name << ":" << line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0) << ": " << e.what();
      throw SolverError(ErrorKind::ConfigError, s.str());
    }
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SolverError(ErrorKind::IoError, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto ext = path.extension().string();
  ConfigFormat format;
  if (ext == ".toml") {
    format = ConfigFormat::Toml;
  } else if (ext == ".json") {
    format = ConfigFormat::Json;
  } else {
    throw SolverError(ErrorKind::ConfigError, path.string() + ": unknown config extension '" + ext + "'");
  }
  return parse_config(buf.str(), format, path.string());
}

}  // namespace solitonforge
