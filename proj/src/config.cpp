#include "drlssv/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "csv.hpp"

namespace drlssv {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return s.substr(1, s.size() - 2);
  return s;
}

double parse_number(const std::string& key, const std::string& value) {
  auto v = csv::parse_double(unquote(value));
  if (!v) throw ConfigError("config: bad number for " + key + ": " + value);
  return *v;
}

std::set<AqiBand> parse_band_set(const std::string& key,
                                 const std::string& value) {
  std::set<AqiBand> out;
  for (const auto& name : csv::split_line(unquote(value))) {
    auto b = band_from_name(name);
    if (!b) throw ConfigError("config: unknown band in " + key + ": " + name);
    out.insert(*b);
  }
  return out;
}

void assign(PipelineConfig& cfg, const std::string& section,
            const std::string& key, const std::string& raw) {
  const std::string full = section + "." + key;
  const std::string value = unquote(raw);

  if (section == "paths") {
    if (key == "input") cfg.paths.input = value;
    else if (key == "input_daily") cfg.paths.input_daily = value;
    else if (key == "breakpoints") cfg.paths.breakpoints = value;
    else if (key == "bands") cfg.paths.bands = value;
    else if (key == "model") cfg.paths.model = value;
    else if (key == "output_dir") cfg.paths.output_dir = value;
    else throw ConfigError("config: unknown key " + full);
  } else if (section == "ingest") {
    if (key == "cadence") {
      if (value == "hourly") cfg.ingest.cadence = Cadence::Hourly;
      else if (value == "daily") cfg.ingest.cadence = Cadence::Daily;
      else throw ConfigError("config: ingest.cadence must be hourly|daily");
    } else {
      throw ConfigError("config: unknown key " + full);
    }
  } else if (section == "hartley") {
    if (key == "keep_fraction")
      cfg.hartley.keep_fraction = parse_number(full, raw);
    else throw ConfigError("config: unknown key " + full);
  } else if (section == "imputation") {
    if (key == "policy") {
      auto p = impute_policy_from_name(value);
      if (!p) throw ConfigError("config: unknown imputation.policy " + value);
      cfg.imputation.policy = *p;
    } else {
      throw ConfigError("config: unknown key " + full);
    }
  } else if (section == "selection") {
    if (key == "k") cfg.selection.k = static_cast<int>(parse_number(full, raw));
    else if (key == "ridge") cfg.selection.ridge = parse_number(full, raw);
    else throw ConfigError("config: unknown key " + full);
  } else if (section == "lssv") {
    if (key == "kernel") {
      if (value == "rbf") cfg.lssv.kernel = KernelKind::Rbf;
      else if (value == "linear") cfg.lssv.kernel = KernelKind::Linear;
      else throw ConfigError("config: lssv.kernel must be rbf|linear");
    } else if (key == "sigma") {
      if (value == "median") cfg.lssv.sigma = 0;
      else cfg.lssv.sigma = parse_number(full, raw);
    } else if (key == "gamma") {
      cfg.lssv.gamma = parse_number(full, raw);
    } else if (key == "cap_n") {
      cfg.lssv.cap_n = static_cast<int>(parse_number(full, raw));
    } else {
      throw ConfigError("config: unknown key " + full);
    }
  } else if (section == "eval") {
    if (key == "positive_set") cfg.eval.positive_set = parse_band_set(full, raw);
    else if (key == "split") {
      if (value == "chrono") cfg.eval.random_split = false;
      else if (value == "random") cfg.eval.random_split = true;
      else throw ConfigError("config: eval.split must be chrono|random");
    } else if (key == "train_fraction") {
      cfg.eval.train_fraction = parse_number(full, raw);
    } else if (key == "seed") {
      cfg.eval.seed = static_cast<std::uint64_t>(parse_number(full, raw));
    } else {
      throw ConfigError("config: unknown key " + full);
    }
  } else {
    throw ConfigError("config: unknown section " + section);
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(hartley.keep_fraction > 0) || hartley.keep_fraction > 1)
    throw ConfigError("hartley.keep_fraction must be in (0, 1]");
  if (selection.k < 1 || selection.k > kNumPollutants)
    throw ConfigError("selection.k must be in [1, 7]");
  if (selection.ridge < 0) throw ConfigError("selection.ridge must be >= 0");
  if (lssv.sigma < 0) throw ConfigError("lssv.sigma must be positive or 'median'");
  if (!(lssv.gamma > 0)) throw ConfigError("lssv.gamma must be positive");
  if (lssv.cap_n < 1) throw ConfigError("lssv.cap_n must be >= 1");
  if (eval.positive_set.empty() ||
      eval.positive_set.size() >= static_cast<std::size_t>(kNumBands))
    throw ConfigError("eval.positive_set must be a non-empty proper subset");
  if (!(eval.train_fraction > 0) || !(eval.train_fraction < 1))
    throw ConfigError("eval.train_fraction must be in (0, 1)");
}

PipelineConfig parse_config(const std::string& text, PipelineConfig base) {
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos)
      line.erase(pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": key outside a section");
    assign(base, section, key, value);
  }
  return base;
}

PipelineConfig load_config_file(const std::string& path, PipelineConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

void apply_override(PipelineConfig& cfg, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("--set expects section.key=value, got: " + assignment);
  std::string path = trim(assignment.substr(0, eq));
  std::string value = trim(assignment.substr(eq + 1));
  auto dot = path.find('.');
  if (dot == std::string::npos)
    throw ConfigError("--set expects section.key=value, got: " + assignment);
  assign(cfg, path.substr(0, dot), path.substr(dot + 1), value);
}

}  // namespace drlssv
