#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "returnrec/experiment.hpp"

namespace returnrec {

namespace {

using json = nlohmann::json;

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  return std::string(s.substr(b, e - b + 1));
}

bool parse_bool(const std::string& value, bool& out) {
  if (value == "true" || value == "1" || value == "yes") {
    out = true;
    return true;
  }
  if (value == "false" || value == "0" || value == "no") {
    out = false;
    return true;
  }
  return false;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  in >> out;
  if (in.fail() || !in.eof())
    throw ConfigError("invalid value '" + value + "' for key '" + key + "'");
  return out;
}

std::vector<int> parse_int_list(const std::string& key,
                                const std::string& value) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    std::size_t comma = value.find(',', start);
    std::string token = trim(comma == std::string::npos
                                 ? value.substr(start)
                                 : value.substr(start, comma - start));
    if (token.empty())
      throw ConfigError("empty entry in list for key '" + key + "'");
    out.push_back(parse_number<int>(key, token));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join_ints(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace

void apply_config_kv(ExperimentConfig& cfg, const std::string& key,
                     const std::string& value) {
  if (key == "database") cfg.database = value;
  else if (key == "eval") cfg.eval = value;
  else if (key == "graph_cache") cfg.graph_cache = value;
  else if (key == "report") cfg.report = value;
  else if (key == "manifest") cfg.manifest = value;
  else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "workers") cfg.workers = parse_number<int>(key, value);
  else if (key == "k_list") cfg.k_list = parse_int_list(key, value);
  else if (key == "recommender") cfg.recommender = value;
  else if (key == "endpoint") cfg.endpoint = value;
  else if (key == "timeout_ms") cfg.timeout_ms = parse_number<int>(key, value);
  else if (key == "victim_split") {
    if (!parse_bool(value, cfg.victim_split))
      throw ConfigError("invalid boolean '" + value + "' for victim_split");
  } else if (key == "attack") cfg.attack = value;
  else if (key == "attack_delta") cfg.attack_delta = parse_number<int>(key, value);
  else if (key == "attack_budget") cfg.attack_budget = parse_number<int>(key, value);
  else if (key == "defense") cfg.defense = value;
  else if (key == "ensemble_m") cfg.ensemble_m = parse_number<int>(key, value);
  else if (key == "count_mean") cfg.count_mean = parse_number<double>(key, value);
  else if (key == "count_spread") cfg.count_spread = parse_number<double>(key, value);
  else if (key == "vote") cfg.vote = value;
  else if (key == "clamp_min") cfg.clamp_min = parse_number<int>(key, value);
  else if (key == "rd_count") cfg.rd_count = parse_number<int>(key, value);
  else if (key == "max_hop") cfg.max_hop = parse_number<int>(key, value);
  else if (key == "victim_max_hop") cfg.victim_max_hop = parse_number<int>(key, value);
  else if (key == "inject_fraction") cfg.inject_fraction = parse_number<double>(key, value);
  else if (key == "delete_fraction") cfg.delete_fraction = parse_number<double>(key, value);
  else if (key == "benign_impact") {
    if (!parse_bool(value, cfg.benign_impact))
      throw ConfigError("invalid boolean '" + value + "' for benign_impact");
  } else if (key == "log_edits") {
    if (!parse_bool(value, cfg.log_edits))
      throw ConfigError("invalid boolean '" + value + "' for log_edits");
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

std::map<std::string, std::string> config_to_kv(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> kv;
  auto fmt = [](double v) {
    std::ostringstream out;
    out << v;
    return out.str();
  };
  kv["database"] = cfg.database;
  kv["eval"] = cfg.eval;
  kv["graph_cache"] = cfg.graph_cache;
  kv["report"] = cfg.report;
  kv["manifest"] = cfg.manifest;
  kv["seed"] = std::to_string(cfg.seed);
  kv["workers"] = std::to_string(cfg.workers);
  kv["k_list"] = join_ints(cfg.k_list);
  kv["recommender"] = cfg.recommender;
  kv["endpoint"] = cfg.endpoint;
  kv["timeout_ms"] = std::to_string(cfg.timeout_ms);
  kv["victim_split"] = cfg.victim_split ? "true" : "false";
  kv["attack"] = cfg.attack;
  kv["attack_delta"] = std::to_string(cfg.attack_delta);
  kv["attack_budget"] = std::to_string(cfg.attack_budget);
  kv["defense"] = cfg.defense;
  kv["ensemble_m"] = std::to_string(cfg.ensemble_m);
  kv["count_mean"] = fmt(cfg.count_mean);
  kv["count_spread"] = fmt(cfg.count_spread);
  kv["vote"] = cfg.vote;
  kv["clamp_min"] = std::to_string(cfg.clamp_min);
  kv["rd_count"] = std::to_string(cfg.rd_count);
  kv["max_hop"] = std::to_string(cfg.max_hop);
  kv["victim_max_hop"] = std::to_string(cfg.victim_max_hop);
  kv["inject_fraction"] = fmt(cfg.inject_fraction);
  kv["delete_fraction"] = fmt(cfg.delete_fraction);
  kv["benign_impact"] = cfg.benign_impact ? "true" : "false";
  kv["log_edits"] = cfg.log_edits ? "true" : "false";
  return kv;
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = (eol == std::string_view::npos)
                                ? text.substr(pos)
                                : text.substr(pos, eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() : eol + 1;
    ++line_no;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        " is not a key = value pair");
    std::string key = trim(std::string_view(stripped).substr(0, eq));
    std::string value = trim(std::string_view(stripped).substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        " has an empty key");
    kv[key] = value;
  }
  return kv;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  ExperimentConfig cfg;
  for (const auto& [key, value] : parse_config_text(buf.str()))
    apply_config_kv(cfg, key, value);
  return cfg;
}

ExperimentConfig config_from_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open manifest " + path);
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw ConfigError("manifest " + path + " is not valid JSON: " + e.what());
  }
  if (!manifest.contains("config") || !manifest["config"].is_object())
    throw ConfigError("manifest " + path + " lacks a config object");
  ExperimentConfig cfg;
  for (const auto& [key, value] : manifest["config"].items()) {
    if (!value.is_string())
      throw ConfigError("manifest config value for '" + key +
                        "' is not a string");
    apply_config_kv(cfg, key, value.get<std::string>());
  }
  return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.database.empty()) throw ConfigError("database path is required");
  if (!std::filesystem::exists(cfg.database))
    throw ConfigError("database file does not exist: " + cfg.database);
  if (!cfg.eval.empty() && !std::filesystem::exists(cfg.eval))
    throw ConfigError("eval file does not exist: " + cfg.eval);
  if (cfg.k_list.empty()) throw ConfigError("k_list must not be empty");
  for (std::size_t i = 0; i < cfg.k_list.size(); ++i) {
    if (cfg.k_list[i] < 1) throw ConfigError("k_list entries must be >= 1");
    if (i > 0 && cfg.k_list[i] <= cfg.k_list[i - 1])
      throw ConfigError("k_list must be strictly ascending");
  }
  if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
  if (cfg.recommender != "reference" && cfg.recommender != "remote")
    throw ConfigError("unknown recommender '" + cfg.recommender + "'");
  if (cfg.recommender == "remote" && cfg.endpoint.empty())
    throw ConfigError("remote recommender requires an endpoint");
  if (cfg.attack != "random" && cfg.attack != "greedy")
    throw ConfigError("unknown attack '" + cfg.attack + "'");
  if (cfg.attack_delta < 0) throw ConfigError("attack_delta must be >= 0");
  if (cfg.attack_budget < 1) throw ConfigError("attack_budget must be >= 1");
  static const char* kDefenses[] = {"none",      "return",
                                    "return_rop", "return_rr",
                                    "return_no_ens", "rd",
                                    "rde"};
  bool defense_ok = false;
  for (const char* name : kDefenses) defense_ok |= cfg.defense == name;
  if (!defense_ok) throw ConfigError("unknown defense '" + cfg.defense + "'");
  if (cfg.ensemble_m < 1) throw ConfigError("ensemble_m must be >= 1");
  if (cfg.count_spread < 0) throw ConfigError("count_spread must be >= 0");
  if (cfg.vote != "borda" && cfg.vote != "plurality")
    throw ConfigError("unknown vote rule '" + cfg.vote + "'");
  if (cfg.clamp_min < 0) throw ConfigError("clamp_min must be >= 0");
  if (cfg.rd_count < 0) throw ConfigError("rd_count must be >= 0");
  if (cfg.max_hop < 0) throw ConfigError("max_hop must be >= 0");
  if (cfg.victim_max_hop < 0) throw ConfigError("victim_max_hop must be >= 0");
  if (cfg.inject_fraction < 0 || cfg.inject_fraction > 1)
    throw ConfigError("inject_fraction must be in [0, 1]");
  if (cfg.delete_fraction < 0 || cfg.delete_fraction > 1)
    throw ConfigError("delete_fraction must be in [0, 1]");
  if (cfg.benign_impact && cfg.defense == "none")
    throw ConfigError("benign_impact needs a defense to evaluate");
}

}  // namespace returnrec
