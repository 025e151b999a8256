#include "synthrl/cli/run_config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace synthrl::cli {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: " + value);
  }
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + key + "': not an integer: " + value);
  }
  return v;
}

bool parse_switch(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw ConfigError("config key '" + key + "': expected on/off: " + value);
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::istringstream stream(value);
  std::string word;
  while (stream >> word) out.push_back(static_cast<int>(parse_int(key, word)));
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig config;

  using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
  static const std::map<std::string, Setter> setters = {
      {"seed", [](RunConfig& c, auto& k, auto& v) { c.seed = static_cast<std::uint64_t>(parse_int(k, v)); c.train.seed = c.seed; }},
      {"out_dir", [](RunConfig& c, auto&, auto& v) { c.out_dir = v; }},
      {"workers", [](RunConfig& c, auto& k, auto& v) { c.workers = static_cast<int>(parse_int(k, v)); }},
      {"train_problems", [](RunConfig& c, auto& k, auto& v) { c.train_problems = static_cast<int>(parse_int(k, v)); }},
      {"test_problems", [](RunConfig& c, auto& k, auto& v) { c.test_problems = static_cast<int>(parse_int(k, v)); }},
      {"tier1_frac", [](RunConfig& c, auto& k, auto& v) { c.tier1_frac = parse_double(k, v); }},
      {"tier2_frac", [](RunConfig& c, auto& k, auto& v) { c.tier2_frac = parse_double(k, v); }},
      {"tier3_frac", [](RunConfig& c, auto& k, auto& v) { c.tier3_frac = parse_double(k, v); }},
      {"data_seed", [](RunConfig& c, auto& k, auto& v) { c.data_seed = static_cast<std::uint64_t>(parse_int(k, v)); }},
      {"actor_embed", [](RunConfig& c, auto& k, auto& v) { c.actor_embed = static_cast<int>(parse_int(k, v)); }},
      {"actor_hidden", [](RunConfig& c, auto& k, auto& v) { c.actor_hidden = static_cast<int>(parse_int(k, v)); }},
      {"critic_embed", [](RunConfig& c, auto& k, auto& v) { c.critic_embed = static_cast<int>(parse_int(k, v)); }},
      {"critic_hidden", [](RunConfig& c, auto& k, auto& v) { c.critic_hidden = static_cast<int>(parse_int(k, v)); }},
      {"pretrain_programs", [](RunConfig& c, auto& k, auto& v) { c.pretrain_programs = static_cast<int>(parse_int(k, v)); }},
      {"pretrain_epochs", [](RunConfig& c, auto& k, auto& v) { c.train.epochs_pretrain = static_cast<int>(parse_int(k, v)); }},
      {"pretrain_lr", [](RunConfig& c, auto& k, auto& v) { c.train.lr_pretrain = parse_double(k, v); }},
      {"warmstart_epochs", [](RunConfig& c, auto& k, auto& v) { c.train.epochs_warmstart = static_cast<int>(parse_int(k, v)); }},
      {"warmstart_lr", [](RunConfig& c, auto& k, auto& v) { c.train.lr_warmstart = parse_double(k, v); }},
      {"collect_samples", [](RunConfig& c, auto& k, auto& v) { c.train.samples_per_problem = static_cast<int>(parse_int(k, v)); }},
      {"collect_temperature", [](RunConfig& c, auto& k, auto& v) { c.train.collect_temperature = parse_double(k, v); }},
      {"collect_top_p", [](RunConfig& c, auto& k, auto& v) { c.train.collect_top_p = parse_double(k, v); }},
      {"critic_epochs", [](RunConfig& c, auto& k, auto& v) { c.train.epochs_critic = static_cast<int>(parse_int(k, v)); }},
      {"critic_lr", [](RunConfig& c, auto& k, auto& v) { c.train.lr_critic = parse_double(k, v); }},
      {"rl_epochs", [](RunConfig& c, auto& k, auto& v) { c.train.epochs_rl = static_cast<int>(parse_int(k, v)); }},
      {"rl_lr", [](RunConfig& c, auto& k, auto& v) { c.train.lr_rl = parse_double(k, v); }},
      {"loss_weight_ce", [](RunConfig& c, auto& k, auto& v) { c.train.weight_ce = parse_double(k, v); }},
      {"loss_weight_rl", [](RunConfig& c, auto& k, auto& v) { c.train.weight_rl = parse_double(k, v); }},
      {"rl_baseline", [](RunConfig& c, auto& k, auto& v) { c.train.rl_baseline = parse_switch(k, v); }},
      {"critic_mode",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "learned") c.train.critic_mode = training::CriticMode::Learned;
         else if (v == "constant") c.train.critic_mode = training::CriticMode::Constant;
         else if (v == "distance") c.train.critic_mode = training::CriticMode::Distance;
         else throw ConfigError("config key '" + k + "': expected learned|constant|distance");
       }},
      {"repair_epochs", [](RunConfig& c, auto& k, auto& v) { c.train.epochs_repair = static_cast<int>(parse_int(k, v)); }},
      {"repair_lr", [](RunConfig& c, auto& k, auto& v) { c.train.lr_repair = parse_double(k, v); }},
      {"batch_size", [](RunConfig& c, auto& k, auto& v) { c.train.batch_size = static_cast<int>(parse_int(k, v)); }},
      {"max_program_len", [](RunConfig& c, auto& k, auto& v) { c.train.max_program_len = static_cast<int>(parse_int(k, v)); c.cs.max_len = c.train.max_program_len; }},
      {"gen_n", [](RunConfig& c, auto& k, auto& v) { c.cs.n = static_cast<int>(parse_int(k, v)); }},
      {"gen_m", [](RunConfig& c, auto& k, auto& v) { c.cs.m = static_cast<int>(parse_int(k, v)); }},
      {"gen_temperature", [](RunConfig& c, auto& k, auto& v) { c.cs.temperature = parse_double(k, v); }},
      {"gen_top_p", [](RunConfig& c, auto& k, auto& v) { c.cs.top_p = parse_double(k, v); }},
      {"cs_mode",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "off") c.cs.mode = inference::CsMode::Off;
         else if (v == "refine") c.cs.mode = inference::CsMode::Refine;
         else if (v == "refine_repair") c.cs.mode = inference::CsMode::RefineRepair;
         else throw ConfigError("config key '" + k + "': expected off|refine|refine_repair");
       }},
      {"eval_actor",
       [](RunConfig& c, auto& k, auto& v) {
         if (v != "rl" && v != "warmstart") {
           throw ConfigError("config key '" + k + "': expected rl|warmstart");
         }
         c.eval_actor = v;
       }},
      {"eval_ks", [](RunConfig& c, auto& k, auto& v) { c.eval_ks = parse_int_list(k, v); }},
      {"eval_ns", [](RunConfig& c, auto& k, auto& v) { c.eval_ns = parse_int_list(k, v); }},
      {"trace", [](RunConfig& c, auto& k, auto& v) { c.trace = parse_switch(k, v); }},
  };

  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto equals = line.find('=');
    if (equals == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, equals));
    const std::string value = trim(line.substr(equals + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    it->second(config, key, value);
  }

  if (config.workers < 1) throw ConfigError("workers must be at least 1");
  if (config.cs.n < 1) throw ConfigError("gen_n must be at least 1");
  if (config.cs.m < 1) throw ConfigError("gen_m must be at least 1");
  return config;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  RunConfig config = parse(text);
  if (const char* out = std::getenv("SYNTHRL_OUT"); out != nullptr && *out != '\0') {
    config.out_dir = out;
  }
  if (const char* workers = std::getenv("SYNTHRL_WORKERS");
      workers != nullptr && *workers != '\0') {
    config.workers = static_cast<int>(parse_int("SYNTHRL_WORKERS", workers));
    if (config.workers < 1) throw ConfigError("SYNTHRL_WORKERS must be at least 1");
  }
  return config;
}

std::string RunConfig::canonical() const {
  // Covers the training lineage only. out_dir and workers relocate or
  // parallelize a run without changing results; the generation/evaluation
  // knobs (gen_*, cs_mode, eval_actor, eval_ks/ns, trace) deliberately vary
  // across inference sweeps over one set of checkpoints.
  std::ostringstream out;
  out << "actor_embed=" << actor_embed << '\n'
      << "actor_hidden=" << actor_hidden << '\n'
      << "batch_size=" << train.batch_size << '\n'
      << "collect_samples=" << train.samples_per_problem << '\n'
      << "collect_temperature=" << train.collect_temperature << '\n'
      << "collect_top_p=" << train.collect_top_p << '\n'
      << "critic_embed=" << critic_embed << '\n'
      << "critic_epochs=" << train.epochs_critic << '\n'
      << "critic_hidden=" << critic_hidden << '\n'
      << "critic_lr=" << train.lr_critic << '\n'
      << "critic_mode=" << static_cast<int>(train.critic_mode) << '\n'
      << "data_seed=" << data_seed << '\n'
      << "loss_weight_ce=" << train.weight_ce << '\n'
      << "loss_weight_rl=" << train.weight_rl << '\n'
      << "max_program_len=" << train.max_program_len << '\n'
      << "pretrain_epochs=" << train.epochs_pretrain << '\n'
      << "pretrain_lr=" << train.lr_pretrain << '\n'
      << "pretrain_programs=" << pretrain_programs << '\n'
      << "repair_epochs=" << train.epochs_repair << '\n'
      << "repair_lr=" << train.lr_repair << '\n'
      << "rl_baseline=" << (train.rl_baseline ? 1 : 0) << '\n'
      << "rl_epochs=" << train.epochs_rl << '\n'
      << "rl_lr=" << train.lr_rl << '\n'
      << "seed=" << seed << '\n'
      << "test_problems=" << test_problems << '\n'
      << "tier1_frac=" << tier1_frac << '\n'
      << "tier2_frac=" << tier2_frac << '\n'
      << "tier3_frac=" << tier3_frac << '\n'
      << "train_problems=" << train_problems << '\n'
      << "warmstart_epochs=" << train.epochs_warmstart << '\n'
      << "warmstart_lr=" << train.lr_warmstart << '\n';
  return out.str();
}

std::string RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(h));
  return buffer;
}

}  // namespace synthrl::cli
