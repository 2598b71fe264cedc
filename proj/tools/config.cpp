// Copyright 2026 The bellkc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <numbers>
#include <sstream>

#include "bellkc/quantum_json.hpp"

namespace bellkc::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_plain(std::string_view s, std::string_view whole) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("not a number: '" + std::string(whole) + "'");
  return v;
}

bool looks_numeric(std::string_view s) {
  if (s.empty()) return false;
  const char c = s.front();
  return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.' ||
         s.starts_with("pi");
}

nlohmann::json typed_scalar(std::string_view s) {
  if (s == "true") return true;
  if (s == "false") return false;
  if (looks_numeric(s)) {
    // Sign patterns like "+-++" are strings.
    if (s.find_first_not_of("+-") == std::string_view::npos) return std::string(s);
    bool integral = s.find_first_of(".eEp") == std::string_view::npos;
    if (integral) {
      std::int64_t i = 0;
      const auto* end = s.data() + s.size();
      const auto* begin = s.data() + (s.front() == '+' ? 1 : 0);
      auto [ptr, ec] = std::from_chars(begin, end, i);
      if (ec == std::errc() && ptr == end) {
        if (i >= 0) return static_cast<std::uint64_t>(i);
        return i;
      }
    }
    try {
      return parse_number(s);
    } catch (const ConfigError&) {
      return std::string(s);
    }
  }
  return std::string(s);
}

const nlohmann::json* find(const nlohmann::json& j, std::initializer_list<const char*> path) {
  const nlohmann::json* cur = &j;
  for (const char* key : path) {
    if (!cur->is_object() || !cur->contains(key)) return nullptr;
    cur = &(*cur)[key];
  }
  return cur;
}

template <typename T>
T get_or(const nlohmann::json& j, std::initializer_list<const char*> path, T fallback) {
  const auto* v = find(j, path);
  if (!v) return fallback;
  try {
    return v->get<T>();
  } catch (const nlohmann::json::exception&) {
    std::string key;
    for (const char* k : path) key += (key.empty() ? "" : ".") + std::string(k);
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

std::vector<double> number_list(const nlohmann::json& j, std::initializer_list<const char*> path) {
  const auto* v = find(j, path);
  if (!v) return {};
  std::vector<double> out;
  auto one = [&](const nlohmann::json& e) {
    if (e.is_number()) return e.get<double>();
    if (e.is_string()) return parse_number(e.get<std::string>());
    throw ConfigError("expected a number in a list");
  };
  if (v->is_array()) {
    for (const auto& e : *v) out.push_back(one(e));
  } else {
    out.push_back(one(*v));
  }
  return out;
}

std::vector<int> sign_list(const nlohmann::json& j, const char* key) {
  if (!find(j, {"model", key})) throw ConfigError(std::string("config key 'model.") + key + "' is required");
  std::vector<int> out;
  for (double d : number_list(j, {"model", key})) out.push_back(d == 1.0 ? 1 : (d == -1.0 ? -1 : 0));
  return out;
}

std::vector<Setting> side_settings(const nlohmann::json& j, const char* side, std::size_t default_count,
                                   bool angles_required) {
  auto angles = number_list(j, {"settings", side, "angles"});
  auto probs = number_list(j, {"settings", side, "probs"});
  if (angles.empty()) {
    if (angles_required) throw ConfigError(std::string("config key 'settings.") + side + ".angles' is required");
    const std::size_t n = probs.empty() ? default_count : probs.size();
    for (std::size_t i = 0; i < n; ++i) angles.push_back(static_cast<double>(i));
  }
  if (probs.empty()) probs.assign(angles.size(), 1.0 / static_cast<double>(angles.size()));
  if (probs.size() != angles.size()) {
    throw ValidationError(std::string(side) + ": angles and probs differ in length");
  }
  std::vector<Setting> out;
  for (std::size_t i = 0; i < angles.size(); ++i) out.push_back({angles[i], probs[i]});
  return out;
}

nlohmann::json model_description(const nlohmann::json& src, const SettingsSpec& settings) {
  const auto kind = get_or<std::string>(src, {"model", "kind"}, "");
  if (kind.empty()) throw ConfigError("config key 'model.kind' is required");
  const auto& m = src.at("model");
  if (kind == "quantum") {
    nlohmann::json rho;
    if (m.contains("rho")) {
      rho = m.at("rho");
    } else {
      rho = operator_to_json(state_preset(get_or<std::string>(src, {"model", "state"}, "photon_pair")).matrix());
    }
    return {{"kind", "quantum"},
            {"rho", rho},
            {"alice_angles", settings.alice_angles()},
            {"bob_angles", settings.bob_angles()}};
  }
  if (kind == "deterministic_lhv") {
    return {{"kind", kind}, {"a", sign_list(src, "a")}, {"b", sign_list(src, "b")}};
  }
  if (kind == "mixed_lhv") {
    const auto* s = find(src, {"model", "strategies"});
    if (!s || (s->is_string() && s->get<std::string>() == "uniform")) {
      return OutcomeModel(uniform_lhv_mixture()).to_json();
    }
    return {{"kind", kind}, {"strategies", *s}};
  }
  if (kind == "superdeterministic") {
    if (m.contains("conditional_lambda")) return {{"kind", kind}, {"conditional_lambda", m.at("conditional_lambda")}};
    const auto example = get_or<std::string>(src, {"model", "example"}, "s4");
    if (example != "s4") throw ConfigError("unknown superdeterministic example '" + example + "'");
    const auto pattern = ChshCombination::parse(get_or<std::string>(src, {"model", "pattern"}, "+-++"));
    return OutcomeModel(superdeterministic_s4_example(pattern)).to_json();
  }
  if (kind == "nonlocal") {
    return {{"kind", kind},
            {"rule", get_or<std::string>(src, {"model", "rule"}, "pr_box")},
            {"pattern", get_or<std::string>(src, {"model", "pattern"}, "+-++")}};
  }
  throw ConfigError("unknown model.kind '" + kind + "'");
}

std::size_t default_setting_count(const std::string& kind, const nlohmann::json& src, const char* side) {
  if (kind == "deterministic_lhv") {
    const auto* v = find(src, {"model", std::string_view(side) == "alice" ? "a" : "b"});
    if (v && v->is_array()) return v->size();
    return 1;
  }
  return 2;
}

}  // namespace

double parse_number(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.empty()) throw ConfigError("empty number");
  const auto pi_pos = s.find("pi");
  if (pi_pos == std::string_view::npos) return parse_plain(s, text);
  std::string_view coeff = trim(s.substr(0, pi_pos));
  std::string_view rest = trim(s.substr(pi_pos + 2));
  double c = 1.0;
  if (coeff == "-") {
    c = -1.0;
  } else if (coeff == "+" || coeff.empty()) {
    c = 1.0;
  } else {
    if (coeff.back() == '*') coeff = trim(coeff.substr(0, coeff.size() - 1));
    c = parse_plain(coeff.front() == '+' ? coeff.substr(1) : coeff, text);
  }
  double divisor = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') throw ConfigError("not a number: '" + std::string(text) + "'");
    divisor = parse_plain(trim(rest.substr(1)), text);
    if (divisor == 0.0) throw ConfigError("division by zero in '" + std::string(text) + "'");
  }
  return c * std::numbers::pi / divisor;
}

nlohmann::json parse_flat_config(std::string_view text) {
  nlohmann::json root = nlohmann::json::object();
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");

    nlohmann::json* node = &root;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part(key.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
      if (part.empty()) throw ConfigError("line " + std::to_string(line_no) + ": malformed key");
      if (dot == std::string_view::npos) {
        if (node->contains(part)) {
          throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
        }
        if (value.find(',') != std::string_view::npos) {
          nlohmann::json list = nlohmann::json::array();
          std::size_t s = 0;
          while (s <= value.size()) {
            const auto comma = value.find(',', s);
            const auto item = trim(value.substr(s, comma == std::string_view::npos ? std::string_view::npos : comma - s));
            if (item.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty list item");
            list.push_back(typed_scalar(item));
            s = comma == std::string_view::npos ? value.size() + 1 : comma + 1;
          }
          (*node)[part] = std::move(list);
        } else {
          if (value.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty value");
          (*node)[part] = typed_scalar(value);
        }
        break;
      }
      auto& child = (*node)[part];
      if (child.is_null()) child = nlohmann::json::object();
      if (!child.is_object()) {
        throw ConfigError("line " + std::to_string(line_no) + ": '" + part + "' is both a value and a section");
      }
      node = &child;
      start = dot + 1;
    }
  }
  return root;
}

DensityOperator state_preset(const std::string& name) {
  if (name == "photon_pair") return photon_pair_state<double>();
  if (name == "maximally_mixed") return DensityOperator::maximally_mixed(4);
  if (name == "product_hh") return DensityOperator::pure(Ket::Unit(4, 0));
  throw ConfigError("unknown model.state '" + name + "'");
}

ExperimentConfig config_from_json(const nlohmann::json& source) {
  if (!source.is_object()) throw ConfigError("config must be an object");
  const auto kind = get_or<std::string>(source, {"model", "kind"}, "");
  if (kind.empty()) throw ConfigError("config key 'model.kind' is required");

  SettingsSpec settings;
  settings.alice = side_settings(source, "alice", default_setting_count(kind, source, "alice"), kind == "quantum");
  settings.bob = side_settings(source, "bob", default_setting_count(kind, source, "bob"), kind == "quantum");

  nlohmann::json description;
  std::optional<OutcomeModel> model;
  try {
    settings.validate();
    description = model_description(source, settings);
    model.emplace(OutcomeModel::from_json(description));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(e.what());
  }
  if (model->n_alice() != settings.alice.size() || model->n_bob() != settings.bob.size()) {
    throw ValidationError("settings count does not match the model (" + std::to_string(model->n_alice()) + "x" +
                          std::to_string(model->n_bob()) + ")");
  }

  ExperimentConfig cfg{.source = source, .model_description = description, .model = *model, .settings = settings};
  cfg.n_trials = get_or<std::uint64_t>(source, {"run", "n_trials"}, cfg.n_trials);
  cfg.master_seed = get_or<std::uint64_t>(source, {"run", "master_seed"}, cfg.master_seed);
  cfg.chunk_size = get_or<std::uint64_t>(source, {"run", "chunk_size"}, cfg.chunk_size);
  if (cfg.n_trials < 1) throw ValidationError("run.n_trials must be >= 1");
  if (cfg.chunk_size < 1) throw ValidationError("run.chunk_size must be >= 1");
  if (const auto* dir = find(source, {"output", "dir"})) {
    if (!dir->is_string()) throw ConfigError("config key 'output.dir' must be a string");
    cfg.output_dir = dir->get<std::string>();
  }
  cfg.events_format = get_or<std::string>(source, {"output", "events_format"}, cfg.events_format);
  if (cfg.events_format != "jsonl" && cfg.events_format != "csv") {
    throw ConfigError("output.events_format must be jsonl or csv");
  }
  try {
    cfg.combination = ChshCombination::parse(get_or<std::string>(source, {"report", "combination"}, "+-++"));
  } catch (const InvariantError& e) {
    throw ConfigError(e.what());
  }
  cfg.z_threshold = get_or<double>(source, {"report", "z_threshold"}, cfg.z_threshold);
  if (const auto v = number_list(source, {"plot", "theta_min"}); !v.empty()) cfg.plot.theta_min = v.front();
  if (const auto v = number_list(source, {"plot", "theta_max"}); !v.empty()) cfg.plot.theta_max = v.front();
  cfg.plot.points = get_or<int>(source, {"plot", "points"}, cfg.plot.points);
  cfg.plot.mc_trials = get_or<std::uint64_t>(source, {"plot", "mc_trials"}, cfg.plot.mc_trials);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  nlohmann::json source;
  if (path.extension() == ".json") {
    try {
      source = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("config json: ") + e.what());
    }
  } else {
    source = parse_flat_config(text);
  }
  return config_from_json(source);
}

}  // namespace bellkc::cli
