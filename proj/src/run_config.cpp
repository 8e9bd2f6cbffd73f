// Copyright 2026 The Kevo Authors
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

#include "kevo/run_config.hpp"

#include <fmt/core.h>

#include <filesystem>
#include <fstream>

namespace kevo {

namespace fs = std::filesystem;

namespace {

void reject_unknown(const Json& obj, std::initializer_list<std::string_view> allowed,
                    std::string_view where) {
  if (!obj.is_object()) throw ConfigError(fmt::format("{} must be an object", where));
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    if (!ok) throw ConfigError(fmt::format("unknown key '{}' in {}", key, where));
  }
}

std::string resolve(const std::string& base_dir, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

template <typename T>
void read_opt(const Json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) out = it->get<T>();
}

Json eval_snapshot(const EvalConfig& e) {
  Json stages = Json::array();
  for (auto s : e.stages) stages.push_back(std::string(to_string(s)));
  Json j{{"stages", stages},
         {"timing_runs", e.timing_runs},
         {"warmup_runs", e.warmup_runs},
         {"timeouts", Json{{"compile_s", e.timeouts.compile_s},
                           {"test_case_s", e.timeouts.test_case_s},
                           {"timing_s", e.timeouts.timing_s}}}};
  if (const auto* r = std::get_if<SyntheticRules>(&e.evaluator)) {
    j["evaluator"] = Json{{"kind", "synthetic"},
                          {"compile_token", r->compile_token},
                          {"correct_token", r->correct_token},
                          {"speed_token", r->speed_token},
                          {"base_ms", r->base_ms}};
  } else {
    j["evaluator"] = Json{{"kind", "subprocess"}};
  }
  return j;
}

}  // namespace

BackendSpec::Kind parse_backend_flag(std::string_view flag, std::string* corpus_path) {
  if (flag == "remote") return BackendSpec::Kind::kRemote;
  constexpr std::string_view kScripted = "scripted:";
  if (flag.starts_with(kScripted) && flag.size() > kScripted.size()) {
    if (corpus_path) *corpus_path = std::string(flag.substr(kScripted.size()));
    return BackendSpec::Kind::kScripted;
  }
  throw ConfigError(fmt::format("backend must be 'scripted:<path>' or 'remote', got '{}'", flag));
}

RunConfig RunConfig::for_strategy(StrategyName name) {
  RunConfig c;
  c.strategy = StrategyConfig::preset(name);
  if (name == StrategyName::kFull || name == StrategyName::kSolution) {
    c.init_trials = 5;
    c.offspring_per_generation = 4;
    c.generations = 10;
  } else {
    c.init_trials = 0;
    c.offspring_per_generation = 1;
    c.generations = c.budget_trials;
  }
  return c;
}

bool RunConfig::generational() const {
  return (strategy.name == StrategyName::kFull || strategy.name == StrategyName::kSolution) &&
         strategy.population.strategy != PopulationStrategy::kIslands;
}

std::size_t RunConfig::generation_of(std::size_t trial_index) const {
  if (!generational()) return trial_index;
  if (trial_index < init_trials) return 0;
  return 1 + (trial_index - init_trials) / offspring_per_generation;
}

void RunConfig::validate() const {
  strategy.validate();
  if (budget_trials < 1) throw ConfigError("budget_trials must be >= 1");
  if (generational()) {
    if (offspring_per_generation < 1) throw ConfigError("offspring_per_generation must be >= 1");
    if (generations < 1) throw ConfigError("generations must be >= 1");
    if (init_trials + offspring_per_generation * generations != budget_trials) {
      throw ConfigError(fmt::format(
          "schedule mismatch: init_trials {} + offspring {} x generations {} != budget {}",
          init_trials, offspring_per_generation, generations, budget_trials));
    }
  }
  generation_params.validate();
  eval_config.validate();
  if (runs_repeat < 1) throw ConfigError("runs_repeat must be >= 1");
  if (insight_capacity < 1) throw ConfigError("insight_capacity must be >= 1");
  if (feedback_limit < 1) throw ConfigError("feedback_limit must be >= 1");
  if (backend.kind == BackendSpec::Kind::kRemote && backend.remote.base_url.empty()) {
    throw ConfigError("remote backend needs base_url");
  }
}

Json search_snapshot(const RunConfig& cfg) {
  const auto& s = cfg.strategy;
  Json j{{"strategy", std::string(to_string(s.name))},
         {"use_history", s.use_history},
         {"use_insights", s.use_insights},
         {"history_n", s.history_n},
         {"insights_n", s.insights_n},
         {"population", Json{{"strategy", std::string(to_string(s.population.strategy))},
                             {"capacity", s.population.capacity},
                             {"island_count", s.population.island_count}}},
         {"budget_trials", cfg.budget_trials},
         {"init_trials", cfg.init_trials},
         {"offspring_per_generation", cfg.offspring_per_generation},
         {"generations", cfg.generations},
         {"seed", cfg.seed},
         {"generation", Json{{"model", cfg.generation_params.model_name},
                             {"temperature", cfg.generation_params.temperature},
                             {"max_output_tokens", cfg.generation_params.max_output_tokens}}},
         {"eval", eval_snapshot(cfg.eval_config)},
         {"insight_capacity", cfg.insight_capacity},
         {"feedback_limit", cfg.feedback_limit},
         {"backend", Json{{"kind", cfg.backend.kind == BackendSpec::Kind::kScripted
                                       ? "scripted"
                                       : "remote"},
                          {"cycle", cfg.backend.cycle},
                          {"shuffle", cfg.backend.shuffle}}}};
  return j;
}

RunConfig parse_run_config(const Json& doc, const std::string& base_dir) {
  try {
    reject_unknown(doc,
                   {"strategy", "population", "history_n", "insights_n", "budget_trials",
                    "init_trials", "offspring_per_generation", "generations", "seed",
                    "runs_repeat", "insight_capacity", "feedback_limit", "template",
                    "tasks_file", "generation", "backend", "evaluator", "eval", "prices"},
                   "run config");
    RunConfig c = RunConfig::for_strategy(
        parse_strategy_name(doc.value("strategy", std::string("Full"))));

    if (auto it = doc.find("population"); it != doc.end()) {
      reject_unknown(*it, {"strategy", "capacity", "island_count"}, "population");
      auto& p = c.strategy.population;
      if (auto s = it->find("strategy"); s != it->end()) {
        p.strategy = parse_population_strategy(s->get<std::string>());
        if (p.strategy == PopulationStrategy::kIslands) p.capacity = 1;
      }
      read_opt(*it, "capacity", p.capacity);
      read_opt(*it, "island_count", p.island_count);
    }
    read_opt(doc, "history_n", c.strategy.history_n);
    read_opt(doc, "insights_n", c.strategy.insights_n);
    read_opt(doc, "budget_trials", c.budget_trials);
    if (!c.generational()) {
      c.init_trials = 0;
      c.offspring_per_generation = 1;
      c.generations = c.budget_trials;
    }
    read_opt(doc, "init_trials", c.init_trials);
    read_opt(doc, "offspring_per_generation", c.offspring_per_generation);
    read_opt(doc, "generations", c.generations);
    read_opt(doc, "seed", c.seed);
    read_opt(doc, "runs_repeat", c.runs_repeat);
    read_opt(doc, "insight_capacity", c.insight_capacity);
    read_opt(doc, "feedback_limit", c.feedback_limit);
    if (auto it = doc.find("template"); it != doc.end()) {
      c.template_path = resolve(base_dir, it->get<std::string>());
    }
    if (auto it = doc.find("tasks_file"); it != doc.end()) {
      c.tasks_file = resolve(base_dir, it->get<std::string>());
    }

    if (auto it = doc.find("generation"); it != doc.end()) {
      reject_unknown(*it,
                     {"model", "temperature", "max_output_tokens", "request_timeout_s",
                      "max_retries"},
                     "generation");
      auto& g = c.generation_params;
      read_opt(*it, "model", g.model_name);
      read_opt(*it, "temperature", g.temperature);
      read_opt(*it, "max_output_tokens", g.max_output_tokens);
      read_opt(*it, "request_timeout_s", g.request_timeout_s);
      read_opt(*it, "max_retries", g.max_retries);
    }

    if (auto it = doc.find("backend"); it != doc.end()) {
      reject_unknown(*it,
                     {"kind", "corpus", "cycle", "shuffle", "base_url", "api_key_env",
                      "max_concurrency"},
                     "backend");
      auto& b = c.backend;
      const auto kind = it->value("kind", std::string("scripted"));
      if (kind == "scripted") {
        b.kind = BackendSpec::Kind::kScripted;
      } else if (kind == "remote") {
        b.kind = BackendSpec::Kind::kRemote;
      } else {
        throw ConfigError(fmt::format("unknown backend kind '{}'", kind));
      }
      if (auto p = it->find("corpus"); p != it->end()) {
        b.corpus_path = resolve(base_dir, p->get<std::string>());
      }
      read_opt(*it, "cycle", b.cycle);
      read_opt(*it, "shuffle", b.shuffle);
      read_opt(*it, "base_url", b.remote.base_url);
      read_opt(*it, "api_key_env", b.remote.api_key_env);
      read_opt(*it, "max_concurrency", b.remote.max_concurrency);
    }

    if (auto it = doc.find("evaluator"); it != doc.end()) {
      reject_unknown(*it,
                     {"kind", "compile_token", "correct_token", "speed_token", "base_ms",
                      "command", "working_dir"},
                     "evaluator");
      const auto kind = it->value("kind", std::string("synthetic"));
      if (kind == "synthetic") {
        SyntheticRules r;
        read_opt(*it, "compile_token", r.compile_token);
        read_opt(*it, "correct_token", r.correct_token);
        read_opt(*it, "speed_token", r.speed_token);
        read_opt(*it, "base_ms", r.base_ms);
        c.eval_config.evaluator = r;
      } else if (kind == "subprocess") {
        SubprocessSpec s;
        read_opt(*it, "command", s.command);
        if (auto w = it->find("working_dir"); w != it->end()) {
          s.working_dir = resolve(base_dir, w->get<std::string>());
        }
        c.eval_config.evaluator = s;
      } else {
        throw ConfigError(fmt::format("unknown evaluator kind '{}'", kind));
      }
    }

    if (auto it = doc.find("eval"); it != doc.end()) {
      reject_unknown(*it, {"stages", "timing_runs", "warmup_runs", "timeouts"}, "eval");
      auto& e = c.eval_config;
      if (auto s = it->find("stages"); s != it->end()) {
        e.stages.clear();
        for (const auto& st : *s) e.stages.push_back(parse_stage(st.get<std::string>()));
      }
      read_opt(*it, "timing_runs", e.timing_runs);
      read_opt(*it, "warmup_runs", e.warmup_runs);
      if (auto t = it->find("timeouts"); t != it->end()) {
        reject_unknown(*t, {"compile_s", "test_case_s", "timing_s"}, "eval.timeouts");
        read_opt(*t, "compile_s", e.timeouts.compile_s);
        read_opt(*t, "test_case_s", e.timeouts.test_case_s);
        read_opt(*t, "timing_s", e.timeouts.timing_s);
      }
    }

    if (auto it = doc.find("prices"); it != doc.end()) {
      if (!it->is_object()) throw ConfigError("prices must be an object");
      for (const auto& [model, p] : it->items()) {
        reject_unknown(p, {"input", "output"}, "prices entry");
        c.prices.set(model, ModelPrice{p.at("input").get<double>(), p.at("output").get<double>()});
      }
    }

    c.validate();
    return c;
  } catch (const Json::exception& e) {
    throw ConfigError(fmt::format("run config: {}", e.what()));
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path));
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(fmt::format("config '{}': {}", path, e.what()));
  }
  const auto dir = fs::path(path).parent_path().string();
  return parse_run_config(doc, dir.empty() ? "." : dir);
}

}  // namespace kevo
