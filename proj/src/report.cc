/*
 * Copyright 2026 The eqk Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "eqk/harness.h"

#include <fstream>

#include <fmt/format.h>

#include "eqk/error.h"
#include "eqk/json_io.h"

namespace eqk::harness {

using ojson = nlohmann::ordered_json;

namespace {

ojson OptionalValue(const std::optional<double>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

ojson SearchJson(const std::optional<search::SearchMetrics>& m) {
  if (!m) return nullptr;
  ojson j;
  j["fa_pct"] = m->fa_pct;
  j["fm_pct"] = m->fm_pct;
  j["fo_pct"] = m->fo_pct;
  j["mrr"] = m->mrr;
  return j;
}

ojson AggregatesJson(const Aggregates& a) {
  ojson j;
  j["rouge1"] = a.rouge1;
  j["rouge2"] = a.rouge2;
  j["rougeL"] = a.rougeL;
  j["levenshtein_ratio"] = a.levenshtein_ratio;
  j["search"] = SearchJson(a.search);
  return j;
}

ojson ConfigJson(const ExperimentConfig& c) {
  ojson j;
  j["dataset"] = c.dataset_path.string();
  j["annotations"] =
      c.annotations_path ? ojson(c.annotations_path->string()) : ojson(nullptr);
  ojson methods = ojson::array();
  for (Method m : c.methods) methods.push_back(MethodName(m));
  j["methods"] = methods;
  ojson templates = ojson::object();
  for (Method m : c.methods) {
    if (UsesTemplate(m)) templates[std::string(MethodName(m))] = c.TemplatesFor(m);
  }
  j["templates"] = templates;
  j["folds"] = c.folds;
  j["seed"] = c.seed;
  j["engine"] = EngineKindName(c.engine);
  j["executions"] = c.executions;
  j["k"] = c.results_k;
  j["url_match"] = c.strict_url_match ? "strict" : "normalized";
  j["backend"] = c.backend == BackendKind::kStub ? "stub" : "http";
  j["generation"] = nlohmann::json(c.params);
  return j;
}

ojson RowJson(const DetailRow& row) {
  ojson j;
  j["fold"] = row.fold;
  j["claim_id"] = row.claim_id;
  j["method"] = MethodName(row.method);
  j["template_id"] = row.template_id ? ojson(*row.template_id) : ojson(nullptr);
  j["query"] = row.query;
  j["empty"] = row.empty;
  j["rouge1"] = row.similarity.rouge1.f1;
  j["rouge2"] = row.similarity.rouge2.f1;
  j["rougeL"] = row.similarity.rougeL.f1;
  j["levenshtein_distance"] = row.similarity.levenshtein_distance;
  j["levenshtein_ratio"] = row.similarity.levenshtein_ratio;
  if (row.outcome) {
    j["found"] = row.outcome->target_found_per_list;
    ojson ranks = ojson::array();
    for (const auto& r : row.outcome->best_rank_per_list) {
      ranks.push_back(r ? ojson(*r) : ojson(nullptr));
    }
    j["ranks"] = ranks;
  }
  return j;
}

std::string Num(const ojson& v, int precision) {
  if (v.is_null()) return "-";
  return fmt::format("{:.{}f}", v.get<double>(), precision);
}

std::string Rule(std::size_t width) { return std::string(width, '-') + "\n"; }

}  // namespace

ojson ReportJson(const ExperimentReport& report) {
  ojson j;
  j["header"] = {
      {"tool", "eqk"},
      {"format_version", 1},
      {"aggregation",
       "per-fold means over test samples, then the mean over folds"},
      {"correlation_points",
       "one point per (method, template) cell using fold-averaged metrics"},
      {"rouge", "character tokens, lowercased, whitespace removed; f1 reported"},
      {"overlap_rule", "found in a majority of executions"},
  };
  j["config"] = ConfigJson(report.config);
  j["trainer_config"] =
      TrainerConfigJson(report.config.trainer, report.config.params);
  j["folds"] = {{"k", report.config.folds}, {"test_sizes", report.fold_sizes}};
  j["search_enabled"] = report.search_enabled;

  ojson cells = ojson::array();
  for (const auto& c : report.cells) {
    ojson cj;
    cj["label"] = c.Label();
    cj["method"] = MethodName(c.method);
    cj["template_id"] = c.template_id ? ojson(*c.template_id) : ojson(nullptr);
    cj["error"] = c.error ? ojson(*c.error) : ojson(nullptr);
    cj["mean"] = c.ok() ? AggregatesJson(c.mean) : ojson(nullptr);
    ojson folds = ojson::array();
    for (const auto& f : c.per_fold) folds.push_back(AggregatesJson(f));
    cj["per_fold"] = folds;
    cells.push_back(cj);
  }
  j["cells"] = cells;

  ojson best = ojson::array();
  for (Method m : report.config.methods) {
    if (const Cell* c = report.BestCell(m)) best.push_back(c->Label());
  }
  j["best_by_method"] = best;

  ojson sensitivity = ojson::array();
  for (const auto& s : report.sensitivity) {
    ojson sj;
    sj["method"] = MethodName(s.method);
    sj["restricted"] = s.restricted;
    sj["template_count"] = s.template_count;
    ojson metrics = ojson::object();
    for (const auto& [name, me] : s.metrics) {
      metrics[name] = {{"mean", me.mean},
                       {"standard_error", OptionalValue(me.standard_error)}};
    }
    sj["metrics"] = metrics;
    sensitivity.push_back(sj);
  }
  j["prompt_sensitivity"] = sensitivity;

  ojson correlations = ojson::array();
  for (const auto& e : report.correlations) {
    correlations.push_back({{"similarity", e.similarity_metric},
                            {"search", e.search_metric},
                            {"pearson", OptionalValue(e.value)},
                            {"note", e.note}});
  }
  j["correlations"] = correlations;

  ojson overlaps = ojson::array();
  for (const auto& o : report.overlaps) {
    overlaps.push_back({{"a", o.label_a},
                        {"b", o.label_b},
                        {"both", o.both},
                        {"a_only", o.a_only},
                        {"b_only", o.b_only},
                        {"neither", o.neither},
                        {"total", o.total()}});
  }
  j["overlaps"] = overlaps;

  ojson ensembles = ojson::array();
  for (const auto& e : report.ensembles) {
    ojson ej;
    ej["label"] = e.label;
    ojson prio = ojson::object();
    for (const auto& [m, p] : e.priorities) prio[std::string(MethodName(m))] = p;
    ej["priorities"] = prio;
    ej["error"] = e.error ? ojson(*e.error) : ojson(nullptr);
    ej["mean"] = SearchJson(e.mean);
    ojson folds = ojson::array();
    for (const auto& f : e.per_fold) folds.push_back(SearchJson(f));
    ej["per_fold"] = folds;
    ensembles.push_back(ej);
  }
  j["ensembles"] = ensembles;

  ojson labels = ojson::object();
  labels["total"] = report.error_label_total;
  ojson tallies = ojson::object();
  for (const auto& [category, count] : report.error_tallies) {
    tallies[std::string(ErrorCategoryName(category))] = count;
  }
  labels["counts"] = tallies;
  j["error_labels"] = labels;

  ojson rows = ojson::array();
  for (const auto& c : report.cells) {
    for (const auto& row : c.rows) rows.push_back(RowJson(row));
  }
  j["samples"] = rows;
  return j;
}

std::string ReportTextFromJson(const ojson& report) {
  std::string out;
  const bool search = report.value("search_enabled", false);

  out += "Query generation results (fold-averaged)\n";
  const std::string header =
      fmt::format("{:<32} {:>6} {:>6} {:>6} {:>7} {:>7} {:>7} {:>6}\n",
                  "Method", "R-1", "R-2", "R-L", "FA%", "FM%", "FO%", "MRR");
  out += header + Rule(header.size() - 1);
  for (const auto& cell : report.at("cells")) {
    const std::string label = cell.at("label").get<std::string>();
    if (!cell.at("error").is_null()) {
      out += fmt::format("{:<32} error: {}\n", label,
                         cell.at("error").get<std::string>());
      continue;
    }
    const auto& m = cell.at("mean");
    const auto& s = m.at("search");
    out += fmt::format(
        "{:<32} {:>6} {:>6} {:>6} {:>7} {:>7} {:>7} {:>6}\n", label,
        Num(m.at("rouge1"), 3), Num(m.at("rouge2"), 3), Num(m.at("rougeL"), 3),
        s.is_null() ? "-" : Num(s.at("fa_pct"), 1),
        s.is_null() ? "-" : Num(s.at("fm_pct"), 1),
        s.is_null() ? "-" : Num(s.at("fo_pct"), 1),
        s.is_null() ? "-" : Num(s.at("mrr"), 3));
  }

  if (!report.at("prompt_sensitivity").empty()) {
    out += "\nVariability by prompt choice: mean (standard error)\n";
    const std::string h =
        fmt::format("{:<16} {:>5} {:>18} {:>18}\n", "Method", "n", "R-2", "FM%");
    out += h + Rule(h.size() - 1);
    for (const auto& s : report.at("prompt_sensitivity")) {
      const auto fmt_me = [](const ojson& metrics, const char* key, int prec) {
        if (!metrics.contains(key)) return std::string("-");
        const auto& me = metrics.at(key);
        return fmt::format("{} ({})", Num(me.at("mean"), prec),
                           Num(me.at("standard_error"), prec));
      };
      std::string name = s.at("method").get<std::string>();
      if (s.at("restricted").get<bool>()) name += "*";
      out += fmt::format("{:<16} {:>5} {:>18} {:>18}\n", name,
                         s.at("template_count").get<std::size_t>(),
                         fmt_me(s.at("metrics"), "rouge2", 3),
                         fmt_me(s.at("metrics"), "fm_pct", 1));
    }
    out += "* excludes no-prompt and short-prefix templates\n";
  }

  if (search && !report.at("correlations").empty()) {
    out += "\nPearson correlation across cells\n";
    const std::string h = fmt::format("{:<8} {:>7} {:>7} {:>7} {:>7}\n", "",
                                      "FA%", "FM%", "FO%", "MRR");
    out += h + Rule(h.size() - 1);
    std::map<std::string, std::map<std::string, std::string>> grid;
    for (const auto& e : report.at("correlations")) {
      grid[e.at("similarity").get<std::string>()]
          [e.at("search").get<std::string>()] = Num(e.at("pearson"), 3);
    }
    for (const char* sim : {"rouge1", "rouge2", "rougeL"}) {
      auto& row = grid[sim];
      out += fmt::format("{:<8} {:>7} {:>7} {:>7} {:>7}\n", sim, row["fa_pct"],
                         row["fm_pct"], row["fo_pct"], row["mrr"]);
    }
  }

  for (const auto& o : report.at("overlaps")) {
    const auto a = o.at("a").get<std::string>();
    const auto b = o.at("b").get<std::string>();
    const auto both = o.at("both").get<std::size_t>();
    const auto a_only = o.at("a_only").get<std::size_t>();
    const auto b_only = o.at("b_only").get<std::size_t>();
    const auto neither = o.at("neither").get<std::size_t>();
    out += fmt::format("\nOverlap (found in majority): {} vs {}\n", a, b);
    out += fmt::format("{:<14} {:>10} {:>10} {:>7}\n", "", "A found", "A fails",
                       "Total");
    out += fmt::format("{:<14} {:>10} {:>10} {:>7}\n", "B found", both, b_only,
                       both + b_only);
    out += fmt::format("{:<14} {:>10} {:>10} {:>7}\n", "B fails", a_only,
                       neither, a_only + neither);
    out += fmt::format("{:<14} {:>10} {:>10} {:>7}\n", "Total", both + a_only,
                       b_only + neither, both + a_only + b_only + neither);
  }

  if (!report.at("ensembles").empty()) {
    out += "\nBorda-count ensembles\n";
    const std::string h = fmt::format("{:<56} {:>7} {:>7} {:>7} {:>6}\n",
                                      "Combination", "FA%", "FM%", "FO%", "MRR");
    out += h + Rule(h.size() - 1);
    for (const auto& e : report.at("ensembles")) {
      const auto label = e.at("label").get<std::string>();
      if (!e.at("error").is_null()) {
        out += fmt::format("{:<56} error: {}\n", label,
                           e.at("error").get<std::string>());
        continue;
      }
      const auto& m = e.at("mean");
      out += fmt::format("{:<56} {:>7} {:>7} {:>7} {:>6}\n", label,
                         Num(m.at("fa_pct"), 1), Num(m.at("fm_pct"), 1),
                         Num(m.at("fo_pct"), 1), Num(m.at("mrr"), 3));
    }
  }

  const auto& labels = report.at("error_labels");
  if (labels.at("total").get<std::size_t>() > 0) {
    out += "\nError analysis labels\n";
    const double total = labels.at("total").get<double>();
    for (const auto& [name, count] : labels.at("counts").items()) {
      out += fmt::format("{:<26} {:>4} {:>6.1f}%\n", name,
                         count.get<std::size_t>(),
                         100.0 * count.get<double>() / total);
    }
  }
  return out;
}

std::string ReportText(const ExperimentReport& report) {
  return ReportTextFromJson(ReportJson(report));
}

void WriteReport(const ExperimentReport& report,
                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const ojson j = ReportJson(report);
  {
    std::ofstream out(dir / "report.json", std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + (dir / "report.json").string());
    out << j.dump(2) << '\n';
  }
  std::ofstream out(dir / "report.txt", std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + (dir / "report.txt").string());
  out << ReportTextFromJson(j);
}

}  // namespace eqk::harness
