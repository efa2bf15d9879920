#pragma once

// JSON report emission (schema v1) and the task runner shared by the CLI and
// the corpus driver. Reports are deterministic given (file, seed, config):
// ordered keys, no timestamps unless tracing is requested.

#include <json.hpp>

#include "familyfile.hpp"
#include "pipeline.hpp"

namespace bubbletree {

using ordered_json = nlohmann::ordered_json;

inline const char* engine_version() { return "bubbletree 1.0.0"; }

inline ordered_json chern_json(const ChernData& c) {
  return ordered_json{{"rank", c.rank}, {"c1", c.c1}, {"c2", c.c2}, {"delta", c.delta()}};
}

inline ordered_json splitting_json(const SplittingType& t) {
  return ordered_json{{"type", t.a}, {"torsion", t.torsion}};
}

inline ordered_json singular_point_json(const SingularPoint& p) {
  ordered_json j;
  j["point"] = p.point.empty() ? ordered_json() : ordered_json(p.point);
  j["prime_gens"] = p.prime_gens;
  j["residue_degree"] = p.residue_degree;
  j["local_charge"] = p.local_charge;
  j["chart"] = p.chart;
  j["local_presentation"] = p.local_presentation;
  return j;
}

template <class K>
ordered_json trace_json(const std::vector<SemistabStep>& trace) {
  ordered_json arr = ordered_json::array();
  for (const auto& s : trace)
    arr.push_back(ordered_json{{"delta_before", s.delta_before},
                               {"delta_after", s.delta_after},
                               {"deg_L", s.deg_L},
                               {"deg_Q", s.deg_Q}});
  return arr;
}

template <class K>
ordered_json matrix_json(const PolyMatrix<K>& A) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < A.rows; ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < A.cols; ++j) row.push_back(A.at(i, j).to_string());
    rows.push_back(row);
  }
  return rows;
}

template <class K>
ordered_json classify_json(const ClassificationReport<K>& r) {
  ordered_json j;
  j["verdict"] = to_string(r.verdict);
  j["k"] = r.k;
  j["k_generic"] = r.k_g;
  j["chern"] = chern_json(r.bubble_chern);
  j["stability"] = to_string(r.stability);
  j["p1_splitting"] = splitting_json(r.p1_split);
  j["trivial_at_infinity"] = r.trivial_at_infinity;
  j["bidual_free"] = r.bidual_free;
  j["semistabilization_trace"] = trace_json<K>(r.trace);
  return j;
}

template <class K>
ordered_json section_json(const SectionReport<K>& s) {
  ordered_json j;
  std::vector<std::string> gens;
  for (const auto& p : s.ideal_gens) gens.push_back(p.to_string());
  std::sort(gens.begin(), gens.end());
  j["ideal_gens"] = gens;
  j["ideal_colength"] = s.ideal_colength;
  j["twist"] = s.twist;
  return j;
}

template <class K>
ordered_json bubble_json(const BubbleReport<K>& b) {
  ordered_json j;
  j["chern"] = chern_json(b.ch);
  j["locally_free"] = b.locally_free;
  ordered_json pts = ordered_json::array();
  for (const auto& p : b.singular) pts.push_back(singular_point_json(p));
  j["singular_points"] = pts;
  j["smooth_charge"] = b.smooth_charge;
  j["h0"] = b.h0_bubble;
  if (b.section)
    j["section"] = section_json(*b.section);
  else
    j["section"] = nullptr;
  j["tree_summary"] = b.tree_summary;
  return j;
}

template <class K>
ordered_json normalize_json(const NormalizationTrace<K>& t) {
  ordered_json j;
  j["stage_a_steps"] = t.stage_a_steps;
  j["stage_b_steps"] = t.stage_b_steps;
  ordered_json steps = ordered_json::array();
  for (const auto& s : t.steps)
    steps.push_back(ordered_json{{"direction", to_string(s.direction)},
                                 {"verdict_after", to_string(s.verdict_after)},
                                 {"delta_after", s.delta_after},
                                 {"k_after", s.k_after},
                                 {"presentation", matrix_json(s.presentation)}});
  j["steps"] = steps;
  j["final_presentation"] = matrix_json(t.final_family.A);
  j["final"] = classify_json(t.final_report);
  return j;
}

template <class K>
ordered_json kgeneric_json(long k, const GenericMultiplicity<K>& g) {
  ordered_json j;
  j["k"] = k;
  j["k_generic"] = g.k_g;
  ordered_json samples = ordered_json::array();
  for (const auto& s : g.samples) {
    ordered_json sj;
    sj["plane"] = s.plane;
    if (s.degenerate)
      sj["degenerate"] = true;
    else
      sj["k"] = s.k;
    samples.push_back(sj);
  }
  j["samples"] = samples;
  j["resampled"] = g.resampled;
  return j;
}

template <class K>
PipelineOptions options_for(const PipelineOptions& base,
                            const std::map<std::string, std::string>& task_opts) {
  PipelineOptions opt = base;
  auto get = [&](const char* key) -> const std::string* {
    auto it = task_opts.find(key);
    return it == task_opts.end() ? nullptr : &it->second;
  };
  if (auto* v = get("seed")) opt.seed = std::stoull(*v);
  if (auto* v = get("max-steps")) opt.max_steps = std::stoi(*v);
  if (auto* v = get("degree-bound")) opt.degree_bound = std::stol(*v);
  if (auto* v = get("samples")) opt.kg_samples = std::stoi(*v);
  return opt;
}

// Run one task; family-level problems are embedded as {"ok": false, "error"}.
// Consistency violations (the classification equivalences) propagate as hard errors.
template <class K>
ordered_json run_task(const BlowupModel<K>& B, const FamilyFile<K>& file,
                      const typename FamilyFile<K>::Task& task, const PipelineOptions& base) {
  ordered_json j;
  j["task"] = task.verb;
  j["family"] = task.name;
  PipelineOptions opt = options_for<K>(base, task.options);
  const PolyMatrix<K>* A = file.find(task.name);
  FamilyPresentation<K> E;
  E.A = *A;
  E.label = task.name;
  try {
    if (task.verb == "classify") {
      j["ok"] = true;
      j["result"] = classify_json(classify(B, E, opt));
    } else if (task.verb == "multiplicity") {
      CentralRestriction<K> cr = central_restriction(B, E);
      j["ok"] = true;
      j["result"] = ordered_json{{"k", cr.k}, {"torsion_free", cr.torsion_free}};
    } else if (task.verb == "bubble") {
      ClassificationReport<K> r = classify(B, E, opt);
      ordered_json res = classify_json(r);
      res["bubble"] = bubble_json(bubble_report(B, r));
      j["ok"] = true;
      j["result"] = res;
    } else if (task.verb == "normalize") {
      j["ok"] = true;
      j["result"] = normalize_json(normalize_to_fertile(B, E, opt));
    } else if (task.verb == "kgeneric") {
      CentralRestriction<K> cr = central_restriction(B, E);
      GenericMultiplicity<K> g = generic_multiplicity(B, E, opt.kg_samples, opt.seed);
      j["ok"] = true;
      j["result"] = kgeneric_json(cr.k, g);
    } else {
      j["ok"] = false;
      j["error"] = "unknown verb";
    }
  } catch (const FamilyError& e) {
    j["ok"] = false;
    j["error"] = e.what();
  } catch (const LengthError& e) {
    j["ok"] = false;
    j["error"] = e.what();
  }
  return j;
}

template <class K>
ordered_json run_file(const BlowupModel<K>& B, const FamilyFile<K>& file,
                      const PipelineOptions& opt) {
  ordered_json rep;
  rep["schema"] = "bubbletree-report-v1";
  rep["engine"] = engine_version();
  rep["field"] = K::field_name();
  rep["seed"] = opt.seed;
  ordered_json tasks = ordered_json::array();
  for (const auto& t : file.tasks) tasks.push_back(run_task(B, file, t, opt));
  rep["tasks"] = tasks;
  return rep;
}

// expected <= actual, recursively: objects check declared keys only, arrays
// must match elementwise, scalars exactly.
inline bool json_subset(const ordered_json& expected, const ordered_json& actual,
                        std::string* where = nullptr, std::string path = "$") {
  if (expected.is_object()) {
    if (!actual.is_object()) {
      if (where) *where = path + ": expected object";
      return false;
    }
    for (auto it = expected.begin(); it != expected.end(); ++it) {
      if (!actual.contains(it.key())) {
        if (where) *where = path + "." + it.key() + ": missing";
        return false;
      }
      if (!json_subset(it.value(), actual.at(it.key()), where, path + "." + it.key()))
        return false;
    }
    return true;
  }
  if (expected.is_array()) {
    if (!actual.is_array() || actual.size() != expected.size()) {
      if (where) *where = path + ": array shape mismatch";
      return false;
    }
    for (size_t i = 0; i < expected.size(); ++i)
      if (!json_subset(expected[i], actual[i], where, path + "[" + std::to_string(i) + "]"))
        return false;
    return true;
  }
  if (expected != actual) {
    if (where)
      *where = path + ": expected " + expected.dump() + ", got " + actual.dump();
    return false;
  }
  return true;
}

}  // namespace bubbletree
