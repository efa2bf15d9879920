// Command-line driver: parses family files, runs classification /
// multiplicity / bubble / normalization / generic-multiplicity tasks, emits
// deterministic JSON reports, and replays the bundled corpus against its
// expectation files.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "bubbletree/gfp.hpp"
#include "bubbletree/report.hpp"

namespace fs = std::filesystem;
using namespace bubbletree;

namespace {

struct CliConfig {
  uint64_t seed = 0;
  int max_steps = 0;
  long degree_bound = 3;
  int samples = 5;
  std::string field = "q";
  bool json = false;
  bool trace = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PipelineOptions pipeline_options(const CliConfig& cfg) {
  PipelineOptions opt;
  opt.seed = cfg.seed;
  opt.max_steps = cfg.max_steps;
  opt.degree_bound = cfg.degree_bound;
  opt.kg_samples = cfg.samples;
  return opt;
}

void configure_field(const CliConfig& cfg) {
  if (cfg.field == "q" || cfg.field == "Q" || cfg.field == "QQ") return;
  if (cfg.field.rfind("fp:", 0) == 0) {
    GFp::set_modulus(std::stoull(cfg.field.substr(3)));
    return;
  }
  if (cfg.field == "fp") return;  // default modulus 65521
  throw std::runtime_error("unknown field '" + cfg.field + "' (expected q or fp:P)");
}

bool use_prime_field(const CliConfig& cfg) { return cfg.field.rfind("fp", 0) == 0; }

void print_human(const ordered_json& rep, std::ostream& os) {
  for (const auto& t : rep.at("tasks")) {
    os << t.at("task").get<std::string>() << " " << t.at("family").get<std::string>() << ": ";
    if (!t.at("ok").get<bool>()) {
      os << "error: " << t.at("error").get<std::string>() << "\n";
      continue;
    }
    const auto& r = t.at("result");
    if (t.at("task") == "classify" || t.at("task") == "bubble") {
      os << r.at("verdict").get<std::string>() << "  k=" << r.at("k") << " k_g="
         << r.at("k_generic") << " chern=(" << r.at("chern").at("rank") << ","
         << r.at("chern").at("c1") << "," << r.at("chern").at("c2") << ")"
         << " delta=" << r.at("chern").at("delta") << " P1=" << r.at("p1_splitting").dump();
      if (t.at("task") == "bubble") {
        const auto& b = r.at("bubble");
        os << "\n  bubble: locally_free=" << b.at("locally_free").dump()
           << " smooth_charge=" << b.at("smooth_charge") << " h0=" << b.at("h0") << " "
           << b.at("tree_summary").get<std::string>();
        for (const auto& p : b.at("singular_points"))
          os << "\n  singular at " << p.at("point").dump() << " charge "
             << p.at("local_charge") << " local " << p.at("local_presentation").dump();
      }
      os << "\n";
    } else if (t.at("task") == "multiplicity") {
      os << "k=" << r.at("k") << (r.at("torsion_free").get<bool>() ? "" : " (torsion!)") << "\n";
    } else if (t.at("task") == "normalize") {
      os << "fertile after A=" << r.at("stage_a_steps") << " B=" << r.at("stage_b_steps")
         << " steps\n";
      for (const auto& s : r.at("steps"))
        os << "  " << s.at("direction").get<std::string>() << " -> "
           << s.at("verdict_after").get<std::string>() << " (delta " << s.at("delta_after")
           << ", k " << s.at("k_after") << ")\n";
    } else if (t.at("task") == "kgeneric") {
      os << "k=" << r.at("k") << " k_g=" << r.at("k_generic") << "\n";
    }
  }
}

template <class K>
int run_tasks_typed(const std::string& path, const CliConfig& cfg,
                    const std::string& forced_verb, const std::string& forced_name) {
  FamilyFile<K> file = parse_family_file<K>(read_file(path));
  if (!file.ring || file.ring->nvars() != 3)
    throw FileError("families need a 3-variable ring declaration", 1);
  if (!forced_verb.empty()) {
    typename FamilyFile<K>::Task t;
    t.verb = forced_verb;
    t.name = forced_name.empty()
                 ? (file.matrices.empty() ? throw std::runtime_error("no matrices declared")
                                          : file.matrices.front().first)
                 : forced_name;
    if (!file.find(t.name)) throw std::runtime_error("no matrix named '" + t.name + "'");
    file.tasks = {t};
  }
  auto B = BlowupModel<K>::standard();
  auto started = std::chrono::steady_clock::now();
  ordered_json rep = run_file(B, file, pipeline_options(cfg));
  if (cfg.trace) {
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - started)
                  .count();
    rep["timing_ms"] = ms;
  }
  if (cfg.json)
    std::cout << rep.dump(2) << "\n";
  else
    print_human(rep, std::cout);
  for (const auto& t : rep.at("tasks"))
    if (!t.at("ok").get<bool>()) return 1;
  return 0;
}

int run_tasks(const std::string& path, const CliConfig& cfg, const std::string& verb = "",
              const std::string& name = "") {
  configure_field(cfg);
  if (use_prime_field(cfg)) return run_tasks_typed<GFp>(path, cfg, verb, name);
  return run_tasks_typed<Rational>(path, cfg, verb, name);
}

struct CorpusRow {
  std::string file;
  bool ok = false;
  std::string detail;
  ordered_json report;
};

int run_corpus(const std::string& dir, const CliConfig& cfg) {
  configure_field(cfg);
  if (use_prime_field(cfg))
    throw std::runtime_error("corpus expectations are pinned over the rational field");
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) {
    std::cerr << "corpus: not a directory: " << dir << "\n";
    return 1;
  }
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".fam") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << "corpus: no .fam files in " << dir << "\n";
    return 1;
  }

  std::vector<CorpusRow> rows(files.size());
  auto work = [&](size_t idx) {
    CorpusRow& row = rows[idx];
    row.file = files[idx].filename().string();
    try {
      FamilyFile<Rational> file = parse_family_file<Rational>(read_file(files[idx].string()));
      auto B = BlowupModel<Rational>::standard();
      ordered_json rep = run_file(B, file, pipeline_options(cfg));
      row.report = rep;
      fs::path expect_path = files[idx];
      expect_path.replace_extension(".expect.json");
      if (!fs::exists(expect_path)) {
        row.ok = false;
        row.detail = "missing expectation file";
        return;
      }
      ordered_json expect = ordered_json::parse(read_file(expect_path.string()));
      std::string where;
      if (!json_subset(expect, rep, &where)) {
        row.ok = false;
        row.detail = where;
        return;
      }
      for (const auto& t : rep.at("tasks"))
        if (!t.at("ok").get<bool>()) {
          row.ok = false;
          row.detail = "task error: " + t.at("error").get<std::string>();
          return;
        }
      row.ok = true;
    } catch (const ConsistencyError& e) {
      row.ok = false;
      row.detail = std::string("consistency: ") + e.what();
    } catch (const std::exception& e) {
      row.ok = false;
      row.detail = e.what();
    }
  };

  unsigned threads = 1;
  if (const char* env = std::getenv("BUBBLETREE_THREADS")) {
    threads = static_cast<unsigned>(std::max(1, atoi(env)));
    threads = std::min<unsigned>(threads, files.size());
  }
  if (threads <= 1) {
    for (size_t i = 0; i < files.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < files.size(); i = next.fetch_add(1)) work(i);
      });
    for (auto& th : pool) th.join();
  }

  int failures = 0;
  for (const auto& row : rows) {
    std::cout << (row.ok ? "[PASS] " : "[FAIL] ") << row.file;
    if (!row.ok) {
      std::cout << "  " << row.detail;
      ++failures;
    }
    std::cout << "\n";
  }
  std::cout << (failures == 0 ? "corpus: all pass" : "corpus: FAILURES") << " ("
            << rows.size() - failures << "/" << rows.size() << ")\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact classifier for rank-two sheaf families on the 3-fold germ"};
  app.require_subcommand(1);
  CliConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "PRNG seed (default 0)");
    sub->add_option("--max-steps", cfg.max_steps, "modification step cap (default 4k+8)");
    sub->add_option("--degree-bound", cfg.degree_bound, "splitting search degree bound");
    sub->add_option("--samples", cfg.samples, "plane samples for generic multiplicity");
    sub->add_option("--field", cfg.field, "q (exact rationals, default) or fp:P");
    sub->add_flag("--json", cfg.json, "emit the JSON report");
    sub->add_flag("--trace", cfg.trace, "include timing in the report");
  };

  std::string path, matrix_name, corpus_dir;
  CLI::App* run = app.add_subcommand("run", "execute the task list of a family file");
  run->add_option("file", path, "input .fam file")->required();
  add_common(run);

  for (const char* verb : {"classify", "multiplicity", "bubble", "normalize", "kgeneric"}) {
    CLI::App* sub = app.add_subcommand(verb, std::string("run ") + verb + " on one matrix");
    sub->add_option("file", path, "input .fam file")->required();
    sub->add_option("matrix", matrix_name, "matrix name (default: first declared)");
    add_common(sub);
  }

  CLI::App* corpus = app.add_subcommand("corpus", "replay the corpus against expectations");
  corpus->add_option("dir", corpus_dir, "corpus directory")->required();
  add_common(corpus);

  CLI11_PARSE(app, argc, argv);

  try {
    if (corpus->parsed()) return run_corpus(corpus_dir, cfg);
    if (run->parsed()) return run_tasks(path, cfg);
    for (const char* verb : {"classify", "multiplicity", "bubble", "normalize", "kgeneric"})
      if (app.get_subcommand(verb)->parsed()) return run_tasks(path, cfg, verb, matrix_name);
  } catch (const ConsistencyError& e) {
    std::cerr << "consistency error: " << e.what() << "\n";
    return 2;
  } catch (const FileError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
