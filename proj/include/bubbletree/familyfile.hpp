#pragma once

// Input-file grammar (EBNF):
//   file   = {stmt}
//   stmt   = ring | matrix | task
//   ring   = "ring" ident+
//   matrix = "matrix" name rows cols NEWLINE entries (one polynomial per line,
//            row-major)
//   task   = "task" verb name {key "=" value}
//   verbs  = classify | multiplicity | bubble | normalize | kgeneric
// Blank lines and '#' comments are ignored.

#include <map>
#include <sstream>
#include <vector>

#include "module.hpp"
#include "parse.hpp"

namespace bubbletree {

struct FileError : std::runtime_error {
  int line;
  FileError(const std::string& msg, int at)
      : std::runtime_error("line " + std::to_string(at) + ": " + msg), line(at) {}
};

template <class K>
struct FamilyFile {
  RingPtr ring;
  std::vector<std::pair<std::string, PolyMatrix<K>>> matrices;
  struct Task {
    std::string verb;
    std::string name;
    std::map<std::string, std::string> options;
    int line = 0;
  };
  std::vector<Task> tasks;

  const PolyMatrix<K>* find(const std::string& name) const {
    for (const auto& [n, m] : matrices)
      if (n == name) return &m;
    return nullptr;
  }
};

template <class K>
FamilyFile<K> parse_family_file(const std::string& text) {
  FamilyFile<K> out;
  std::vector<std::string> lines;
  {
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
  }
  auto tokenize = [](const std::string& s) {
    std::vector<std::string> toks;
    std::stringstream ss(s);
    std::string t;
    while (ss >> t) toks.push_back(t);
    return toks;
  };
  auto strip_comment = [](std::string s) {
    auto pos = s.find('#');
    if (pos != std::string::npos) s = s.substr(0, pos);
    return s;
  };

  static const std::vector<std::string> verbs = {"classify", "multiplicity", "bubble",
                                                 "normalize", "kgeneric"};
  size_t i = 0;
  while (i < lines.size()) {
    std::string raw = strip_comment(lines[i]);
    auto toks = tokenize(raw);
    int lineno = static_cast<int>(i) + 1;
    if (toks.empty()) {
      ++i;
      continue;
    }
    if (toks[0] == "ring") {
      if (toks.size() < 2) throw FileError("ring statement needs at least one variable", lineno);
      std::vector<std::string> vars(toks.begin() + 1, toks.end());
      out.ring = make_ring(vars, std::vector<int>(vars.size(), 1), false);
      ++i;
    } else if (toks[0] == "matrix") {
      if (!out.ring) throw FileError("matrix before ring declaration", lineno);
      if (toks.size() != 4) throw FileError("expected: matrix NAME ROWS COLS", lineno);
      std::string name = toks[1];
      int rows = 0, cols = 0;
      try {
        rows = std::stoi(toks[2]);
        cols = std::stoi(toks[3]);
      } catch (...) {
        throw FileError("matrix dimensions must be integers", lineno);
      }
      if (rows <= 0 || cols <= 0) throw FileError("matrix dimensions must be positive", lineno);
      if (out.find(name)) throw FileError("matrix '" + name + "' redeclared", lineno);
      PolyMatrix<K> M(out.ring, rows, cols);
      int need = rows * cols;
      int got = 0;
      ++i;
      while (got < need) {
        if (i >= lines.size())
          throw FileError("matrix '" + name + "': expected " + std::to_string(need) +
                              " entries, got " + std::to_string(got),
                          static_cast<int>(lines.size()));
        std::string entry = strip_comment(lines[i]);
        int entry_line = static_cast<int>(i) + 1;
        ++i;
        bool blank = true;
        for (char ch : entry)
          if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
        if (blank) continue;
        // a stray statement keyword means the matrix is short
        auto etoks = tokenize(entry);
        if (etoks.size() >= 1 &&
            (etoks[0] == "ring" || etoks[0] == "matrix" || etoks[0] == "task"))
          throw FileError("matrix '" + name + "': dimension mismatch (expected " +
                              std::to_string(need) + " entries, got " + std::to_string(got) + ")",
                          entry_line);
        try {
          M.at(got / cols, got % cols) = parse_poly<K>(out.ring, entry);
        } catch (const ParseError& e) {
          throw FileError(std::string("matrix entry: ") + e.what(), entry_line);
        }
        ++got;
      }
      out.matrices.emplace_back(name, std::move(M));
    } else if (toks[0] == "task") {
      if (toks.size() < 3) throw FileError("expected: task VERB NAME [key=value ...]", lineno);
      typename FamilyFile<K>::Task task;
      task.verb = toks[1];
      task.name = toks[2];
      task.line = lineno;
      bool known = false;
      for (const auto& v : verbs) known |= (v == task.verb);
      if (!known) throw FileError("unknown task verb '" + task.verb + "'", lineno);
      if (!out.find(task.name))
        throw FileError("task references undeclared matrix '" + task.name + "'", lineno);
      for (size_t k = 3; k < toks.size(); ++k) {
        auto eq = toks[k].find('=');
        if (eq == std::string::npos)
          throw FileError("task option '" + toks[k] + "' is not key=value", lineno);
        task.options[toks[k].substr(0, eq)] = toks[k].substr(eq + 1);
      }
      out.tasks.push_back(std::move(task));
      ++i;
    } else {
      throw FileError("unknown statement '" + toks[0] + "'", lineno);
    }
  }
  return out;
}

// Canonical printer; parse(print(file)) reproduces the file.
template <class K>
std::string print_family_file(const FamilyFile<K>& f) {
  std::string s = "ring";
  for (const auto& v : f.ring->vars) s += " " + v;
  s += "\n";
  for (const auto& [name, M] : f.matrices) {
    s += "matrix " + name + " " + std::to_string(M.rows) + " " + std::to_string(M.cols) + "\n";
    for (int i = 0; i < M.rows; ++i)
      for (int j = 0; j < M.cols; ++j) s += M.at(i, j).to_string() + "\n";
  }
  for (const auto& t : f.tasks) {
    s += "task " + t.verb + " " + t.name;
    for (const auto& [k, v] : t.options) s += " " + k + "=" + v;
    s += "\n";
  }
  return s;
}

}  // namespace bubbletree
