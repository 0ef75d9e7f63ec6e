#include "treedec/conllu.hpp"

#include <istream>
#include <optional>
#include <sstream>

namespace treedec {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::optional<long> parse_long(const std::string& s) {
  if (s.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    long v = std::stol(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (...) {
    return std::nullopt;
  }
}

struct Row {
  int line;
  long id;
  std::string form;
  long head;
};

// One sentence block; either a tree or a rejection reason.
std::optional<std::string> build_tree(const std::vector<Row>& rows, DependencyTree& out) {
  const long n = static_cast<long>(rows.size());
  for (long i = 0; i < n; ++i)
    if (rows[i].id != i + 1)
      return "line " + std::to_string(rows[i].line) + ": word ids not contiguous";

  out.tokens.clear();
  out.head.assign(rows.size(), -1);
  out.root = -1;
  for (long i = 0; i < n; ++i) {
    const Row& row = rows[i];
    out.tokens.push_back(row.form);
    if (row.head < 0 || row.head > n)
      return "line " + std::to_string(row.line) + ": head " + std::to_string(row.head) +
             " out of range";
    if (row.head == 0) {
      if (out.root != -1)
        return "line " + std::to_string(row.line) + ": multiple roots";
      out.root = static_cast<int>(i);
    } else {
      out.head[i] = static_cast<int>(row.head - 1);
    }
  }
  if (out.root == -1) return "no root (HEAD=0) in sentence";

  // every token must reach the root; a cycle never does
  for (long i = 0; i < n; ++i) {
    long steps = 0;
    int at = static_cast<int>(i);
    while (at != out.root) {
      at = out.head[at];
      if (++steps > n)
        return "line " + std::to_string(rows[i].line) + ": head links contain a cycle";
    }
  }
  return std::nullopt;
}

}  // namespace

ConlluResult read_conllu(std::istream& in) {
  ConlluResult result;
  std::vector<Row> rows;
  int line_no = 0;
  int block_start = 0;
  std::optional<std::string> block_error;

  auto finish_block = [&]() {
    if (rows.empty() && !block_error) return;
    if (block_error) {
      result.rejected.push_back({block_start, *block_error});
    } else {
      DependencyTree tree;
      if (auto err = build_tree(rows, tree))
        result.rejected.push_back({block_start, *err});
      else
        result.trees.push_back(std::move(tree));
    }
    rows.clear();
    block_error.reset();
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      finish_block();
      continue;
    }
    if (line[0] == '#') continue;
    if (rows.empty() && !block_error) block_start = line_no;
    if (block_error) continue;  // skip the rest of a broken block

    std::vector<std::string> fields = split_tabs(line);
    if (fields.size() < 7) {
      block_error = "line " + std::to_string(line_no) + ": fewer than 7 columns";
      continue;
    }
    const std::string& id_field = fields[0];
    if (id_field.find('-') != std::string::npos ||
        id_field.find('.') != std::string::npos)
      continue;  // multiword range or empty node
    auto id = parse_long(id_field);
    if (!id) {
      block_error = "line " + std::to_string(line_no) + ": bad id '" + id_field + "'";
      continue;
    }
    auto head = parse_long(fields[6]);
    if (!head) {
      block_error = "line " + std::to_string(line_no) + ": missing or bad head '" +
                    fields[6] + "'";
      continue;
    }
    rows.push_back({line_no, *id, fields[1], *head});
  }
  finish_block();
  return result;
}

}  // namespace treedec
