#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "treedec/tree.hpp"

namespace treedec {

struct ConlluRejection {
  int line = 0;  // 1-based line where the offending sentence starts
  std::string reason;
};

struct ConlluResult {
  std::vector<DependencyTree> trees;
  std::vector<ConlluRejection> rejected;
};

// Reads CoNLL-U sentence blocks. Only the ID, FORM and HEAD columns are
// consulted; comment lines, multiword ranges (1-2) and empty nodes (1.1)
// are skipped. A sentence whose heads are missing, out of range, or do not
// form a single-rooted tree is rejected with a per-sentence diagnostic.
ConlluResult read_conllu(std::istream& in);

}  // namespace treedec
