#pragma once

#include <string>

#include "treedec/tree.hpp"
#include "treedec/vocabulary.hpp"

namespace treedec {

// Textual tree form, one tree per line.
//
//   sp node       := (token tag child*)
//   ternary node  := <eob> | (token tag left middle right)
//
// Absent ternary slots print as "_", absent tags as "-". Padded ternary
// trees therefore contain no "_". Tokens are written as text; a token that
// contains whitespace, parentheses or equals "_" cannot be serialized.
std::string to_text(const SpNode& tree, const Vocabulary& vocab);
std::string to_text(const TernaryNode& tree, const Vocabulary& vocab);

SpNode parse_sp(const std::string& line, const Vocabulary& vocab);
TernaryPtr parse_ternary(const std::string& line, const Vocabulary& vocab);

// Parse variant that grows the vocabulary instead of mapping unseen tokens
// to <unk>; used by tools that work on bare tree files.
TernaryPtr parse_ternary_collect(const std::string& line, Vocabulary& vocab);

}  // namespace treedec
