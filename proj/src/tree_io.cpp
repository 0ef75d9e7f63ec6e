#include "treedec/tree_io.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace treedec {

namespace {

struct IoError : TreeError {
  using TreeError::TreeError;
};

const std::string& checked_text(const Vocabulary& vocab, TokenId id) {
  const std::string& text = vocab.text(id);
  if (text == "_") throw IoError("tree text: token '_' is reserved");
  for (char c : text)
    if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')')
      throw IoError("tree text: token contains whitespace or parentheses: " + text);
  return text;
}

void write_sp(const SpNode& node, const Vocabulary& vocab, std::ostream& out) {
  out << '(' << checked_text(vocab, node.token) << ' ' << node.tag;
  for (const SpNode& c : node.children) {
    out << ' ';
    write_sp(c, vocab, out);
  }
  out << ')';
}

void write_ternary(const TernaryNode& node, const Vocabulary& vocab, std::ostream& out) {
  if (node.is_eob()) {
    if (!node.is_leaf()) throw IoError("tree text: eob node with children");
    out << Vocabulary::kEobText;
    return;
  }
  out << '(' << checked_text(vocab, node.token) << ' ';
  if (node.tag)
    out << *node.tag;
  else
    out << '-';
  for (const auto& s : node.slot) {
    out << ' ';
    if (s)
      write_ternary(*s, vocab, out);
    else
      out << '_';
  }
  out << ')';
}

struct Lexer {
  const std::string& text;
  std::size_t pos = 0;

  void skip_space() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool at_end() {
    skip_space();
    return pos >= text.size();
  }
  char peek() {
    skip_space();
    if (pos >= text.size()) throw IoError("tree text: unexpected end of line");
    return text[pos];
  }
  void expect(char c) {
    if (peek() != c)
      throw IoError(std::string("tree text: expected '") + c + "' at column " +
                    std::to_string(pos + 1));
    ++pos;
  }
  std::string word() {
    skip_space();
    std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
           text[pos] != '(' && text[pos] != ')')
      ++pos;
    if (start == pos) throw IoError("tree text: expected a token at column " +
                                    std::to_string(pos + 1));
    return text.substr(start, pos - start);
  }
};

int parse_tag(const std::string& w) {
  try {
    std::size_t used = 0;
    int tag = std::stoi(w, &used);
    if (used != w.size() || tag < 0) throw IoError("");
    return tag;
  } catch (...) {
    throw IoError("tree text: invalid tag '" + w + "'");
  }
}

SpNode parse_sp_node(Lexer& lex, const Vocabulary& vocab) {
  lex.expect('(');
  SpNode node;
  node.token = vocab.id(lex.word());
  node.tag = parse_tag(lex.word());
  while (lex.peek() != ')') node.children.push_back(parse_sp_node(lex, vocab));
  lex.expect(')');
  return node;
}

template <class Lookup>
TernaryPtr parse_ternary_node(Lexer& lex, Lookup&& lookup) {
  if (lex.peek() != '(') {
    const std::string w = lex.word();
    if (w == "_") return nullptr;
    if (w != Vocabulary::kEobText)
      throw IoError("tree text: bare token '" + w + "' (only " +
                    Vocabulary::kEobText + " or _ allowed)");
    return std::make_unique<TernaryNode>(kEob);
  }
  lex.expect('(');
  auto node = std::make_unique<TernaryNode>();
  node->token = lookup(lex.word());
  if (node->token == kEob) throw IoError("tree text: eob written in node form");
  const std::string tag = lex.word();
  if (tag != "-") node->tag = parse_tag(tag);
  for (int k = 0; k < 3; ++k) node->slot[k] = parse_ternary_node(lex, lookup);
  lex.expect(')');
  return node;
}

}  // namespace

std::string to_text(const SpNode& tree, const Vocabulary& vocab) {
  std::ostringstream out;
  write_sp(tree, vocab, out);
  return out.str();
}

std::string to_text(const TernaryNode& tree, const Vocabulary& vocab) {
  std::ostringstream out;
  write_ternary(tree, vocab, out);
  return out.str();
}

SpNode parse_sp(const std::string& line, const Vocabulary& vocab) {
  Lexer lex{line};
  SpNode node = parse_sp_node(lex, vocab);
  if (!lex.at_end()) throw IoError("tree text: trailing characters");
  return node;
}

TernaryPtr parse_ternary(const std::string& line, const Vocabulary& vocab) {
  Lexer lex{line};
  auto node = parse_ternary_node(lex, [&](const std::string& w) { return vocab.id(w); });
  if (!node) throw IoError("tree text: empty tree");
  if (!lex.at_end()) throw IoError("tree text: trailing characters");
  return node;
}

TernaryPtr parse_ternary_collect(const std::string& line, Vocabulary& vocab) {
  Lexer lex{line};
  auto node = parse_ternary_node(lex, [&](const std::string& w) { return vocab.add(w); });
  if (!node) throw IoError("tree text: empty tree");
  if (!lex.at_end()) throw IoError("tree text: trailing characters");
  return node;
}

}  // namespace treedec
