// treedec: canonicalize dependency parses into ternary trees, train the
// tree-structured decoder, and generate responses with generalized beam
// search. See README.md and docs/formats.md for file formats.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "treedec/beam_search.hpp"
#include "treedec/canonicalize.hpp"
#include "treedec/checkpoint.hpp"
#include "treedec/config.hpp"
#include "treedec/conllu.hpp"
#include "treedec/depth_stats.hpp"
#include "treedec/enumerate.hpp"
#include "treedec/instances.hpp"
#include "treedec/toy_corpus.hpp"
#include "treedec/trainer.hpp"
#include "treedec/tree_io.hpp"

using namespace treedec;

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::vector<std::string> split_words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

std::string default_vocab_path(const std::string& checkpoint) {
  const std::size_t dot = checkpoint.rfind('.');
  if (dot == std::string::npos) return checkpoint + ".vocab";
  return checkpoint.substr(0, dot) + ".vocab";
}

int cmd_canonicalize(const std::string& in_path, const std::string& out_path) {
  std::ifstream in = open_in(in_path);
  std::ofstream out = open_out(out_path);
  ConlluResult parsed = read_conllu(in);
  int accepted = 0;
  std::vector<std::string> rejects;
  for (const auto& r : parsed.rejected)
    rejects.push_back("line " + std::to_string(r.line) + ": " + r.reason);
  for (const DependencyTree& dep : parsed.trees) {
    try {
      Vocabulary vocab = Vocabulary::collect({dep.tokens});
      SpNode sp = dep_to_sp(dep, vocab.encode(dep.tokens));
      out << to_text(*pad_eob(*canonicalize(sp)), vocab) << '\n';
      ++accepted;
    } catch (const TreeError& e) {
      rejects.push_back(std::string("sentence rejected: ") + e.what());
    }
  }
  std::cout << "accepted " << accepted << " rejected " << rejects.size() << '\n';
  for (const std::string& r : rejects) std::cerr << r << '\n';
  return 0;
}

int cmd_roundtrip(const std::string& in_path) {
  std::ifstream in = open_in(in_path);
  ConlluResult parsed = read_conllu(in);
  int checked = 0, failures = 0;
  for (const auto& r : parsed.rejected) {
    std::cerr << "rejected block at line " << r.line << ": " << r.reason << '\n';
    ++failures;
  }
  for (const DependencyTree& dep : parsed.trees) {
    ++checked;
    try {
      Vocabulary vocab = Vocabulary::collect({dep.tokens});
      const std::vector<TokenId> surface = vocab.encode(dep.tokens);
      SpNode sp = dep_to_sp(dep, surface);
      TernaryPtr canon = canonicalize(sp);
      const SpNode back = decanonicalize(*canon);
      const std::vector<TokenId> flat = flatten_ternary(*canon);
      if (!equal(back, sp) || flat != surface || flatten_sp(sp) != surface) {
        ++failures;
        std::cerr << "mismatch on sentence " << checked << ":\n  surface:";
        for (TokenId t : surface) std::cerr << ' ' << vocab.text(t);
        std::cerr << "\n  flattened:";
        for (TokenId t : flat) std::cerr << ' ' << vocab.text(t);
        std::cerr << '\n';
      }
    } catch (const TreeError& e) {
      ++failures;
      std::cerr << "sentence " << checked << ": " << e.what() << '\n';
    }
  }
  std::cout << checked << " sentences, " << failures << " failures\n";
  return failures == 0 ? 0 : 1;
}

int cmd_enumerate(int max_n) {
  if (max_n < 1 || max_n > kMaxEnumNodes) {
    std::cerr << "enumeration capped at n <= " << kMaxEnumNodes << '\n';
    return 2;
  }
  std::cout << "n\tsp\tordered\tlcrs\n";
  bool ok = true;
  for (int n = 1; n <= max_n; ++n) {
    const std::uint64_t s = count_sp_trees(n);
    const std::uint64_t o = count_ordered_trees(n);
    const std::uint64_t l = count_lcrs_trees(n);
    std::cout << n << '\t' << s << '\t' << o << '\t' << l << '\n';
    if (o != l) ok = false;
    if (n >= 2 && s <= o) ok = false;
  }
  if (!ok) {
    std::cerr << "enumeration identities violated\n";
    return 1;
  }
  return 0;
}

int cmd_stats(const std::string& in_path, const std::string& out_path) {
  std::ifstream in = open_in(in_path);
  Vocabulary vocab;
  std::vector<TernaryPtr> trees;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      trees.push_back(parse_ternary_collect(line, vocab));
    } catch (const TreeError& e) {
      std::cerr << "line " << line_no << ": " << e.what() << '\n';
      return 1;
    }
  }
  std::vector<const TernaryNode*> views;
  views.reserve(trees.size());
  for (const auto& t : trees) views.push_back(t.get());

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file = open_out(out_path);
    out = &file;
  }
  *out << "length,trees,mean_depth,chain_baseline\n";
  for (const DepthStatsRow& row : depth_stats(views))
    *out << row.length << ',' << row.trees << ',' << row.mean_depth << ','
         << row.chain_baseline << '\n';
  return 0;
}

int cmd_gen_toy(int pairs, std::uint64_t seed, const std::string& pairs_out,
                const std::string& conllu_out) {
  std::vector<RawPair> corpus = make_toy_corpus(pairs, seed);
  std::ofstream tsv = open_out(pairs_out);
  write_pairs_tsv(tsv, corpus);
  std::ofstream conllu = open_out(conllu_out);
  for (const RawPair& p : corpus) write_conllu(conllu, p.response);
  std::cout << "wrote " << corpus.size() << " pairs to " << pairs_out << " and "
            << conllu_out << '\n';
  return 0;
}

struct LoadedData {
  Vocabulary vocab;
  std::vector<TrainingInstance> train;
  std::vector<TrainingInstance> validation;
};

LoadedData load_training_data(const Config& config) {
  LoadedData data;
  const int post_cap = static_cast<int>(config.get("post_cap", 0L));
  if (config.has("instances")) {
    std::ifstream vf = open_in(config.get("vocab", std::string{}));
    data.vocab = Vocabulary::load(vf);
    std::ifstream inf = open_in(config.get("instances", std::string{}));
    data.train = read_instances(inf, data.vocab);
  } else {
    std::ifstream pairs_in = open_in(config.get("pairs", std::string{}));
    std::ifstream conllu_in = open_in(config.get("conllu", std::string{}));
    std::vector<RawPair> pairs = read_pairs(pairs_in, conllu_in);
    std::vector<std::vector<std::string>> texts;
    for (const RawPair& p : pairs) {
      texts.push_back(p.post);
      texts.push_back(p.response.tokens);
    }
    data.vocab = Vocabulary::build(texts, config.get("vocab_size", 1000L));
    std::cout << "vocabulary: " << data.vocab.size() << " tokens, coverage "
              << data.vocab.coverage(texts) << '\n';
    InstanceBuild build = make_instances(pairs, data.vocab, post_cap);
    if (build.skipped_nonprojective > 0)
      std::cout << "skipped " << build.skipped_nonprojective << " non-projective parses\n";
    if (build.truncated_posts > 0)
      std::cout << "truncated " << build.truncated_posts << " posts\n";
    data.train = std::move(build.instances);
  }

  if (config.has("val_pairs")) {
    std::ifstream pairs_in = open_in(config.get("val_pairs", std::string{}));
    std::ifstream conllu_in = open_in(config.get("val_conllu", std::string{}));
    InstanceBuild build = make_instances(read_pairs(pairs_in, conllu_in), data.vocab,
                                         post_cap);
    data.validation = std::move(build.instances);
  } else {
    // no held-out set configured: validate on the training instances
    for (const TrainingInstance& i : data.train)
      data.validation.push_back({i.post, clone(*i.tree)});
  }
  return data;
}

int cmd_train(const std::string& config_path) {
  std::ifstream cf = open_in(config_path);
  Config config = Config::parse(cf);

  LoadedData data = load_training_data(config);
  if (data.train.empty()) throw std::runtime_error("train: no usable instances");

  TrainConfig tc;
  tc.dims.vocab = static_cast<int>(data.vocab.size());
  tc.dims.embed = static_cast<int>(config.get("embed_dim", 32L));
  tc.dims.hidden = static_cast<int>(config.get("hidden_dim", 64L));
  tc.dims.arity = static_cast<int>(config.get("arity", 3L));
  tc.batch_size = static_cast<int>(config.get("batch_size", 16L));
  tc.max_epochs = static_cast<int>(config.get("max_epochs", 200L));
  tc.patience = static_cast<int>(config.get("patience", 4L));
  tc.seed = static_cast<std::uint64_t>(config.get("seed", 42L));
  tc.optimizer = config.get("optimizer", std::string{"adadelta"});
  tc.learning_rate = config.get("learning_rate", 0.1);
  tc.adadelta_rho = config.get("adadelta_rho", 0.95);
  tc.adadelta_eps = config.get("adadelta_eps", 1e-6);

  const std::string checkpoint_out = config.get("checkpoint_out", std::string{"model.ckpt"});
  const std::string vocab_out = config.get("vocab_out", std::string{"model.vocab"});
  const std::string history_out = config.get("history_out", std::string{"history.csv"});
  const std::string instances_out = config.get("instances_out", std::string{});
  config.require_known();

  if (!instances_out.empty()) {
    std::ofstream out = open_out(instances_out);
    write_instances(out, data.train, data.vocab);
  }

  TrainResult<double> result = train<double>(data.train, data.validation, tc);

  std::ofstream history = open_out(history_out);
  history << "epoch,train_nll,val_perplexity\n";
  for (const EpochStats& e : result.history)
    history << e.epoch << ',' << e.train_nll << ',' << e.val_perplexity << '\n';

  {
    std::ofstream out(checkpoint_out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + checkpoint_out);
    save_checkpoint(out, result.model, data.vocab.hash());
  }
  {
    std::ofstream out = open_out(vocab_out);
    data.vocab.save(out);
  }

  if (result.nan_abort) {
    std::cerr << "training aborted on non-finite loss; wrote last good checkpoint\n";
    return 1;
  }
  std::cout << "trained " << result.history.size() << " epochs, best epoch "
            << result.best_epoch << " (val perplexity "
            << result.history[result.best_epoch - 1].val_perplexity << ")\n"
            << "checkpoint: " << checkpoint_out << '\n';
  return 0;
}

struct GenerateSetup {
  TreeDecoderModel<double> model;
  Vocabulary vocab;
};

GenerateSetup load_model(const std::string& checkpoint_path, std::string vocab_path) {
  if (vocab_path.empty()) vocab_path = default_vocab_path(checkpoint_path);
  std::ifstream ck(checkpoint_path, std::ios::binary);
  if (!ck) throw std::runtime_error("cannot open " + checkpoint_path);
  LoadedCheckpoint<double> loaded = load_checkpoint<double>(ck);
  std::ifstream vf = open_in(vocab_path);
  GenerateSetup setup{std::move(loaded.model), Vocabulary::load(vf)};
  if (setup.vocab.hash() != loaded.vocab_hash)
    throw std::runtime_error("vocabulary " + vocab_path +
                             " does not match the checkpoint's vocabulary hash");
  if (static_cast<int>(setup.vocab.size()) != setup.model.dims.vocab)
    throw std::runtime_error("vocabulary size does not match the checkpoint");
  return setup;
}

void print_responses(const GenerationResult<double>& result, const Vocabulary& vocab,
                     int top) {
  int shown = 0;
  for (const auto& response : result.responses) {
    if (shown++ >= top) break;
    std::cout << response.score << '\t';
    for (std::size_t i = 0; i < response.tokens.size(); ++i) {
      if (i) std::cout << ' ';
      std::cout << vocab.text(response.tokens[i]);
    }
    std::cout << '\n';
  }
  if (result.responses.empty())
    std::cerr << "no responses: " << result.diagnostic << '\n';
}

int cmd_generate(const std::string& checkpoint_path, const std::string& vocab_path,
                 const std::string& post, const SearchOptions<double>& options, int top) {
  GenerateSetup setup = load_model(checkpoint_path, vocab_path);
  const std::vector<std::string> words = split_words(post);
  if (words.empty()) throw std::runtime_error("empty post");
  GenerationResult<double> result =
      generate_response(setup.vocab.encode(words), setup.model, options);
  print_responses(result, setup.vocab, top);
  return 0;
}

int cmd_chat_demo(const std::string& checkpoint_path, const std::string& vocab_path,
                  const SearchOptions<double>& options, int top) {
  GenerateSetup setup = load_model(checkpoint_path, vocab_path);
  std::string line;
  std::cout << "> " << std::flush;
  while (std::getline(std::cin, line)) {
    const std::vector<std::string> words = split_words(line);
    if (!words.empty()) {
      GenerationResult<double> result =
          generate_response(setup.vocab.encode(words), setup.model, options);
      print_responses(result, setup.vocab, top);
    }
    std::cout << "> " << std::flush;
  }
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tree-structured response decoder"};
  app.require_subcommand(1);

  std::string in_path, out_path, config_path, checkpoint_path, vocab_path, post_text;
  int max_n = 8;
  int pairs = 50;
  std::uint64_t seed = 7;
  std::string pairs_out = "pairs.tsv";
  std::string conllu_out = "responses.conllu";
  SearchOptions<double> search;
  int top = 0;

  auto* canon = app.add_subcommand("canonicalize",
                                   "CoNLL-U sentences to padded ternary tree lines");
  canon->add_option("--in", in_path, "CoNLL-U input file")->required();
  canon->add_option("--out", out_path, "tree file to write")->required();

  auto* roundtrip = app.add_subcommand(
      "roundtrip", "verify canonicalize/decanonicalize identity on a CoNLL-U file");
  roundtrip->add_option("--in", in_path, "CoNLL-U input file")->required();

  auto* enumerate =
      app.add_subcommand("enumerate", "count sp, ordered and lcrs trees per node count");
  enumerate->add_option("--max-n", max_n, "largest node count (cap 10)");

  auto* stats = app.add_subcommand("stats", "per-length depth statistics of a tree file");
  stats->add_option("--in", in_path, "tree file")->required();
  stats->add_option("--out", out_path, "csv output (default stdout)");

  auto* gen_toy = app.add_subcommand("gen-toy", "write a synthetic post/response corpus");
  gen_toy->add_option("--pairs", pairs, "number of pairs (max 180)");
  gen_toy->add_option("--seed", seed, "corpus selection seed");
  gen_toy->add_option("--pairs-out", pairs_out, "tsv output path");
  gen_toy->add_option("--conllu-out", conllu_out, "parse output path");

  auto* train_cmd = app.add_subcommand("train", "train a decoder from a config file");
  train_cmd->add_option("--config", config_path, "key = value config file")->required();

  auto add_search_flags = [&](CLI::App* cmd) {
    cmd->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
    cmd->add_option("--vocab", vocab_path,
                    "vocabulary file (default: checkpoint path with .vocab)");
    cmd->add_option("--global-beam", search.global_beam, "trees kept per round");
    cmd->add_option("--local-beam", search.local_beam, "child groups per leaf");
    cmd->add_option("--node-cap", search.node_cap, "generated nodes per tree");
    cmd->add_option("--top", top, "responses to print (default: global beam)");
  };
  auto* generate = app.add_subcommand("generate", "respond to one post");
  add_search_flags(generate);
  generate->add_option("--post", post_text, "post text (whitespace tokenized)")
      ->required();

  auto* chat = app.add_subcommand("chat-demo", "interactive read-eval loop");
  add_search_flags(chat);

  CLI11_PARSE(app, argc, argv);

  try {
    if (top <= 0) top = search.global_beam;
    if (canon->parsed()) return cmd_canonicalize(in_path, out_path);
    if (roundtrip->parsed()) return cmd_roundtrip(in_path);
    if (enumerate->parsed()) return cmd_enumerate(max_n);
    if (stats->parsed()) return cmd_stats(in_path, out_path);
    if (gen_toy->parsed()) return cmd_gen_toy(pairs, seed, pairs_out, conllu_out);
    if (train_cmd->parsed()) return cmd_train(config_path);
    if (generate->parsed())
      return cmd_generate(checkpoint_path, vocab_path, post_text, search, top);
    if (chat->parsed()) return cmd_chat_demo(checkpoint_path, vocab_path, search, top);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
