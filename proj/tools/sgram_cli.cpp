// sgram: command-line front end over the sgram C API.
//
// Exit status: 0 success, 1 configuration or fatal error, 2 when some
// inputs failed while others were processed.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sgram/sgram.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitPartial = 2;

int verbosity = 0;

// Owning wrappers for C API handles and strings.
template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
template <typename T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, Free>>;

using Amr = Handle<sgram_amr, sgram_amr_free>;
using PenmanFile = Handle<sgram_penman_file, sgram_penman_free>;
using SceneGraph = Handle<sgram_sg, sgram_sg_free>;
using Adapter = Handle<sgram_adapter, sgram_adapter_close>;
using Corpus = Handle<sgram_corpus, sgram_corpus_free>;
using SgSet = Handle<sgram_sg_set, sgram_sg_set_free>;
using Evaluator = Handle<sgram_evaluator, sgram_evaluator_free>;
using Index = Handle<sgram_index, sgram_index_free>;

std::string take(char* s) {
  std::string out = s ? s : "";
  sgram_string_free(s);
  return out;
}

struct Failure {
  int exit_code;
  std::string message;
};

// Throws Failure(kExitFatal) unless `status` is OK.
void check(sgram_status status, const std::string& context) {
  if (status == SGRAM_OK) return;
  throw Failure{kExitFatal, context + ": " + sgram_status_name(status) + ": " +
                                sgram_last_error()};
}

std::string describe_last(sgram_status status) {
  std::string msg = std::string(sgram_status_name(status)) + ": " +
                    sgram_last_error();
  if (sgram_last_error_offset() >= 0) {
    msg += " (offset " + std::to_string(sgram_last_error_offset()) + ")";
  }
  return msg;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw Failure{kExitFatal, "cannot write '" + path + "'"};
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void line(const std::string& s) { stream() << s << '\n'; }
  void raw(const std::string& s) { stream() << s; }

 private:
  std::ofstream file_;
};

void note(const std::string& msg) {
  if (verbosity > 0) std::cerr << msg << '\n';
}

std::string block_name(const sgram_penman_file* file, size_t i) {
  const char* id = sgram_penman_meta(file, i, "id");
  return id ? std::string(id) : std::to_string(i + 1);
}

PenmanFile read_penman(const std::string& path) {
  sgram_penman_file* raw = nullptr;
  check(sgram_penman_read(path.c_str(), &raw), "reading " + path);
  return PenmanFile(raw);
}

sgram_strategy strategy_of(const std::string& name) {
  sgram_strategy s = SGRAM_STRATEGY_DFS;
  check(sgram_strategy_parse(name.c_str(), &s), "--strategy");
  return s;
}

Corpus load_corpus(const std::string& path) {
  sgram_corpus* raw = nullptr;
  check(sgram_corpus_load(path.c_str(), &raw), "loading " + path);
  Corpus corpus(raw);
  if (sgram_corpus_skipped(raw) > 0) {
    std::cerr << path << ": skipped " << sgram_corpus_skipped(raw)
              << " malformed line(s)\n";
    char* errors = nullptr;
    if (verbosity > 0 && sgram_corpus_errors(raw, &errors) == SGRAM_OK) {
      std::cerr << take(errors);
    }
  }
  return corpus;
}

SgSet load_set(const std::string& path) {
  sgram_sg_set* raw = nullptr;
  check(sgram_sg_set_load(path.c_str(), &raw), "loading " + path);
  return SgSet(raw);
}

// ---- subcommands -----------------------------------------------------------

struct LinearizeArgs {
  std::string input;
  std::string strategy = "dfs";
  std::string emit = "text";
  std::string out;
};

int cmd_linearize(const LinearizeArgs& args) {
  const auto strategy = strategy_of(args.strategy);
  if (args.emit != "text" && args.emit != "tokens") {
    throw Failure{kExitFatal, "--emit must be text or tokens"};
  }
  const auto emit = args.emit == "tokens" ? SGRAM_EMIT_TOKENS : SGRAM_EMIT_TEXT;
  auto file = read_penman(args.input);
  Output out(args.out);
  int failures = 0;
  for (size_t i = 0; i < sgram_penman_count(file.get()); ++i) {
    sgram_amr* raw = nullptr;
    const auto status = sgram_amr_parse(sgram_penman_text(file.get(), i), &raw);
    if (status != SGRAM_OK) {
      std::cerr << args.input << ":" << sgram_penman_line(file.get(), i)
                << ": graph " << block_name(file.get(), i) << ": "
                << describe_last(status) << '\n';
      ++failures;
      continue;
    }
    Amr amr(raw);
    char* text = nullptr;
    check(sgram_linearize(amr.get(), strategy, emit, &text), "linearize");
    out.line(take(text));
  }
  return failures > 0 ? kExitPartial : kExitOk;
}

struct ConvertArgs {
  std::string input;
  std::string engine = "rules";
  std::string adapter;
  std::string strategy = "dfs";
  std::string rules_config;
  double timeout = 30.0;
  bool jsonl = false;
  std::string out;
};

int cmd_convert(ConvertArgs args) {
  if (args.engine != "rules" && args.engine != "external") {
    throw Failure{kExitFatal, "--engine must be rules or external"};
  }
  const auto strategy = strategy_of(args.strategy);
  Adapter adapter;
  if (args.engine == "external") {
    if (args.adapter.empty()) {
      if (const char* env = std::getenv("SGRAM_ADAPTER")) args.adapter = env;
    }
    if (args.adapter.empty()) {
      throw Failure{kExitFatal,
                    "--engine external needs --adapter or SGRAM_ADAPTER"};
    }
    sgram_adapter* raw = nullptr;
    check(sgram_adapter_open(args.adapter.c_str(), args.timeout, &raw),
          "--adapter");
    adapter.reset(raw);
  }
  std::string config;
  if (!args.rules_config.empty()) {
    std::ifstream in(args.rules_config);
    if (!in) throw Failure{kExitFatal, "cannot read " + args.rules_config};
    std::stringstream ss;
    ss << in.rdbuf();
    config = ss.str();
  }

  auto file = read_penman(args.input);
  Output out(args.out);
  int failures = 0;
  for (size_t i = 0; i < sgram_penman_count(file.get()); ++i) {
    const std::string name = block_name(file.get(), i);
    auto report = [&](const std::string& what) {
      std::cerr << args.input << ":" << sgram_penman_line(file.get(), i)
                << ": graph " << name << ": " << what << '\n';
      ++failures;
    };
    sgram_amr* raw_amr = nullptr;
    auto status = sgram_amr_parse(sgram_penman_text(file.get(), i), &raw_amr);
    if (status != SGRAM_OK) {
      report(describe_last(status));
      continue;
    }
    Amr amr(raw_amr);
    sgram_sg* raw_sg = nullptr;
    if (adapter) {
      char* text = nullptr;
      check(sgram_linearize(amr.get(), strategy, SGRAM_EMIT_TEXT, &text),
            "linearize");
      const std::string linearized = take(text);
      status = sgram_adapter_convert(adapter.get(), linearized.c_str(), &raw_sg);
      if (status != SGRAM_OK) {
        report(describe_last(status) + " [response: " +
               sgram_adapter_last_response(adapter.get()) + "]");
        continue;
      }
    } else {
      check(sgram_convert_rules(amr.get(), config.empty() ? nullptr
                                                          : config.c_str(),
                                &raw_sg),
            "convert");
    }
    SceneGraph graph(raw_sg);
    char* target = nullptr;
    check(sgram_sg_to_text(graph.get(), &target), "serialize");
    if (args.jsonl) {
      nlohmann::ordered_json j;
      j["region_id"] = name;
      j["target"] = take(target);
      out.line(j.dump());
    } else {
      out.line(take(target));
    }
  }
  return failures > 0 ? kExitPartial : kExitOk;
}

struct EvalArgs {
  std::string generated;
  std::string reference;
  bool per_region = false;
  std::string out;
};

int cmd_eval(const EvalArgs& args) {
  auto generated = load_set(args.generated);
  auto reference = load_set(args.reference);

  std::map<std::string, size_t> ref_index;
  for (size_t i = 0; i < sgram_sg_set_size(reference.get()); ++i) {
    if (!ref_index.emplace(sgram_sg_set_id(reference.get(), i), i).second) {
      throw Failure{kExitFatal, std::string("duplicate region id in ") +
                                    args.reference + ": " +
                                    sgram_sg_set_id(reference.get(), i)};
    }
  }
  std::set<std::string> seen;
  std::vector<std::string> unmatched;
  sgram_evaluator* raw = nullptr;
  check(sgram_evaluator_new(&raw), "evaluator");
  Evaluator evaluator(raw);
  for (size_t i = 0; i < sgram_sg_set_size(generated.get()); ++i) {
    const std::string id = sgram_sg_set_id(generated.get(), i);
    if (!seen.insert(id).second) {
      throw Failure{kExitFatal, "duplicate region id in " + args.generated +
                                    ": " + id};
    }
    auto it = ref_index.find(id);
    if (it == ref_index.end()) {
      unmatched.push_back(id + " (only in " + args.generated + ")");
      continue;
    }
    check(sgram_evaluator_add(evaluator.get(), id.c_str(),
                              sgram_sg_set_graph(generated.get(), i),
                              sgram_sg_set_graph(reference.get(), it->second)),
          "evaluate");
  }
  for (const auto& [id, i] : ref_index) {
    if (!seen.contains(id)) unmatched.push_back(id + " (only in " + args.reference + ")");
  }
  if (!unmatched.empty()) {
    std::string msg = "region ids do not align:";
    for (const auto& u : unmatched) msg += "\n  " + u;
    throw Failure{kExitFatal, msg};
  }
  char* report = nullptr;
  double mean = 0.0;
  check(sgram_evaluator_report(evaluator.get(), args.per_region ? 1 : 0,
                               &report, &mean),
        "evaluate");
  Output out(args.out);
  out.raw(take(report));
  return kExitOk;
}

struct RetrieveArgs {
  std::string index;
  std::string queries;
  std::string gold;
  std::string ks = "5,10";
  bool per_query = false;
  std::string out;
};

std::vector<size_t> parse_ks(const std::string& csv) {
  std::vector<size_t> ks;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      const long v = std::stol(item, &used);
      if (used != item.size() || v <= 0) throw std::invalid_argument(item);
      ks.push_back(static_cast<size_t>(v));
    } catch (const std::exception&) {
      throw Failure{kExitFatal, "--k expects positive integers, got '" + item + "'"};
    }
  }
  if (ks.empty()) throw Failure{kExitFatal, "--k is empty"};
  return ks;
}

// "query_id<TAB>image_id" per line.
std::map<std::string, std::string> read_gold(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{kExitFatal, "cannot read gold mapping " + path};
  std::map<std::string, std::string> gold;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Failure{kExitFatal, path + ":" + std::to_string(line_no) +
                                    ": expected query_id<TAB>image_id"};
    }
    gold[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return gold;
}

int cmd_retrieve(const RetrieveArgs& args) {
  const auto ks = parse_ks(args.ks);
  sgram_index* raw_index = nullptr;
  check(sgram_index_load(args.index.c_str(), &raw_index), "loading " + args.index);
  Index index(raw_index);
  auto queries = load_set(args.queries);
  const auto gold = args.gold.empty() ? std::map<std::string, std::string>{}
                                      : read_gold(args.gold);
  const size_t n = sgram_sg_set_size(queries.get());
  if (n == 0) throw Failure{kExitFatal, "no queries in " + args.queries};

  Output out(args.out);
  std::vector<size_t> ranks;
  for (size_t i = 0; i < n; ++i) {
    const std::string id = sgram_sg_set_id(queries.get(), i);
    std::string gold_id;
    if (auto it = gold.find(id); it != gold.end()) {
      gold_id = it->second;
    } else if (const char* image = sgram_sg_set_image_id(queries.get(), i)) {
      gold_id = image;
    } else {
      throw Failure{kExitFatal, "query " + id + " has no gold image"};
    }
    size_t rank = 0;
    check(sgram_index_rank(index.get(), sgram_sg_set_graph(queries.get(), i),
                           gold_id.c_str(), &rank, nullptr),
          "query " + id);
    ranks.push_back(rank);
    if (args.per_query) {
      nlohmann::ordered_json j;
      j["query_id"] = id;
      j["gold_image_id"] = gold_id;
      j["gold_rank"] = rank;
      out.line(j.dump());
    }
    note("query " + id + ": gold rank " + std::to_string(rank));
  }
  char* metrics = nullptr;
  check(sgram_retrieval_metrics(ranks.data(), ranks.size(), ks.data(),
                                ks.size(), &metrics),
        "metrics");
  out.line(take(metrics));
  return kExitOk;
}

struct ExportArgs {
  std::string corpus;
  std::string strategy = "dfs";
  bool no_filter = false;
  std::string out;
};

int cmd_export(const ExportArgs& args) {
  const auto strategy = strategy_of(args.strategy);
  auto corpus = load_corpus(args.corpus);
  char* pairs = nullptr;
  char* warnings = nullptr;
  size_t skipped = 0;
  check(sgram_corpus_export_pairs(corpus.get(), strategy, args.no_filter ? 0 : 1,
                                  &pairs, &skipped, &warnings),
        "export");
  const std::string warn = take(warnings);
  Output out(args.out);
  out.raw(take(pairs));
  if (verbosity > 0) std::cerr << warn;
  std::cerr << "skipped " << skipped << " record(s) without a usable AMR\n";
  return kExitOk;
}

struct CorpusArgs {
  std::string input;
  std::string out;
};

int cmd_filter(const CorpusArgs& args) {
  auto corpus = load_corpus(args.input);
  check(sgram_corpus_filter(corpus.get()), "filter");
  char* text = nullptr;
  check(sgram_corpus_to_jsonl(corpus.get(), &text), "serialize");
  Output out(args.out);
  out.raw(take(text));
  return kExitOk;
}

int cmd_stats(const CorpusArgs& args) {
  auto corpus = load_corpus(args.input);
  char* text = nullptr;
  check(sgram_corpus_stats_json(corpus.get(), &text), "stats");
  Output out(args.out);
  out.line(take(text));
  return kExitOk;
}

int cmd_index(const CorpusArgs& args) {
  auto corpus = load_corpus(args.input);
  sgram_index* raw = nullptr;
  check(sgram_corpus_build_index(corpus.get(), &raw), "index");
  Index index(raw);
  char* text = nullptr;
  check(sgram_index_to_jsonl(index.get(), &text), "serialize");
  Output out(args.out);
  out.raw(take(text));
  return kExitOk;
}

int cmd_vg_convert(const CorpusArgs& args) {
  sgram_corpus* raw = nullptr;
  check(sgram_corpus_load_visual_genome(args.input.c_str(), &raw),
        "loading " + args.input);
  Corpus corpus(raw);
  char* text = nullptr;
  check(sgram_corpus_to_jsonl(corpus.get(), &text), "serialize");
  Output out(args.out);
  out.raw(take(text));
  const size_t skipped = sgram_corpus_skipped(corpus.get());
  if (skipped > 0) {
    char* errors = nullptr;
    if (sgram_corpus_errors(corpus.get(), &errors) == SGRAM_OK) {
      std::cerr << take(errors);
    }
    return kExitPartial;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scene graph parsing toolkit over AMR graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version",
                       std::string("sgram ") + sgram_version() +
                           " (target grammar " + sgram_grammar_version() + ")");
  app.add_flag("-v,--verbose", verbosity, "Report per-item details on stderr");

  const std::vector<std::string> strategies{"dfs", "bfs", "inorder"};

  LinearizeArgs lin;
  auto* linearize = app.add_subcommand("linearize", "Linearize PENMAN graphs");
  linearize->add_option("input", lin.input, "PENMAN file")->required()
      ->check(CLI::ExistingFile);
  linearize->add_option("--strategy", lin.strategy)
      ->check(CLI::IsMember(strategies));
  linearize->add_option("--emit", lin.emit, "text | tokens (tab-separated)")
      ->check(CLI::IsMember({"text", "tokens"}));
  linearize->add_option("--out", lin.out, "Output file (default stdout)");

  ConvertArgs conv;
  auto* convert =
      app.add_subcommand("convert", "Convert PENMAN graphs to scene graphs");
  convert->add_option("input", conv.input, "PENMAN file")->required()
      ->check(CLI::ExistingFile);
  convert->add_option("--engine", conv.engine, "rules | external")
      ->check(CLI::IsMember({"rules", "external"}));
  convert->add_option("--adapter", conv.adapter,
                      "Model command for the external engine "
                      "(default $SGRAM_ADAPTER)");
  convert->add_option("--timeout", conv.timeout, "Adapter timeout in seconds")
      ->check(CLI::PositiveNumber);
  convert->add_option("--strategy", conv.strategy,
                      "Linearization sent to the external model")
      ->check(CLI::IsMember(strategies));
  convert->add_option("--rules-config", conv.rules_config,
                      "JSON file overriding rule roles")
      ->check(CLI::ExistingFile);
  convert->add_flag("--jsonl", conv.jsonl,
                    "Emit {\"region_id\", \"target\"} lines");
  convert->add_option("--out", conv.out);

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Tuple F-score against references");
  eval->add_option("generated", ev.generated)->required()->check(CLI::ExistingFile);
  eval->add_option("reference", ev.reference)->required()->check(CLI::ExistingFile);
  eval->add_flag("--per-region", ev.per_region, "Emit one line per region");
  eval->add_option("--out", ev.out);

  RetrieveArgs ret;
  auto* retrieve = app.add_subcommand("retrieve", "Image retrieval metrics");
  retrieve->add_option("index", ret.index)->required()->check(CLI::ExistingFile);
  retrieve->add_option("queries", ret.queries)->required()->check(CLI::ExistingFile);
  retrieve->add_option("--gold", ret.gold, "query_id<TAB>image_id file")
      ->check(CLI::ExistingFile);
  retrieve->add_option("--k", ret.ks, "Recall cutoffs, comma separated");
  retrieve->add_flag("--per-query", ret.per_query, "Emit each query's gold rank");
  retrieve->add_option("--out", ret.out);

  ExportArgs exp;
  auto* export_cmd =
      app.add_subcommand("export", "Write seq2seq training pairs");
  export_cmd->add_option("corpus", exp.corpus)->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--strategy", exp.strategy)
      ->check(CLI::IsMember(strategies));
  export_cmd->add_flag("--no-filter", exp.no_filter,
                       "Keep tuples not grounded in the description");
  export_cmd->add_option("--out", exp.out);

  CorpusArgs filt, stat, idx, vg;
  auto* filter = app.add_subcommand("filter", "Drop ungrounded tuples");
  filter->add_option("corpus", filt.input)->required()->check(CLI::ExistingFile);
  filter->add_option("--out", filt.out);
  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  stats->add_option("corpus", stat.input)->required()->check(CLI::ExistingFile);
  stats->add_option("--out", stat.out);
  auto* index = app.add_subcommand("index", "Build a retrieval index");
  index->add_option("corpus", idx.input)->required()->check(CLI::ExistingFile);
  index->add_option("--out", idx.out);
  auto* vg_convert = app.add_subcommand(
      "vg-convert", "Visual Genome region graphs to region records");
  vg_convert->add_option("region_graphs", vg.input)->required()
      ->check(CLI::ExistingFile);
  vg_convert->add_option("--out", vg.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitFatal;
  }

  try {
    if (*linearize) return cmd_linearize(lin);
    if (*convert) return cmd_convert(conv);
    if (*eval) return cmd_eval(ev);
    if (*retrieve) return cmd_retrieve(ret);
    if (*export_cmd) return cmd_export(exp);
    if (*filter) return cmd_filter(filt);
    if (*stats) return cmd_stats(stat);
    if (*index) return cmd_index(idx);
    if (*vg_convert) return cmd_vg_convert(vg);
  } catch (const Failure& f) {
    std::cerr << "sgram: " << f.message << '\n';
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "sgram: " << e.what() << '\n';
    return kExitFatal;
  }
  return kExitFatal;
}
