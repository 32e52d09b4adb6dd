#include "sgram/sgram.h"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "sgram/adapter.hpp"
#include "sgram/amr.hpp"
#include "sgram/amr2sg.hpp"
#include "sgram/corpus_io.hpp"
#include "sgram/error.hpp"
#include "sgram/linearize.hpp"
#include "sgram/retrieval.hpp"
#include "sgram/scene_graph.hpp"
#include "sgram/spice_eval.hpp"

struct sgram_amr {
  sgram::amr::Graph graph;
};

struct sgram_penman_file {
  std::vector<sgram::amr::PenmanBlock> blocks;
};

struct sgram_sg {
  sgram::sg::SceneGraph graph;
};

struct sgram_adapter {
  std::unique_ptr<sgram::amr2sg::ExternalAdapter> adapter;
};

struct sgram_corpus {
  sgram::corpus::LoadResult data;
};

struct sgram_sg_set {
  struct Entry {
    std::string id;
    std::optional<std::string> image_id;
    sgram_sg graph;
  };
  std::vector<Entry> entries;
};

struct sgram_evaluator {
  std::vector<sgram::eval::RegionPair> pairs;
};

struct sgram_index {
  sgram::retrieval::RetrievalIndex index;
};

namespace {

thread_local std::string g_last_error;
thread_local long g_last_offset = -1;

sgram_status fail(sgram_status status, std::string message, long offset = -1) {
  g_last_error = std::move(message);
  g_last_offset = offset;
  return status;
}

template <typename F>
sgram_status guarded(F&& body) {
  try {
    g_last_error.clear();
    g_last_offset = -1;
    body();
    return SGRAM_OK;
  } catch (const sgram::Error& e) {
    const long offset = e.offset() ? static_cast<long>(*e.offset()) : -1;
    return fail(static_cast<sgram_status>(e.code()), e.what(), offset);
  } catch (const std::bad_alloc&) {
    return fail(SGRAM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SGRAM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SGRAM_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) {
    throw sgram::Error(sgram::ErrorCode::kInvalidArgument,
                       std::string(what) + " must not be NULL");
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sgram::linearize::Strategy to_strategy(sgram_strategy s) {
  switch (s) {
    case SGRAM_STRATEGY_DFS: return sgram::linearize::Strategy::kDfs;
    case SGRAM_STRATEGY_BFS: return sgram::linearize::Strategy::kBfs;
    case SGRAM_STRATEGY_INORDER: return sgram::linearize::Strategy::kInOrder;
  }
  throw sgram::Error(sgram::ErrorCode::kInvalidArgument, "unknown strategy");
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += '\t';
    out += tokens[i];
  }
  return out;
}

std::string read_file(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw sgram::Error(sgram::ErrorCode::kFileNotFound,
                       std::string("cannot open '") + path + "'");
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> string_list(const nlohmann::json& j, const char* key) {
  if (!j.is_array()) {
    throw sgram::Error(sgram::ErrorCode::kInvalidArgument,
                       std::string("\"") + key + "\" must be an array");
  }
  return j.get<std::vector<std::string>>();
}

sgram::amr2sg::RuleConfig rule_config(const char* config_json) {
  sgram::amr2sg::RuleConfig config;
  if (config_json == nullptr) return config;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(config_json);
  } catch (const std::exception& e) {
    throw sgram::Error(sgram::ErrorCode::kInvalidArgument,
                       std::string("rule config: ") + e.what());
  }
  if (j.contains("attribute_roles")) {
    const auto roles = string_list(j["attribute_roles"], "attribute_roles");
    config.attribute_roles = {roles.begin(), roles.end()};
  }
  if (j.contains("core_roles")) {
    config.core_roles = string_list(j["core_roles"], "core_roles");
  }
  if (j.contains("locative_roles")) {
    config.locative_roles =
        j["locative_roles"].get<std::map<std::string, std::string>>();
  }
  if (j.contains("locative_fallback_role")) {
    config.locative_fallback_role = j["locative_fallback_role"];
  }
  if (j.contains("locative_fallback_preposition")) {
    config.locative_fallback_preposition = j["locative_fallback_preposition"];
  }
  config.check();
  return config;
}

std::string json_id(const nlohmann::json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

sgram_sg_set::Entry sg_set_entry(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw sgram::Error(sgram::ErrorCode::kParse, "entry must be a JSON object");
  }
  sgram_sg_set::Entry entry;
  for (const char* key : {"region_id", "id", "query_id"}) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) {
      entry.id = json_id(*it);
      break;
    }
  }
  if (entry.id.empty()) {
    throw sgram::Error(sgram::ErrorCode::kParse, "entry without an id");
  }
  if (auto it = j.find("image_id"); it != j.end() && !it->is_null()) {
    entry.image_id = json_id(*it);
  }
  if (auto it = j.find("scene_graph"); it != j.end()) {
    entry.graph.graph = sgram::sg::from_json(*it);
  } else if (auto t = j.find("target"); t != j.end() && t->is_string()) {
    entry.graph.graph = sgram::sg::parse_sg_text(t->get<std::string>());
  } else if (auto a = j.find("amr"); a != j.end() && a->is_string()) {
    entry.graph.graph = sgram::amr2sg::convert_rules(
        sgram::amr::parse_penman(a->get<std::string>()));
  } else {
    throw sgram::Error(sgram::ErrorCode::kParse,
                       "entry needs \"scene_graph\", \"target\" or \"amr\"");
  }
  return entry;
}

}  // namespace

extern "C" {

const char* sgram_version(void) { return SGRAM_VERSION_STRING; }
const char* sgram_grammar_version(void) { return SGRAM_GRAMMAR_VERSION_STRING; }

const char* sgram_status_name(sgram_status status) {
  if (status == SGRAM_OK) return "OK";
  static thread_local std::string name;
  name = std::string(
      sgram::error_code_name(static_cast<sgram::ErrorCode>(status)));
  return name.c_str();
}

const char* sgram_last_error(void) { return g_last_error.c_str(); }
long sgram_last_error_offset(void) { return g_last_offset; }
void sgram_string_free(char* s) { std::free(s); }

sgram_status sgram_strategy_parse(const char* name, sgram_strategy* out) {
  return guarded([&] {
    require(name != nullptr && out != nullptr, "arguments");
    auto s = sgram::linearize::parse_strategy(name);
    if (!s) {
      throw sgram::Error(sgram::ErrorCode::kInvalidArgument,
                         std::string("unknown strategy '") + name +
                             "' (expected dfs, bfs or inorder)");
    }
    *out = *s == sgram::linearize::Strategy::kDfs   ? SGRAM_STRATEGY_DFS
           : *s == sgram::linearize::Strategy::kBfs ? SGRAM_STRATEGY_BFS
                                                    : SGRAM_STRATEGY_INORDER;
  });
}

// ---- AMR ---------------------------------------------------------------

sgram_status sgram_amr_parse(const char* penman, sgram_amr** out) {
  return guarded([&] {
    require(penman != nullptr && out != nullptr, "arguments");
    *out = nullptr;
    auto handle = std::make_unique<sgram_amr>();
    handle->graph = sgram::amr::parse_penman(penman);
    *out = handle.release();
  });
}

void sgram_amr_free(sgram_amr* amr) { delete amr; }

sgram_status sgram_amr_serialize(const sgram_amr* amr, char** out) {
  return guarded([&] {
    require(amr != nullptr && out != nullptr, "arguments");
    *out = duplicate(sgram::amr::serialize_penman(amr->graph));
  });
}

size_t sgram_amr_node_count(const sgram_amr* amr) {
  return amr ? amr->graph.nodes().size() : 0;
}

size_t sgram_amr_edge_count(const sgram_amr* amr) {
  return amr ? amr->graph.edges().size() : 0;
}

sgram_status sgram_amr_validate(const sgram_amr* amr, char** out) {
  return guarded([&] {
    require(amr != nullptr && out != nullptr, "arguments");
    std::string text;
    for (const auto& d : sgram::amr::validate(amr->graph)) {
      text += d.to_string();
      text += '\n';
    }
    *out = duplicate(text);
  });
}

sgram_status sgram_linearize(const sgram_amr* amr, sgram_strategy strategy,
                             sgram_emit emit, char** out) {
  return guarded([&] {
    require(amr != nullptr && out != nullptr, "arguments");
    const auto seq = sgram::linearize::linearize(amr->graph, to_strategy(strategy));
    *out = duplicate(emit == SGRAM_EMIT_TOKENS ? join_tokens(seq.tokens)
                                               : seq.text);
  });
}

sgram_status sgram_tokenize(const char* linearized, sgram_strategy strategy,
                            char** out) {
  return guarded([&] {
    require(linearized != nullptr && out != nullptr, "arguments");
    *out = duplicate(join_tokens(
        sgram::linearize::tokenize(linearized, to_strategy(strategy))));
  });
}

sgram_status sgram_penman_read(const char* path, sgram_penman_file** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "arguments");
    *out = nullptr;
    std::ifstream in(path);
    if (!in) {
      throw sgram::Error(sgram::ErrorCode::kFileNotFound,
                         std::string("cannot open '") + path + "'");
    }
    auto handle = std::make_unique<sgram_penman_file>();
    handle->blocks = sgram::amr::read_penman_blocks(in);
    if (in.bad()) {
      throw sgram::Error(sgram::ErrorCode::kIo,
                         std::string("read error on '") + path + "'");
    }
    *out = handle.release();
  });
}

void sgram_penman_free(sgram_penman_file* file) { delete file; }

size_t sgram_penman_count(const sgram_penman_file* file) {
  return file ? file->blocks.size() : 0;
}

const char* sgram_penman_text(const sgram_penman_file* file, size_t i) {
  if (!file || i >= file->blocks.size()) return nullptr;
  return file->blocks[i].text.c_str();
}

const char* sgram_penman_meta(const sgram_penman_file* file, size_t i,
                              const char* key) {
  if (!file || !key || i >= file->blocks.size()) return nullptr;
  const auto& meta = file->blocks[i].metadata;
  auto it = meta.find(key);
  return it == meta.end() ? nullptr : it->second.c_str();
}

size_t sgram_penman_line(const sgram_penman_file* file, size_t i) {
  if (!file || i >= file->blocks.size()) return 0;
  return file->blocks[i].line;
}

// ---- Scene graphs ------------------------------------------------------

sgram_status sgram_sg_parse_text(const char* text, sgram_sg** out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "arguments");
    *out = nullptr;
    auto handle = std::make_unique<sgram_sg>();
    handle->graph = sgram::sg::parse_sg_text(text);
    *out = handle.release();
  });
}

sgram_status sgram_sg_from_json(const char* json, sgram_sg** out) {
  return guarded([&] {
    require(json != nullptr && out != nullptr, "arguments");
    *out = nullptr;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json);
    } catch (const std::exception& e) {
      throw sgram::Error(sgram::ErrorCode::kParse, e.what());
    }
    auto handle = std::make_unique<sgram_sg>();
    handle->graph = sgram::sg::from_json(j);
    *out = handle.release();
  });
}

void sgram_sg_free(sgram_sg* sg) { delete sg; }

sgram_status sgram_sg_to_text(const sgram_sg* sg, char** out) {
  return guarded([&] {
    require(sg != nullptr && out != nullptr, "arguments");
    *out = duplicate(sgram::sg::serialize_sg(sg->graph));
  });
}

sgram_status sgram_sg_to_json(const sgram_sg* sg, char** out) {
  return guarded([&] {
    require(sg != nullptr && out != nullptr, "arguments");
    *out = duplicate(sgram::sg::to_json(sg->graph).dump());
  });
}

size_t sgram_sg_tuple_count(const sgram_sg* sg) {
  return sg ? sg->graph.tuple_count() : 0;
}

sgram_status sgram_convert_rules(const sgram_amr* amr, const char* config_json,
                                 sgram_sg** out) {
  return guarded([&] {
    require(amr != nullptr && out != nullptr, "arguments");
    *out = nullptr;
    const auto config = rule_config(config_json);
    auto handle = std::make_unique<sgram_sg>();
    handle->graph = sgram::amr2sg::convert_rules(amr->graph, config);
    *out = handle.release();
  });
}

// ---- Adapter -----------------------------------------------------------

sgram_status sgram_adapter_open(const char* command, double timeout_seconds,
                                sgram_adapter** out) {
  return guarded([&] {
    require(command != nullptr && out != nullptr, "arguments");
    *out = nullptr;
    if (!(timeout_seconds > 0.0) || !std::isfinite(timeout_seconds)) {
      throw sgram::Error(sgram::ErrorCode::kInvalidArgument,
                         "adapter timeout must be > 0");
    }
    const auto ms = std::chrono::milliseconds(
        std::max<long long>(1, std::llround(timeout_seconds * 1000.0)));
    auto handle = std::make_unique<sgram_adapter>();
    handle->adapter =
        std::make_unique<sgram::amr2sg::ExternalAdapter>(command, ms);
    *out = handle.release();
  });
}

void sgram_adapter_close(sgram_adapter* adapter) { delete adapter; }

sgram_status sgram_adapter_convert(sgram_adapter* adapter,
                                   const char* linearized, sgram_sg** out) {
  return guarded([&] {
    require(adapter != nullptr && linearized != nullptr && out != nullptr,
            "arguments");
    *out = nullptr;
    auto handle = std::make_unique<sgram_sg>();
    handle->graph = adapter->adapter->convert_text(linearized);
    *out = handle.release();
  });
}

const char* sgram_adapter_last_response(const sgram_adapter* adapter) {
  return adapter ? adapter->adapter->last_response().c_str() : nullptr;
}

// ---- Corpora -----------------------------------------------------------

sgram_status sgram_corpus_load(const char* path, sgram_corpus** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "arguments");
    *out = nullptr;
    auto handle = std::make_unique<sgram_corpus>();
    handle->data = sgram::corpus::load_records(path);
    *out = handle.release();
  });
}

sgram_status sgram_corpus_load_visual_genome(const char* path,
                                             sgram_corpus** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "arguments");
    *out = nullptr;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw sgram::Error(sgram::ErrorCode::kParse, e.what());
    }
    auto handle = std::make_unique<sgram_corpus>();
    handle->data = sgram::corpus::from_visual_genome(j);
    *out = handle.release();
  });
}

void sgram_corpus_free(sgram_corpus* corpus) { delete corpus; }

size_t sgram_corpus_size(const sgram_corpus* corpus) {
  return corpus ? corpus->data.records.size() : 0;
}

size_t sgram_corpus_skipped(const sgram_corpus* corpus) {
  return corpus ? corpus->data.skipped() : 0;
}

sgram_status sgram_corpus_errors(const sgram_corpus* corpus, char** out) {
  return guarded([&] {
    require(corpus != nullptr && out != nullptr, "arguments");
    std::string text;
    for (const auto& e : corpus->data.errors) {
      text += "line " + std::to_string(e.line) + ": " + e.message + "\n";
    }
    *out = duplicate(text);
  });
}

sgram_status sgram_corpus_filter(sgram_corpus* corpus) {
  return guarded([&] {
    require(corpus != nullptr, "corpus");
    for (auto& r : corpus->data.records) r = sgram::corpus::filter_ungrounded(r);
  });
}

sgram_status sgram_corpus_to_jsonl(const sgram_corpus* corpus, char** out) {
  return guarded([&] {
    require(corpus != nullptr && out != nullptr, "arguments");
    std::string text;
    for (const auto& r : corpus->data.records) {
      text += sgram::corpus::record_to_line(r);
      text += '\n';
    }
    *out = duplicate(text);
  });
}

sgram_status sgram_corpus_stats_json(const sgram_corpus* corpus, char** out) {
  return guarded([&] {
    require(corpus != nullptr && out != nullptr, "arguments");
    *out = duplicate(
        sgram::corpus::corpus_stats(corpus->data.records).to_json().dump());
  });
}

sgram_status sgram_corpus_export_pairs(const sgram_corpus* corpus,
                                       sgram_strategy strategy, int filter,
                                       char** out, size_t* skipped,
                                       char** warnings) {
  return guarded([&] {
    require(corpus != nullptr && out != nullptr, "arguments");
    const auto result = sgram::amr2sg::export_training_pairs(
        corpus->data.records, to_strategy(strategy), filter != 0);
    std::string text;
    for (const auto& p : result.pairs) {
      text += p.to_json_line();
      text += '\n';
    }
    std::string warn;
    for (const auto& w : result.warnings) {
      warn += w.region_id + ": " + w.message + "\n";
    }
    char* pairs = duplicate(text);
    if (warnings != nullptr) {
      try {
        *warnings = duplicate(warn);
      } catch (...) {
        std::free(pairs);
        throw;
      }
    }
    *out = pairs;
    if (skipped != nullptr) *skipped = result.skipped();
  });
}

sgram_status sgram_corpus_build_index(const sgram_corpus* corpus,
                                      sgram_index** out) {
  return guarded([&] {
    require(corpus != nullptr && out != nullptr, "arguments");
    *out = nullptr;
    std::vector<sgram::retrieval::Image> images;
    std::map<std::string, std::size_t> position;
    for (const auto& r : corpus->data.records) {
      auto [it, inserted] = position.try_emplace(r.image_id, images.size());
      if (inserted) images.push_back({r.image_id, {}});
      images[it->second].regions.push_back(r.ground_truth);
    }
    auto handle = std::make_unique<sgram_index>();
    handle->index = sgram::retrieval::RetrievalIndex(std::move(images));
    *out = handle.release();
  });
}

// ---- Scene-graph sets ----------------------------------------------------

sgram_status sgram_sg_set_load(const char* path, sgram_sg_set** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "arguments");
    *out = nullptr;
    std::ifstream in(path);
    if (!in) {
      throw sgram::Error(sgram::ErrorCode::kFileNotFound,
                         std::string("cannot open '") + path + "'");
    }
    auto handle = std::make_unique<sgram_sg_set>();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        handle->entries.push_back(sg_set_entry(nlohmann::json::parse(line)));
      } catch (const sgram::Error& e) {
        throw sgram::Error(e.code(), std::string(path) + ": line " +
                                         std::to_string(line_no) + ": " +
                                         e.what());
      } catch (const std::exception& e) {
        throw sgram::Error(sgram::ErrorCode::kParse,
                           std::string(path) + ": line " +
                               std::to_string(line_no) + ": " + e.what());
      }
    }
    *out = handle.release();
  });
}

void sgram_sg_set_free(sgram_sg_set* set) { delete set; }

size_t sgram_sg_set_size(const sgram_sg_set* set) {
  return set ? set->entries.size() : 0;
}

const char* sgram_sg_set_id(const sgram_sg_set* set, size_t i) {
  if (!set || i >= set->entries.size()) return nullptr;
  return set->entries[i].id.c_str();
}

const char* sgram_sg_set_image_id(const sgram_sg_set* set, size_t i) {
  if (!set || i >= set->entries.size() || !set->entries[i].image_id) {
    return nullptr;
  }
  return set->entries[i].image_id->c_str();
}

const sgram_sg* sgram_sg_set_graph(const sgram_sg_set* set, size_t i) {
  if (!set || i >= set->entries.size()) return nullptr;
  return &set->entries[i].graph;
}

// ---- Evaluation ----------------------------------------------------------

sgram_status sgram_f_score(const sgram_sg* generated, const sgram_sg* reference,
                           double* precision, double* recall, double* f1) {
  return guarded([&] {
    require(generated != nullptr && reference != nullptr, "graphs");
    const auto r = sgram::eval::f_score(generated->graph, reference->graph);
    if (precision) *precision = r.precision;
    if (recall) *recall = r.recall;
    if (f1) *f1 = r.f1;
  });
}

sgram_status sgram_evaluator_new(sgram_evaluator** out) {
  return guarded([&] {
    require(out != nullptr, "out");
    *out = new sgram_evaluator();
  });
}

void sgram_evaluator_free(sgram_evaluator* evaluator) { delete evaluator; }

sgram_status sgram_evaluator_add(sgram_evaluator* evaluator,
                                 const char* region_id,
                                 const sgram_sg* generated,
                                 const sgram_sg* reference) {
  return guarded([&] {
    require(evaluator != nullptr && region_id != nullptr &&
                generated != nullptr && reference != nullptr,
            "arguments");
    evaluator->pairs.push_back({region_id, generated->graph, reference->graph});
  });
}

sgram_status sgram_evaluator_report(const sgram_evaluator* evaluator,
                                    int per_region, char** out,
                                    double* mean_f1) {
  return guarded([&] {
    require(evaluator != nullptr && out != nullptr, "arguments");
    const auto report = sgram::eval::evaluate_corpus(evaluator->pairs);
    *out = duplicate(report.to_jsonl(per_region != 0));
    if (mean_f1) *mean_f1 = report.mean_f1;
  });
}

// ---- Retrieval -----------------------------------------------------------

sgram_status sgram_index_load(const char* path, sgram_index** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "arguments");
    *out = nullptr;
    auto handle = std::make_unique<sgram_index>();
    handle->index = sgram::retrieval::load_index(path);
    *out = handle.release();
  });
}

void sgram_index_free(sgram_index* index) { delete index; }

size_t sgram_index_size(const sgram_index* index) {
  return index ? index->index.size() : 0;
}

sgram_status sgram_index_to_jsonl(const sgram_index* index, char** out) {
  return guarded([&] {
    require(index != nullptr && out != nullptr, "arguments");
    *out = duplicate(index->index.to_jsonl());
  });
}

sgram_status sgram_index_rank(const sgram_index* index, const sgram_sg* query,
                              const char* gold_image_id, size_t* gold_rank,
                              char** ranking_json) {
  return guarded([&] {
    require(index != nullptr && query != nullptr && gold_image_id != nullptr,
            "arguments");
    const auto result =
        sgram::retrieval::rank(query->graph, index->index, gold_image_id);
    if (gold_rank) *gold_rank = result.gold_rank;
    if (ranking_json) {
      nlohmann::ordered_json j = nlohmann::ordered_json::array();
      for (const auto& [id, score] : result.ranking) {
        nlohmann::ordered_json e;
        e["image_id"] = id;
        e["score"] = score;
        j.push_back(std::move(e));
      }
      *ranking_json = duplicate(j.dump());
    }
  });
}

sgram_status sgram_retrieval_metrics(const size_t* gold_ranks, size_t count,
                                     const size_t* ks, size_t k_count,
                                     char** out) {
  return guarded([&] {
    require(out != nullptr && (count == 0 || gold_ranks != nullptr) &&
                (k_count == 0 || ks != nullptr),
            "arguments");
    std::vector<std::size_t> ranks(gold_ranks, gold_ranks + count);
    std::vector<std::size_t> cutoffs(ks, ks + k_count);
    *out = duplicate(
        sgram::retrieval::aggregate_metrics(ranks, cutoffs).to_json().dump());
  });
}

}  // extern "C"
