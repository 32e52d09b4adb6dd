/*
 * sgram C API.
 *
 * Every function returns an sgram_status. On failure the calling thread's
 * last error message (and, for parser errors, the byte offset) can be read
 * with sgram_last_error() / sgram_last_error_offset().
 *
 * Handles are opaque and owned by the caller; release them with the matching
 * *_free function. Strings returned through `char**` out-parameters are
 * heap-allocated by the library and released with sgram_string_free().
 * `const char*` return values are borrowed and stay valid while the owning
 * handle lives.
 *
 * Token lists are returned as one string with tokens separated by '\t'.
 */
#ifndef SGRAM_SGRAM_H_
#define SGRAM_SGRAM_H_

#include <stddef.h>

#if defined(SGRAM_BUILDING_LIBRARY)
#define SGRAM_API __attribute__((visibility("default")))
#else
#define SGRAM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sgram_status {
  SGRAM_OK = 0,
  SGRAM_ERR_INVALID_ARGUMENT = 1,
  SGRAM_ERR_EMPTY_INPUT = 2,
  SGRAM_ERR_UNBALANCED_PARENTHESES = 3,
  SGRAM_ERR_DUPLICATE_VARIABLE = 4,
  SGRAM_ERR_UNDECLARED_VARIABLE = 5,
  SGRAM_ERR_SYNTAX = 6,
  SGRAM_ERR_MALFORMED_LINEARIZATION = 7,
  SGRAM_ERR_EMPTY_AFTER_NORMALIZATION = 8,
  SGRAM_ERR_BAD_ARITY = 9,
  SGRAM_ERR_RESERVED_CHARACTER = 10,
  SGRAM_ERR_ADAPTER_TIMEOUT = 11,
  SGRAM_ERR_ADAPTER_CRASHED = 12,
  SGRAM_ERR_MALFORMED_MODEL_OUTPUT = 13,
  SGRAM_ERR_EMPTY_CORPUS = 14,
  SGRAM_ERR_UNKNOWN_GOLD_IMAGE = 15,
  SGRAM_ERR_EMPTY_RESULTS = 16,
  SGRAM_ERR_FILE_NOT_FOUND = 17,
  SGRAM_ERR_IO = 18,
  SGRAM_ERR_PARSE = 19,
  SGRAM_ERR_INTERNAL = 20
} sgram_status;

typedef enum sgram_strategy {
  SGRAM_STRATEGY_DFS = 0,
  SGRAM_STRATEGY_BFS = 1,
  SGRAM_STRATEGY_INORDER = 2
} sgram_strategy;

typedef enum sgram_emit {
  SGRAM_EMIT_TEXT = 0,
  SGRAM_EMIT_TOKENS = 1
} sgram_emit;

typedef struct sgram_amr sgram_amr;
typedef struct sgram_penman_file sgram_penman_file;
typedef struct sgram_sg sgram_sg;
typedef struct sgram_adapter sgram_adapter;
typedef struct sgram_corpus sgram_corpus;
typedef struct sgram_sg_set sgram_sg_set;
typedef struct sgram_evaluator sgram_evaluator;
typedef struct sgram_index sgram_index;

/* Library and target-grammar versions, e.g. "0.3.0" and "1". */
SGRAM_API const char* sgram_version(void);
SGRAM_API const char* sgram_grammar_version(void);

SGRAM_API const char* sgram_status_name(sgram_status status);
SGRAM_API const char* sgram_last_error(void);
/* Byte offset of the last parser error, or -1. */
SGRAM_API long sgram_last_error_offset(void);
SGRAM_API void sgram_string_free(char* s);

/* "dfs", "bfs", "inorder" */
SGRAM_API sgram_status sgram_strategy_parse(const char* name,
                                            sgram_strategy* out);

/* ---- AMR graphs ---------------------------------------------------- */

SGRAM_API sgram_status sgram_amr_parse(const char* penman, sgram_amr** out);
SGRAM_API void sgram_amr_free(sgram_amr* amr);
SGRAM_API sgram_status sgram_amr_serialize(const sgram_amr* amr, char** out);
SGRAM_API size_t sgram_amr_node_count(const sgram_amr* amr);
SGRAM_API size_t sgram_amr_edge_count(const sgram_amr* amr);
/* Diagnostics, one per line; empty string for a valid graph. */
SGRAM_API sgram_status sgram_amr_validate(const sgram_amr* amr, char** out);

SGRAM_API sgram_status sgram_linearize(const sgram_amr* amr,
                                       sgram_strategy strategy,
                                       sgram_emit emit, char** out);
SGRAM_API sgram_status sgram_tokenize(const char* linearized,
                                      sgram_strategy strategy, char** out);

/* PENMAN files: blank-line separated graphs with "# ::key value" metadata. */
SGRAM_API sgram_status sgram_penman_read(const char* path,
                                         sgram_penman_file** out);
SGRAM_API void sgram_penman_free(sgram_penman_file* file);
SGRAM_API size_t sgram_penman_count(const sgram_penman_file* file);
SGRAM_API const char* sgram_penman_text(const sgram_penman_file* file,
                                        size_t i);
/* NULL when the block has no such key. */
SGRAM_API const char* sgram_penman_meta(const sgram_penman_file* file,
                                        size_t i, const char* key);
SGRAM_API size_t sgram_penman_line(const sgram_penman_file* file, size_t i);

/* ---- Scene graphs -------------------------------------------------- */

SGRAM_API sgram_status sgram_sg_parse_text(const char* text, sgram_sg** out);
SGRAM_API sgram_status sgram_sg_from_json(const char* json, sgram_sg** out);
SGRAM_API void sgram_sg_free(sgram_sg* sg);
SGRAM_API sgram_status sgram_sg_to_text(const sgram_sg* sg, char** out);
SGRAM_API sgram_status sgram_sg_to_json(const sgram_sg* sg, char** out);
SGRAM_API size_t sgram_sg_tuple_count(const sgram_sg* sg);

/* Rule baseline. `config_json` may be NULL for the defaults, or an object
 * with any of "attribute_roles", "core_roles", "locative_roles",
 * "locative_fallback_role", "locative_fallback_preposition". */
SGRAM_API sgram_status sgram_convert_rules(const sgram_amr* amr,
                                           const char* config_json,
                                           sgram_sg** out);

/* ---- External model adapter ---------------------------------------- */

SGRAM_API sgram_status sgram_adapter_open(const char* command,
                                          double timeout_seconds,
                                          sgram_adapter** out);
SGRAM_API void sgram_adapter_close(sgram_adapter* adapter);
SGRAM_API sgram_status sgram_adapter_convert(sgram_adapter* adapter,
                                             const char* linearized,
                                             sgram_sg** out);
/* Raw text of the last response, including failed ones. */
SGRAM_API const char* sgram_adapter_last_response(const sgram_adapter* adapter);

/* ---- Region corpora ------------------------------------------------ */

SGRAM_API sgram_status sgram_corpus_load(const char* path, sgram_corpus** out);
/* Visual Genome region_graphs.json layout. */
SGRAM_API sgram_status sgram_corpus_load_visual_genome(const char* path,
                                                       sgram_corpus** out);
SGRAM_API void sgram_corpus_free(sgram_corpus* corpus);
SGRAM_API size_t sgram_corpus_size(const sgram_corpus* corpus);
SGRAM_API size_t sgram_corpus_skipped(const sgram_corpus* corpus);
/* "line N: message" per skipped input, one per line. */
SGRAM_API sgram_status sgram_corpus_errors(const sgram_corpus* corpus,
                                           char** out);
SGRAM_API sgram_status sgram_corpus_filter(sgram_corpus* corpus);
SGRAM_API sgram_status sgram_corpus_to_jsonl(const sgram_corpus* corpus,
                                             char** out);
SGRAM_API sgram_status sgram_corpus_stats_json(const sgram_corpus* corpus,
                                               char** out);
/* Training pairs as JSON lines; `skipped` receives the skip count and
 * `warnings` (may be NULL) one warning per line. */
SGRAM_API sgram_status sgram_corpus_export_pairs(const sgram_corpus* corpus,
                                                 sgram_strategy strategy,
                                                 int filter, char** out,
                                                 size_t* skipped,
                                                 char** warnings);
/* Groups region graphs by image id. */
SGRAM_API sgram_status sgram_corpus_build_index(const sgram_corpus* corpus,
                                                sgram_index** out);

/* ---- Scene-graph sets (generated output, queries) ------------------- */

/* JSON lines, each with an id ("region_id", else "id", else "query_id"),
 * optional "image_id", and one of "scene_graph" (object), "target"
 * (grammar string) or "amr" (PENMAN, converted with the rule baseline). */
SGRAM_API sgram_status sgram_sg_set_load(const char* path, sgram_sg_set** out);
SGRAM_API void sgram_sg_set_free(sgram_sg_set* set);
SGRAM_API size_t sgram_sg_set_size(const sgram_sg_set* set);
SGRAM_API const char* sgram_sg_set_id(const sgram_sg_set* set, size_t i);
/* NULL when the entry has no image id. */
SGRAM_API const char* sgram_sg_set_image_id(const sgram_sg_set* set,
                                            size_t i);
SGRAM_API const sgram_sg* sgram_sg_set_graph(const sgram_sg_set* set,
                                             size_t i);

/* ---- Evaluation ---------------------------------------------------- */

SGRAM_API sgram_status sgram_f_score(const sgram_sg* generated,
                                     const sgram_sg* reference,
                                     double* precision, double* recall,
                                     double* f1);
SGRAM_API sgram_status sgram_evaluator_new(sgram_evaluator** out);
SGRAM_API void sgram_evaluator_free(sgram_evaluator* evaluator);
SGRAM_API sgram_status sgram_evaluator_add(sgram_evaluator* evaluator,
                                           const char* region_id,
                                           const sgram_sg* generated,
                                           const sgram_sg* reference);
/* Per-region JSON lines (when per_region != 0) then a summary line. */
SGRAM_API sgram_status sgram_evaluator_report(const sgram_evaluator* evaluator,
                                              int per_region, char** out,
                                              double* mean_f1);

/* ---- Retrieval ----------------------------------------------------- */

SGRAM_API sgram_status sgram_index_load(const char* path, sgram_index** out);
SGRAM_API void sgram_index_free(sgram_index* index);
SGRAM_API size_t sgram_index_size(const sgram_index* index);
SGRAM_API sgram_status sgram_index_to_jsonl(const sgram_index* index,
                                            char** out);
/* `ranking_json` may be NULL; otherwise receives
 * [{"image_id": ..., "score": ...}, ...] in rank order. */
SGRAM_API sgram_status sgram_index_rank(const sgram_index* index,
                                        const sgram_sg* query,
                                        const char* gold_image_id,
                                        size_t* gold_rank,
                                        char** ranking_json);
SGRAM_API sgram_status sgram_retrieval_metrics(const size_t* gold_ranks,
                                               size_t count, const size_t* ks,
                                               size_t k_count, char** out);

#ifdef __cplusplus
}
#endif

#endif /* SGRAM_SGRAM_H_ */
