#ifndef ACTNET_H
#define ACTNET_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define ACTNET_OK 0

#define ACTNET_ERR_NULL 1

#define ACTNET_ERR_UTF8 2

#define ACTNET_ERR_IO 3

#define ACTNET_ERR_PARSE 4

#define ACTNET_ERR_CONFIG 5

#define ACTNET_ERR_DOMAIN 6

#define ACTNET_ERR_NOT_FOUND 7

#define ACTNET_ERR_PANIC 8

#define ACTNET_CLASS_HASHTAG 0

#define ACTNET_CLASS_MENTION 1

#define ACTNET_CLASS_AUTHOR 2

#define ACTNET_CLASS_WORD 3

// A loaded tweet corpus.
typedef struct ActnetCorpus ActnetCorpus;

// Document frequencies of the actants in a corpus.
typedef struct ActnetFreqTable ActnetFreqTable;

// An undirected weighted actant network.
typedef struct ActnetNetwork ActnetNetwork;

// Minimum document frequency per actant class. Zero means 1.
typedef struct ActnetThresholds {
  uint64_t hashtag;
  uint64_t mention;
  uint64_t author;
  uint64_t word;
} ActnetThresholds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *actnet_version(void);

// Message of the last failed call on this thread, or an empty string. The
// pointer stays valid until the next `actnet_*` call on the same thread.
const char *actnet_last_error_message(void);

// Loads a delimited tweet file.
//
// `delimiter` 0 means comma. `text_column` is a header name or zero-based
// index; null means the column named `text`. Other columns are looked up by
// the names `id`, `timestamp`, `author` and `language`.
//
// # Safety
// String arguments must be null or NUL-terminated; `out` must be writable.
int32_t actnet_corpus_load(const char *path,
                           char delimiter,
                           const char *text_column,
                           struct ActnetCorpus **out);

// Number of tweets in the corpus, 0 for null.
//
// # Safety
// `corpus` must be null or a live handle.
size_t actnet_corpus_len(const struct ActnetCorpus *corpus);

// Number of input rows skipped as malformed, 0 for null.
//
// # Safety
// `corpus` must be null or a live handle.
size_t actnet_corpus_malformed_rows(const struct ActnetCorpus *corpus);

// # Safety
// `corpus` must be null or a handle not yet freed.
void actnet_corpus_free(struct ActnetCorpus *corpus);

// Counts document frequencies with default tokenizer options.
//
// `classes` is a comma-separated list such as `hashtag,mention`; null
// means hashtags and mentions.
//
// # Safety
// `corpus` must be a live handle, `classes` null or NUL-terminated, `out`
// writable.
int32_t actnet_freq_count(const struct ActnetCorpus *corpus,
                          const char *classes,
                          struct ActnetFreqTable **out);

// Number of distinct actants of one `ACTNET_CLASS_*`, 0 for null or an
// unknown class.
//
// # Safety
// `table` must be null or a live handle.
size_t actnet_freq_unique(const struct ActnetFreqTable *table, int32_t class_);

// Document frequency of the actant with the given label (`#tag`, `@user`,
// `&author` or a plain word). Case-insensitive.
//
// # Safety
// `table` must be a live handle, `label` NUL-terminated, `out` writable.
int32_t actnet_freq_doc_frequency(const struct ActnetFreqTable *table,
                                  const char *label,
                                  uint64_t *out);

// Writes the `label<TAB>frequency` listing to `path`.
//
// # Safety
// `table` must be a live handle and `path` NUL-terminated.
int32_t actnet_freq_write_wordfrq(const struct ActnetFreqTable *table, const char *path);

// # Safety
// `table` must be null or a handle not yet freed.
void actnet_freq_free(struct ActnetFreqTable *table);

// Builds the whole-matrix network over the classes counted in `table`,
// keeping actants that meet `thresholds` (null means all 1) and edges of
// weight at least `min_edge_weight`.
//
// # Safety
// `corpus` and `table` must be live handles, `thresholds` null or readable,
// `out` writable.
int32_t actnet_network_build(const struct ActnetCorpus *corpus,
                             const struct ActnetFreqTable *table,
                             const struct ActnetThresholds *thresholds,
                             uint64_t min_edge_weight,
                             struct ActnetNetwork **out);

// # Safety
// `network` must be null or a live handle.
size_t actnet_network_node_count(const struct ActnetNetwork *network);

// # Safety
// `network` must be null or a live handle.
size_t actnet_network_edge_count(const struct ActnetNetwork *network);

// New handle holding the largest connected component.
//
// # Safety
// `network` must be a live handle and `out` writable.
int32_t actnet_network_largest_component(const struct ActnetNetwork *network,
                                         struct ActnetNetwork **out);

// Clusters the network in place and stores the number of clusters in
// `clusters` when it is not null.
//
// # Safety
// `network` must be a live handle, `clusters` null or writable.
int32_t actnet_network_cluster(struct ActnetNetwork *network,
                               double resolution,
                               uint64_t seed,
                               uint32_t *clusters);

// Computes node coordinates in place.
//
// # Safety
// `network` must be a live handle.
int32_t actnet_network_layout(struct ActnetNetwork *network, uint64_t seed);

// Writes the network as a Pajek `.net` file.
//
// # Safety
// `network` must be a live handle and `path` NUL-terminated.
int32_t actnet_network_write_pajek(const struct ActnetNetwork *network, const char *path);

// # Safety
// `network` must be null or a handle not yet freed.
void actnet_network_free(struct ActnetNetwork *network);

// Runs the full pipeline on `input_path` with a TOML configuration (null
// or empty for defaults). The `key=value` run report is returned in
// `report`, which must be released with [`actnet_string_free`].
//
// # Safety
// String arguments must be null or NUL-terminated; `report` must be
// writable.
int32_t actnet_run(const char *config_toml, const char *input_path, char **report);

// Releases a string returned by this library.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void actnet_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ACTNET_H */
