/* Copyright 2026 The Flowy Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the Flowy library. All functions return a flowy_status;
 * on failure flowy_last_error() describes the problem for the calling
 * thread. Strings returned through out-parameters are owned by the caller
 * and released with flowy_string_free(). Handles are opaque.
 */

#ifndef FLOWY_FLOWY_H
#define FLOWY_FLOWY_H

#include <stddef.h>

#if defined(_WIN32)
#define FLOWY_API __declspec(dllexport)
#else
#define FLOWY_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum flowy_status {
  FLOWY_OK = 0,
  FLOWY_INVALID_ARGUMENT = 1,
  FLOWY_IO = 2,
  FLOWY_PARSE = 3,
  FLOWY_VALIDATION = 4,
  FLOWY_NOT_FOUND = 5,
  FLOWY_CONFIG = 6,
  FLOWY_CLIENT = 7,
  /* The operation finished but some work items failed. */
  FLOWY_PARTIAL = 8,
  FLOWY_INTERNAL = 9
} flowy_status;

typedef struct flowy_config flowy_config;
typedef struct flowy_store flowy_store;
typedef struct flowy_server flowy_server;

FLOWY_API const char* flowy_version(void);
FLOWY_API const char* flowy_status_name(flowy_status status);
/* Message for the last failed call on this thread; never NULL. */
FLOWY_API const char* flowy_last_error(void);
FLOWY_API void flowy_string_free(char* s);

/* Run configuration.
 *
 * String keys: dataset, corpus, store, canned, mode ("mock" | "http"),
 *   model_endpoint, model_key, model, model.grounding, model.annotation,
 *   model.source_selection, embed_endpoint, embed_key, embed_model, flows
 *   (comma-separated subset).
 * Integer keys: workers, retrieval_k, max_attempts, embed_dimension,
 *   enrich_query (0/1).
 * Double keys: iou_text, min_area_frac.
 */
FLOWY_API flowy_status flowy_config_new(flowy_config** out);
FLOWY_API void flowy_config_free(flowy_config* config);
FLOWY_API flowy_status flowy_config_set_string(flowy_config* config, const char* key, const char* value);
FLOWY_API flowy_status flowy_config_set_int(flowy_config* config, const char* key, long long value);
FLOWY_API flowy_status flowy_config_set_double(flowy_config* config, const char* key, double value);
/* Checks ranges and mode requirements without doing any work. */
FLOWY_API flowy_status flowy_config_validate(const flowy_config* config);

/* Dataset check. *out_json receives {"violations": [{subject, message}]}.
 * Returns FLOWY_OK when clean, FLOWY_VALIDATION when violations were found
 * and FLOWY_IO when the directory does not exist. */
FLOWY_API flowy_status flowy_validate_dataset(const char* dataset_dir, char** out_json);

/* Store check (documents, assets, source-ref offsets, related index).
 * Same conventions as flowy_validate_dataset. */
FLOWY_API flowy_status flowy_verify_store(const char* store_dir, char** out_json);

/* Ingests config's corpus into <store>/kb.json. *out_json: summary. */
FLOWY_API flowy_status flowy_ingest_kb(const flowy_config* config, char** out_json);

/* Per-flow progress callback: flow id, 1 on success, error text or NULL. */
typedef void (*flowy_progress_fn)(void* user, const char* flow_id, int ok, const char* error);

/* Runs the annotation batch. Returns FLOWY_PARTIAL when some flows failed;
 * *out_json is filled in either case. */
FLOWY_API flowy_status flowy_annotate(const flowy_config* config, flowy_progress_fn progress, void* user,
                                      char** out_json);

/* Rebuilds <store>/related.json. *out_json: summary. */
FLOWY_API flowy_status flowy_related_rebuild(const flowy_config* config, char** out_json);

/* Read access to a store. */
FLOWY_API flowy_status flowy_store_open(const char* store_dir, flowy_store** out);
FLOWY_API void flowy_store_close(flowy_store* store);
FLOWY_API size_t flowy_store_flow_count(const flowy_store* store);
/* Related designs for one annotation as {"results": [{annotation_id, flow_id, score}]}. */
FLOWY_API flowy_status flowy_store_rank_related(const flowy_store* store, const char* annotation_id, size_t k,
                                                char** out_json);
/* Body of GET <path>?<query> as served by the HTTP API; *out_status gets the
 * HTTP status. `query` may be NULL. */
FLOWY_API flowy_status flowy_store_get(const flowy_store* store, const char* path, const char* query,
                                       int* out_status, char** out_json);

/* HTTP service. cors is a comma-separated origin list or NULL; port 0 picks
 * a free port. */
FLOWY_API flowy_status flowy_server_open(const char* store_dir, const char* host, int port, const char* cors,
                                         flowy_server** out);
FLOWY_API int flowy_server_port(const flowy_server* server);
/* Blocks until flowy_server_stop() is called from another thread. */
FLOWY_API flowy_status flowy_server_run(flowy_server* server);
FLOWY_API void flowy_server_stop(flowy_server* server);
FLOWY_API void flowy_server_close(flowy_server* server);

#ifdef __cplusplus
}
#endif

#endif /* FLOWY_FLOWY_H */
