// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowy/flowy.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>

#include "api/server.hpp"
#include "core/dataset.hpp"
#include "core/error.hpp"
#include "core/serialize.hpp"
#include "pipeline/pipeline.hpp"
#include "store/store.hpp"

using flowy::Error;
using flowy::ErrorCode;
using flowy::json;

struct flowy_config {
  flowy::pipeline::RunConfig run;
};

struct flowy_store {
  std::shared_ptr<const flowy::store::Store> store;
};

struct flowy_server {
  std::unique_ptr<flowy::api::Server> server;
};

namespace {

thread_local std::string g_last_error;

flowy_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return FLOWY_INVALID_ARGUMENT;
    case ErrorCode::io: return FLOWY_IO;
    case ErrorCode::parse: return FLOWY_PARSE;
    case ErrorCode::validation: return FLOWY_VALIDATION;
    case ErrorCode::not_found: return FLOWY_NOT_FOUND;
    case ErrorCode::config: return FLOWY_CONFIG;
    case ErrorCode::client: return FLOWY_CLIENT;
    case ErrorCode::internal: return FLOWY_INTERNAL;
  }
  return FLOWY_INTERNAL;
}

flowy_status fail(flowy_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `body`, mapping exceptions onto status codes.
template <typename F>
flowy_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(FLOWY_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FLOWY_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

std::string need(const char* s, const char* what) {
  if (!s) throw Error(ErrorCode::invalid_argument, std::string(what) + " must not be NULL");
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (auto t = flowy::trim(item); !t.empty()) out.push_back(t);
  return out;
}

json violations_json(const std::vector<flowy::Violation>& v) { return {{"violations", v}}; }

}  // namespace

extern "C" {

const char* flowy_version(void) { return "0.1.0"; }

const char* flowy_status_name(flowy_status status) {
  switch (status) {
    case FLOWY_OK: return "ok";
    case FLOWY_INVALID_ARGUMENT: return "invalid_argument";
    case FLOWY_IO: return "io";
    case FLOWY_PARSE: return "parse";
    case FLOWY_VALIDATION: return "validation";
    case FLOWY_NOT_FOUND: return "not_found";
    case FLOWY_CONFIG: return "config";
    case FLOWY_CLIENT: return "client";
    case FLOWY_PARTIAL: return "partial";
    case FLOWY_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* flowy_last_error(void) { return g_last_error.c_str(); }

void flowy_string_free(char* s) { std::free(s); }

flowy_status flowy_config_new(flowy_config** out) {
  return guarded([&] {
    if (!out) throw Error(ErrorCode::invalid_argument, "out must not be NULL");
    *out = new flowy_config();
    return FLOWY_OK;
  });
}

void flowy_config_free(flowy_config* config) { delete config; }

flowy_status flowy_config_set_string(flowy_config* config, const char* key, const char* value) {
  return guarded([&] {
    if (!config) throw Error(ErrorCode::invalid_argument, "config must not be NULL");
    const std::string k = need(key, "key");
    const std::string v = need(value, "value");
    auto& r = config->run;
    if (k == "dataset") r.dataset_dir = v;
    else if (k == "corpus") r.corpus_dir = v;
    else if (k == "store") r.store_dir = v;
    else if (k == "canned") r.canned_dir = v;
    else if (k == "mode") {
      if (v == "mock") r.mode = flowy::pipeline::ClientMode::mock;
      else if (v == "http") r.mode = flowy::pipeline::ClientMode::http;
      else throw Error(ErrorCode::config, "mode must be \"mock\" or \"http\"");
    }
    else if (k == "model_endpoint") r.model_endpoint = v;
    else if (k == "model_key") r.model_key = v;
    else if (k == "model") {
      for (auto role : {flowy::annotator::ModelRole::grounding, flowy::annotator::ModelRole::annotation,
                        flowy::annotator::ModelRole::source_selection})
        r.models[role] = v;
    }
    else if (k.rfind("model.", 0) == 0) {
      const auto role = flowy::annotator::parse_model_role(k.substr(6));
      if (!role) throw Error(ErrorCode::config, "unknown model role in key '" + k + "'");
      r.models[*role] = v;
    }
    else if (k == "embed_endpoint") r.embed_endpoint = v;
    else if (k == "embed_key") r.embed_key = v;
    else if (k == "embed_model") r.embed_model = v;
    else if (k == "flows") r.only_flows = split_list(v);
    else throw Error(ErrorCode::invalid_argument, "unknown string key '" + k + "'");
    return FLOWY_OK;
  });
}

flowy_status flowy_config_set_int(flowy_config* config, const char* key, long long value) {
  return guarded([&] {
    if (!config) throw Error(ErrorCode::invalid_argument, "config must not be NULL");
    const std::string k = need(key, "key");
    auto& r = config->run;
    auto positive = [&](const char* name) {
      if (value < 1) throw Error(ErrorCode::config, std::string(name) + " must be at least 1");
      return static_cast<std::size_t>(value);
    };
    if (k == "workers") r.workers = positive("workers");
    else if (k == "retrieval_k") r.chain.retrieval_k = positive("retrieval_k");
    else if (k == "max_attempts") r.chain.max_attempts = static_cast<int>(positive("max_attempts"));
    else if (k == "embed_dimension") r.embed_dimension = positive("embed_dimension");
    else if (k == "enrich_query") r.chain.enrich_query_with_title = value != 0;
    else throw Error(ErrorCode::invalid_argument, "unknown integer key '" + k + "'");
    return FLOWY_OK;
  });
}

flowy_status flowy_config_set_double(flowy_config* config, const char* key, double value) {
  return guarded([&] {
    if (!config) throw Error(ErrorCode::invalid_argument, "config must not be NULL");
    const std::string k = need(key, "key");
    if (k == "iou_text") config->run.thresholds.iou_text = value;
    else if (k == "min_area_frac") config->run.thresholds.min_area_frac = value;
    else throw Error(ErrorCode::invalid_argument, "unknown double key '" + k + "'");
    return FLOWY_OK;
  });
}

flowy_status flowy_config_validate(const flowy_config* config) {
  return guarded([&] {
    if (!config) throw Error(ErrorCode::invalid_argument, "config must not be NULL");
    config->run.validate();
    return FLOWY_OK;
  });
}

flowy_status flowy_validate_dataset(const char* dataset_dir, char** out_json) {
  return guarded([&] {
    const auto violations = flowy::validate_dataset(need(dataset_dir, "dataset_dir"));
    put(out_json, flowy::dump_canonical(violations_json(violations)));
    if (violations.empty()) return FLOWY_OK;
    return fail(FLOWY_VALIDATION, std::to_string(violations.size()) + " violation(s)");
  });
}

flowy_status flowy_verify_store(const char* store_dir, char** out_json) {
  return guarded([&] {
    const std::string dir = need(store_dir, "store_dir");
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) throw Error(ErrorCode::io, "store directory " + dir + " does not exist");
    const auto violations = flowy::store::verify_store(dir);
    put(out_json, flowy::dump_canonical(violations_json(violations)));
    if (violations.empty()) return FLOWY_OK;
    return fail(FLOWY_VALIDATION, std::to_string(violations.size()) + " violation(s)");
  });
}

flowy_status flowy_ingest_kb(const flowy_config* config, char** out_json) {
  return guarded([&] {
    if (!config) throw Error(ErrorCode::invalid_argument, "config must not be NULL");
    const auto& r = config->run;
    if (r.corpus_dir.empty()) throw Error(ErrorCode::config, "no corpus directory configured");
    r.validate();
    auto embedder = flowy::pipeline::make_embedder(r);
    const auto summary = flowy::pipeline::ingest(r.corpus_dir, r.store_dir, *embedder);
    put(out_json, flowy::dump_canonical(summary.to_json()));
    return FLOWY_OK;
  });
}

flowy_status flowy_annotate(const flowy_config* config, flowy_progress_fn progress, void* user, char** out_json) {
  return guarded([&] {
    if (!config) throw Error(ErrorCode::invalid_argument, "config must not be NULL");
    const auto& r = config->run;
    r.validate();
    auto embedder = flowy::pipeline::make_embedder(r);
    flowy::pipeline::Environment env;
    env.embedder = embedder.get();
    env.clients = flowy::pipeline::make_clients(r);
    if (progress)
      env.on_flow = [&](const flowy::pipeline::FlowOutcome& f) {
        progress(user, f.flow_id.c_str(), f.ok ? 1 : 0, f.ok ? nullptr : f.error.c_str());
      };
    const auto summary = flowy::pipeline::annotate(r, env);
    put(out_json, flowy::dump_canonical(summary.to_json()));
    if (summary.failed_count() > 0)
      return fail(FLOWY_PARTIAL, std::to_string(summary.failed_count()) + " flow(s) failed");
    return FLOWY_OK;
  });
}

flowy_status flowy_related_rebuild(const flowy_config* config, char** out_json) {
  return guarded([&] {
    if (!config) throw Error(ErrorCode::invalid_argument, "config must not be NULL");
    const auto& r = config->run;
    r.validate();
    auto embedder = flowy::pipeline::make_embedder(r);
    auto summary = flowy::pipeline::rebuild_related(r.store_dir, *embedder).to_json();
    summary["command"] = "related rebuild";
    put(out_json, flowy::dump_canonical(summary));
    return FLOWY_OK;
  });
}

flowy_status flowy_store_open(const char* store_dir, flowy_store** out) {
  return guarded([&] {
    if (!out) throw Error(ErrorCode::invalid_argument, "out must not be NULL");
    auto handle = std::make_unique<flowy_store>();
    handle->store = flowy::store::Store::open(need(store_dir, "store_dir"));
    *out = handle.release();
    return FLOWY_OK;
  });
}

void flowy_store_close(flowy_store* store) { delete store; }

size_t flowy_store_flow_count(const flowy_store* store) { return store ? store->store->flows().size() : 0; }

flowy_status flowy_store_rank_related(const flowy_store* store, const char* annotation_id, size_t k,
                                      char** out_json) {
  return guarded([&] {
    if (!store) throw Error(ErrorCode::invalid_argument, "store must not be NULL");
    const auto hits = store->store->related()->rank_related(need(annotation_id, "annotation_id"), k);
    json results = json::array();
    for (const auto& h : hits)
      results.push_back({{"annotation_id", h.annotation_id}, {"flow_id", h.flow_id}, {"score", h.score}});
    put(out_json, flowy::dump_canonical({{"results", std::move(results)}}));
    return FLOWY_OK;
  });
}

flowy_status flowy_store_get(const flowy_store* store, const char* path, const char* query, int* out_status,
                             char** out_json) {
  return guarded([&] {
    if (!store) throw Error(ErrorCode::invalid_argument, "store must not be NULL");
    std::map<std::string, std::string> params;
    if (query) {
      std::stringstream in(query);
      std::string item;
      while (std::getline(in, item, '&')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        params.emplace(item.substr(0, eq), eq == std::string::npos ? std::string{} : item.substr(eq + 1));
      }
    }
    const auto reply = flowy::api::handle_get(*store->store, need(path, "path"), params);
    if (out_status) *out_status = reply.status;
    put(out_json, reply.body);
    return FLOWY_OK;
  });
}

flowy_status flowy_server_open(const char* store_dir, const char* host, int port, const char* cors,
                               flowy_server** out) {
  return guarded([&] {
    if (!out) throw Error(ErrorCode::invalid_argument, "out must not be NULL");
    if (port < 0 || port > 65535) throw Error(ErrorCode::invalid_argument, "port must be in 0..65535");
    const std::string dir = need(store_dir, "store_dir");
    std::error_code ec;
    if (!std::filesystem::is_regular_file(std::filesystem::path(dir) / flowy::store::kStoreManifest, ec))
      throw Error(ErrorCode::io, dir + " is not a store (no " + flowy::store::kStoreManifest + ")");
    auto st = flowy::store::Store::open(dir);
    if (!st->problems().empty()) {
      std::string msg = "store has " + std::to_string(st->problems().size()) + " invalid flow document(s)";
      for (const auto& p : st->problems()) msg += "\n  " + p.subject + ": " + p.message;
      throw Error(ErrorCode::validation, msg);
    }
    flowy::api::ServerConfig cfg;
    if (host) cfg.host = host;
    cfg.port = port;
    if (cors) cfg.cors_origins = split_list(cors);
    auto handle = std::make_unique<flowy_server>();
    handle->server = std::make_unique<flowy::api::Server>(std::move(st), std::move(cfg));
    handle->server->bind();
    *out = handle.release();
    return FLOWY_OK;
  });
}

int flowy_server_port(const flowy_server* server) { return server ? server->server->port() : 0; }

flowy_status flowy_server_run(flowy_server* server) {
  return guarded([&] {
    if (!server) throw Error(ErrorCode::invalid_argument, "server must not be NULL");
    server->server->run();
    return FLOWY_OK;
  });
}

void flowy_server_stop(flowy_server* server) {
  if (server) server->server->stop();
}

void flowy_server_close(flowy_server* server) { delete server; }

}  // extern "C"
