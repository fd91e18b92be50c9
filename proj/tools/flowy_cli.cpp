// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

// flowy: command-line front end over the C API.
//
// Exit codes: 0 success, 1 violations or failed work items, 2 usage,
// configuration or missing-path errors. Progress and diagnostics go to
// stderr; one JSON summary per command goes to stdout.

#include <flowy/flowy.h>
#include <pthread.h>
#include <signal.h>

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string store;
  bool mock = false;

  std::string dataset;
  std::string corpus;
  std::string canned;
  std::size_t workers = 4;
  double iou_text = 0.55;
  double min_area_frac = 0.005;
  std::size_t retrieval_k = 4;
  bool enrich_query = false;
  std::vector<std::string> flows;

  std::string model_endpoint;
  std::string model_key;
  std::string model;
  std::string embed_endpoint;
  std::string embed_key;
  std::string embed_model;
  std::size_t embed_dimension = 256;

  std::string host = "127.0.0.1";
  int port = 8713;
  std::string cors;
};

struct Config {
  flowy_config* ptr = nullptr;
  ~Config() { flowy_config_free(ptr); }
};

struct OwnedString {
  char* s = nullptr;
  ~OwnedString() { flowy_string_free(s); }
  std::string str() const { return s ? s : ""; }
};

int exit_for(flowy_status status) {
  switch (status) {
    case FLOWY_OK: return kExitOk;
    case FLOWY_IO:
    case FLOWY_CONFIG:
    case FLOWY_INVALID_ARGUMENT: return kExitUsage;
    default: return kExitFailed;
  }
}

int report_error(const char* command, flowy_status status) {
  std::cerr << "flowy " << command << ": " << flowy_status_name(status) << ": " << flowy_last_error() << "\n";
  json out{{"command", command}, {"status", flowy_status_name(status)}, {"error", flowy_last_error()}};
  std::cout << out.dump() << "\n";
  return exit_for(status);
}

void check(flowy_status status) {
  if (status != FLOWY_OK) throw std::runtime_error(flowy_last_error());
}

// Builds the C-side configuration from the parsed options.
Config make_config(const Options& o) {
  Config c;
  check(flowy_config_new(&c.ptr));
  auto set = [&](const char* key, const std::string& value) {
    if (!value.empty()) check(flowy_config_set_string(c.ptr, key, value.c_str()));
  };
  set("store", o.store);
  set("dataset", o.dataset);
  set("corpus", o.corpus);
  set("canned", o.canned);
  set("mode", o.mock ? "mock" : "http");
  set("model_endpoint", o.model_endpoint);
  set("model_key", o.model_key);
  set("model", o.model);
  set("embed_endpoint", o.embed_endpoint);
  set("embed_key", o.embed_key);
  set("embed_model", o.embed_model);
  if (!o.flows.empty()) {
    std::string joined;
    for (const auto& f : o.flows) joined += (joined.empty() ? "" : ",") + f;
    set("flows", joined);
  }
  check(flowy_config_set_int(c.ptr, "workers", static_cast<long long>(o.workers)));
  check(flowy_config_set_int(c.ptr, "retrieval_k", static_cast<long long>(o.retrieval_k)));
  check(flowy_config_set_int(c.ptr, "embed_dimension", static_cast<long long>(o.embed_dimension)));
  check(flowy_config_set_int(c.ptr, "enrich_query", o.enrich_query ? 1 : 0));
  check(flowy_config_set_double(c.ptr, "iou_text", o.iou_text));
  check(flowy_config_set_double(c.ptr, "min_area_frac", o.min_area_frac));
  return c;
}

void print_violations(const std::string& doc) {
  const json j = json::parse(doc);
  for (const auto& v : j.at("violations"))
    std::cerr << "  " << v.value("subject", "") << ": " << v.value("message", "") << "\n";
}

int cmd_validate(const Options& o, const std::string& target) {
  OwnedString out;
  const bool store_mode = target.empty();
  if (store_mode && o.store.empty()) {
    std::cerr << "flowy validate: give a dataset directory or --store\n";
    return kExitUsage;
  }
  const std::string path = store_mode ? o.store : target;
  const flowy_status st =
      store_mode ? flowy_verify_store(path.c_str(), &out.s) : flowy_validate_dataset(path.c_str(), &out.s);
  if (st != FLOWY_OK && st != FLOWY_VALIDATION) return report_error("validate", st);
  json summary = json::parse(out.str());
  summary["command"] = "validate";
  summary["target"] = store_mode ? "store" : "dataset";
  summary["path"] = path;
  if (st == FLOWY_VALIDATION) {
    std::cerr << path << ": " << summary["violations"].size() << " violation(s)\n";
    print_violations(out.str());
  } else {
    std::cerr << path << ": ok\n";
  }
  std::cout << summary.dump() << "\n";
  return st == FLOWY_OK ? kExitOk : kExitFailed;
}

int cmd_ingest(const Options& o) {
  if (o.corpus.empty()) {
    std::cerr << "flowy ingest-kb: --corpus is required\n";
    return kExitUsage;
  }
  if (!o.mock && o.embed_endpoint.empty()) {
    std::cerr << "flowy ingest-kb: no embedding endpoint configured (set FLOWY_EMBED_ENDPOINT or use --mock)\n";
    return kExitUsage;
  }
  Config c = make_config(o);
  OwnedString out;
  const flowy_status st = flowy_ingest_kb(c.ptr, &out.s);
  if (st != FLOWY_OK) return report_error("ingest-kb", st);
  const json summary = json::parse(out.str());
  std::cerr << "ingested " << summary["articles"] << " articles into " << summary["chunks"] << " chunks ("
            << summary["status"].get<std::string>() << ")\n";
  std::cout << summary.dump() << "\n";
  return kExitOk;
}

void on_progress(void*, const char* flow_id, int ok, const char* error) {
  if (ok)
    std::cerr << "  ok      " << flow_id << "\n";
  else
    std::cerr << "  FAILED  " << flow_id << ": " << (error ? error : "") << "\n";
}

int cmd_annotate(const Options& o) {
  if (!o.mock && o.model_endpoint.empty()) {
    std::cerr << "flowy annotate: no model endpoint configured (set FLOWY_MODEL_ENDPOINT or use --mock)\n";
    return kExitUsage;
  }
  if (o.dataset.empty()) {
    std::cerr << "flowy annotate: --dataset is required\n";
    return kExitUsage;
  }
  Config c = make_config(o);
  if (const flowy_status st = flowy_config_validate(c.ptr); st != FLOWY_OK) return report_error("annotate", st);
  OwnedString out;
  const flowy_status st = flowy_annotate(c.ptr, on_progress, nullptr, &out.s);
  if (st != FLOWY_OK && st != FLOWY_PARTIAL) {
    if (st == FLOWY_VALIDATION) {
      std::cerr << "flowy annotate: " << flowy_last_error() << "\n";
      std::cout << json{{"command", "annotate"}, {"status", "validation"}, {"error", flowy_last_error()}}.dump()
                << "\n";
      return kExitFailed;
    }
    return report_error("annotate", st);
  }
  const json summary = json::parse(out.str());
  std::cerr << summary["flows_ok"] << "/" << summary["flows_total"] << " flows annotated, "
            << summary["annotations"] << " annotations; " << summary["files_written"] << " files written, "
            << summary["files_unchanged"] << " unchanged ("
            << summary["status"].get<std::string>() << ")\n";
  for (const auto& p : summary["store_problems"])
    std::cerr << "  store: " << p.value("subject", "") << ": " << p.value("message", "") << "\n";
  std::cout << summary.dump() << "\n";
  return st == FLOWY_OK && summary["store_problems"].empty() ? kExitOk : kExitFailed;
}

int cmd_related_rebuild(const Options& o) {
  if (o.store.empty()) {
    std::cerr << "flowy related rebuild: --store is required\n";
    return kExitUsage;
  }
  if (!o.mock && o.embed_endpoint.empty()) {
    std::cerr << "flowy related rebuild: no embedding endpoint configured (set FLOWY_EMBED_ENDPOINT or use --mock)\n";
    return kExitUsage;
  }
  Config c = make_config(o);
  OwnedString out;
  const flowy_status st = flowy_related_rebuild(c.ptr, &out.s);
  if (st != FLOWY_OK) return report_error("related rebuild", st);
  const json summary = json::parse(out.str());
  std::cerr << "related index: " << summary["annotations"] << " annotations ("
            << summary["status"].get<std::string>() << ")\n";
  std::cout << summary.dump() << "\n";
  return kExitOk;
}

int cmd_serve(const Options& o) {
  if (o.store.empty()) {
    std::cerr << "flowy serve: --store is required\n";
    return kExitUsage;
  }
  // Signals are taken by a dedicated thread so stop() runs outside a handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  flowy_server* server = nullptr;
  const flowy_status st =
      flowy_server_open(o.store.c_str(), o.host.c_str(), o.port, o.cors.empty() ? nullptr : o.cors.c_str(), &server);
  if (st != FLOWY_OK) return report_error("serve", st);
  std::unique_ptr<flowy_server, void (*)(flowy_server*)> guard(server, flowy_server_close);

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    flowy_server_stop(server);
  });
  const int port = flowy_server_port(server);
  std::cerr << "serving " << o.store << " on http://" << o.host << ":" << port << "\n";
  std::cout << json{{"command", "serve"}, {"host", o.host}, {"port", port}}.dump() << std::endl;
  const flowy_status run = flowy_server_run(server);
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  if (run != FLOWY_OK) return report_error("serve", run);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Flowy: design-pattern annotation for UI flow examples"};
  app.set_version_flag("--version", std::string(flowy_version()));
  app.set_config("--config", "", "TOML/INI file with option values (command line > config file > environment)");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--store", o.store, "Store directory")->envname("FLOWY_STORE");
  app.add_flag("--mock", o.mock, "Use the deterministic offline model and embedder")->envname("FLOWY_USE_MOCK");
  app.add_option("--embed-endpoint", o.embed_endpoint, "Embeddings URL")->envname("FLOWY_EMBED_ENDPOINT");
  app.add_option("--embed-key", o.embed_key, "Embeddings API key")->envname("FLOWY_EMBED_KEY");
  app.add_option("--embed-model", o.embed_model, "Embedding model name")->envname("FLOWY_EMBED_MODEL");
  app.add_option("--embed-dimension", o.embed_dimension, "Embedding dimension")
      ->envname("FLOWY_EMBED_DIMENSION")
      ->check(CLI::PositiveNumber);

  std::string validate_target;
  auto* validate = app.add_subcommand("validate", "Check a dataset, or the --store when no dataset is given");
  validate->add_option("dataset", validate_target, "Dataset directory");

  auto* ingest = app.add_subcommand("ingest-kb", "Chunk and embed a corpus into <store>/kb.json");
  ingest->add_option("--corpus", o.corpus, "Corpus directory")->envname("FLOWY_CORPUS");

  auto* annotate = app.add_subcommand("annotate", "Run the annotation batch into the store");
  annotate->add_option("--dataset", o.dataset, "Dataset directory")->envname("FLOWY_DATASET");
  annotate->add_option("--corpus", o.corpus, "Corpus to ingest first (default: the store's kb.json)")
      ->envname("FLOWY_CORPUS");
  annotate->add_option("--workers", o.workers, "Concurrent flows")->envname("FLOWY_WORKERS")->check(CLI::PositiveNumber);
  annotate->add_option("--iou-text", o.iou_text, "Drop masks whose IoU with a text region exceeds this")
      ->envname("FLOWY_IOU_TEXT")
      ->check(CLI::Range(0.0, 1.0));
  annotate->add_option("--min-area-frac", o.min_area_frac, "Drop masks smaller than this fraction of the screen")
      ->envname("FLOWY_MIN_AREA_FRAC")
      ->check(CLI::Range(0.0, 1.0));
  annotate->add_option("--retrieval-k", o.retrieval_k, "Excerpts retrieved per flow")
      ->envname("FLOWY_RETRIEVAL_K")
      ->check(CLI::PositiveNumber);
  annotate->add_flag("--enrich-query", o.enrich_query, "Append the flow title to the retrieval query")
      ->envname("FLOWY_ENRICH_QUERY");
  annotate->add_option("--flow", o.flows, "Only annotate these flow ids");
  annotate->add_option("--canned", o.canned, "Directory of canned mock responses")->envname("FLOWY_CANNED");
  annotate->add_option("--model-endpoint", o.model_endpoint, "Chat-completions URL")->envname("FLOWY_MODEL_ENDPOINT");
  annotate->add_option("--model-key", o.model_key, "Model API key")->envname("FLOWY_MODEL_KEY");
  annotate->add_option("--model", o.model, "Model name for every role")->envname("FLOWY_MODEL");

  auto* related = app.add_subcommand("related", "Related-design index");
  related->require_subcommand(1);
  auto* rebuild = related->add_subcommand("rebuild", "Rebuild <store>/related.json from the stored annotations");

  auto* serve = app.add_subcommand("serve", "Serve the store over HTTP");
  serve->add_option("--host", o.host, "Bind address")->envname("FLOWY_HOST");
  serve->add_option("--port", o.port, "Port")->envname("FLOWY_PORT")->check(CLI::Range(0, 65535));
  serve->add_option("--cors", o.cors, "Comma-separated allowed origins, or *")->envname("FLOWY_CORS");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(o, validate_target);
    if (ingest->parsed()) return cmd_ingest(o);
    if (annotate->parsed()) return cmd_annotate(o);
    if (rebuild->parsed()) return cmd_related_rebuild(o);
    if (serve->parsed()) return cmd_serve(o);
  } catch (const std::exception& e) {
    std::cerr << "flowy: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
