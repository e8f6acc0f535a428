// decor: command-line front end for the decoration engine.
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "decor/agents.hpp"
#include "decor/geometry.hpp"
#include "decor/llm_client.hpp"
#include "decor/metrics.hpp"
#include "decor/pipeline.hpp"
#include "decor/retrieval.hpp"
#include "decor/scene_io.hpp"
#include "decor/service.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

#ifndef DECOR_DEFAULT_DATA_DIR
#define DECOR_DEFAULT_DATA_DIR "data"
#endif

struct ClientFlags {
  std::string stub_dir;
  std::string endpoint;
  std::string model;
  bool rules = false;
  double fault_rate = 0.0;
};

/// Owns the chosen backend and an optional fault-injecting wrapper.
struct ClientHolder : decor::ChatClient {
  std::unique_ptr<decor::ChatClient> inner;
  std::unique_ptr<decor::FaultInjectingStub> faulty;

  decor::ChatResponse complete(const decor::ChatRequest& request) override {
    return faulty ? faulty->complete(request) : inner->complete(request);
  }
};

std::shared_ptr<ClientHolder> make_client(const ClientFlags& flags, std::uint64_t seed) {
  auto holder = std::make_shared<ClientHolder>();
  if (!flags.stub_dir.empty()) {
    holder->inner = decor::ScriptedStub::from_directory(flags.stub_dir);
  } else if (!flags.rules && (!flags.endpoint.empty() || std::getenv("DECOR_LLM_ENDPOINT") != nullptr)) {
    auto config = decor::HttpClientConfig::from_env();
    if (!flags.endpoint.empty()) config.endpoint = flags.endpoint;
    if (!flags.model.empty()) config.model = flags.model;
    holder->inner = std::make_unique<decor::HttpChatClient>(config);
  } else {
    holder->inner = std::make_unique<decor::RuleBasedStub>();
  }
  if (flags.fault_rate > 0.0) {
    holder->faulty = std::make_unique<decor::FaultInjectingStub>(*holder->inner, flags.fault_rate, seed);
  }
  return holder;
}

void add_client_flags(CLI::App* cmd, ClientFlags& flags) {
  cmd->add_option("--stub-dir", flags.stub_dir, "Replay scripted replies from this directory")
      ->check(CLI::ExistingDirectory);
  cmd->add_option("--endpoint", flags.endpoint, "OpenAI-compatible base URL (default: $DECOR_LLM_ENDPOINT)");
  cmd->add_option("--model", flags.model, "Model name for --endpoint");
  cmd->add_flag("--stub-rules", flags.rules, "Use the built-in rule-based stub (default without an endpoint)");
  cmd->add_option("--fault-rate", flags.fault_rate, "Corrupt this fraction of replies")->check(CLI::Range(0.0, 1.0));
}

std::string catalog_default() { return (fs::path(DECOR_DEFAULT_DATA_DIR) / "catalog.json").string(); }

std::shared_ptr<decor::Catalog> load_catalog(const std::string& path, const std::string& sidecar) {
  std::optional<fs::path> side;
  if (!sidecar.empty()) side = sidecar;
  return std::make_shared<decor::Catalog>(decor::Catalog::load(path, side));
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    decor::write_file_atomic(path, text);
  }
}

json parse_json_arg(const std::string& text, const char* what) {
  if (text.empty()) return nullptr;
  try {
    if (fs::is_regular_file(text)) return json::parse(decor::read_file(text));
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw decor::ValidationError(fmt::format("{} is not JSON: {}", what, e.what()));
  }
}

decor::DecorService* g_service = nullptr;

extern "C" void on_signal(int) {
  if (g_service != nullptr) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Furniture decoration engine"};
  app.require_subcommand(1);

  ClientFlags client_flags;
  std::string mesh, prompt, catalog_path = catalog_default(), sidecar, out, scene_path, instruction, ops_arg,
      solver_arg;
  int n_assets = 8;
  std::uint64_t seed = 0;

  auto* decorate = app.add_subcommand("decorate", "Decorate a furniture mesh");
  decorate->add_option("--mesh", mesh, "Furniture OBJ file")->required()->check(CLI::ExistingFile);
  decorate->add_option("--prompt", prompt, "User requirement")->required();
  decorate->add_option("--assets", n_assets, "Number of assets")->check(CLI::PositiveNumber);
  decorate->add_option("--seed", seed, "Seed for solver and retrieval");
  decorate->add_option("--catalog", catalog_path, "Catalog JSON")->check(CLI::ExistingFile);
  decorate->add_option("--embeddings", sidecar, "Embedding sidecar JSON")->check(CLI::ExistingFile);
  decorate->add_option("--solver", solver_arg, "Solver overrides (JSON text or file)");
  decorate->add_option("--out", out, "Scene JSON output (default stdout)");
  add_client_flags(decorate, client_flags);

  auto* edit = app.add_subcommand("edit", "Edit a scene");
  edit->add_option("--scene", scene_path, "Scene JSON")->required()->check(CLI::ExistingFile);
  auto* instr = edit->add_option("--instruction", instruction, "Free-form instruction");
  auto* ops_opt = edit->add_option("--ops", ops_arg, "Edit ops (JSON text or file)");
  instr->excludes(ops_opt);
  edit->add_option("--catalog", catalog_path, "Catalog JSON")->check(CLI::ExistingFile);
  edit->add_option("--embeddings", sidecar, "Embedding sidecar JSON")->check(CLI::ExistingFile);
  edit->add_option("--solver", solver_arg, "Solver overrides (JSON text or file)");
  edit->add_option("--out", out, "Scene JSON output (default stdout)");
  add_client_flags(edit, client_flags);

  std::vector<std::string> metric_scenes;
  auto* metrics = app.add_subcommand("metrics", "OOB rate and BBL over scenes");
  metrics->add_option("scenes", metric_scenes, "Scene JSON files")->required()->check(CLI::ExistingFile);

  int surface = 0;
  auto* svg = app.add_subcommand("svg", "Export one surface as SVG");
  svg->add_option("--scene", scene_path, "Scene JSON")->required()->check(CLI::ExistingFile);
  svg->add_option("--surface", surface, "Surface index");
  svg->add_option("--out", out, "SVG output (default stdout)");

  auto* surfaces = app.add_subcommand("surfaces", "List the supporting surfaces of a mesh");
  surfaces->add_option("--mesh", mesh, "Furniture OBJ file")->required()->check(CLI::ExistingFile);

  std::string host = "127.0.0.1", store = "jobs", mesh_root = ".";
  int port = 8080, workers = 1;
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");
  serve->add_option("--store", store, "Job directory root");
  serve->add_option("--mesh-root", mesh_root, "Directory for relative mesh references");
  serve->add_option("--catalog", catalog_path, "Catalog JSON")->check(CLI::ExistingFile);
  serve->add_option("--embeddings", sidecar, "Embedding sidecar JSON")->check(CLI::ExistingFile);
  serve->add_option("--workers", workers, "Concurrent jobs")->check(CLI::PositiveNumber);
  add_client_flags(serve, client_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (decorate->parsed()) {
      decor::JobRequest request;
      request.mesh_ref = mesh;
      request.prompt = prompt;
      request.n_assets = n_assets;
      request.seed = seed;
      request.solver_overrides = parse_json_arg(solver_arg, "--solver");
      request.validate();
      const auto catalog = load_catalog(catalog_path, sidecar);
      const auto client = make_client(client_flags, seed);
      decor::DecorateTrace trace;
      try {
        const auto scene = decor::decorate(request, *client, *catalog, {}, &trace);
        write_output(out, decor::scene_to_json(scene).dump(2) + "\n");
      } catch (const std::exception&) {
        std::cerr << "failed during stage '" << trace.stage << "'\n";
        throw;
      }
    } else if (edit->parsed()) {
      const auto scene = decor::load_scene(scene_path);
      decor::EditOptions options;
      decor::SolverParams base;
      base.seed = scene.provenance.seed;
      options.params = decor::solver_params_from_json(parse_json_arg(solver_arg, "--solver"), base);
      const auto catalog = load_catalog(catalog_path, sidecar);
      options.catalog = catalog.get();
      std::vector<decor::EditOp> ops;
      std::vector<decor::TranscriptEntry> transcript;
      if (!ops_arg.empty()) {
        json j = parse_json_arg(ops_arg, "--ops");
        ops = decor::edit_ops_from_json(j.is_object() && j.contains("ops") ? j["ops"] : j);
      } else if (!instruction.empty()) {
        const auto client = make_client(client_flags, scene.provenance.seed);
        decor::StageOptions stage;
        stage.seed = scene.provenance.seed;
        auto interpreted = decor::interpret_edit(instruction, scene, *client, stage);
        ops = std::move(interpreted.ops);
        transcript = std::move(interpreted.run.transcript);
      } else {
        throw decor::ValidationError("edit needs --instruction or --ops");
      }
      auto edited = decor::apply_edit(scene, ops, options);
      edited.provenance.transcripts.insert(edited.provenance.transcripts.end(), transcript.begin(), transcript.end());
      write_output(out, decor::scene_to_json(edited).dump(2) + "\n");
    } else if (metrics->parsed()) {
      std::vector<decor::DecorScene> scenes;
      for (const auto& p : metric_scenes) scenes.push_back(decor::load_scene(p));
      std::cout << decor::metrics_report(scenes).dump(2) << "\n";
    } else if (svg->parsed()) {
      write_output(out, decor::export_svg(decor::load_scene(scene_path), surface));
    } else if (surfaces->parsed()) {
      const auto extracted = decor::extract_surfaces(decor::load_mesh_file(mesh));
      json arr = json::array();
      for (const auto& s : decor::summarize(extracted)) {
        arr.push_back({{"index", s.index},
                       {"height_cm", s.height_cm},
                       {"area_cm2", s.area_cm2},
                       {"width_cm", s.width_cm},
                       {"depth_cm", s.depth_cm},
                       {"clearance_cm", s.clearance_cm ? json(*s.clearance_cm) : json(nullptr)}});
      }
      std::cout << arr.dump(2) << "\n";
    } else if (serve->parsed()) {
      decor::ServiceConfig config;
      config.store_root = store;
      config.mesh_root = mesh_root;
      config.catalog = load_catalog(catalog_path, sidecar);
      config.client = make_client(client_flags, 0);
      config.workers = workers;
      decor::DecorService service(config);
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on http://" << host << ":" << port << "\n";
      if (!service.listen(host, port)) throw decor::DecorError(fmt::format("cannot listen on {}:{}", host, port));
      g_service = nullptr;
    }
  } catch (const decor::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const decor::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const decor::BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
