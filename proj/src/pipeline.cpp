#include "decor/pipeline.hpp"

#include "decor/compiler.hpp"
#include "decor/scene_io.hpp"

namespace decor {

void JobRequest::validate() const {
  if (mesh_ref.empty()) throw ValidationError("job request needs a mesh reference");
  if (n_assets < 1) throw ValidationError("n_assets must be at least 1");
  solver_params();
}

SolverParams JobRequest::solver_params() const {
  SolverParams base;
  base.seed = seed;
  return solver_params_from_json(solver_overrides, base);
}

nlohmann::json JobRequest::to_json() const {
  return {{"mesh_ref", mesh_ref},
          {"prompt", prompt},
          {"n_assets", n_assets},
          {"seed", seed},
          {"solver", solver_overrides.is_null() ? nlohmann::json::object() : solver_overrides}};
}

JobRequest JobRequest::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("job request must be a JSON object");
  JobRequest r;
  try {
    r.mesh_ref = j.at("mesh_ref").get<std::string>();
    r.prompt = j.value("prompt", std::string());
    r.n_assets = j.value("n_assets", 8);
    r.seed = j.value("seed", std::uint64_t{0});
    if (const auto it = j.find("solver"); it != j.end() && !it->empty()) r.solver_overrides = *it;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad job request: ") + e.what());
  }
  r.validate();
  return r;
}

std::uint64_t retrieval_seed(std::uint64_t job_seed, const std::string& asset_id) {
  return stable_hash(asset_id, job_seed);
}

DecorScene decorate(const JobRequest& request, ChatClient& client, const Catalog& catalog,
                    const DecorateOptions& options, DecorateTrace* trace) {
  request.validate();
  return decorate_mesh(load_mesh_file(request.mesh_ref), request, client, catalog, options, trace);
}

DecorScene decorate_mesh(const Mesh& mesh, const JobRequest& request, ChatClient& client, const Catalog& catalog,
                         const DecorateOptions& options, DecorateTrace* trace) {
  if (request.n_assets < 1) throw ValidationError("n_assets must be at least 1");
  if (catalog.empty()) throw ValidationError("catalog is empty");
  const SolverParams params = request.solver_params();
  DecorateTrace local;
  DecorateTrace& t = trace != nullptr ? *trace : local;
  auto enter = [&](const char* stage) {
    t.stage = stage;
    if (t.on_stage) t.on_stage(t.stage);
  };
  auto record = [&](const StageRun& run) {
    t.transcript.insert(t.transcript.end(), run.transcript.begin(), run.transcript.end());
  };

  DecorScene scene;
  scene.furniture.mesh_ref = request.mesh_ref;
  scene.provenance.prompt = request.prompt;
  scene.provenance.n_assets = request.n_assets;
  scene.provenance.seed = request.seed;

  enter("extract");
  scene.furniture.surfaces = extract_surfaces(mesh, options.extraction);

  StageOptions stage_options = options.stage;
  if (!stage_options.seed) stage_options.seed = request.seed;
  StageContext ctx;
  ctx.prompt = request.prompt;
  ctx.n_assets = request.n_assets;
  ctx.surfaces = summarize(scene.furniture.surfaces);

  try {
    enter("select");
    auto selected = select_assets(ctx, client, stage_options);
    record(selected.run);
    ctx.assets = std::move(selected.assets);

    enter("stylize");
    auto styled = stylize_assets(ctx, client, stage_options);
    record(styled.run);
    ctx.assets = std::move(styled.assets);

    enter("plan");
    auto plan = plan_arrangement(ctx, client, stage_options);
    record(plan.run);
    scene.directives = std::move(plan.directives);
  } catch (const ExhaustedRetriesError& e) {
    t.transcript.insert(t.transcript.end(), e.transcript().begin(), e.transcript().end());
    throw;
  }
  scene.assets = ctx.assets;

  enter("compile");
  const ConstraintSet cs = compile_plan(scene.directives, scene.assets, scene.furniture.surfaces);

  enter("solve");
  scene.layout = solve(cs, scene.furniture.surfaces, params);

  enter("retrieve");
  for (const auto& a : scene.assets) {
    const CatalogEntry& entry =
        retrieve(retrieval_query(a), catalog, options.retrieval_k, retrieval_seed(request.seed, a.id));
    scene.bindings[a.id] = bind(a, entry);
  }

  scene.provenance.transcripts = t.transcript;
  enter("done");
  return scene;
}

}  // namespace decor
