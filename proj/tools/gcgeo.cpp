// Command line driver: loads a scene file, runs its checks and prints a
// report.  Exit status: 0 all checks pass, 1 a check failed, 2 the scene
// (or the invocation) is malformed.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gcgeo/scene.hpp"

namespace {

struct Options {
  std::string scene;
  std::string name;
  std::string json_path;
  std::string convention;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
};

void add_shared(CLI::App* cmd, Options& o, bool with_name) {
  cmd->add_option("--scene", o.scene, "scene file to load")->required();
  if (with_name) cmd->add_option("--name", o.name, "structure the check applies to");
  cmd->add_option("--seed", o.seed, "seed for sampled certifications");
  cmd->add_option("--samples", o.samples, "sample count for sampled certifications (default 5)");
  cmd->add_option("--json", o.json_path, "also write the report as json to this path");
  cmd->add_option("--convention", o.convention, "json file with convention overrides");
}

int run_command(const std::string& kind, const Options& o) {
  gcgeo::Scene scene = gcgeo::load_scene_file(o.scene);
  gcgeo::RunOverrides ov;
  ov.seed = o.seed;
  ov.samples = o.samples;
  if (!o.convention.empty()) ov.conventions = gcgeo::load_conventions_file(o.convention);
  std::vector<gcgeo::TaskData> tasks =
      kind.empty() ? scene.tasks : gcgeo::select_tasks(scene, kind, o.name);
  gcgeo::RunResult res = gcgeo::run_tasks(scene, tasks, ov);
  std::cout << gcgeo::render_text(res);
  if (!o.json_path.empty()) {
    std::ofstream out(o.json_path, std::ios::binary);
    if (!out) throw gcgeo::SceneError(o.json_path, "cannot write the report file");
    out << gcgeo::render_json(res);
  }
  return res.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact geometric checks driven by scene files"};
  app.require_subcommand(1);

  struct Sub {
    const char* cmd;
    const char* kind;
    bool with_name;
    const char* help;
  };
  const std::vector<Sub> subs = {
      {"run", "", false, "run every task in the scene"},
      {"check-gc", "gc", true, "generalized complex structure check"},
      {"check-algebroid", "algebroid", true, "Lie algebroid axiom check"},
      {"check-shifted", "shifted", true, "shifted pairing closure and nondegeneracy"},
      {"check-lagrangian", "lagrangian", true, "Lagrangian structure check"},
      {"check-hhs", "hhs", true, "homotopy holomorphic structure check"},
      {"check-foliation", "foliation", true, "anti-holomorphic foliation check"},
      {"lift-brane", "lift", true, "coisotropic brane check and its torus lift"},
      {"intersect", "intersect", true, "derived intersection of two Lagrangians"},
  };

  Options o;
  std::string kind;
  for (const Sub& sub : subs) {
    CLI::App* cmd = app.add_subcommand(sub.cmd, sub.help);
    add_shared(cmd, o, sub.with_name);
    cmd->callback([&kind, k = sub.kind] { kind = k; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    return run_command(kind, o);
  } catch (const gcgeo::SceneError& e) {
    std::cerr << "scene error at " << (e.where.empty() ? "(root)" : e.where) << ": " << e.what()
              << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
