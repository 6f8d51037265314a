#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "pathcert/scene_io.hpp"

namespace fs = std::filesystem;
using namespace pathcert;

namespace {

struct RunConfig {
  std::string scene_path;
  std::string plan_path;
  std::string out_dir = "pathcert_out";
  int degree = 1;
  int jobs = 1;
  long long falsify_n = 100000;
  bool exact_verify = false;
  bool early_stop = false;
};

void write_doc(const fs::path& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << doc.dump(2) << "\n";
}

std::string cell_stem(const CellResult& cell) {
  return "seg" + std::to_string(cell.segment) + "_pair" +
         std::to_string(cell.pair_index);
}

int run_certify(const RunConfig& cfg) {
  const auto loaded = load_scene_file(cfg.scene_path);
  const auto plan = load_plan_file(cfg.plan_path, loaded.vars);

  CertifyOptions opts;
  opts.hyperplane_degree = cfg.degree;
  opts.jobs = cfg.jobs;
  opts.early_stop = cfg.early_stop;
  opts.exact_verify = cfg.exact_verify;
  opts.solver = SolveOptions::from_env();
  const auto rep = certify_plan(plan, loaded.scene, opts);

  fs::create_directories(cfg.out_dir);
  write_doc(fs::path(cfg.out_dir) / "summary.json",
            plan_summary_to_json(rep, loaded.scene));
  for (const auto& cell : rep.cells) {
    if (cell.solve_status != SolveStatus::Feasible) continue;
    auto doc = certificate_to_json(cell.certificate);
    doc["check"] = check_report_to_json(cell.check);
    write_doc(fs::path(cfg.out_dir) / ("cert_" + cell_stem(cell) + ".json"),
              doc);
  }

  std::cout << "cells: " << rep.cells.size() << " (" << rep.segments
            << " segments x " << rep.pairs << " pairs)\n";
  for (const auto& cell : rep.cells) {
    std::cout << "  " << cell_stem(cell) << ": ";
    if (cell.skipped)
      std::cout << "skipped";
    else if (cell.solve_status == SolveStatus::Feasible)
      std::cout << (cell.verified ? "certified" : "NOT verified") << " in "
                << cell.iterations << " iterations, " << cell.solve_seconds
                << " s";
    else
      std::cout << (cell.solve_status == SolveStatus::Infeasible ? "infeasible"
                                                                 : "unknown");
    if (!cell.note.empty() && cell.verified == false)
      std::cout << " (" << cell.note << ")";
    std::cout << "\n";
  }

  if (rep.safe) {
    // cheap sampling cross-check; a hit here means the certifier itself is
    // broken, and the collision verdict must win
    const auto cross = sample_falsify(plan, loaded.scene, 1000);
    if (cross.collision_found) {
      write_doc(fs::path(cfg.out_dir) / "falsify.json",
                falsify_report_to_json(cross, loaded.scene, loaded.vars));
      std::cerr << "ERROR: certified SAFE but sampling found a collision at "
                   "segment "
                << cross.segment << ", t=" << cross.t
                << "; this is a certifier bug\n";
      std::cout << "verdict: NSAFE\n";
      return 1;
    }
    std::cout << "verdict: SAFE\n";
    return 0;
  }

  const auto conf = sample_falsify(plan, loaded.scene,
                                   static_cast<int>(cfg.falsify_n));
  write_doc(fs::path(cfg.out_dir) / "falsify.json",
            falsify_report_to_json(conf, loaded.scene, loaded.vars));
  if (conf.collision_found) {
    std::cout << "verdict: NSAFE (collision confirmed at segment "
              << conf.segment << ", t=" << conf.t << ", pair "
              << loaded.scene.body(conf.pair.a).name << "/"
              << loaded.scene.body(conf.pair.b).name << ")\n";
    return 1;
  }
  std::cout << "verdict: NSAFE (uncertified; no collision in "
            << conf.samples_used << " samples)\n";
  return 2;
}

int run_falsify(const RunConfig& cfg) {
  const auto loaded = load_scene_file(cfg.scene_path);
  const auto plan = load_plan_file(cfg.plan_path, loaded.vars);
  const auto rep =
      sample_falsify(plan, loaded.scene, static_cast<int>(cfg.falsify_n));
  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    write_doc(fs::path(cfg.out_dir) / "falsify.json",
              falsify_report_to_json(rep, loaded.scene, loaded.vars));
  }
  if (rep.collision_found) {
    std::cout << "collision at segment " << rep.segment << ", t=" << rep.t
              << ", pair " << loaded.scene.body(rep.pair.a).name << "/"
              << loaded.scene.body(rep.pair.b).name
              << ", min_distance=" << rep.min_distance << "\n";
    return 1;
  }
  std::cout << "no collision in " << rep.samples_used << " samples\n";
  return 0;
}

int run_export(const RunConfig& cfg) {
  const auto loaded = load_scene_file(cfg.scene_path);
  const auto plan = load_plan_file(cfg.plan_path, loaded.vars);
  fs::create_directories(cfg.out_dir);
  int files = 0;
  for (std::size_t s = 0; s < plan.segments.size(); ++s)
    for (std::size_t p = 0; p < loaded.scene.pairs.size(); ++p) {
      const auto& pr = loaded.scene.pairs[p];
      const auto prog = assemble_pair_program(
          loaded.scene.chain, loaded.scene.body(pr.a), loaded.scene.body(pr.b),
          plan.segments[s], static_cast<int>(s), cfg.degree);
      const auto name = "seg" + std::to_string(s) + "_pair" +
                        std::to_string(p) + ".dat-s";
      std::ofstream out(fs::path(cfg.out_dir) / name);
      if (!out) throw std::runtime_error("cannot write '" + name + "'");
      out << export_standard(prog.sdp);
      ++files;
    }
  std::cout << "wrote " << files << " problem files to " << cfg.out_dir
            << "\n";
  return 0;
}

int run_fk_check(const RunConfig& cfg) {
  const auto loaded = load_scene_file(cfg.scene_path);
  const auto& scene = loaded.scene;

  std::vector<std::pair<int, Eigen::Vector3d>> points;
  for (const auto& body : scene.bodies) {
    if (body.kind == ConvexBody::Kind::Sphere)
      points.emplace_back(body.link, body.center);
    else
      for (const auto& v : body.vertices) points.emplace_back(body.link, v);
  }

  std::vector<TcPoint> configs;
  {
    TcPoint zero;
    for (VarId v : scene.chain.tc_vars()) zero[v] = 0.0;
    configs.push_back(zero);
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> unit(-1.5, 1.5);
    for (int i = 0; i < 200; ++i) {
      TcPoint tc;
      for (VarId v : scene.chain.tc_vars()) tc[v] = unit(rng);
      configs.push_back(tc);
    }
  }

  double worst = 0.0;
  for (const auto& [link, point] : points) {
    const auto fk = fk_point<double>(scene.chain, 0, link, point);
    for (const auto& tc : configs) {
      const Eigen::Vector3d sym = eval_point(fk, tc);
      const Eigen::Vector3d num =
          scene.chain.numeric_link_pose(link, tc_to_cspace(scene.chain, tc)) *
          point;
      worst = std::max(worst, (sym - num).cwiseAbs().maxCoeff());
    }
  }
  std::cout << "max deviation: " << worst << " over " << configs.size()
            << " configurations, " << points.size() << " points\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "certifies piecewise-polynomial motion plans collision-free via "
      "sums-of-squares feasibility, and independently re-checks every "
      "certificate"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* cmd, bool needs_plan) {
    cmd->add_option("--scene", cfg.scene_path, "scene document (JSON)")
        ->required();
    if (needs_plan)
      cmd->add_option("--plan", cfg.plan_path, "plan document (JSON)")
          ->required();
    cmd->add_option("--out", cfg.out_dir, "output directory");
  };

  auto* certify = app.add_subcommand(
      "certify", "solve + verify one program per (segment, pair) cell");
  add_common(certify, true);
  certify->add_option("--degree", cfg.degree,
                      "hyperplane coefficient degree (>= 0)")
      ->check(CLI::NonNegativeNumber);
  certify->add_option("--jobs", cfg.jobs, "worker threads")
      ->check(CLI::PositiveNumber);
  certify->add_option("--falsify-n", cfg.falsify_n,
                      "samples per segment for NSAFE confirmation");
  certify->add_flag("--exact-verify", cfg.exact_verify,
                    "re-verify certificates in exact rational arithmetic");
  certify->add_flag("--early-stop", cfg.early_stop,
                    "stop dispatching cells after the first failure");

  auto* falsify = app.add_subcommand(
      "falsify", "search for a collision by dense sampling");
  add_common(falsify, true);
  falsify->add_option("--falsify-n", cfg.falsify_n, "samples per segment");

  auto* exp = app.add_subcommand(
      "export", "write each cell's feasibility program in sparse SDPA form");
  add_common(exp, true);
  exp->add_option("--degree", cfg.degree, "hyperplane coefficient degree")
      ->check(CLI::NonNegativeNumber);

  auto* fk = app.add_subcommand(
      "fk-check", "compare symbolic-rational and numeric forward kinematics");
  fk->add_option("--scene", cfg.scene_path, "scene document (JSON)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (certify->parsed()) return run_certify(cfg);
    if (falsify->parsed()) return run_falsify(cfg);
    if (exp->parsed()) return run_export(cfg);
    return run_fk_check(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
