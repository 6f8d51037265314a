#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "pathcert/checker.hpp"
#include "pathcert/plan.hpp"
#include "pathcert/scene.hpp"

namespace pathcert {

// A scene parsed from its JSON document plus the document's variable names:
// every joint introduces one TC-space variable, named in the document by the
// link's optional "var" field (default: the link name).
struct LoadedScene {
  Scene scene;
  std::map<std::string, VarId> vars;
};

// Document readers.  All documents carry {"format": ..., "version": 1} and
// loading throws std::invalid_argument (or nlohmann::json::exception) on any
// schema violation; the CLI maps those to exit code 3.
LoadedScene load_scene(const nlohmann::json& doc);
LoadedScene load_scene_file(const std::string& path);
MotionPlan load_plan(const nlohmann::json& doc,
                     const std::map<std::string, VarId>& vars);
MotionPlan load_plan_file(const std::string& path,
                          const std::map<std::string, VarId>& vars);

// Certificate and report serialization (versioned, round-trippable).
nlohmann::json certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(const nlohmann::json& doc);
nlohmann::json check_report_to_json(const CheckReport& rep);
nlohmann::json falsify_report_to_json(const FalsifyReport& rep,
                                      const Scene& scene,
                                      const std::map<std::string, VarId>& vars);
nlohmann::json plan_summary_to_json(const PlanReport& rep, const Scene& scene);

}  // namespace pathcert
