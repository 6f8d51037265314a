#include "pathcert/scene_io.hpp"

#include <fstream>
#include <stdexcept>

namespace pathcert {
namespace {

using nlohmann::json;

void require_header(const json& doc, const std::string& format) {
  if (!doc.is_object()) throw std::invalid_argument("document is not an object");
  if (doc.value("format", std::string()) != format)
    throw std::invalid_argument("document format is not '" + format + "'");
  if (doc.value("version", 0) != 1)
    throw std::invalid_argument("unsupported " + format + " version");
}

json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  json doc;
  in >> doc;
  return doc;
}

Eigen::Vector3d vec3(const json& a, const std::string& what) {
  if (!a.is_array() || a.size() != 3)
    throw std::invalid_argument(what + " must be an array of three numbers");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

// roll-pitch-yaw, extrinsic x-y-z
Eigen::Matrix3d rot_from_rpy(const Eigen::Vector3d& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(rpy.y(), Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

json json_matrix(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows, const std::string& what) {
  if (!rows.is_array()) throw std::invalid_argument(what + ": expected an array");
  const int n = static_cast<int>(rows.size());
  const int m = n > 0 ? static_cast<int>(rows[0].size()) : 0;
  Eigen::MatrixXd out(n, m);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != m)
      throw std::invalid_argument(what + ": ragged rows");
    for (int j = 0; j < m; ++j) out(i, j) = rows[i][j].get<double>();
  }
  return out;
}

TcPoint tc_point(const json& obj, const std::map<std::string, VarId>& vars,
                 const std::string& what) {
  if (!obj.is_object())
    throw std::invalid_argument(what + " must map variable names to numbers");
  TcPoint out;
  for (const auto& [name, val] : obj.items()) {
    const auto it = vars.find(name);
    if (it == vars.end())
      throw std::invalid_argument(what + ": unknown variable '" + name + "'");
    out[it->second] = val.get<double>();
  }
  for (const auto& [name, id] : vars)
    if (!out.count(id))
      throw std::invalid_argument(what + ": variable '" + name + "' unbound");
  return out;
}

}  // namespace

LoadedScene load_scene(const json& doc) {
  require_header(doc, "pathcert-scene");
  LoadedScene out;
  std::map<std::string, int> link_ids{{"world", 0}};

  VarId next_var = 1;
  for (const auto& l : doc.value("links", json::array())) {
    const std::string name = l.at("name").get<std::string>();
    const std::string parent = l.value("parent", std::string("world"));
    const auto pit = link_ids.find(parent);
    if (pit == link_ids.end())
      throw std::invalid_argument("link '" + name + "': unknown parent '" +
                                  parent + "' (links are ordered root-first)");
    const auto& jd = l.at("joint");
    Joint joint;
    const std::string kind = jd.at("kind").get<std::string>();
    if (kind == "revolute")
      joint.kind = JointKind::Revolute;
    else if (kind == "prismatic")
      joint.kind = JointKind::Prismatic;
    else
      throw std::invalid_argument("link '" + name + "': unknown joint kind '" +
                                  kind + "'");
    joint.axis = vec3(jd.at("axis"), "axis");
    if (jd.contains("origin")) {
      const auto& od = jd["origin"];
      if (od.contains("rpy")) joint.origin_rot = rot_from_rpy(vec3(od["rpy"], "rpy"));
      if (od.contains("xyz")) joint.origin_xyz = vec3(od["xyz"], "xyz");
    }
    const auto& lim = jd.at("limits");
    if (!lim.is_array() || lim.size() != 2)
      throw std::invalid_argument("link '" + name + "': limits must be [lo, hi]");
    joint.lo = lim[0].get<double>();
    joint.hi = lim[1].get<double>();

    const std::string var = l.value("var", name);
    if (out.vars.count(var))
      throw std::invalid_argument("duplicate variable name '" + var + "'");
    const VarId id = next_var++;
    out.vars[var] = id;
    link_ids[name] = out.scene.chain.add_link(name, pit->second, joint, id);
  }

  for (const auto& g : doc.value("geometries", json::array())) {
    const std::string name = g.at("name").get<std::string>();
    const std::string link = g.at("link").get<std::string>();
    const auto lit = link_ids.find(link);
    if (lit == link_ids.end())
      throw std::invalid_argument("geometry '" + name + "': unknown link '" +
                                  link + "'");
    const std::string kind = g.at("kind").get<std::string>();
    if (kind == "sphere") {
      out.scene.bodies.push_back(
          ConvexBody::sphere(name, lit->second, vec3(g.at("center"), "center"),
                             g.at("radius").get<double>()));
    } else if (kind == "polytope") {
      std::vector<Eigen::Vector3d> verts;
      for (const auto& v : g.at("vertices")) verts.push_back(vec3(v, "vertex"));
      out.scene.bodies.push_back(
          ConvexBody::polytope(name, lit->second, std::move(verts)));
    } else {
      throw std::invalid_argument("geometry '" + name + "': unknown kind '" +
                                  kind + "'");
    }
  }

  for (const auto& p : doc.value("collision_pairs", json::array())) {
    const std::string a = p.at("geomA").get<std::string>();
    const std::string b = p.at("geomB").get<std::string>();
    const int ia = out.scene.find_body(a);
    const int ib = out.scene.find_body(b);
    if (ia < 0 || ib < 0)
      throw std::invalid_argument("collision pair references unknown geometry '" +
                                  (ia < 0 ? a : b) + "'");
    CollisionPair pair{std::min(ia, ib), std::max(ia, ib)};
    bool dup = false;
    for (const auto& q : out.scene.pairs) dup = dup || q == pair;
    if (!dup) out.scene.pairs.push_back(pair);
  }

  out.scene.validate();
  return out;
}

LoadedScene load_scene_file(const std::string& path) {
  return load_scene(load_file(path));
}

MotionPlan load_plan(const json& doc, const std::map<std::string, VarId>& vars) {
  require_header(doc, "pathcert-plan");
  std::vector<PlanSegment> segments;
  for (const auto& s : doc.at("segments")) {
    const std::string kind = s.value("kind", std::string("coeffs"));
    if (kind == "linear") {
      segments.push_back(linear_segment(tc_point(s.at("from"), vars, "from"),
                                        tc_point(s.at("to"), vars, "to")));
    } else if (kind == "hermite") {
      segments.push_back(hermite_cubic_segment(
          tc_point(s.at("from"), vars, "from"),
          tc_point(s.at("tangent_from"), vars, "tangent_from"),
          tc_point(s.at("to"), vars, "to"),
          tc_point(s.at("tangent_to"), vars, "tangent_to")));
    } else if (kind == "coeffs") {
      PlanSegment seg;
      for (const auto& [name, coeffs] : s.at("coeffs").items()) {
        const auto it = vars.find(name);
        if (it == vars.end())
          throw std::invalid_argument("segment: unknown variable '" + name +
                                      "'");
        if (!coeffs.is_array() || coeffs.empty())
          throw std::invalid_argument("segment: '" + name +
                                      "' needs ascending t coefficients");
        Polynomial<double> p;
        for (std::size_t k = 0; k < coeffs.size(); ++k)
          p += Polynomial<double>::term(
              Monomial::var(kTimeVar, static_cast<int>(k)),
              coeffs[k].get<double>());
        seg.coords[it->second] = p;
      }
      for (const auto& [name, id] : vars)
        if (!seg.coords.count(id))
          throw std::invalid_argument("segment leaves variable '" + name +
                                      "' unbound");
      segments.push_back(std::move(seg));
    } else {
      throw std::invalid_argument("segment kind '" + kind + "' is not known");
    }
  }
  return MotionPlan::from_segments(std::move(segments));
}

MotionPlan load_plan_file(const std::string& path,
                          const std::map<std::string, VarId>& vars) {
  return load_plan(load_file(path), vars);
}

json certificate_to_json(const Certificate& cert) {
  json doc;
  doc["format"] = "pathcert-certificate";
  doc["version"] = 1;
  doc["body_a"] = cert.body_a;
  doc["body_b"] = cert.body_b;
  doc["segment"] = cert.segment_index;
  doc["hyperplane_degree"] = cert.hyperplane_degree;
  doc["a"] = json_matrix(cert.a_coeffs);
  json b = json::array();
  for (int k = 0; k < cert.b_coeffs.size(); ++k) b.push_back(cert.b_coeffs(k));
  doc["b"] = b;
  json cons = json::array();
  for (const auto& c : cert.constraints) {
    json jc;
    jc["label"] = c.label;
    jc["kind"] = c.is_matrix ? "matrix" : "scalar";
    jc["degree"] = c.target_degree;
    jc["gram_lambda"] = json_matrix(c.gram_lambda);
    jc["gram_nu"] = json_matrix(c.gram_nu);
    jc["gamma"] = c.gamma;
    cons.push_back(std::move(jc));
  }
  doc["constraints"] = std::move(cons);
  return doc;
}

Certificate certificate_from_json(const json& doc) {
  require_header(doc, "pathcert-certificate");
  Certificate cert;
  cert.body_a = doc.at("body_a").get<std::string>();
  cert.body_b = doc.at("body_b").get<std::string>();
  cert.segment_index = doc.at("segment").get<int>();
  cert.hyperplane_degree = doc.at("hyperplane_degree").get<int>();
  cert.a_coeffs = matrix_from_json(doc.at("a"), "a");
  const auto& b = doc.at("b");
  cert.b_coeffs.resize(static_cast<Eigen::Index>(b.size()));
  for (std::size_t k = 0; k < b.size(); ++k)
    cert.b_coeffs(static_cast<Eigen::Index>(k)) = b[k].get<double>();
  for (const auto& jc : doc.at("constraints")) {
    CertificateConstraint c;
    c.label = jc.at("label").get<std::string>();
    c.is_matrix = jc.at("kind").get<std::string>() == "matrix";
    c.target_degree = jc.at("degree").get<int>();
    c.gram_lambda = matrix_from_json(jc.at("gram_lambda"), "gram_lambda");
    c.gram_nu = matrix_from_json(jc.at("gram_nu"), "gram_nu");
    c.gamma = jc.at("gamma").get<double>();
    cert.constraints.push_back(std::move(c));
  }
  return cert;
}

json check_report_to_json(const CheckReport& rep) {
  json doc;
  doc["format"] = "pathcert-check";
  doc["version"] = 1;
  doc["verdict"] = rep.verified ? "Verified" : "Rejected";
  if (!rep.diagnostic.empty()) doc["diagnostic"] = rep.diagnostic;
  json cons = json::array();
  for (const auto& c : rep.constraints) {
    json jc;
    jc["label"] = c.label;
    jc["ok"] = c.ok;
    jc["residual"] = c.residual;
    jc["gamma"] = c.gamma;
    jc["min_gram_eigenvalue"] = c.min_gram_eigenvalue;
    if (!c.diagnostic.empty()) jc["diagnostic"] = c.diagnostic;
    cons.push_back(std::move(jc));
  }
  doc["constraints"] = std::move(cons);
  return doc;
}

json falsify_report_to_json(const FalsifyReport& rep, const Scene& scene,
                            const std::map<std::string, VarId>& vars) {
  json doc;
  doc["format"] = "pathcert-falsify";
  doc["version"] = 1;
  doc["outcome"] = rep.collision_found ? "CollisionFound" : "NoneFound";
  doc["samples_used"] = rep.samples_used;
  if (rep.collision_found) {
    doc["segment"] = rep.segment;
    doc["t"] = rep.t;
    doc["pair"] = json::array(
        {scene.body(rep.pair.a).name, scene.body(rep.pair.b).name});
    doc["min_distance"] = rep.min_distance;
    json config;
    for (const auto& [name, id] : vars) {
      const auto it = rep.config.find(id);
      if (it != rep.config.end()) config[name] = it->second;
    }
    doc["config"] = std::move(config);
  }
  return doc;
}

json plan_summary_to_json(const PlanReport& rep, const Scene& scene) {
  json doc;
  doc["format"] = "pathcert-summary";
  doc["version"] = 1;
  doc["verdict"] = rep.safe ? "SAFE" : "NSAFE";
  doc["segments"] = rep.segments;
  doc["pairs"] = rep.pairs;
  doc["cells"] = static_cast<int>(rep.cells.size());
  int feasible = 0, verified = 0;
  double seconds = 0.0;
  json cells = json::array();
  for (const auto& cell : rep.cells) {
    json jc;
    jc["segment"] = cell.segment;
    jc["pair"] = json::array({scene.body(scene.pairs[cell.pair_index].a).name,
                              scene.body(scene.pairs[cell.pair_index].b).name});
    if (cell.skipped) {
      jc["status"] = "Skipped";
    } else {
      switch (cell.solve_status) {
        case SolveStatus::Feasible: jc["status"] = "Feasible"; break;
        case SolveStatus::Infeasible: jc["status"] = "Infeasible"; break;
        case SolveStatus::Unknown: jc["status"] = "Unknown"; break;
      }
      jc["verified"] = cell.verified;
      jc["iterations"] = cell.iterations;
      jc["solve_seconds"] = cell.solve_seconds;
    }
    if (!cell.note.empty()) jc["note"] = cell.note;
    feasible += cell.solve_status == SolveStatus::Feasible ? 1 : 0;
    verified += cell.verified ? 1 : 0;
    seconds += cell.solve_seconds;
    cells.push_back(std::move(jc));
  }
  doc["feasible_cells"] = feasible;
  doc["verified_cells"] = verified;
  doc["solver_seconds_total"] = seconds;
  doc["cell_results"] = std::move(cells);
  return doc;
}

}  // namespace pathcert
