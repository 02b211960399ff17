#include "cuspidal_cli/cli.hpp"

#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "cuspidal/classify.hpp"
#include "cuspidal/errors.hpp"
#include "cuspidal/feasibility.hpp"
#include "cuspidal/ik.hpp"
#include "cuspidal/kinematics.hpp"
#include "cuspidal/model.hpp"
#include "cuspidal/plot.hpp"
#include "cuspidal/singular.hpp"
#include "cuspidal/workspace.hpp"

namespace cuspidal::cli {

namespace {

using nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelFlags {
  std::string file;
  std::optional<double> a1, a2, a3, d2, d3, alpha1, alpha2;
};

struct Options {
  ModelFlags model;
  int resolution = kDefaultResolution;
  std::string out_dir = ".";
  std::vector<std::string> formats{"json"};
  std::string method = "both";
  std::vector<double> target;
  std::vector<double> joints;
  std::vector<int> pair;
  std::vector<std::string> scan;
  std::string polyline;
  int branch = 0;
  double step = 0.05;
};

DHParams read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError(fmt::format("cannot open model file '{}'", path));
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(fmt::format("model file '{}' is not valid JSON: {}", path, e.what()));
  }
  DHParams p;
  auto get = [&](const char* key, double& field) {
    if (!j.contains(key)) throw UsageError(fmt::format("model file '{}' lacks '{}'", path, key));
    field = j.at(key).get<double>();
  };
  get("a1", p.a1);
  get("a2", p.a2);
  get("a3", p.a3);
  get("d2", p.d2);
  get("d3", p.d3);
  get("alpha1", p.alpha1);
  get("alpha2", p.alpha2);
  return p;
}

ManipulatorModel build_model(const ModelFlags& f) {
  DHParams p = f.file.empty() ? illustrative_params() : read_model_file(f.file);
  if (f.a1) p.a1 = *f.a1;
  if (f.a2) p.a2 = *f.a2;
  if (f.a3) p.a3 = *f.a3;
  if (f.d2) p.d2 = *f.d2;
  if (f.d3) p.d3 = *f.d3;
  if (f.alpha1) p.alpha1 = *f.alpha1;
  if (f.alpha2) p.alpha2 = *f.alpha2;
  return validate_params(p);
}

bool wants(const Options& o, const std::string& format) {
  return std::find(o.formats.begin(), o.formats.end(), format) != o.formats.end();
}

class Emitter {
 public:
  explicit Emitter(const Options& o) : dir_(o.out_dir) {}

  void write(const std::string& name, const std::string& content) {
    std::filesystem::create_directories(dir_);
    const auto path = dir_ / name;
    std::ofstream f(path, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    files_.push_back(path.string());
  }

  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

ordered_json params_json(const ManipulatorModel& m) {
  const DHParams& p = m.params();
  return {{"a1", p.a1},         {"a2", p.a2},         {"a3", p.a3},          {"d2", p.d2},
          {"d3", p.d3},         {"alpha1", p.alpha1}, {"alpha2", p.alpha2}, {"orthogonal", m.orthogonal()},
          {"conditions", m.conditions().ids()}};
}

ordered_json point_json(const CrossSectionPoint& p) { return {{"rho", p.rho}, {"z", p.z}}; }

ordered_json config_json(const JointConfig& q) {
  return {{"theta1", q.theta1}, {"theta2", q.theta2}, {"theta3", q.theta3}};
}

template <typename T>
ordered_json optional_json(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json report_json(const ClassificationReport& r) {
  ordered_json j;
  j["cusp_count"] = optional_json(r.cusp_count);
  j["node_count"] = optional_json(r.node_count);
  j["domain"] = optional_json(r.domain);
  j["topology"] = r.topology ? ordered_json(fmt::format("WT{}", *r.topology)) : ordered_json(nullptr);
  j["cuspidal"] = r.cuspidal;
  j["four_iks"] = optional_json(r.four_iks);
  j["has_void"] = optional_json(r.has_void);
  j["generic"] = optional_json(r.generic);
  j["quadratic"] = r.quadratic;
  j["conditions"] = r.conditions;
  j["method"] = std::string(to_string(r.method));
  j["c1_variant"] = r.c1_variant;
  j["discrepancy"] = optional_json(r.discrepancy);
  return j;
}

ordered_json singular_json(const SingularAnalysis& a) {
  ordered_json cusps = ordered_json::array(), nodes = ordered_json::array();
  for (const CuspPoint& c : a.cusps.cusps) {
    cusps.push_back({{"rho", c.location.rho},
                     {"z", c.location.z},
                     {"theta2", c.source.theta2},
                     {"theta3", c.source.theta3},
                     {"residuals", c.residuals}});
  }
  for (const NodePoint& n : a.nodes.nodes) {
    nodes.push_back({{"rho", n.location.rho}, {"z", n.location.z}, {"crossing_sine", n.crossing_sine}});
  }
  ordered_json isolated = ordered_json::array();
  for (const auto& p : a.isolated_points) isolated.push_back(point_json(p));
  return {{"resolution", a.resolution},
          {"curves", a.curves.size()},
          {"aspects", a.aspects.count},
          {"cusp_count", a.cusps.cusps.size()},
          {"cusps", cusps},
          {"nonconvergent_cusps", a.cusps.nonconvergent.size()},
          {"node_count", a.nodes.nodes.size()},
          {"nodes", nodes},
          {"tangencies", a.nodes.tangencies.size()},
          {"isolated_points", isolated},
          {"generic", a.genericity.generic},
          {"min_gradient", a.genericity.min_gradient}};
}

void emit_singular_files(const Options& o, Emitter& e, const SingularAnalysis& a) {
  if (wants(o, "csv")) {
    e.write("curves.csv", curves_csv(a));
    e.write("cusps.csv", cusps_csv(a));
    e.write("nodes.csv", nodes_csv(a));
  }
}

std::vector<CrossSectionPoint> parse_polyline(const std::string& text) {
  std::vector<CrossSectionPoint> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    const auto comma = item.find(',');
    if (comma == std::string::npos) throw UsageError("polyline vertices are 'rho,z' separated by ';'");
    try {
      out.push_back({std::stod(item.substr(0, comma)), std::stod(item.substr(comma + 1))});
    } catch (const std::exception&) {
      throw UsageError(fmt::format("bad polyline vertex '{}'", item));
    }
  }
  if (out.empty()) throw UsageError("empty polyline");
  return out;
}

struct ScanRequest {
  double a2 = 0.0, lo = 0.0, hi = 0.0;
};

ScanRequest parse_scan(const std::vector<std::string>& scan) {
  ScanRequest r;
  bool has_a2 = false, has_a3 = false;
  for (const std::string& s : scan) {
    try {
      if (s.rfind("a2=", 0) == 0) {
        r.a2 = std::stod(s.substr(3));
        has_a2 = true;
      } else if (s.rfind("a3=", 0) == 0) {
        const auto colon = s.find(':');
        if (colon == std::string::npos) throw UsageError("");
        r.lo = std::stod(s.substr(3, colon - 3));
        r.hi = std::stod(s.substr(colon + 1));
        has_a3 = true;
      }
    } catch (const std::exception&) {
      throw UsageError(fmt::format("bad scan item '{}'", s));
    }
  }
  if (!has_a2 || !has_a3) throw UsageError("--scan needs a2=V a3=LO:HI");
  return r;
}

ClassifyMethod parse_method(const std::string& m) {
  if (m == "closed") return ClassifyMethod::ClosedForm;
  if (m == "numeric") return ClassifyMethod::Numeric;
  return ClassifyMethod::Both;
}

int run_scan(const Options& o, const ManipulatorModel& m, std::ostream& out, Emitter& e) {
  const ScanRequest s = parse_scan(o.scan);
  const double a1 = m.params().a1, d2 = m.params().d2;
  ScanOptions opt;
  opt.resolution = o.resolution;
  const auto boundaries = bifurcation_oracle(a1, d2, s.a2, s.lo, s.hi, opt);
  const std::string csv = scan_csv(a1, d2, s.a2, boundaries);
  out << csv;
  if (wants(o, "csv")) e.write("scan.csv", csv);
  if (wants(o, "svg")) {
    std::vector<std::pair<double, Bifurcation>> marks;
    for (const auto& b : boundaries) marks.emplace_back(s.a2, b);
    const double a2_max = std::max(4.0, 1.25 * s.a2);
    const double a3_max = std::max(4.0, 1.25 * s.hi);
    e.write("parameter_cusps.svg", parameter_space_svg(a1, d2, a2_max, a3_max, false, marks));
    e.write("parameter_topologies.svg", parameter_space_svg(a1, d2, a2_max, a3_max, true, marks));
  }
  return kSuccess;
}

int dispatch(const std::string& command, const Options& o, std::ostream& out) {
  const ManipulatorModel m = build_model(o.model);
  Emitter e(o);
  ordered_json j;
  j["model"] = params_json(m);

  if (command == "fk") {
    if (o.joints.size() != 3) throw UsageError("fk needs --joints T1 T2 T3");
    const JointConfig q{o.joints[0], o.joints[1], o.joints[2]};
    const WorkspacePoint p = forward(m, q);
    const CrossSectionPoint c = cross_section(p);
    j["position"] = {{"x", p.x}, {"y", p.y}, {"z", p.z}};
    j["cross_section"] = point_json(c);
    j["det_j"] = det_jacobian(m, q.theta2, q.theta3);
  } else if (command == "ik") {
    if (o.target.size() != 3) throw UsageError("ik needs --target X Y Z");
    const WorkspacePoint p{o.target[0], o.target[1], o.target[2]};
    const auto sols = solve_ik(m, p);
    ordered_json list = ordered_json::array();
    for (const IKSolution& s : sols) {
      ordered_json sj = config_json(s.config);
      sj["multiplicity"] = s.multiplicity;
      sj["residual"] = s.residual;
      sj["det_j"] = det_jacobian(m, s.config.theta2, s.config.theta3);
      sj["free_theta1"] = s.free_theta1;
      sj["free_theta2"] = s.free_theta2;
      list.push_back(sj);
    }
    j["count"] = sols.size();
    j["solutions"] = list;
  } else if (command == "singular") {
    const SingularAnalysis a = analyze_singularities(m, o.resolution);
    j["singular"] = singular_json(a);
    emit_singular_files(o, e, a);
    if (wants(o, "svg")) e.write("singular_curves.svg", joint_space_svg(a));
  } else if (command == "workspace") {
    const SingularAnalysis a = analyze_singularities(m, o.resolution);
    const WorkspaceRaster raster(m);
    j["singular"] = singular_json(a);
    j["max_ik"] = raster.max_count();
    j["has_void"] = raster_has_void(raster);
    emit_singular_files(o, e, a);
    if (wants(o, "svg")) e.write("workspace.svg", cross_section_svg(m, a, &raster));
  } else if (command == "aspects") {
    const SingularAnalysis a = analyze_singularities(m, o.resolution);
    j["aspects"] = a.aspects.count;
    std::vector<int> signs(a.aspects.signs.begin(), a.aspects.signs.end());
    j["signs"] = signs;
    if (wants(o, "svg")) e.write("aspects.svg", joint_space_svg(a));
  } else if (command == "classify") {
    if (!o.scan.empty()) return run_scan(o, m, out, e);
    j["report"] = report_json(classify(m, parse_method(o.method), o.resolution));
  } else if (command == "scan") {
    return run_scan(o, m, out, e);
  } else if (command == "feasible") {
    const FeasibilityAnalysis f = analyze_feasibility(m);
    ordered_json reduced = ordered_json::array(), domains = ordered_json::array(), regions = ordered_json::array();
    for (const ReducedAspect& r : f.reduced.reduced) {
      reduced.push_back({{"id", r.id}, {"aspect", r.aspect}, {"ik_count", r.ik_count}, {"nodes", r.nodes}});
    }
    for (const UniquenessDomain& d : f.domains) {
      domains.push_back({{"id", d.id}, {"aspect", d.aspect}, {"retained", d.retained}, {"deleted", d.deleted}});
    }
    for (const FeasibleRegion& r : f.regions) {
      regions.push_back({{"domain", r.domain}, {"cells", r.cell_count}, {"walls", r.walls.size()}});
    }
    ordered_json cs = ordered_json::array();
    for (const auto& pts : f.surfaces.per_aspect) cs.push_back(pts.size());
    j["aspects"] = f.reduced.aspects.count;
    j["characteristic_points"] = cs;
    j["reduced_aspects"] = reduced;
    j["uniqueness_domains"] = domains;
    j["feasible_regions"] = regions;
    j["fragmentation_warning"] = optional_json(f.reduced.fragmentation_warning);
    if (wants(o, "svg")) {
      e.write("characteristic_surfaces.svg", joint_space_svg(f.singular, &f.surfaces));
      e.write("reduced_aspects.svg", reduced_aspects_svg(f.reduced));
      for (const UniquenessDomain& d : f.domains)
        e.write(fmt::format("uniqueness_domain_{}.svg", d.id + 1), uniqueness_domain_svg(f.reduced, d));
      for (const FeasibleRegion& r : f.regions)
        e.write(fmt::format("feasible_region_{}.svg", r.domain + 1), feasible_region_svg(m, f.singular, f.raster, r));
    }
    if (wants(o, "obj")) {
      for (int a = 0; a < f.reduced.aspects.count; ++a)
        e.write(fmt::format("level_set_aspect_{}.obj", a + 1), mesh_obj(level_set_surface(m, f.reduced.aspects, a)));
    }
  } else if (command == "path") {
    if (!o.polyline.empty()) {
      const PathCheck c = check_path_feasibility(m, parse_polyline(o.polyline), o.branch);
      ordered_json configs = ordered_json::array();
      for (const auto& q : c.configs) configs.push_back(config_json(q));
      j["feasible"] = c.feasible;
      j["failed_vertex"] = c.feasible ? ordered_json(nullptr) : ordered_json(c.failed_vertex);
      j["configs"] = configs;
    } else {
      if (o.target.size() != 3 || o.pair.size() != 2) throw UsageError("path needs --target X Y Z and --pair I J");
      const SingularAnalysis a = analyze_singularities(m, o.resolution);
      const PostureChange c =
          plan_posture_change(m, {o.target[0], o.target[1], o.target[2]}, o.pair[0], o.pair[1], a.aspects, a.cusps.cusps);
      j["start"] = config_json(c.start);
      j["goal"] = config_json(c.goal);
      j["aspect"] = c.aspect;
      j["samples"] = c.path.size();
      j["min_det"] = c.min_det;
      j["enclosed_cusps"] = c.enclosed_cusps;
      j["winding"] = c.winding;
      if (wants(o, "csv")) e.write("posture_change.csv", path_csv(c));
      if (wants(o, "svg")) {
        const WorkspaceRaster raster(m);
        e.write("posture_change_joint.svg", joint_space_svg(a, nullptr, &c.path));
        e.write("posture_change_workspace.svg", cross_section_svg(m, a, &raster, &c.loop));
      }
    }
  } else if (command == "report") {
    const ClassificationReport r = classify(m, parse_method(o.method), o.resolution);
    j["report"] = report_json(r);
    const SingularAnalysis a = analyze_singularities(m, o.resolution);
    j["singular"] = singular_json(a);
    emit_singular_files(o, e, a);
    if (wants(o, "svg")) {
      const WorkspaceRaster raster(m);
      e.write("aspects.svg", joint_space_svg(a));
      e.write("workspace.svg", cross_section_svg(m, a, &raster));
    }
  }
  if (!e.files().empty()) j["files"] = e.files();
  out << j.dump(2) << '\n';
  return kSuccess;
}

void check_resolution(int n) {
  if (n < 64 || n > 8192 || (n & (n - 1)) != 0) {
    throw CLI::ValidationError("--resolution", "must be a power of two in [64, 8192]");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kinematic analysis of 3R positioning manipulators", "cuspidal"};
  app.require_subcommand(1, 1);
  Options o;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"fk", "forward kinematics at --joints"},
      {"ik", "inverse kinematics at --target"},
      {"singular", "singular curves, cusps and nodes"},
      {"workspace", "cross-section boundaries with cusps and nodes"},
      {"aspects", "aspects in joint space"},
      {"classify", "classification report (or --scan)"},
      {"scan", "bifurcation oracle along a3"},
      {"feasible", "reduced aspects, uniqueness domains, feasible regions"},
      {"path", "posture change (--target, --pair) or path check (--polyline)"},
      {"report", "classification report with plots"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto* file = sub->add_option("--model", o.model.file, "model JSON with a1 a2 a3 d2 d3 alpha1 alpha2");
    const std::pair<const char*, std::optional<double>*> fields[] = {
        {"--a1", &o.model.a1}, {"--a2", &o.model.a2},         {"--a3", &o.model.a3},        {"--d2", &o.model.d2},
        {"--d3", &o.model.d3}, {"--alpha1", &o.model.alpha1}, {"--alpha2", &o.model.alpha2}};
    for (const auto& [flag, field] : fields) {
      sub->add_option_function<double>(flag, [field = field](double v) { *field = v; }, "DH parameter")
          ->excludes(file);
    }
    sub->add_option("--resolution", o.resolution, "torus grid size N")->check([](const std::string& s) {
      try {
        check_resolution(std::stoi(s));
      } catch (const CLI::ValidationError&) {
        return std::string("must be a power of two in [64, 8192]");
      } catch (const std::exception&) {
        return std::string("not an integer");
      }
      return std::string();
    });
    sub->add_option("--out", o.out_dir, "output directory");
    sub->add_option("--format", o.formats, "json,csv,svg,obj")
        ->delimiter(',')
        ->check(CLI::IsMember({"json", "csv", "svg", "obj"}));
    sub->add_option("--method", o.method, "closed|numeric|both")->check(CLI::IsMember({"closed", "numeric", "both"}));
    sub->add_option("--target", o.target, "X Y Z")->expected(3);
    sub->add_option("--joints", o.joints, "T1 T2 T3 in radians")->expected(3);
    sub->add_option("--pair", o.pair, "solution indices I J (0-based, ik order)")->expected(2);
    sub->add_option("--scan", o.scan, "a2=V a3=LO:HI")->expected(2);
    sub->add_option("--polyline", o.polyline, "rho,z;rho,z;...");
    sub->add_option("--branch", o.branch, "starting solution index for --polyline");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kUsageError;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return dispatch(command, o, out);
  } catch (const UsageError& e) {
    err << e.what() << "\n\n" << app.get_subcommands().front()->help();
    return kUsageError;
  } catch (const AnalysisError& e) {
    ordered_json j = {{"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
    out << j.dump(2) << '\n';
    return kAnalysisFailure;
  }
}

}  // namespace cuspidal::cli
