#include "porosplit/case_file.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace porosplit {

using nlohmann::json;

CaseFileError::CaseFileError(std::string key, const std::string& message)
    : std::invalid_argument(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}

namespace {

constexpr const char* side_names[3][2] = {{"x-", "x+"}, {"y-", "y+"}, {"z-", "z+"}};

// Walks one JSON object, remembering which keys were read so the rest can be
// reported as unknown.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw CaseFileError(path_, "expected an object");
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  bool has(const std::string& k) {
    used_.insert(k);
    return node_.contains(k);
  }

  const json& at(const std::string& k) {
    if (!has(k)) throw CaseFileError(key(k), "missing required key");
    return node_.at(k);
  }

  double number(const std::string& k) { return as_number(at(k), key(k)); }

  double number(const std::string& k, double fallback) {
    return has(k) ? as_number(node_.at(k), key(k)) : fallback;
  }

  double positive(const std::string& k) {
    const double v = number(k);
    if (!(v > 0.0)) throw CaseFileError(key(k), "must be > 0");
    return v;
  }

  double non_negative(const std::string& k, double fallback) {
    const double v = number(k, fallback);
    if (!(v >= 0.0)) throw CaseFileError(key(k), "must be >= 0");
    return v;
  }

  int integer(const std::string& k) { return as_integer(at(k), key(k)); }

  int integer(const std::string& k, int fallback) {
    return has(k) ? as_integer(node_.at(k), key(k)) : fallback;
  }

  std::string string(const std::string& k) {
    const json& v = at(k);
    if (!v.is_string()) throw CaseFileError(key(k), "expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it)
      if (!used_.count(it.key())) throw CaseFileError(key(it.key()), "unknown key");
  }

  static double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw CaseFileError(where, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw CaseFileError(where, "must be finite");
    return d;
  }

  static int as_integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw CaseFileError(where, "expected an integer");
    return v.get<int>();
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> used_;
};

const json& array_at(Section& s, const std::string& k) {
  const json& v = s.at(k);
  if (!v.is_array()) throw CaseFileError(s.key(k), "expected an array");
  return v;
}

std::string item(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

std::vector<double> numbers(Section& s, const std::string& k, std::size_t lo, std::size_t hi) {
  const json& v = array_at(s, k);
  if (v.size() < lo || v.size() > hi) {
    throw CaseFileError(s.key(k), "expected " + std::to_string(lo) + " to " + std::to_string(hi) +
                                      " entries");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(Section::as_number(v[i], item(s.key(k), i)));
  return out;
}

Vec3 vec3(Section& s, const std::string& k, std::size_t lo) {
  const auto v = numbers(s, k, lo, 3);
  Vec3 out{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

std::pair<int, int> parse_side(Section& s, int dim) {
  const std::string name = s.string("side");
  for (int a = 0; a < dim; ++a)
    for (int side = 0; side < 2; ++side)
      if (name == side_names[a][side]) return {a, side};
  throw CaseFileError(s.key("side"), "unknown side '" + name + "'");
}

MaterialRegion parse_material(Section& m) {
  MaterialRegion mat;
  mat.poisson_ratio = m.number("nu");
  const bool has_e = m.has("E");
  const bool has_k = m.has("K");
  if (has_e == has_k) throw CaseFileError(m.key("E"), "give exactly one of E or K");
  if (has_e) {
    mat.young_modulus = m.positive("E");
  } else {
    const double k = m.positive("K");
    try {
      mat.young_modulus = young_from_bulk(k, mat.poisson_ratio);
    } catch (const std::exception& e) {
      throw CaseFileError(m.key("K"), e.what());
    }
  }
  mat.biot_coefficient = m.number("b", 1.0);
  mat.inv_biot_modulus = m.non_negative("invM", 0.0);
  mat.permeability = m.non_negative("k", 0.0);
  mat.viscosity = m.positive("mu");
  mat.solid_density = m.non_negative("rho_s", 0.0);
  mat.fluid_density = m.non_negative("rho_f", 0.0);
  mat.porosity = m.non_negative("phi", 0.0);
  m.finish();
  try {
    validate(mat);
  } catch (const std::exception& e) {
    throw CaseFileError(m.key(""), e.what());
  }
  return mat;
}

RegionSpec parse_region(const json& node, const std::string& path) {
  Section r(node, path);
  RegionSpec spec;
  spec.name = r.string("name");
  if (spec.name.empty()) throw CaseFileError(r.key("name"), "must not be empty");
  const bool box = r.has("box");
  const bool layers = r.has("layers");
  if (box && layers) throw CaseFileError(r.key("box"), "give at most one of box or layers");
  if (box) {
    Section b(node.at("box"), r.key("box"));
    spec.selector = RegionSpec::Selector::box;
    spec.box_lo = vec3(b, "lo", 2);
    spec.box_hi = vec3(b, "hi", 2);
    b.finish();
  } else if (layers) {
    Section l(node.at("layers"), r.key("layers"));
    spec.selector = RegionSpec::Selector::layers;
    spec.layer_axis = l.integer("axis");
    spec.layer_first = l.integer("first");
    spec.layer_last = l.integer("last");
    if (spec.layer_last < spec.layer_first) {
      throw CaseFileError(l.key("last"), "must be >= first");
    }
    l.finish();
  }
  Section m(r.at("material"), r.key("material"));
  spec.material = parse_material(m);
  r.finish();
  return spec;
}

RateFunction parse_rate(const json& v, const std::string& path) {
  if (v.is_number()) return RateFunction::constant(Section::as_number(v, path));
  if (v.is_string()) {
    try {
      return RateFunction::parse(v.get<std::string>());
    } catch (const std::exception& e) {
      throw CaseFileError(path, e.what());
    }
  }
  Section s(v, path);
  const RateFunction r =
      RateFunction::sine(s.number("scale"), s.number("omega"), s.number("phase", 0.0));
  s.finish();
  return r;
}

SolverConfig parse_solver(const json& node) {
  Section s(node, "solver");
  SolverConfig c;
  if (s.has("scheme")) {
    try {
      c.scheme = parse_scheme(s.string("scheme"));
    } catch (const CaseFileError&) {
      throw;
    } catch (const std::exception& e) {
      throw CaseFileError("solver.scheme", e.what());
    }
  }
  c.alpha = s.non_negative("alpha", c.alpha);
  c.rel_tol = s.number("rel_tol", c.rel_tol);
  if (!(c.rel_tol > 0.0)) throw CaseFileError("solver.rel_tol", "must be > 0");
  c.max_outer_iters = s.integer("max_outer", c.max_outer_iters);
  if (c.max_outer_iters < 1) throw CaseFileError("solver.max_outer", "must be >= 1");
  if (s.has("fixed_iters")) {
    c.fixed_iter_count = s.integer("fixed_iters");
    if (*c.fixed_iter_count < 1) throw CaseFileError("solver.fixed_iters", "must be >= 1");
  }
  c.linear_solver_tol = s.number("linear_tol", c.linear_solver_tol);
  if (!(c.linear_solver_tol > 0.0)) throw CaseFileError("solver.linear_tol", "must be > 0");
  s.finish();
  return c;
}

TimeStepping parse_time(const json& node) {
  Section s(node, "time");
  TimeStepping t;
  t.dt0 = s.positive("dt0");
  t.growth = s.number("growth", 1.0);
  if (!(t.growth >= 1.0)) throw CaseFileError("time.growth", "must be >= 1");
  if (s.has("dtmax")) t.dt_max = s.positive("dtmax");
  const bool steps = s.has("steps");
  const bool end = s.has("end");
  if (steps == end) throw CaseFileError("time.steps", "give exactly one of steps or end");
  if (steps) {
    t.steps = s.integer("steps");
    if (t.steps < 1) throw CaseFileError("time.steps", "must be >= 1");
  } else {
    t.steps = 0;
    t.end_time = s.positive("end");
  }
  s.finish();
  return t;
}

StabilizationSpec parse_stabilization(const json& node, const CaseSpec& spec) {
  Section s(node, "stabilization");
  StabilizationSpec st;
  st.c = s.non_negative("c", 1.0);
  if (s.has("regions")) {
    const json& r = node.at("regions");
    if (r.is_string()) {
      const std::string v = r.get<std::string>();
      if (v == "all") {
        st.scope = StabilizationSpec::Scope::all;
      } else if (v == "none") {
        st.scope = StabilizationSpec::Scope::none;
      } else {
        throw CaseFileError("stabilization.regions", "expected \"all\", \"none\" or a list");
      }
    } else if (r.is_array()) {
      st.scope = StabilizationSpec::Scope::named;
      for (std::size_t i = 0; i < r.size(); ++i) {
        const std::string where = item("stabilization.regions", i);
        if (!r[i].is_string()) throw CaseFileError(where, "expected a region name");
        const std::string name = r[i].get<std::string>();
        try {
          (void)spec.region_id(name);
        } catch (const std::exception& e) {
          throw CaseFileError(where, e.what());
        }
        st.regions.push_back(name);
      }
    } else {
      throw CaseFileError("stabilization.regions", "expected \"all\", \"none\" or a list");
    }
  }
  s.finish();
  return st;
}

}  // namespace

CaseSpec parse_case_text(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw CaseFileError("", std::string("syntax error: ") + e.what());
  }
  Section top(root, "");
  CaseSpec spec;
  spec.name = top.has("name") ? top.string("name") : std::string("case");

  Section grid(top.at("grid"), "grid");
  {
    const json& dims = array_at(grid, "dims");
    if (dims.size() < 2 || dims.size() > 3) throw CaseFileError("grid.dims", "expected 2 or 3 entries");
    for (std::size_t i = 0; i < dims.size(); ++i) {
      const int n = Section::as_integer(dims[i], item("grid.dims", i));
      if (n < 1) throw CaseFileError(item("grid.dims", i), "must be >= 1");
      spec.dims.push_back(n);
    }
    spec.extent = numbers(grid, "extent", spec.dims.size(), spec.dims.size());
    for (std::size_t i = 0; i < spec.extent.size(); ++i)
      if (!(spec.extent[i] > 0.0)) throw CaseFileError(item("grid.extent", i), "must be > 0");
    grid.finish();
  }
  const int dim = static_cast<int>(spec.dims.size());

  const json& regions = array_at(top, "regions");
  if (regions.empty()) throw CaseFileError("regions", "at least one region is required");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    RegionSpec r = parse_region(regions[i], item("regions", i));
    for (const RegionSpec& prev : spec.regions)
      if (prev.name == r.name) throw CaseFileError(item("regions", i) + ".name", "duplicate region");
    if (r.selector == RegionSpec::Selector::layers && (r.layer_axis < 0 || r.layer_axis >= dim)) {
      throw CaseFileError(item("regions", i) + ".layers.axis", "outside the grid");
    }
    spec.regions.push_back(std::move(r));
  }

  if (top.has("bc")) {
    Section bc(root.at("bc"), "bc");
    if (bc.has("mech")) {
      const json& mech = array_at(bc, "mech");
      for (std::size_t i = 0; i < mech.size(); ++i) {
        Section m(mech[i], item("bc.mech", i));
        MechBoundary b;
        std::tie(b.axis, b.side) = parse_side(m, dim);
        const std::string type = m.string("type");
        if (type == "roller") {
          b.kind = MechBoundary::Kind::roller;
        } else if (type == "fixed") {
          b.kind = MechBoundary::Kind::fixed;
        } else if (type == "traction") {
          b.kind = MechBoundary::Kind::traction;
          b.traction = vec3(m, "value", static_cast<std::size_t>(dim));
        } else {
          throw CaseFileError(m.key("type"), "unknown type '" + type + "'");
        }
        m.finish();
        spec.mech_bcs.push_back(b);
      }
    }
    if (bc.has("flow")) {
      const json& flow = array_at(bc, "flow");
      for (std::size_t i = 0; i < flow.size(); ++i) {
        Section f(flow[i], item("bc.flow", i));
        PressureBoundary b;
        std::tie(b.axis, b.side) = parse_side(f, dim);
        b.pressure = f.number("pressure");
        f.finish();
        spec.pressure_bcs.push_back(b);
      }
    }
    bc.finish();
  }

  if (top.has("sources")) {
    const json& sources = array_at(top, "sources");
    for (std::size_t i = 0; i < sources.size(); ++i) {
      Section s(sources[i], item("sources", i));
      SourceSpec src;
      src.at = vec3(s, "at", static_cast<std::size_t>(dim));
      src.rate = parse_rate(s.at("rate"), s.key("rate"));
      s.finish();
      spec.sources.push_back(src);
    }
  }
  if (top.has("gravity")) spec.gravity = vec3(top, "gravity", static_cast<std::size_t>(dim));
  spec.time = parse_time(top.at("time"));
  if (top.has("solver")) spec.solver = parse_solver(root.at("solver"));
  if (top.has("stabilization")) spec.stabilization = parse_stabilization(root.at("stabilization"), spec);
  top.finish();

  try {
    (void)build_model(spec);
  } catch (const std::exception& e) {
    throw CaseFileError("", e.what());
  }
  return spec;
}

CaseSpec parse_case(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CaseFileError("", "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_case_text(buf.str());
}

namespace {

json vec_json(const Vec3& v, int dim) {
  json a = json::array();
  for (int i = 0; i < dim; ++i) a.push_back(v[static_cast<std::size_t>(i)]);
  return a;
}

json rate_json(const RateFunction& r) {
  if (r.kind == RateFunction::Kind::constant) return r.scale;
  return json{{"scale", r.scale}, {"omega", r.omega}, {"phase", r.phase}};
}

}  // namespace

std::string write_case(const CaseSpec& spec) {
  const int dim = static_cast<int>(spec.dims.size());
  json root = json::object();
  root["name"] = spec.name;
  root["grid"] = {{"dims", spec.dims}, {"extent", spec.extent}};

  json regions = json::array();
  for (const RegionSpec& r : spec.regions) {
    json j = {{"name", r.name}};
    if (r.selector == RegionSpec::Selector::box) {
      j["box"] = {{"lo", vec_json(r.box_lo, dim)}, {"hi", vec_json(r.box_hi, dim)}};
    } else if (r.selector == RegionSpec::Selector::layers) {
      j["layers"] = {{"axis", r.layer_axis}, {"first", r.layer_first}, {"last", r.layer_last}};
    }
    const MaterialRegion& m = r.material;
    j["material"] = {{"E", m.young_modulus},       {"nu", m.poisson_ratio},
                     {"b", m.biot_coefficient},    {"invM", m.inv_biot_modulus},
                     {"k", m.permeability},        {"mu", m.viscosity},
                     {"rho_s", m.solid_density},   {"rho_f", m.fluid_density},
                     {"phi", m.porosity}};
    regions.push_back(j);
  }
  root["regions"] = regions;

  json mech = json::array();
  for (const MechBoundary& b : spec.mech_bcs) {
    json j = {{"side", side_names[b.axis][b.side]}};
    switch (b.kind) {
      case MechBoundary::Kind::roller: j["type"] = "roller"; break;
      case MechBoundary::Kind::fixed: j["type"] = "fixed"; break;
      case MechBoundary::Kind::traction:
        j["type"] = "traction";
        j["value"] = vec_json(b.traction, dim);
        break;
    }
    mech.push_back(j);
  }
  json flow = json::array();
  for (const PressureBoundary& b : spec.pressure_bcs)
    flow.push_back({{"side", side_names[b.axis][b.side]}, {"pressure", b.pressure}});
  root["bc"] = {{"mech", mech}, {"flow", flow}};

  json sources = json::array();
  for (const SourceSpec& s : spec.sources)
    sources.push_back({{"at", vec_json(s.at, dim)}, {"rate", rate_json(s.rate)}});
  root["sources"] = sources;
  root["gravity"] = vec_json(spec.gravity, dim);

  json time = {{"dt0", spec.time.dt0}, {"growth", spec.time.growth}};
  if (std::isfinite(spec.time.dt_max)) time["dtmax"] = spec.time.dt_max;
  if (spec.time.steps > 0) {
    time["steps"] = spec.time.steps;
  } else {
    time["end"] = spec.time.end_time;
  }
  root["time"] = time;

  json solver = {{"scheme", to_string(spec.solver.scheme)},
                 {"alpha", spec.solver.alpha},
                 {"rel_tol", spec.solver.rel_tol},
                 {"max_outer", spec.solver.max_outer_iters},
                 {"linear_tol", spec.solver.linear_solver_tol}};
  if (spec.solver.fixed_iter_count) solver["fixed_iters"] = *spec.solver.fixed_iter_count;
  root["solver"] = solver;

  json stab = {{"c", spec.stabilization.c}};
  switch (spec.stabilization.scope) {
    case StabilizationSpec::Scope::none: stab["regions"] = "none"; break;
    case StabilizationSpec::Scope::all: stab["regions"] = "all"; break;
    case StabilizationSpec::Scope::named: stab["regions"] = spec.stabilization.regions; break;
  }
  root["stabilization"] = stab;
  return root.dump(2) + "\n";
}

}  // namespace porosplit
