#include "wentzell/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "wentzell/errors.hpp"
#include "wentzell/io.hpp"
#include "wentzell/linalg.hpp"

namespace wentzell {

using nlohmann::json;

namespace {

/// Typed, path-aware access to one JSON object.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return node_.contains(key); }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [key, value] : node_.items()) {
      if (!ok.count(key)) throw ConfigError(at(key), "unknown key");
    }
  }

  void require(const std::string& key) const {
    if (!has(key)) throw ConfigError(at(key), "required field is missing");
  }

  Section child(const std::string& key) const { return Section(node_.at(key), at(key)); }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number()) throw ConfigError(at(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(at(key), "must be finite");
    return x;
  }

  long long integer(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_integer()) throw ConfigError(at(key), "expected an integer");
    return v.get<long long>();
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_boolean()) throw ConfigError(at(key), "expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback,
                   std::initializer_list<const char*> choices) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_string()) throw ConfigError(at(key), "expected a string");
    const std::string s = v.get<std::string>();
    for (const char* c : choices) {
      if (s == c) return s;
    }
    std::string list;
    for (const char* c : choices) list += std::string(list.empty() ? "" : ", ") + c;
    throw ConfigError(at(key), "must be one of: " + list);
  }

  std::vector<double> numbers(const std::string& key) const {
    const json& v = node_.at(key);
    if (!v.is_array()) throw ConfigError(at(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(at(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  std::vector<long long> integers(const std::string& key) const {
    const json& v = node_.at(key);
    if (!v.is_array()) throw ConfigError(at(key), "expected an array of integers");
    std::vector<long long> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer()) {
        throw ConfigError(at(key) + "[" + std::to_string(i) + "]", "expected an integer");
      }
      out.push_back(v[i].get<long long>());
    }
    return out;
  }

 private:
  const json& node_;
  std::string path_;
};

void check(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

const char* shape_name(Shape s) {
  switch (s) {
    case Shape::Interval: return "interval";
    case Shape::Rectangle: return "rectangle";
    case Shape::Box: return "box";
  }
  return "interval";
}

DomainConfig parse_domain(const Section& s) {
  s.allow({"shape", "size", "resolution", "mass"});
  s.require("shape");
  s.require("size");
  DomainConfig d;
  const std::string shape = s.text("shape", "interval", {"interval", "rectangle", "box"});
  d.shape = shape == "interval" ? Shape::Interval : shape == "rectangle" ? Shape::Rectangle : Shape::Box;
  const std::size_t dims = d.shape == Shape::Interval ? 1 : d.shape == Shape::Rectangle ? 2 : 3;

  d.size = s.numbers("size");
  check(d.size.size() == dims, s.at("size"), "expected " + std::to_string(dims) + " extents for " + shape);
  for (double x : d.size) check(x > 0.0 && std::isfinite(x), s.at("size"), "extents must be positive");

  if (d.shape == Shape::Box) {
    d.resolution.assign(3, 0);
    check(!s.has("resolution"), s.at("resolution"), "box domains have no mesh; omit resolution");
  } else {
    s.require("resolution");
    const auto res = s.integers("resolution");
    check(res.size() == dims, s.at("resolution"), "expected " + std::to_string(dims) + " cell counts");
    d.resolution.clear();
    for (long long r : res) {
      check(r >= 4 && r <= 4096, s.at("resolution"), "cell counts must lie in [4, 4096]");
      d.resolution.push_back(static_cast<int>(r));
    }
  }
  d.mass = s.text("mass", "consistent", {"consistent", "lumped"}) == "lumped" ? BulkMass::Lumped
                                                                             : BulkMass::Consistent;
  return d;
}

ProblemParams parse_params(const Section& s) {
  s.allow({"nu", "lambda", "b", "g"});
  s.require("nu");
  s.require("lambda");
  s.require("b");
  ProblemParams p;
  p.nu = s.number("nu", 1.0);
  p.lambda = s.number("lambda", 0.0);
  p.b = s.number("b", 1.0);
  p.g = s.number("g", 0.0);
  check(p.nu > 0.0, s.at("nu"), "must be positive");
  check(p.b > 0.0, s.at("b"), "must be positive");
  return p;
}

NonlinearityConfig parse_nonlinearity(const Section& s) {
  s.allow({"name", "coefficients", "c_f", "p", "eta1", "eta2", "C_f"});
  NonlinearityConfig n;
  n.name = s.text("name", "cubic", {"cubic", "quintic", "none", "polynomial"});
  if (n.name != "polynomial") {
    for (const char* key : {"coefficients", "c_f", "p", "eta1", "eta2", "C_f"}) {
      check(!s.has(key), s.at(key), "only used with name = polynomial");
    }
    return n;
  }
  s.require("coefficients");
  n.coefficients = s.numbers("coefficients");
  n.growth.c_f = s.number("c_f", 0.0);
  n.growth.p = s.number("p", 4.0);
  n.growth.eta1 = s.number("eta1", 1.0);
  n.growth.eta2 = s.number("eta2", 1.0);
  n.growth.C_f = s.number("C_f", 0.0);
  try {
    n.build();
  } catch (const InvalidArgument& e) {
    throw ConfigError(s.at("coefficients"), e.what());
  }
  return n;
}

SpectralConfig parse_spectral(const Section& s) {
  s.allow({"modes", "fit_window", "lt_m", "tolerance"});
  SpectralConfig c;
  c.modes = s.integer("modes", c.modes);
  check(c.modes >= 2, s.at("modes"), "must be at least 2");
  if (s.has("fit_window")) {
    const auto w = s.integers("fit_window");
    check(w.size() == 2 && w[0] >= 1 && w[1] >= w[0] + 7 && w[1] < c.modes, s.at("fit_window"),
          "expected [lo, hi] with 1 <= lo, hi - lo >= 7, hi < modes");
    c.window = IndexWindow{w[0], w[1]};
  }
  if (s.has("lt_m")) {
    for (long long m : s.integers("lt_m")) {
      check(m >= 1 && m <= c.modes, s.at("lt_m"), "entries must lie in [1, modes]");
      c.lt_m.push_back(m);
    }
  }
  c.tolerance = s.number("tolerance", c.tolerance);
  check(c.tolerance > 0.0 && c.tolerance < 1e-2, s.at("tolerance"), "must lie in (0, 1e-2)");
  return c;
}

DynamicsConfig parse_dynamics(const Section& s) {
  s.allow({"tau", "T", "sample_every", "adaptive", "initial"});
  DynamicsConfig d;
  d.tau = s.number("tau", d.tau);
  d.T = s.number("T", d.T);
  d.sample_every = static_cast<int>(s.integer("sample_every", d.sample_every));
  d.adaptive = s.boolean("adaptive", d.adaptive);
  check(d.tau > 0.0, s.at("tau"), "must be positive");
  check(d.T > 0.0, s.at("T"), "must be positive");
  check(d.T / d.tau <= 1e8, s.at("T"), "more than 1e8 steps requested");
  check(d.sample_every >= 1, s.at("sample_every"), "must be >= 1");
  if (s.has("initial")) {
    const Section i = s.child("initial");
    i.allow({"kind", "amplitude", "offset"});
    d.initial.kind = i.text("kind", d.initial.kind, {"constant", "cosine", "random"});
    d.initial.amplitude = i.number("amplitude", d.initial.amplitude);
    d.initial.offset = i.number("offset", d.initial.offset);
  }
  return d;
}

DimensionConfig parse_dimension(const Section& s) {
  s.allow({"modes", "reorth_period", "T", "tau", "background", "transient_fraction"});
  DimensionConfig d;
  d.modes = s.integer("modes", d.modes);
  d.reorth_period = static_cast<int>(s.integer("reorth_period", d.reorth_period));
  d.T = s.number("T", d.T);
  d.tau = s.number("tau", d.tau);
  d.background = s.text("background", d.background, {"equilibrium", "trajectory"});
  d.transient_fraction = s.number("transient_fraction", d.transient_fraction);
  check(d.modes >= 1, s.at("modes"), "must be >= 1");
  check(d.reorth_period >= 1, s.at("reorth_period"), "must be >= 1");
  check(d.T > 0.0, s.at("T"), "must be positive");
  check(d.tau > 0.0, s.at("tau"), "must be positive");
  check(d.T / d.tau <= 1e8, s.at("T"), "more than 1e8 steps requested");
  check(d.transient_fraction >= 0.0 && d.transient_fraction < 1.0, s.at("transient_fraction"),
        "must lie in [0, 1)");
  return d;
}

BoundsConfig parse_bounds(const Section& s) {
  s.allow({"prefactors", "scaling_sizes"});
  BoundsConfig b;
  if (s.has("prefactors")) {
    const Section p = s.child("prefactors");
    p.allow({"static_lower", "static_upper", "wentzell_lower", "wentzell_upper", "surface_lower",
             "surface_upper"});
    auto& f = b.prefactors;
    f.static_lower = p.number("static_lower", 1.0);
    f.static_upper = p.number("static_upper", 1.0);
    f.wentzell_lower = p.number("wentzell_lower", 1.0);
    f.wentzell_upper = p.number("wentzell_upper", 1.0);
    f.surface_lower = p.number("surface_lower", 1.0);
    f.surface_upper = p.number("surface_upper", 1.0);
    for (double x : {f.static_lower, f.static_upper, f.wentzell_lower, f.wentzell_upper,
                     f.surface_lower, f.surface_upper}) {
      check(x > 0.0, s.at("prefactors"), "prefactors must be positive");
    }
  }
  if (s.has("scaling_sizes")) {
    b.scaling_sizes = s.numbers("scaling_sizes");
    for (double x : b.scaling_sizes) check(x > 0.0, s.at("scaling_sizes"), "sizes must be positive");
  }
  return b;
}

SweepConfig parse_sweep(const Section& s) {
  s.allow({"nu", "lambda", "b", "size"});
  SweepConfig w;
  auto axis = [&](const char* key, bool positive) -> std::optional<std::vector<double>> {
    if (!s.has(key)) return std::nullopt;
    auto v = s.numbers(key);
    for (double x : v) {
      check(std::isfinite(x) && (!positive || x > 0.0), s.at(key), positive ? "values must be positive" : "values must be finite");
    }
    return v;
  };
  w.nu = axis("nu", true);
  w.lambda = axis("lambda", false);
  w.b = axis("b", true);
  w.size = axis("size", true);
  return w;
}

json axis_json(const std::optional<std::vector<double>>& axis) {
  return axis ? json(*axis) : json(nullptr);
}

}  // namespace

Domain DomainConfig::domain() const {
  switch (shape) {
    case Shape::Interval: return Domain::interval(size.at(0));
    case Shape::Rectangle: return Domain::rectangle(size.at(0), size.at(1));
    case Shape::Box: return Domain::box(size.at(0), size.at(1), size.at(2));
  }
  throw ConfigError("domain.shape", "unsupported shape");
}

Mesh DomainConfig::mesh() const {
  switch (shape) {
    case Shape::Interval: return build_interval_mesh(size.at(0), resolution.at(0));
    case Shape::Rectangle:
      return build_rectangle_mesh(size.at(0), size.at(1), resolution.at(0), resolution.at(1));
    case Shape::Box: break;
  }
  throw ConfigError("domain.shape", "box domains are supported by the bounds command only");
}

DomainConfig DomainConfig::scaled(double factor) const {
  DomainConfig d = *this;
  for (double& x : d.size) x *= factor;
  return d;
}

Nonlinearity NonlinearityConfig::build() const {
  if (name == "cubic") return Nonlinearity::cubic();
  if (name == "quintic") return Nonlinearity::quintic();
  if (name == "none") return Nonlinearity::none();
  return Nonlinearity::polynomial(coefficients, growth);
}

Eigen::VectorXd InitialConfig::build(const Mesh& mesh, std::uint64_t seed) const {
  const auto& ext = mesh.domain().extents();
  if (kind == "constant") return Eigen::VectorXd::Constant(mesh.node_count(), offset + amplitude);
  if (kind == "cosine") {
    const bool two_d = mesh.dimension() == 2;
    return interpolate(mesh, [&](double x, double y) {
      double v = std::cos(std::numbers::pi * x / ext[0]);
      if (two_d) v *= std::cos(std::numbers::pi * y / ext[1]);
      return offset + amplitude * v;
    });
  }
  CounterRng rng(seed, 0x696e697469616cULL);
  Eigen::VectorXd out(mesh.node_count());
  for (Index i = 0; i < out.size(); ++i) out[i] = offset + amplitude * rng.normal();
  return out;
}

ExperimentConfig parse_config(const json& doc) {
  const Section root(doc, "");
  root.allow({"domain", "params", "nonlinearity", "spectral", "dynamics", "dimension", "bounds",
              "sweep", "output", "seed"});
  root.require("domain");
  root.require("params");

  ExperimentConfig c;
  c.domain = parse_domain(root.child("domain"));
  c.params = parse_params(root.child("params"));
  if (root.has("nonlinearity")) c.nonlinearity = parse_nonlinearity(root.child("nonlinearity"));
  if (root.has("spectral")) c.spectral = parse_spectral(root.child("spectral"));
  if (root.has("dynamics")) c.dynamics = parse_dynamics(root.child("dynamics"));
  if (root.has("dimension")) c.dimension = parse_dimension(root.child("dimension"));
  if (root.has("bounds")) c.bounds = parse_bounds(root.child("bounds"));
  if (root.has("sweep")) c.sweep = parse_sweep(root.child("sweep"));
  if (root.has("output")) {
    const Section o = root.child("output");
    o.allow({"mesh", "matrices", "snapshot"});
    c.output.mesh = o.boolean("mesh", false);
    c.output.matrices = o.boolean("matrices", false);
    c.output.snapshot = o.boolean("snapshot", false);
  }
  if (root.has("seed")) {
    const json& s = doc.at("seed");
    check(s.is_number_unsigned() || (s.is_number_integer() && s.get<long long>() >= 0), "seed",
          "expected a nonnegative integer");
    c.seed = s.get<std::uint64_t>();
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const std::exception& e) {
    throw ConfigError("", e.what());
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["domain"] = {{"shape", shape_name(c.domain.shape)},
                 {"size", c.domain.size},
                 {"mass", c.domain.mass == BulkMass::Lumped ? "lumped" : "consistent"}};
  if (c.domain.shape != Shape::Box) j["domain"]["resolution"] = c.domain.resolution;
  j["params"] = {{"nu", c.params.nu}, {"lambda", c.params.lambda}, {"b", c.params.b}, {"g", c.params.g}};
  j["nonlinearity"] = {{"name", c.nonlinearity.name}};
  if (c.nonlinearity.name == "polynomial") {
    const auto& g = c.nonlinearity.growth;
    j["nonlinearity"]["coefficients"] = c.nonlinearity.coefficients;
    j["nonlinearity"]["c_f"] = g.c_f;
    j["nonlinearity"]["p"] = g.p;
    j["nonlinearity"]["eta1"] = g.eta1;
    j["nonlinearity"]["eta2"] = g.eta2;
    j["nonlinearity"]["C_f"] = g.C_f;
  }
  j["spectral"] = {{"modes", c.spectral.modes}, {"tolerance", c.spectral.tolerance}, {"lt_m", c.spectral.lt_m}};
  if (c.spectral.window) j["spectral"]["fit_window"] = {c.spectral.window->lo, c.spectral.window->hi};
  j["dynamics"] = {{"tau", c.dynamics.tau},
                   {"T", c.dynamics.T},
                   {"sample_every", c.dynamics.sample_every},
                   {"adaptive", c.dynamics.adaptive},
                   {"initial",
                    {{"kind", c.dynamics.initial.kind},
                     {"amplitude", c.dynamics.initial.amplitude},
                     {"offset", c.dynamics.initial.offset}}}};
  j["dimension"] = {{"modes", c.dimension.modes},
                    {"reorth_period", c.dimension.reorth_period},
                    {"T", c.dimension.T},
                    {"tau", c.dimension.tau},
                    {"background", c.dimension.background},
                    {"transient_fraction", c.dimension.transient_fraction}};
  const auto& f = c.bounds.prefactors;
  j["bounds"] = {{"prefactors",
                  {{"static_lower", f.static_lower},
                   {"static_upper", f.static_upper},
                   {"wentzell_lower", f.wentzell_lower},
                   {"wentzell_upper", f.wentzell_upper},
                   {"surface_lower", f.surface_lower},
                   {"surface_upper", f.surface_upper}}},
                 {"scaling_sizes", c.bounds.scaling_sizes}};
  j["sweep"] = json::object();
  for (auto [key, axis] : {std::pair{"nu", &c.sweep.nu}, std::pair{"lambda", &c.sweep.lambda},
                           std::pair{"b", &c.sweep.b}, std::pair{"size", &c.sweep.size}}) {
    if (*axis) j["sweep"][key] = axis_json(*axis);
  }
  j["output"] = {{"mesh", c.output.mesh}, {"matrices", c.output.matrices}, {"snapshot", c.output.snapshot}};
  j["seed"] = c.seed;
  return j;
}

std::string config_hash(const ExperimentConfig& config) {
  return to_hex(fnv1a64(to_json(config).dump()));
}

json default_config_json() {
  ExperimentConfig c;
  c.domain.shape = Shape::Interval;
  c.domain.size = {1.0};
  c.domain.resolution = {64};
  c.params.nu = 1.0;
  c.params.lambda = 1.0;
  c.params.b = 1.0;
  return to_json(c);
}

}  // namespace wentzell
