#include <doctest.h>

#include "wentzell/config.hpp"

using namespace wentzell;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "domain": {"shape": "rectangle", "size": [1.0, 2.0], "resolution": [8, 16]},
    "params": {"nu": 0.5, "lambda": 3.0, "b": 2.0}
  })");
}

std::string failing_field(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

}  // namespace

TEST_CASE("minimal config gets documented defaults") {
  const ExperimentConfig c = parse_config(minimal());
  CHECK(c.domain.shape == Shape::Rectangle);
  CHECK(c.domain.resolution == std::vector<int>{8, 16});
  CHECK(c.params.nu == 0.5);
  CHECK(c.params.g == 0.0);
  CHECK(c.nonlinearity.name == "cubic");
  CHECK(c.spectral.modes == 40);
  CHECK(c.dimension.background == "equilibrium");
  CHECK(c.seed == 1);
  CHECK(c.domain.mesh().node_count() == 9 * 17);
}

TEST_CASE("errors name the offending field") {
  json doc = minimal();
  doc["params"].erase("nu");
  CHECK(failing_field(doc) == "params.nu");

  doc = minimal();
  doc["domain"]["colour"] = "red";
  CHECK(failing_field(doc) == "domain.colour");

  doc = minimal();
  doc["params"]["nu"] = "fast";
  CHECK(failing_field(doc) == "params.nu");

  doc = minimal();
  doc["domain"]["resolution"] = {2, 8};
  CHECK(failing_field(doc) == "domain.resolution");

  doc = minimal();
  doc["domain"]["size"] = {1.0};
  CHECK(failing_field(doc) == "domain.size");

  doc = minimal();
  doc["nonlinearity"] = {{"name", "sine"}};
  CHECK(failing_field(doc) == "nonlinearity.name");

  doc = minimal();
  doc["dimension"] = {{"background", "chaos"}};
  CHECK(failing_field(doc) == "dimension.background");

  doc = minimal();
  doc["extra"] = 1;
  CHECK(failing_field(doc) == "extra");

  doc = minimal();
  doc["seed"] = -4;
  CHECK(failing_field(doc) == "seed");
}

TEST_CASE("canonical form round-trips") {
  json doc = minimal();
  doc["nonlinearity"] = {{"name", "polynomial"}, {"coefficients", {0.0, -1.0, 0.0, 1.0}},
                         {"c_f", 1.0}, {"p", 4.0}, {"eta1", 0.5}, {"eta2", 1.5}, {"C_f", 0.5}};
  doc["sweep"] = {{"lambda", {1.0, 2.0}}};
  doc["spectral"] = {{"modes", 30}, {"fit_window", {4, 18}}};
  const ExperimentConfig a = parse_config(doc);
  const json canon = to_json(a);
  const ExperimentConfig b = parse_config(canon);
  CHECK(to_json(b) == canon);
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  CHECK(b.spectral.window->hi == 18);
  CHECK(b.sweep.lambda->size() == 2);

  ExperimentConfig c = a;
  c.params.lambda = 4.0;
  CHECK(config_hash(c) != config_hash(a));
}

TEST_CASE("printed defaults parse") {
  const ExperimentConfig c = parse_config(default_config_json());
  CHECK(c.domain.shape == Shape::Interval);
  CHECK(to_json(parse_config(to_json(c))) == to_json(c));
}

TEST_CASE("box domains carry no mesh") {
  json doc = minimal();
  doc["domain"] = {{"shape", "box"}, {"size", {1.0, 1.0, 1.0}}};
  const ExperimentConfig c = parse_config(doc);
  CHECK(c.domain.domain().dimension() == 3);
  CHECK_THROWS_AS(c.domain.mesh(), ConfigError);
  doc["domain"]["resolution"] = {4, 4, 4};
  CHECK(failing_field(doc) == "domain.resolution");
}

TEST_CASE("initial data kinds") {
  const Mesh m = build_interval_mesh(1.0, 8);
  InitialConfig i;
  i.kind = "constant";
  i.amplitude = 2.0;
  i.offset = 0.5;
  CHECK(i.build(m, 1).isConstant(2.5));
  i.kind = "cosine";
  CHECK(i.build(m, 1)[0] == doctest::Approx(2.5));
  CHECK(i.build(m, 1)[8] == doctest::Approx(-1.5));
  i.kind = "random";
  CHECK(i.build(m, 7) == i.build(m, 7));
  CHECK(i.build(m, 7) != i.build(m, 8));
}
