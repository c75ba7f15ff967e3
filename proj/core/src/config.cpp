#include "nld/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "nld/errors.hpp"
#include "nld/expression.hpp"

namespace nld {

namespace {

int line_of(const YAML::Node& node) {
  const auto mark = node.Mark();
  return mark.line < 0 ? 0 : mark.line + 1;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

[[noreturn]] void fail(const std::string& key, const YAML::Node& node, const std::string& msg) {
  throw ConfigError(key, line_of(node), msg);
}

void require_map(const YAML::Node& node, const std::string& key) {
  if (!node.IsMap()) fail(key, node, "expected a mapping");
}

void allow_keys(const YAML::Node& node, const std::string& path,
                std::initializer_list<std::string_view> allowed) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(join(path, key), kv.first, "unknown key");
    }
  }
}

double get_double(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(key, node, "expected a number");
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    fail(key, node, fmt::format("'{}' is not a number", node.Scalar()));
  }
}

double get_positive(const YAML::Node& node, const std::string& key) {
  const double v = get_double(node, key);
  if (!(v > 0.0) || !std::isfinite(v)) fail(key, node, "must be positive and finite");
  return v;
}

std::string get_string(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(key, node, "expected a string");
  return node.Scalar();
}

bool get_bool(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(key, node, "expected true or false");
  try {
    return node.as<bool>();
  } catch (const YAML::Exception&) {
    fail(key, node, fmt::format("'{}' is not a boolean", node.Scalar()));
  }
}

std::uint64_t get_u64(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(key, node, "expected a non-negative integer");
  try {
    return node.as<std::uint64_t>();
  } catch (const YAML::Exception&) {
    fail(key, node, fmt::format("'{}' is not a non-negative integer", node.Scalar()));
  }
}

std::size_t get_count(const YAML::Node& node, const std::string& key, std::size_t minimum) {
  const auto v = get_u64(node, key);
  if (v < minimum) fail(key, node, fmt::format("must be at least {}", minimum));
  return static_cast<std::size_t>(v);
}

DomainSpec parse_domain(const YAML::Node& node, const std::string& path) {
  require_map(node, path);
  allow_keys(node, path, {"type", "lo", "hi", "circumference", "half_width"});
  if (!node["type"]) fail(join(path, "type"), node, "missing");
  const auto type = get_string(node["type"], join(path, "type"));
  DomainSpec domain;
  if (type == "interval") {
    if (!node["lo"] || !node["hi"]) fail(path, node, "interval needs lo and hi");
    domain = Interval{get_double(node["lo"], join(path, "lo")),
                      get_double(node["hi"], join(path, "hi"))};
  } else if (type == "circle") {
    Circle c;
    if (node["circumference"]) {
      c.circumference = get_positive(node["circumference"], join(path, "circumference"));
    }
    domain = c;
  } else if (type == "truncated_line") {
    TruncatedLine t;
    if (node["half_width"]) t.half_width = get_positive(node["half_width"], join(path, "half_width"));
    domain = t;
  } else {
    fail(join(path, "type"), node["type"], fmt::format("unknown domain type '{}'", type));
  }
  try {
    validate_domain(domain);
  } catch (const Error& e) {
    fail(path, node, e.what());
  }
  return domain;
}

LowerBoundMeta parse_lower_bound(const YAML::Node& node, const std::string& path) {
  require_map(node, path);
  allow_keys(node, path, {"epsilon", "delta", "region", "center", "lo", "hi"});
  LowerBoundMeta meta;
  if (!node["epsilon"] || !node["delta"]) fail(path, node, "needs epsilon and delta");
  meta.epsilon = get_positive(node["epsilon"], join(path, "epsilon"));
  meta.delta = get_positive(node["delta"], join(path, "delta"));
  const std::string region = node["region"] ? get_string(node["region"], join(path, "region"))
                                            : std::string("square");
  const double center = node["center"] ? get_double(node["center"], join(path, "center")) : 0.0;
  if (region == "square") {
    meta.region = SquareRegion{center};
  } else if (region == "band") {
    meta.region = BandRegion{};
  } else if (region == "integral") {
    if (!node["lo"] || !node["hi"]) fail(path, node, "integral region needs lo and hi");
    meta.region = IntegralRegion{get_double(node["lo"], join(path, "lo")),
                                 get_double(node["hi"], join(path, "hi")), center};
  } else {
    fail(join(path, "region"), node["region"], fmt::format("unknown region '{}'", region));
  }
  return meta;
}

Regularity parse_regularity(const YAML::Node& node, const std::string& path) {
  require_map(node, path);
  allow_keys(node, path, {"lipschitz", "hoelder"});
  if (node["lipschitz"]) {
    return Lipschitz{get_positive(node["lipschitz"], join(path, "lipschitz"))};
  }
  if (node["hoelder"]) {
    const auto h = node["hoelder"];
    const auto hp = join(path, "hoelder");
    require_map(h, hp);
    allow_keys(h, hp, {"alpha", "coefficient"});
    if (!h["alpha"] || !h["coefficient"]) fail(hp, h, "needs alpha and coefficient");
    const double alpha = get_positive(h["alpha"], join(hp, "alpha"));
    if (alpha >= 1.0) fail(join(hp, "alpha"), h["alpha"], "must lie in (0, 1)");
    return Hoelder{alpha, get_positive(h["coefficient"], join(hp, "coefficient"))};
  }
  fail(path, node, "expected lipschitz or hoelder");
}

Expression compile(const YAML::Node& node, const std::string& key) {
  const auto text = get_string(node, key);
  try {
    return Expression::parse(text);
  } catch (const Error& e) {
    fail(key, node, e.what());
  }
}

InlineModel parse_inline(const YAML::Node& node) {
  const std::string path = "model";
  allow_keys(node, path, {"name", "kernel_expr", "a_expr", "domain", "declared", "expected"});
  InlineModel m;
  for (const char* key : {"kernel_expr", "a_expr", "domain", "declared"}) {
    if (!node[key]) fail(join(path, key), node, "missing");
  }
  m.name = node["name"] ? get_string(node["name"], "model.name") : std::string("inline");
  compile(node["kernel_expr"], "model.kernel_expr");
  const auto a = compile(node["a_expr"], "model.a_expr");
  if (a.uses_y()) fail("model.a_expr", node["a_expr"], "the death rate depends on x only");
  m.kernel_expr = node["kernel_expr"].Scalar();
  m.a_expr = node["a_expr"].Scalar();
  m.domain = parse_domain(node["domain"], "model.domain");

  const auto d = node["declared"];
  const std::string dp = "model.declared";
  require_map(d, dp);
  allow_keys(d, dp, {"symmetric", "inf_a", "sup_a", "inf_location", "lower_bound", "regularity"});
  if (!d["inf_a"] || !d["sup_a"]) fail(dp, d, "needs inf_a and sup_a");
  m.inf_a = get_positive(d["inf_a"], join(dp, "inf_a"));
  m.sup_a = get_double(d["sup_a"], join(dp, "sup_a"));
  if (m.sup_a < m.inf_a) fail(join(dp, "sup_a"), d["sup_a"], "below inf_a");
  if (d["symmetric"]) m.symmetric = get_bool(d["symmetric"], join(dp, "symmetric"));
  if (d["inf_location"]) {
    const auto loc = d["inf_location"];
    if (loc.IsScalar() && loc.Scalar() == "infinity") {
      m.inf_location = AtInfinity{};
    } else {
      m.inf_location = AttainedAt{get_double(loc, join(dp, "inf_location"))};
    }
  }
  if (d["lower_bound"]) m.lower_bound = parse_lower_bound(d["lower_bound"], join(dp, "lower_bound"));
  if (d["regularity"]) m.regularity = parse_regularity(d["regularity"], join(dp, "regularity"));
  if (node["expected"]) {
    try {
      m.expected = parse_expectation(get_string(node["expected"], "model.expected"));
    } catch (const Error& e) {
      fail("model.expected", node["expected"], e.what());
    }
  }
  return m;
}

std::size_t scaled_nodes(std::size_t nodes, double from, double to) {
  const double steps = static_cast<double>(nodes - 1) * to / from;
  return static_cast<std::size_t>(std::llround(steps)) + 1;
}

NamedModel apply_grid(NamedModel model, const GridConfig& grid) {
  if (grid.truncation) {
    const auto* line = std::get_if<TruncatedLine>(&model.domain);
    const std::size_t n = grid.n ? *grid.n
                                 : scaled_nodes(model.default_nodes, line->half_width,
                                                *grid.truncation);
    model = *rescale_truncation(model, *grid.truncation, n);
  } else if (grid.n) {
    model.default_nodes = *grid.n;
  }
  if (grid.rule) model.default_rule = *grid.rule;
  return model;
}

}  // namespace

bool OutputConfig::wants(std::string_view format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

NamedModel compile_inline(const InlineModel& def) {
  const auto kernel_expr = Expression::parse(def.kernel_expr);
  const auto a_expr = Expression::parse(def.a_expr);
  NamedModel m;
  m.name = def.name;
  m.kernel = Kernel::general([kernel_expr](double x, double y) { return kernel_expr(x, y); },
                             def.symmetric, "J(x, y) = " + def.kernel_expr);
  m.kernel.lower_bound = def.lower_bound;
  m.kernel.domain = def.domain;
  m.death_rate.eval = [a_expr](double x) { return a_expr(x); };
  m.death_rate.inf_value = def.inf_a;
  m.death_rate.sup_value = def.sup_a;
  m.death_rate.inf_location = def.inf_location;
  m.death_rate.regularity = def.regularity;
  m.death_rate.description = "a(x) = " + def.a_expr;
  m.domain = def.domain;
  m.expected = def.expected;
  return m;
}

NamedModel resolve_model(const ScenarioConfig& config) {
  NamedModel base;
  if (const auto* name = std::get_if<std::string>(&config.model)) {
    auto found = find_model(*name);
    if (!found) throw ConfigError("model", 0, fmt::format("unknown catalog model '{}'", *name));
    base = std::move(*found);
  } else {
    base = compile_inline(std::get<InlineModel>(config.model));
  }
  return apply_grid(std::move(base), config.grid);
}

ScenarioConfig parse_config(std::string_view text, std::string_view source) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", e.mark.line + 1, e.msg);
  }
  if (!root.IsMap()) throw ConfigError("", line_of(root), "top level must be a mapping");
  allow_keys(root, "", {"name", "model", "grid", "lambda_schedule", "solver", "dynamics",
                        "outputs", "truncation_sweep", "seed"});

  ScenarioConfig cfg;
  cfg.source = std::string(source);

  const auto model = root["model"];
  if (!model) throw ConfigError("model", 0, "missing");
  if (model.IsScalar()) {
    const auto name = model.Scalar();
    if (!find_model(name)) fail("model", model, fmt::format("unknown catalog model '{}'", name));
    cfg.model = name;
  } else if (model.IsMap()) {
    cfg.model = parse_inline(model);
  } else {
    fail("model", model, "expected a catalog name or a mapping");
  }
  if (root["name"]) {
    cfg.name = get_string(root["name"], "name");
  } else if (const auto* name = std::get_if<std::string>(&cfg.model)) {
    cfg.name = *name;
  } else {
    cfg.name = std::get<InlineModel>(cfg.model).name;
  }

  if (const auto g = root["grid"]) {
    require_map(g, "grid");
    allow_keys(g, "grid", {"n", "rule", "truncation"});
    if (g["n"]) cfg.grid.n = get_count(g["n"], "grid.n", 16);
    if (g["rule"]) {
      try {
        cfg.grid.rule = parse_quadrature_rule(get_string(g["rule"], "grid.rule"));
      } catch (const Error& e) {
        fail("grid.rule", g["rule"], e.what());
      }
    }
    if (g["truncation"]) cfg.grid.truncation = get_positive(g["truncation"], "grid.truncation");
  }

  NamedModel resolved;
  try {
    NamedModel base = std::holds_alternative<std::string>(cfg.model)
                          ? *find_model(std::get<std::string>(cfg.model))
                          : compile_inline(std::get<InlineModel>(cfg.model));
    if (cfg.grid.truncation && !std::holds_alternative<TruncatedLine>(base.domain)) {
      fail("grid.truncation", root["grid"]["truncation"], "model is not on a truncated line");
    }
    resolved = apply_grid(std::move(base), cfg.grid);
    (void)resolved.default_grid();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail("grid", root["grid"] ? root["grid"] : root, e.what());
  }
  if (resolved.default_nodes < 16) {
    fail("grid.n", root["grid"] ? root["grid"] : root, "n must be at least 16");
  }

  if (const auto s = root["lambda_schedule"]) {
    if (s.IsSequence()) {
      for (const auto& v : s) cfg.lambda_schedule.values.push_back(get_double(v, "lambda_schedule"));
      if (cfg.lambda_schedule.values.empty()) fail("lambda_schedule", s, "empty list");
      for (std::size_t k = 1; k < cfg.lambda_schedule.values.size(); ++k) {
        if (!(cfg.lambda_schedule.values[k] > cfg.lambda_schedule.values[k - 1])) {
          fail("lambda_schedule", s[k], "values must be strictly increasing");
        }
      }
      if (!(cfg.lambda_schedule.values.front() > -resolved.death_rate.inf_value)) {
        fail("lambda_schedule", s[0], "values must exceed -inf a");
      }
    } else {
      require_map(s, "lambda_schedule");
      allow_keys(s, "lambda_schedule", {"count", "left_offset_floor", "lambda_max"});
      if (s["count"]) cfg.lambda_schedule.count = get_count(s["count"], "lambda_schedule.count", 2);
      if (s["left_offset_floor"]) {
        cfg.lambda_schedule.left_offset_floor =
            get_positive(s["left_offset_floor"], "lambda_schedule.left_offset_floor");
      }
      if (s["lambda_max"]) {
        const double hi = get_double(s["lambda_max"], "lambda_schedule.lambda_max");
        if (!(hi > -resolved.death_rate.inf_value + cfg.lambda_schedule.left_offset_floor)) {
          fail("lambda_schedule.lambda_max", s["lambda_max"], "must lie right of the floor");
        }
        cfg.lambda_schedule.lambda_max = hi;
      }
    }
  }

  if (const auto s = root["solver"]) {
    require_map(s, "solver");
    allow_keys(s, "solver", {"tol_lambda", "tol_spr"});
    if (s["tol_lambda"]) cfg.solver.tol_lambda = get_positive(s["tol_lambda"], "solver.tol_lambda");
    if (s["tol_spr"]) cfg.solver.tol_spr = get_positive(s["tol_spr"], "solver.tol_spr");
  }

  if (const auto d = root["dynamics"]) {
    require_map(d, "dynamics");
    allow_keys(d, "dynamics", {"enabled", "t_end", "dt", "u0"});
    if (d["enabled"]) cfg.dynamics.enabled = get_bool(d["enabled"], "dynamics.enabled");
    if (d["t_end"]) cfg.dynamics.t_end = get_positive(d["t_end"], "dynamics.t_end");
    if (d["dt"]) cfg.dynamics.dt = get_positive(d["dt"], "dynamics.dt");
    if (d["u0"]) {
      cfg.dynamics.u0 = get_string(d["u0"], "dynamics.u0");
      if (cfg.dynamics.u0 != "constant") {
        const auto e = compile(d["u0"], "dynamics.u0");
        if (e.uses_y()) fail("dynamics.u0", d["u0"], "initial data depends on x only");
      }
    }
  }

  if (const auto o = root["outputs"]) {
    require_map(o, "outputs");
    allow_keys(o, "outputs", {"directory", "formats"});
    if (o["directory"]) cfg.outputs.directory = get_string(o["directory"], "outputs.directory");
    if (const auto f = o["formats"]) {
      if (!f.IsSequence()) fail("outputs.formats", f, "expected a list");
      cfg.outputs.formats.clear();
      for (const auto& v : f) {
        const auto fmt_name = get_string(v, "outputs.formats");
        if (fmt_name != "csv" && fmt_name != "json") {
          fail("outputs.formats", v, fmt::format("unknown format '{}'", fmt_name));
        }
        cfg.outputs.formats.push_back(fmt_name);
      }
    }
  }

  if (const auto t = root["truncation_sweep"]) {
    require_map(t, "truncation_sweep");
    allow_keys(t, "truncation_sweep", {"enabled", "n", "tolerance"});
    cfg.truncation_sweep.enabled =
        t["enabled"] ? get_bool(t["enabled"], "truncation_sweep.enabled") : true;
    if (t["n"]) cfg.truncation_sweep.n = get_count(t["n"], "truncation_sweep.n", 16);
    if (t["tolerance"]) {
      cfg.truncation_sweep.tolerance = get_positive(t["tolerance"], "truncation_sweep.tolerance");
    }
    if (cfg.truncation_sweep.enabled && !std::holds_alternative<TruncatedLine>(resolved.domain)) {
      fail("truncation_sweep", t, "model is not on a truncated line");
    }
  }

  if (root["seed"]) cfg.seed = get_u64(root["seed"], "seed");
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, fmt::format("cannot read {}", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

std::vector<std::filesystem::path> list_configs(const std::filesystem::path& directory) {
  std::vector<std::filesystem::path> out;
  if (!std::filesystem::is_directory(directory)) {
    throw ConfigError("", 0, fmt::format("{} is not a directory", directory.string()));
  }
  for (const auto& entry : std::filesystem::directory_iterator(directory)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".yaml" || ext == ".yml")) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace nld
