#include "greenpol/config.hpp"

#include <fstream>

#include "greenpol/errors.hpp"

namespace greenpol {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& pointer, const std::string& message) {
  throw ConfigError(pointer, message);
}

const json& require(const json& obj, const std::string& pointer, const char* key) {
  if (!obj.is_object()) fail(pointer, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(pointer + "/" + key, "missing required field");
  return *it;
}

double require_number(const json& obj, const std::string& pointer, const char* key) {
  const json& v = require(obj, pointer, key);
  if (!v.is_number()) fail(pointer + "/" + key, "expected a number");
  return v.get<double>();
}

int require_int(const json& obj, const std::string& pointer, const char* key) {
  const json& v = require(obj, pointer, key);
  if (!v.is_number_integer()) fail(pointer + "/" + key, "expected an integer");
  return v.get<int>();
}

std::string require_string(const json& obj, const std::string& pointer, const char* key) {
  const json& v = require(obj, pointer, key);
  if (!v.is_string()) fail(pointer + "/" + key, "expected a string");
  return v.get<std::string>();
}

Expr parse_entry(const json& v, const std::string& pointer, int dim) {
  if (v.is_number()) return Expr::number(v.get<double>());
  if (!v.is_string()) fail(pointer, "expected an expression string or number");
  Expr e;
  try {
    e = parse_expr(v.get<std::string>());
  } catch (const ParseError& err) {
    fail(pointer, err.what());
  }
  if (e.variable_span() > dim)
    fail(pointer, "expression references coordinate x" + std::to_string(e.variable_span() - 1) +
                      " beyond the chart dimension " + std::to_string(dim));
  return e;
}

ExprMat parse_matrix(const json& v, const std::string& pointer, int rows, int cols, int dim) {
  if (!v.is_array() || static_cast<int>(v.size()) != rows)
    fail(pointer, "expected an array of " + std::to_string(rows) + " rows");
  ExprMat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    std::string rp = pointer + "/" + std::to_string(i);
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      fail(rp, "expected an array of " + std::to_string(cols) + " entries");
    for (int j = 0; j < cols; ++j)
      m.at(i, j) = parse_entry(row[static_cast<std::size_t>(j)], rp + "/" + std::to_string(j), dim);
  }
  return m;
}

std::shared_ptr<const SpacetimeModel> load_spacetime(const json& st, const std::string& pointer) {
  std::string kind = require_string(st, pointer, "kind");
  int dim = st.contains("dim") ? require_int(st, pointer, "dim") : 4;
  if (dim < 2 || dim > 4) fail(pointer + "/dim", "chart dimension must be 2..4");

  std::vector<std::pair<double, double>> bounds;
  if (st.contains("bounds")) {
    const json& b = st["bounds"];
    std::string bp = pointer + "/bounds";
    if (!b.is_array() || static_cast<int>(b.size()) != dim)
      fail(bp, "expected one [lo, hi] interval per coordinate");
    for (int i = 0; i < dim; ++i) {
      const json& iv = b[static_cast<std::size_t>(i)];
      std::string ip = bp + "/" + std::to_string(i);
      if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
        fail(ip, "expected [lo, hi]");
      double lo = iv[0].get<double>(), hi = iv[1].get<double>();
      if (!(lo < hi)) fail(ip, "interval must satisfy lo < hi");
      bounds.emplace_back(lo, hi);
    }
  }

  std::shared_ptr<SpacetimeModel> model;
  if (kind == "minkowski") {
    model = std::make_shared<SpacetimeModel>(SpacetimeModel::minkowski(dim, bounds));
  } else if (kind == "flrw") {
    Expr scale = parse_entry(require(st, pointer, "scale"), pointer + "/scale", 1);
    try {
      model = std::make_shared<SpacetimeModel>(SpacetimeModel::flrw(scale, dim, bounds));
    } catch (const std::invalid_argument& e) {
      fail(pointer + "/scale", e.what());
    }
  } else if (kind == "custom") {
    ExprMat g = parse_matrix(require(st, pointer, "metric"), pointer + "/metric", dim, dim, dim);
    try {
      model = std::make_shared<SpacetimeModel>(SpacetimeModel::custom(dim, std::move(g), bounds));
    } catch (const std::invalid_argument& e) {
      fail(pointer + "/metric", e.what());
    }
  } else {
    fail(pointer + "/kind", "expected one of minkowski | flrw | custom");
  }
  if (st.contains("time_axis")) {
    int axis = require_int(st, pointer, "time_axis");
    if (axis < 0 || axis >= dim) fail(pointer + "/time_axis", "index beyond the chart dimension");
    model->set_time_axis(axis);
  }
  try {
    validate_signature(*model, 8, 20240801u);
  } catch (const std::exception& e) {
    fail(pointer, e.what());
  }
  return model;
}

}  // namespace

NHOperatorSpec RunConfig::resolve_operator() const {
  if (op) return *op;
  if (proca_mass) return resolve_proca().kg1;
  throw std::logic_error("config carries neither an operator nor a mass block");
}

ProcaContext RunConfig::resolve_proca() const {
  if (!proca_mass) throw std::invalid_argument("this command needs a proca block in the config");
  return make_proca_context(spacetime, *proca_mass);
}

RunConfig load_config(const nlohmann::json& doc) {
  if (!doc.is_object()) fail("", "config root must be an object");
  RunConfig cfg;

  cfg.spacetime = load_spacetime(require(doc, "", "spacetime"), "/spacetime");
  int dim = cfg.spacetime->dim();

  bool has_op = doc.contains("operator");
  bool has_proca = doc.contains("proca");
  if (has_op == has_proca)
    fail("", "config must carry exactly one of the operator / proca blocks");

  if (has_op) {
    const json& ob = doc["operator"];
    std::string p = "/operator";
    int rank = require_int(ob, p, "rank");
    if (rank < 1 || rank > 8) fail(p + "/rank", "bundle rank must be 1..8");
    const json& cj = require(ob, p, "C");
    if (!cj.is_array() || static_cast<int>(cj.size()) != dim)
      fail(p + "/C", "expected one matrix per coordinate (" + std::to_string(dim) + ")");
    std::vector<ExprMat> c;
    for (int nu = 0; nu < dim; ++nu)
      c.push_back(parse_matrix(cj[static_cast<std::size_t>(nu)], p + "/C/" + std::to_string(nu),
                               rank, rank, dim));
    ExprMat v = ob.contains("V") ? parse_matrix(ob["V"], p + "/V", rank, rank, dim)
                                 : ExprMat::zero(rank, rank);
    cfg.op = make_nh_operator(cfg.spacetime, rank, std::move(c), std::move(v));
  } else {
    const json& pb = doc["proca"];
    std::string p = "/proca";
    double mass = require_number(pb, p, "mass");
    if (!(mass > 0.0)) fail(p + "/mass", "the field mass must be positive");
    if (dim != 4) fail(p, "the proca block needs a 4-dimensional chart");
    cfg.proca_mass = mass;
  }

  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    std::string p = "/tolerances";
    if (!t.is_object()) fail(p, "expected an object");
    auto opt = [&](const char* key, double& slot) {
      if (t.contains(key)) {
        if (!t[key].is_number()) fail(p + "/" + key, "expected a number");
        slot = t[key].get<double>();
        if (!(slot > 0.0)) fail(p + "/" + key, "tolerances must be positive");
      }
    };
    opt("tol_null", cfg.tol.tol_null);
    opt("tol_pos", cfg.tol.tol_pos);
    opt("tol_cov", cfg.tol.tol_cov);
    opt("lambda_max", cfg.tol.lambda_max);
  }

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer()) fail("/seed", "expected an integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file: " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
  }
  return load_config(doc);
}

RunConfig builtin_config() {
  RunConfig cfg;
  cfg.spacetime = std::make_shared<const SpacetimeModel>(SpacetimeModel::minkowski(4));
  cfg.proca_mass = 1.0;
  return cfg;
}

}  // namespace greenpol
