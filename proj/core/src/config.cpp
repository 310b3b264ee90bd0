#include "penalab/config.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "penalab/field_io.hpp"
#include "penalab/report_json.hpp"

namespace penalab {

using nlohmann::json;

void ExperimentConfig::validate() const {
  ProblemParams prm{lambda, p, m};
  prm.validate();
  for (double mi : m_list) ProblemParams{lambda, p, mi}.validate();
  if (!(alpha > 0.0) || !(beta >= alpha))
    throw std::invalid_argument("config: need 0 < alpha <= beta");
  auto pos = [](double t, const char* what) {
    if (!(t > 0.0)) throw std::invalid_argument(std::string("config: tolerance ") + what + " must be positive");
  };
  pos(tol.tol_resid, "tol_resid");
  pos(tol.tol_fp, "tol_fp");
  pos(tol.tol_vi, "tol_vi");
  pos(tol.lin_tol, "lin_tol");
  pos(tol.ode_tol, "ode_tol");
  pos(tol.tol_apriori, "tol_apriori");
  if (n_path < 8) throw std::invalid_argument("config: n_path must be at least 8");
  if (multistart < 0) throw std::invalid_argument("config: multistart must be nonnegative");
  if (jobs < 1) throw std::invalid_argument("config: jobs must be at least 1");
}

CoeffField ExperimentConfig::make_coeff() const {
  if (coeff_expr == "identity") {
    if (coeff_a1 != 1.0) return CoeffField::scaled_identity(coeff_a1);
    return CoeffField::identity();
  }
  if (coeff_expr == "aniso") return CoeffField::aniso(coeff_a1, coeff_a2);
  if (coeff_expr == "bump") return CoeffField::bump(domain);
  throw std::invalid_argument("config: unknown coeff expr '" + coeff_expr + "'");
}

GridPtr ExperimentConfig::make_grid() const { return build_grid(domain, n); }

ScalarField ExperimentConfig::make_psi0(const DivFormOperator& op) const {
  if (psi0 == "phi1") {
    EigenPair ep = principal_eigenpair(op.coeff().kind() == CoeffField::Kind::identity
                                           ? op
                                           : DivFormOperator::assemble(op.grid_ptr(),
                                                                       CoeffField::identity()));
    return ep.phi1;
  }
  if (psi0 == "sin") {
    if (domain.kind == DomainKind::disk)
      throw std::invalid_argument("config: the sin profile needs an interval or rectangle");
    const DomainSpec d = domain;
    return ScalarField::from_function(op.grid_ptr(), [&](double x, double y) {
      double v = std::sin(std::numbers::pi * (x - d.lo[0]) / (d.hi[0] - d.lo[0]));
      if (d.kind == DomainKind::rectangle)
        v *= std::sin(std::numbers::pi * (y - d.lo[1]) / (d.hi[1] - d.lo[1]));
      return v;
    });
  }
  if (psi0.rfind("file:", 0) == 0) return read_field_csv(op.grid_ptr(), psi0.substr(5));
  throw std::invalid_argument("config: unknown psi0 '" + psi0 + "'");
}

namespace {

DomainSpec parse_domain(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "interval") {
    const auto e = j.at("extents");
    return DomainSpec::interval(e.at(0).at(0).get<double>(), e.at(0).at(1).get<double>());
  }
  if (kind == "rectangle") {
    const auto e = j.at("extents");
    return DomainSpec::rectangle(e.at(0).at(0).get<double>(), e.at(0).at(1).get<double>(),
                                 e.at(1).at(0).get<double>(), e.at(1).at(1).get<double>());
  }
  if (kind == "disk") {
    const auto c = j.at("center");
    return DomainSpec::disk(c.at(0).get<double>(), c.at(1).get<double>(),
                            j.at("radius").get<double>());
  }
  throw std::invalid_argument("config: unknown domain kind '" + kind + "'");
}

} // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: parse error: ") + e.what());
  }
  ExperimentConfig c;
  if (j.contains("name")) c.name = j["name"].get<std::string>();
  if (j.contains("domain")) {
    c.domain = parse_domain(j["domain"]);
    const auto& nj = j["domain"].at("n");
    if (nj.is_array()) {
      c.n[0] = nj.at(0).get<int>();
      c.n[1] = nj.size() > 1 ? nj.at(1).get<int>() : c.n[0];
    } else {
      c.n[0] = c.n[1] = nj.get<int>();
    }
  }
  if (j.contains("coeff")) {
    const auto& cj = j["coeff"];
    if (cj.contains("kind")) c.coeff_kind = cj["kind"].get<std::string>();
    if (cj.contains("expr")) c.coeff_expr = cj["expr"].get<std::string>();
    if (cj.contains("a1")) c.coeff_a1 = cj["a1"].get<double>();
    if (cj.contains("a2")) c.coeff_a2 = cj["a2"].get<double>();
    if (cj.contains("alpha")) c.alpha = cj["alpha"].get<double>();
    if (cj.contains("beta")) c.beta = cj["beta"].get<double>();
    if (c.coeff_expr == "aniso") {
      c.alpha = std::min(c.coeff_a1, c.coeff_a2);
      c.beta = std::max(c.coeff_a1, c.coeff_a2);
    } else if (c.coeff_expr == "bump") {
      c.alpha = 1.0;
      c.beta = 1.5;
    } else if (c.coeff_expr == "identity") {
      c.alpha = c.beta = c.coeff_a1;
    }
  }
  if (j.contains("lambda")) c.lambda = j["lambda"].get<double>();
  if (j.contains("p")) c.p = j["p"].get<double>();
  if (j.contains("m")) {
    // "inf" selects the limit energy
    if (j["m"].is_string())
      c.m = std::numeric_limits<double>::infinity();
    else
      c.m = j["m"].get<double>();
  }
  if (j.contains("m_list")) c.m_list = j["m_list"].get<std::vector<double>>();
  if (j.contains("psi0")) c.psi0 = j["psi0"].get<std::string>();
  if (j.contains("obstacle_init")) c.obstacle_init = j["obstacle_init"].get<std::string>();
  if (j.contains("tol")) {
    const auto& t = j["tol"];
    if (t.contains("tol_resid")) c.tol.tol_resid = t["tol_resid"].get<double>();
    if (t.contains("tol_fp")) c.tol.tol_fp = t["tol_fp"].get<double>();
    if (t.contains("tol_vi")) c.tol.tol_vi = t["tol_vi"].get<double>();
    if (t.contains("lin_tol")) c.tol.lin_tol = t["lin_tol"].get<double>();
    if (t.contains("ode_tol")) c.tol.ode_tol = t["ode_tol"].get<double>();
    if (t.contains("tol_apriori")) c.tol.tol_apriori = t["tol_apriori"].get<double>();
  }
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("n_path")) c.n_path = j["n_path"].get<int>();
  if (j.contains("multistart")) c.multistart = j["multistart"].get<int>();
  if (j.contains("jobs")) c.jobs = j["jobs"].get<int>();
  if (j.contains("warm_start")) c.warm_start = j["warm_start"].get<bool>();
  if (j.contains("radial")) {
    const auto& r = j["radial"];
    if (r.contains("N")) c.radial.N = r["N"].get<int>();
    if (r.contains("p")) c.radial.p = r["p"].get<double>();
    if (r.contains("lambda")) c.radial.lambda = r["lambda"].get<double>();
    if (r.contains("R")) c.radial.R = r["R"].get<double>();
    if (r.contains("has_scaling")) c.radial.has_scaling = r["has_scaling"].get<bool>();
    if (r.contains("p_sweep")) c.radial.p_sweep = r["p_sweep"].get<std::vector<double>>();
    if (r.contains("lambdaR2_grid"))
      c.radial.lambdaR2_grid = r["lambdaR2_grid"].get<std::vector<double>>();
  }
  c.validate();
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  return parse_config(read_text_file(path));
}

std::string serialize_config(const ExperimentConfig& cfg) { return config_json(cfg).dump(); }

JsonValue config_json(const ExperimentConfig& c) {
  JsonValue root = JsonValue::object();
  root.set("name", c.name);
  {
    JsonValue d = JsonValue::object();
    switch (c.domain.kind) {
      case DomainKind::interval: {
        d.set("kind", "interval");
        JsonValue e = JsonValue::array();
        JsonValue ax = JsonValue::array();
        ax.push(JsonValue::number(c.domain.lo[0])).push(JsonValue::number(c.domain.hi[0]));
        e.push(std::move(ax));
        d.set("extents", std::move(e));
        break;
      }
      case DomainKind::rectangle: {
        d.set("kind", "rectangle");
        JsonValue e = JsonValue::array();
        for (int a = 0; a < 2; ++a) {
          JsonValue ax = JsonValue::array();
          ax.push(JsonValue::number(c.domain.lo[a])).push(JsonValue::number(c.domain.hi[a]));
          e.push(std::move(ax));
        }
        d.set("extents", std::move(e));
        break;
      }
      case DomainKind::disk: {
        d.set("kind", "disk");
        JsonValue ctr = JsonValue::array();
        ctr.push(JsonValue::number(c.domain.center[0]))
            .push(JsonValue::number(c.domain.center[1]));
        d.set("center", std::move(ctr));
        d.set("radius", c.domain.radius);
        break;
      }
    }
    JsonValue nn = JsonValue::array();
    nn.push(JsonValue::integer(c.n[0]));
    if (c.domain.kind != DomainKind::interval) nn.push(JsonValue::integer(c.n[1]));
    d.set("n", std::move(nn));
    root.set("domain", std::move(d));
  }
  {
    JsonValue co = JsonValue::object();
    co.set("kind", c.coeff_kind);
    co.set("expr", c.coeff_expr);
    co.set("a1", c.coeff_a1);
    co.set("a2", c.coeff_a2);
    co.set("alpha", c.alpha);
    co.set("beta", c.beta);
    root.set("coeff", std::move(co));
  }
  root.set("lambda", c.lambda);
  root.set("p", c.p);
  root.set("m", c.m);
  if (!c.m_list.empty()) {
    JsonValue ml = JsonValue::array();
    for (double m : c.m_list) ml.push(JsonValue::number(m));
    root.set("m_list", std::move(ml));
  }
  root.set("psi0", c.psi0);
  root.set("obstacle_init", c.obstacle_init);
  {
    JsonValue t = JsonValue::object();
    t.set("tol_resid", c.tol.tol_resid);
    t.set("tol_fp", c.tol.tol_fp);
    t.set("tol_vi", c.tol.tol_vi);
    t.set("lin_tol", c.tol.lin_tol);
    t.set("ode_tol", c.tol.ode_tol);
    t.set("tol_apriori", c.tol.tol_apriori);
    root.set("tol", std::move(t));
  }
  root.set("seed", static_cast<long long>(c.seed));
  root.set("output_dir", c.output_dir);
  root.set("n_path", c.n_path);
  root.set("multistart", c.multistart);
  root.set("jobs", c.jobs);
  root.set("warm_start", c.warm_start);
  {
    JsonValue r = JsonValue::object();
    r.set("N", c.radial.N);
    r.set("p", c.radial.p);
    r.set("lambda", c.radial.lambda);
    r.set("R", c.radial.R);
    r.set("has_scaling", c.radial.has_scaling);
    JsonValue ps = JsonValue::array();
    for (double p : c.radial.p_sweep) ps.push(JsonValue::number(p));
    r.set("p_sweep", std::move(ps));
    JsonValue lg = JsonValue::array();
    for (double t : c.radial.lambdaR2_grid) lg.push(JsonValue::number(t));
    r.set("lambdaR2_grid", std::move(lg));
    root.set("radial", std::move(r));
  }
  return root;
}

std::vector<std::string> preset_names() {
  return {"toy-1node", "interval-pi", "square", "disk", "gz-hunt"};
}

ExperimentConfig preset(const std::string& name) {
  const double pi = std::numbers::pi;
  ExperimentConfig c;
  c.name = name;
  if (name == "toy-1node") {
    c.domain = DomainSpec::interval(0.0, 2.0);
    c.n = {3, 3};
    c.lambda = 5.0;
    c.p = 4.0;
    c.m = 10.0;
    c.m_list = {10, 20, 40, 80, 160};
    c.n_path = 9;
    c.seed = 61001;
    return c;
  }
  if (name == "interval-pi") {
    c.domain = DomainSpec::interval(0.0, pi);
    c.n = {401, 401};
    c.lambda = 3.0;
    c.p = 4.0;
    c.m = 16.0;
    c.m_list = {8, 16, 32, 64, 128};
    c.n_path = 33;
    c.seed = 61002;
    return c;
  }
  if (name == "square") {
    c.domain = DomainSpec::rectangle(0.0, pi, 0.0, pi);
    c.n = {49, 49};
    c.lambda = 8.0;
    c.p = 4.0;
    c.m = 16.0;
    c.m_list = {8, 16, 32};
    c.n_path = 17;
    c.seed = 61003;
    return c;
  }
  if (name == "disk") {
    c.domain = DomainSpec::disk(0.0, 0.0, 1.0);
    c.n = {161, 161};
    c.lambda = 1.0;
    c.p = 30.0;
    c.m = 64.0;
    c.m_list = {60, 120, 240};
    c.n_path = 17;
    c.seed = 61004;
    c.radial.N = 2;
    c.radial.p = 30.0;
    c.radial.lambda = 1.0;
    c.radial.R = 1.0;
    c.radial.p_sweep = {10, 20, 40, 80};
    return c;
  }
  if (name == "gz-hunt") {
    c.domain = DomainSpec::disk(0.0, 0.0, 1.0);
    c.n = {81, 81};
    c.lambda = 1.0;
    c.p = 4.0;
    c.m = 16.0;
    c.seed = 61005;
    c.radial.N = 2;
    c.radial.p = 4.0;
    c.radial.lambda = 1.0;
    c.radial.R = 1.0;
    c.radial.has_scaling = true;
    c.radial.p_sweep = {2.5, 3, 4, 6, 10, 20, 40, 80};
    c.radial.lambdaR2_grid = {0.25, 0.5, 1, 2, 4, 8, 16};
    return c;
  }
  throw std::invalid_argument("preset: unknown preset '" + name + "'");
}

} // namespace penalab
