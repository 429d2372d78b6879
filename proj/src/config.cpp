#include "dmac/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dmac/error.hpp"

namespace dmac {
namespace {

using nlohmann::json;

std::string Join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

bool IsNote(const std::string& key) { return key.rfind("_note", 0) == 0; }

// Field reader over one JSON object that remembers its own key path.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      throw ConfigurationError((path_.empty() ? "config" : path_) +
                               " must be an object");
    }
  }

  void Allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, value] : j_.items()) {
      if (!allowed.count(key) && !IsNote(key)) {
        throw ConfigurationError("unknown key '" + Join(path_, key) + "'");
      }
    }
  }

  bool Has(const char* key) const { return j_.contains(key); }
  const json& At(const char* key) const { return j_.at(key); }
  std::string Path(const char* key) const { return Join(path_, key); }
  Section Child(const char* key) const { return Section(j_.at(key), Path(key)); }

  void Read(const char* key, double& out) const {
    if (!Has(key)) return;
    const json& v = At(key);
    if (!v.is_number()) {
      throw ConfigurationError(Path(key) + " must be a number");
    }
    out = v.get<double>();
  }

  template <typename Int>
  void ReadInt(const char* key, Int& out) const {
    if (!Has(key)) return;
    const json& v = At(key);
    if (!v.is_number_integer()) {
      throw ConfigurationError(Path(key) + " must be an integer");
    }
    if constexpr (std::is_unsigned_v<Int>) {
      if (v.is_number_integer() && !v.is_number_unsigned() &&
          v.get<long long>() < 0) {
        throw ConfigurationError(Path(key) + " must be >= 0");
      }
    }
    out = v.get<Int>();
  }

  void Read(const char* key, std::string& out) const {
    if (!Has(key)) return;
    const json& v = At(key);
    if (!v.is_string()) {
      throw ConfigurationError(Path(key) + " must be a string");
    }
    out = v.get<std::string>();
  }

  void Read(const char* key, std::optional<std::string>& out) const {
    if (!Has(key)) return;
    std::string s;
    Read(key, s);
    out = s;
  }

  Eigen::MatrixXd Matrix(const char* key) const {
    if (!Has(key)) throw ConfigurationError(Path(key) + " is required");
    const json& v = At(key);
    const std::string err = Path(key) + " must be a non-empty array of equal-length rows";
    if (!v.is_array() || v.empty() || !v[0].is_array() || v[0].empty()) {
      throw ConfigurationError(err);
    }
    Eigen::MatrixXd m(v.size(), v[0].size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_array() || v[i].size() != v[0].size()) {
        throw ConfigurationError(err);
      }
      for (std::size_t j = 0; j < v[i].size(); ++j) {
        if (!v[i][j].is_number()) throw ConfigurationError(err);
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            v[i][j].get<double>();
      }
    }
    return m;
  }

  std::vector<double> Numbers(const char* key) const {
    const json& v = At(key);
    if (!v.is_array()) {
      throw ConfigurationError(Path(key) + " must be an array of numbers");
    }
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number()) {
        throw ConfigurationError(Path(key) + " must be an array of numbers");
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
};

SurrogateConfig ParseSurrogate(const Section& s) {
  s.Allow({"tau_v", "tau_p", "a_v", "a_p", "thrust_scale", "w0",
           "process_noise_std"});
  SurrogateConfig c;
  s.Read("tau_v", c.tau_v);
  s.Read("tau_p", c.tau_p);
  s.Read("a_v", c.a_v);
  s.Read("a_p", c.a_p);
  s.Read("thrust_scale", c.thrust_scale);
  s.Read("w0", c.w0);
  s.Read("process_noise_std", c.process_noise_std);
  return c;
}

LtiPlantSpec ParseLti(const Section& s) {
  s.Allow({"a", "b", "c", "x0"});
  LtiPlantSpec l;
  l.a = s.Matrix("a");
  l.b = s.Matrix("b");
  l.c = s.Matrix("c");
  if (!s.Has("x0")) throw ConfigurationError(s.Path("x0") + " is required");
  const std::vector<double> x0 = s.Numbers("x0");
  l.x0 = Eigen::Map<const Eigen::VectorXd>(x0.data(),
                                           static_cast<Eigen::Index>(x0.size()));
  return l;
}

void ParsePlant(const Section& s, RunConfig& c) {
  s.Allow({"surrogate", "lti"});
  const bool sur = s.Has("surrogate");
  const bool lti = s.Has("lti");
  if (sur == lti) {
    throw ConfigurationError(
        "plant must contain exactly one of 'surrogate' or 'lti'");
  }
  if (sur) {
    c.plant = ParseSurrogate(s.Child("surrogate"));
  } else {
    c.plant = ParseLti(s.Child("lti"));
  }
}

void ParseActuator(const Section& s, ActuatorConfig& a) {
  s.Allow({"w0", "k_w", "w_min", "w_max"});
  s.Read("w0", a.w0);
  s.Read("k_w", a.k_w);
  s.Read("w_min", a.w_min);
  s.Read("w_max", a.w_max);
}

void ParseLoop(const Section& s, LoopConfig& l) {
  s.Allow({"horizon", "reference", "sigma_v", "warmup_steps", "hyperparams",
           "eps_jacobian", "dare", "covariance_ceiling", "regressor_control"});
  s.ReadInt("horizon", l.horizon);
  if (s.Has("reference")) {
    const json& r = s.At("reference");
    const std::string path = s.Path("reference");
    if (!r.is_array() || r.empty()) {
      throw ConfigurationError(path + " must be a non-empty array");
    }
    std::vector<ReferenceStep> steps;
    for (std::size_t i = 0; i < r.size(); ++i) {
      Section e(r[i], path + "[" + std::to_string(i) + "]");
      e.Allow({"start", "value"});
      if (!e.Has("start") || !e.Has("value")) {
        throw ConfigurationError(path + "[" + std::to_string(i) +
                                 "] needs 'start' and 'value'");
      }
      ReferenceStep step;
      e.ReadInt("start", step.start);
      e.Read("value", step.value);
      steps.push_back(step);
    }
    l.reference = ReferenceSchedule(std::move(steps));
  }
  s.Read("sigma_v", l.sigma_v);
  s.ReadInt("warmup_steps", l.warmup_steps);
  if (s.Has("hyperparams")) {
    const Section h = s.Child("hyperparams");
    h.Allow({"r_theta_scale", "lambda", "r1_scale", "r2"});
    h.Read("r_theta_scale", l.hyperparams.r_theta_scale);
    h.Read("lambda", l.hyperparams.lambda);
    h.Read("r1_scale", l.hyperparams.r1_scale);
    h.Read("r2", l.hyperparams.r2);
  }
  s.Read("eps_jacobian", l.eps_jacobian);
  if (s.Has("dare")) {
    const Section d = s.Child("dare");
    d.Allow({"max_iter", "tol"});
    d.ReadInt("max_iter", l.dare.max_iter);
    d.Read("tol", l.dare.tol);
  }
  s.Read("covariance_ceiling", l.covariance_ceiling);
  if (s.Has("regressor_control")) {
    std::string mode;
    s.Read("regressor_control", mode);
    if (mode == "applied") {
      l.regressor_control = RegressorControl::kApplied;
    } else if (mode == "commanded") {
      l.regressor_control = RegressorControl::kCommanded;
    } else {
      throw ConfigurationError(s.Path("regressor_control") +
                               " must be 'applied' or 'commanded'");
    }
  }
}

void ParseNn(const Section& s, NnSection& n) {
  s.Allow({"model_file", "dataset_file", "dataset", "train"});
  s.Read("model_file", n.model_file);
  s.Read("dataset_file", n.dataset_file);
  if (s.Has("dataset")) {
    const Section d = s.Child("dataset");
    d.Allow({"samples", "v_min", "v_max", "p_min", "p_max"});
    d.ReadInt("samples", n.dataset.samples);
    d.Read("v_min", n.dataset.v_min);
    d.Read("v_max", n.dataset.v_max);
    d.Read("p_min", n.dataset.p_min);
    d.Read("p_max", n.dataset.p_max);
  }
  if (s.Has("train")) {
    const Section t = s.Child("train");
    t.Allow({"max_epochs", "target_mse", "patience", "mu_init", "mu_increase",
             "mu_decrease", "mu_max", "init_range"});
    t.ReadInt("max_epochs", n.train.max_epochs);
    t.Read("target_mse", n.train.target_mse);
    t.ReadInt("patience", n.train.patience);
    t.Read("mu_init", n.train.mu_init);
    t.Read("mu_increase", n.train.mu_increase);
    t.Read("mu_decrease", n.train.mu_decrease);
    t.Read("mu_max", n.train.mu_max);
    t.Read("init_range", n.train.init_range);
  }
}

void ParseSweep(const json& j, std::vector<SweepEntry>& out) {
  if (!j.is_array()) throw ConfigurationError("sweep must be an array");
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Section e(j[i], "sweep[" + std::to_string(i) + "]");
    e.Allow({"parameter", "values"});
    if (!e.Has("parameter") || !e.Has("values")) {
      throw ConfigurationError("sweep[" + std::to_string(i) +
                               "] needs 'parameter' and 'values'");
    }
    SweepEntry entry;
    std::string name;
    e.Read("parameter", name);
    entry.parameter = ParseSweepParameter(name);
    entry.values = e.Numbers("values");
    if (entry.values.empty()) {
      throw ConfigurationError(e.Path("values") + " must not be empty");
    }
    out.push_back(std::move(entry));
  }
}

json MatrixJson(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void LtiPlantSpec::Validate() const {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.rows() != n || c.cols() != n || x0.size() != n) {
    throw ConfigurationError(
        "plant.lti dimensions must agree: a n x n, b n x 1, c 1 x n, x0 n");
  }
  if (b.cols() != 1 || c.rows() != 1) {
    throw ConfigurationError("plant.lti must be single-input single-output");
  }
}

void RunConfig::Validate() const {
  if (name.empty()) throw ConfigurationError("name must not be empty");
  if (output_dir.empty()) {
    throw ConfigurationError("output_dir must not be empty");
  }
  std::visit([](const auto& p) { p.Validate(); }, plant);
  actuator.Validate();
  loop.Validate();
  if (nn.dataset.samples < 3) {
    throw ConfigurationError("nn.dataset.samples must be >= 3");
  }
  for (const auto& spec : SweepsFor(*this)) spec.Validate();
}

RunConfig ParseConfig(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigurationError(std::string("config is not valid JSON: ") +
                             e.what());
  }
  const Section top(j, "");
  top.Allow({"name", "seed", "output_dir", "plant", "actuator", "loop", "nn",
             "sweep"});
  RunConfig c;
  top.Read("name", c.name);
  top.ReadInt("seed", c.seed);
  top.Read("output_dir", c.output_dir);
  if (top.Has("plant")) ParsePlant(top.Child("plant"), c);
  if (top.Has("actuator")) ParseActuator(top.Child("actuator"), c.actuator);
  if (top.Has("loop")) ParseLoop(top.Child("loop"), c.loop);
  if (top.Has("nn")) ParseNn(top.Child("nn"), c.nn);
  if (top.Has("sweep")) ParseSweep(top.At("sweep"), c.sweep);
  c.loop.seed = c.seed;
  c.Validate();
  return c;
}

RunConfig LoadConfig(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::kIo, "cannot open config " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ParseConfig(ss.str());
}

std::string ConfigToJson(const RunConfig& c) {
  json j;
  j["name"] = c.name;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  if (const auto* s = std::get_if<SurrogateConfig>(&c.plant)) {
    j["plant"]["surrogate"] = {{"tau_v", s->tau_v},
                               {"tau_p", s->tau_p},
                               {"a_v", s->a_v},
                               {"a_p", s->a_p},
                               {"thrust_scale", s->thrust_scale},
                               {"w0", s->w0},
                               {"process_noise_std", s->process_noise_std}};
  } else {
    const auto& l = std::get<LtiPlantSpec>(c.plant);
    j["plant"]["lti"] = {{"a", MatrixJson(l.a)},
                         {"b", MatrixJson(l.b)},
                         {"c", MatrixJson(l.c)},
                         {"x0", std::vector<double>(l.x0.data(),
                                                    l.x0.data() + l.x0.size())}};
  }
  j["actuator"] = {{"w0", c.actuator.w0},
                   {"k_w", c.actuator.k_w},
                   {"w_min", c.actuator.w_min},
                   {"w_max", c.actuator.w_max}};
  json ref = json::array();
  for (const auto& s : c.loop.reference.steps()) {
    ref.push_back({{"start", s.start}, {"value", s.value}});
  }
  const auto& h = c.loop.hyperparams;
  j["loop"] = {
      {"horizon", c.loop.horizon},
      {"reference", ref},
      {"sigma_v", c.loop.sigma_v},
      {"warmup_steps", c.loop.warmup_steps},
      {"hyperparams",
       {{"r_theta_scale", h.r_theta_scale},
        {"lambda", h.lambda},
        {"r1_scale", h.r1_scale},
        {"r2", h.r2}}},
      {"eps_jacobian", c.loop.eps_jacobian},
      {"dare", {{"max_iter", c.loop.dare.max_iter}, {"tol", c.loop.dare.tol}}},
      {"covariance_ceiling", c.loop.covariance_ceiling},
      {"regressor_control", c.loop.regressor_control == RegressorControl::kApplied
                                ? "applied"
                                : "commanded"},
  };
  json nn;
  if (c.nn.model_file) nn["model_file"] = *c.nn.model_file;
  if (c.nn.dataset_file) nn["dataset_file"] = *c.nn.dataset_file;
  nn["dataset"] = {{"samples", c.nn.dataset.samples},
                   {"v_min", c.nn.dataset.v_min},
                   {"v_max", c.nn.dataset.v_max},
                   {"p_min", c.nn.dataset.p_min},
                   {"p_max", c.nn.dataset.p_max}};
  const auto& t = c.nn.train;
  nn["train"] = {{"max_epochs", t.max_epochs},   {"target_mse", t.target_mse},
                 {"patience", t.patience},       {"mu_init", t.mu_init},
                 {"mu_increase", t.mu_increase}, {"mu_decrease", t.mu_decrease},
                 {"mu_max", t.mu_max},           {"init_range", t.init_range}};
  j["nn"] = nn;
  json sweep = json::array();
  for (const auto& s : SweepsFor(c)) {
    sweep.push_back(
        {{"parameter", ParameterName(s.parameter)}, {"values", s.values}});
  }
  j["sweep"] = sweep;
  return j.dump(2);
}

std::vector<SweepSpec> SweepsFor(const RunConfig& config) {
  if (config.sweep.empty()) return DefaultSweeps(config.loop);
  std::vector<SweepSpec> specs;
  for (const auto& e : config.sweep) {
    specs.push_back({e.parameter, e.values, config.loop});
  }
  return specs;
}

}  // namespace dmac
