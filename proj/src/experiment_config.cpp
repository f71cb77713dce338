#include <cmath>
#include <nlohmann/json.hpp>
#include <set>

#include "hdlab/error.hpp"
#include "hdlab/experiment.hpp"
#include "hdlab/superconsistency.hpp"

namespace hdlab {
namespace {

using json = nlohmann::json;

[[noreturn]] void parse_error(const std::string& path, const std::string& what) {
  fail(ErrorKind::config_parse, "config key '" + path + "': " + what);
}

// Reads one JSON object, remembering which keys were consumed so that typos
// surface as unknown keys instead of silently falling back to defaults.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) parse_error(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    if (!j_.contains(key)) parse_error(at(key), "missing required key");
    used_.insert(key);
    return j_.at(key);
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <class T>
  T get(const std::string& key) {
    return convert<T>(raw(key), at(key));
  }

  template <class T>
  T get_or(const std::string& key, T fallback) {
    return has(key) ? get<T>(key) : fallback;
  }

  template <class T>
  std::optional<T> get_optional(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return get<T>(key);
  }

  /// Scalars are accepted as one-element lists.
  template <class T>
  std::vector<T> get_list(const std::string& key) {
    const json& v = raw(key);
    std::vector<T> out;
    if (!v.is_array()) {
      out.push_back(convert<T>(v, at(key)));
      return out;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(convert<T>(v[i], at(key) + "[" + std::to_string(i) + "]"));
    }
    if (out.empty()) parse_error(at(key), "list must not be empty");
    return out;
  }

  template <class T>
  std::vector<T> get_list_or(const std::string& key, std::vector<T> fallback) {
    return has(key) ? get_list<T>(key) : fallback;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!used_.contains(item.key())) parse_error(at(item.key()), "unknown key");
    }
  }

  template <class T>
  static T convert(const json& v, const std::string& path);

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

template <>
double Reader::convert<double>(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return kInf;
  }
  parse_error(path, "expected a number (or \"inf\")");
}

template <>
std::uint64_t Reader::convert<std::uint64_t>(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (x >= 0.0 && x <= 9007199254740992.0 && std::floor(x) == x) return static_cast<std::uint64_t>(x);
  }
  parse_error(path, "expected a nonnegative integer");
}

template <>
std::string Reader::convert<std::string>(const json& v, const std::string& path) {
  if (!v.is_string()) parse_error(path, "expected a string");
  return v.get<std::string>();
}

template <>
bool Reader::convert<bool>(const json& v, const std::string& path) {
  if (!v.is_boolean()) parse_error(path, "expected true or false");
  return v.get<bool>();
}

json number(double x) {
  if (std::isinf(x)) return x > 0 ? json("inf") : json(x);
  return json(x);
}

// ---- enums ---------------------------------------------------------------

CalibrationMethod parse_method(const std::string& s, const std::string& path) {
  if (s == "exact") return CalibrationMethod::exact;
  if (s == "monte_carlo") return CalibrationMethod::monte_carlo;
  if (s == "clt_approx") return CalibrationMethod::clt_approx;
  if (s == "fixed") return CalibrationMethod::fixed;
  parse_error(path, "unknown calibration method '" + s + "'");
}

std::string method_name(CalibrationMethod m) {
  switch (m) {
    case CalibrationMethod::exact: return "exact";
    case CalibrationMethod::monte_carlo: return "monte_carlo";
    case CalibrationMethod::clt_approx: return "clt_approx";
    case CalibrationMethod::fixed: return "fixed";
  }
  return "?";
}

Trend parse_trend(const std::string& s, const std::string& path) {
  if (s == "none") return Trend::none;
  if (s == "nondecreasing") return Trend::nondecreasing;
  if (s == "nonincreasing") return Trend::nonincreasing;
  parse_error(path, "unknown trend '" + s + "'");
}

std::string trend_name(Trend t) {
  switch (t) {
    case Trend::none: return "none";
    case Trend::nondecreasing: return "nondecreasing";
    case Trend::nonincreasing: return "nonincreasing";
  }
  return "?";
}

std::vector<std::size_t> to_dims(const std::vector<std::uint64_t>& v) {
  return {v.begin(), v.end()};
}

std::vector<std::uint64_t> from_dims(const std::vector<std::size_t>& v) {
  return {v.begin(), v.end()};
}

// ---- building blocks -------------------------------------------------------

DimensionRule read_rule(const json& v, const std::string& path) {
  if (v.is_number() || v.is_string()) return DimensionRule::constant(Reader::convert<double>(v, path));
  Reader r(v, path);
  DimensionRule rule;
  rule.coefficient = r.get_or<double>("coefficient", 1.0);
  rule.exponent = r.get_or<double>("exponent", 0.0);
  rule.log_power = r.get_or<double>("log_power", 0.0);
  r.finish();
  return rule;
}

json write_rule(const DimensionRule& rule) {
  return json{{"coefficient", number(rule.coefficient)},
              {"exponent", number(rule.exponent)},
              {"log_power", number(rule.log_power)}};
}

Calibration read_calibration(Reader& r, TestConfig& test) {
  Reader c(r.raw("calibration"), r.at("calibration"));
  Calibration cal;
  cal.method = parse_method(c.get<std::string>("method"), c.at("method"));
  cal.n = c.get_or<std::uint64_t>("n", 0);
  if (cal.method == CalibrationMethod::fixed) test.critical_value = c.get<double>("critical_value");
  c.finish();
  return cal;
}

TestConfig read_test(const json& v, const std::string& path) {
  Reader r(v, path);
  TestConfig t;
  const auto family = r.get<std::string>("family");
  if (family == "p_norm") {
    t.kind = TestConfig::Kind::p_norm;
    t.p = r.get<double>("p");
    t.calibration = read_calibration(r, t);
  } else if (family == "higher_criticism") {
    t.kind = TestConfig::Kind::higher_criticism;
    t.fraction = r.get_or<double>("fraction", 0.5);
    t.calibration = read_calibration(r, t);
  } else if (family == "combined") {
    t.kind = TestConfig::Kind::combined;
    t.calibration = {CalibrationMethod::fixed, 0};
    t.children.push_back(read_test(r.raw("primary"), r.at("primary")));
    t.children.push_back(read_test(r.raw("enhancement"), r.at("enhancement")));
  } else {
    parse_error(r.at("family"), "unknown test family '" + family + "'");
  }
  t.alpha = r.get_optional<double>("alpha");
  r.finish();
  return t;
}

json write_test(const TestConfig& t) {
  json out;
  switch (t.kind) {
    case TestConfig::Kind::p_norm:
      out["family"] = "p_norm";
      out["p"] = number(t.p);
      break;
    case TestConfig::Kind::higher_criticism:
      out["family"] = "higher_criticism";
      out["fraction"] = t.fraction;
      break;
    case TestConfig::Kind::combined:
      out["family"] = "combined";
      out["primary"] = write_test(t.children.at(0));
      out["enhancement"] = write_test(t.children.at(1));
      break;
  }
  if (t.kind != TestConfig::Kind::combined) {
    json cal{{"method", method_name(t.calibration.method)}, {"n", t.calibration.n}};
    if (t.calibration.method == CalibrationMethod::fixed) cal["critical_value"] = number(t.critical_value);
    out["calibration"] = cal;
  }
  if (t.alpha) out["alpha"] = *t.alpha;
  return out;
}

std::vector<TestConfig> read_tests(Reader& r, const std::string& key) {
  const json& v = r.raw(key);
  std::vector<TestConfig> out;
  if (!v.is_array()) {
    out.push_back(read_test(v, r.at(key)));
    return out;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(read_test(v[i], r.at(key) + "[" + std::to_string(i) + "]"));
  }
  if (out.empty()) parse_error(r.at(key), "list must not be empty");
  return out;
}

json write_tests(const std::vector<TestConfig>& tests) {
  json out = json::array();
  for (const auto& t : tests) out.push_back(write_test(t));
  return out;
}

AlternativeConfig read_alternative(const json& v, const std::string& path) {
  Reader r(v, path);
  AlternativeConfig a;
  const auto family = r.get<std::string>("family");
  if (family == "zero") {
    a.family = AlternativeFamily::zero;
  } else if (family == "dense") {
    a.family = AlternativeFamily::dense;
    a.amplitude = read_rule(r.raw("coordinate"), r.at("coordinate"));
  } else if (family == "sparse_spike") {
    a.family = AlternativeFamily::sparse_spike;
    a.k = r.get_or<std::uint64_t>("k", 1);
    a.amplitude = read_rule(r.raw("amplitude"), r.at("amplitude"));
  } else {
    parse_error(r.at("family"), "unknown alternative family '" + family + "'");
  }
  r.finish();
  return a;
}

json write_alternative(const AlternativeConfig& a) {
  switch (a.family) {
    case AlternativeFamily::dense:
      return json{{"family", "dense"}, {"coordinate", write_rule(a.amplitude)}};
    case AlternativeFamily::sparse_spike:
      return json{{"family", "sparse_spike"}, {"k", a.k}, {"amplitude", write_rule(a.amplitude)}};
    default:
      return json{{"family", "zero"}};
  }
}

// ---- kinds -----------------------------------------------------------------

ExperimentParams read_params(const std::string& kind, Reader& r) {
  if (kind == "calibrate") {
    CalibrateConfig c;
    c.tests = read_tests(r, "tests");
    c.d = to_dims(r.get_list<std::uint64_t>("d"));
    c.alpha = r.get_list_or<double>("alpha", c.alpha);
    c.size_n = r.get_or<std::uint64_t>("size_n", c.size_n);
    c.band_level = r.get_or<double>("band_level", c.band_level);
    return c;
  }
  if (kind == "power_curve") {
    PowerCurveConfig c;
    c.test = read_test(r.raw("test"), r.at("test"));
    c.d = to_dims(r.get_list<std::uint64_t>("d"));
    c.alpha = r.get_list_or<double>("alpha", c.alpha);
    c.radius = r.get_list_or<double>("radius", {});
    if (r.has("alternative")) c.alternative = read_alternative(r.raw("alternative"), r.at("alternative"));
    if (c.radius.empty() == !c.alternative.has_value()) {
      parse_error(r.at("radius"), "give exactly one of 'radius' and 'alternative'");
    }
    c.n = r.get_or<std::uint64_t>("n", c.n);
    c.size_n = r.get_or<std::uint64_t>("size_n", c.size_n);
    c.trend = parse_trend(r.get_or<std::string>("trend", "none"), r.at("trend"));
    return c;
  }
  if (kind == "volume_sweep") {
    VolumeSweepConfig c;
    c.p = r.get<double>("p");
    c.d = to_dims(r.get_list<std::uint64_t>("d"));
    if (r.has("t")) {
      const json& t = r.raw("t");
      if (!(t.is_string() && t.get<std::string>() == "u_d")) c.t = Reader::convert<double>(t, r.at("t"));
    }
    c.n = r.get_or<std::uint64_t>("n", c.n);
    c.trend = parse_trend(r.get_or<std::string>("trend", "none"), r.at("trend"));
    c.final_exceeds_first = r.get_or<bool>("final_exceeds_first", false);
    return c;
  }
  if (kind == "verify_theorem2") {
    Theorem2Config c;
    c.p = r.get<double>("p");
    c.d = to_dims(r.get_list<std::uint64_t>("d"));
    c.radius = read_rule(r.raw("radius"), r.at("radius"));
    c.threshold = read_rule(r.raw("threshold"), r.at("threshold"));
    c.n = r.get_or<std::uint64_t>("n", c.n);
    c.trend = parse_trend(r.get_or<std::string>("trend", "nonincreasing"), r.at("trend"));
    c.final_max = r.get_optional<double>("final_max");
    if (r.has("test")) c.test = read_test(r.raw("test"), r.at("test"));
    c.alpha = r.get_or<double>("alpha", c.alpha);
    c.size_n = r.get_or<std::uint64_t>("size_n", c.size_n);
    return c;
  }
  if (kind == "verify_prop4") {
    Prop4Config c;
    c.tests = read_tests(r, "tests");
    c.d = to_dims(r.get_list<std::uint64_t>("d"));
    c.radius = read_rule(r.raw("radius"), r.at("radius"));
    c.epsilon = r.get<double>("epsilon");
    c.alpha = r.get_or<double>("alpha", c.alpha);
    c.outer_n = r.get_or<std::uint64_t>("outer_n", c.outer_n);
    c.inner_n = r.get_or<std::uint64_t>("inner_n", c.inner_n);
    c.decision_margin = r.get_or<double>("decision_margin", c.decision_margin);
    c.size_n = r.get_or<std::uint64_t>("size_n", c.size_n);
    return c;
  }
  if (kind == "wap_check") {
    WapConfig c;
    c.tests = read_tests(r, "tests");
    const json& pts = r.raw("points");
    if (!pts.is_array() || pts.empty()) parse_error(r.at("points"), "expected a nonempty list");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      Reader p(pts[i], r.at("points") + "[" + std::to_string(i) + "]");
      c.points.push_back({static_cast<std::size_t>(p.get<std::uint64_t>("d")), p.get<double>("r")});
      p.finish();
    }
    c.alpha = r.get_or<double>("alpha", c.alpha);
    c.outer_n = r.get_or<std::uint64_t>("outer_n", c.outer_n);
    c.inner_n = r.get_or<std::uint64_t>("inner_n", c.inner_n);
    c.size_n = r.get_or<std::uint64_t>("size_n", c.size_n);
    return c;
  }
  if (kind == "lipschitz_check") {
    LipschitzConfig c;
    c.tests = read_tests(r, "tests");
    c.d = to_dims(r.get_list<std::uint64_t>("d"));
    c.panel = r.get_or<std::uint64_t>("panel", c.panel);
    c.inner_n = r.get_or<std::uint64_t>("inner_n", c.inner_n);
    c.signal_scale = r.get_or<double>("signal_scale", c.signal_scale);
    c.max_step = r.get_or<double>("max_step", c.max_step);
    c.alpha = r.get_or<double>("alpha", c.alpha);
    return c;
  }
  parse_error(r.at("kind"), "unknown experiment kind '" + kind + "'");
}

struct ParamWriter {
  json& out;

  void operator()(const CalibrateConfig& c) const {
    out["tests"] = write_tests(c.tests);
    out["d"] = from_dims(c.d);
    out["alpha"] = c.alpha;
    out["size_n"] = c.size_n;
    out["band_level"] = c.band_level;
  }
  void operator()(const PowerCurveConfig& c) const {
    out["test"] = write_test(c.test);
    out["d"] = from_dims(c.d);
    out["alpha"] = c.alpha;
    if (c.alternative) {
      out["alternative"] = write_alternative(*c.alternative);
    } else {
      out["radius"] = c.radius;
    }
    out["n"] = c.n;
    out["size_n"] = c.size_n;
    out["trend"] = trend_name(c.trend);
  }
  void operator()(const VolumeSweepConfig& c) const {
    out["p"] = number(c.p);
    out["d"] = from_dims(c.d);
    out["t"] = c.t ? number(*c.t) : json("u_d");
    out["n"] = c.n;
    out["trend"] = trend_name(c.trend);
    out["final_exceeds_first"] = c.final_exceeds_first;
  }
  void operator()(const Theorem2Config& c) const {
    out["p"] = number(c.p);
    out["d"] = from_dims(c.d);
    out["radius"] = write_rule(c.radius);
    out["threshold"] = write_rule(c.threshold);
    out["n"] = c.n;
    out["trend"] = trend_name(c.trend);
    if (c.final_max) out["final_max"] = *c.final_max;
    if (c.test) out["test"] = write_test(*c.test);
    out["alpha"] = c.alpha;
    out["size_n"] = c.size_n;
  }
  void operator()(const Prop4Config& c) const {
    out["tests"] = write_tests(c.tests);
    out["d"] = from_dims(c.d);
    out["radius"] = write_rule(c.radius);
    out["epsilon"] = c.epsilon;
    out["alpha"] = c.alpha;
    out["outer_n"] = c.outer_n;
    out["inner_n"] = c.inner_n;
    out["decision_margin"] = c.decision_margin;
    out["size_n"] = c.size_n;
  }
  void operator()(const WapConfig& c) const {
    out["tests"] = write_tests(c.tests);
    json pts = json::array();
    for (const auto& p : c.points) pts.push_back(json{{"d", p.d}, {"r", p.r}});
    out["points"] = pts;
    out["alpha"] = c.alpha;
    out["outer_n"] = c.outer_n;
    out["inner_n"] = c.inner_n;
    out["size_n"] = c.size_n;
  }
  void operator()(const LipschitzConfig& c) const {
    out["tests"] = write_tests(c.tests);
    out["d"] = from_dims(c.d);
    out["panel"] = c.panel;
    out["inner_n"] = c.inner_n;
    out["signal_scale"] = c.signal_scale;
    out["max_step"] = c.max_step;
    out["alpha"] = c.alpha;
  }
};

json write_experiment(const ExperimentConfig& e) {
  json out;
  out["name"] = e.name;
  out["kind"] = std::string(kind_name(e.params));
  std::visit(ParamWriter{out}, e.params);
  return out;
}

ExperimentConfig read_experiment(const json& v, const std::string& path, std::uint64_t seed,
                                 bool single) {
  Reader r(v, path);
  ExperimentConfig e;
  const auto kind = r.get<std::string>("kind");
  e.name = r.get_or<std::string>("name", kind);
  if (e.name.empty() || e.name.find_first_of("/\\") != std::string::npos) {
    parse_error(r.at("name"), "name must be nonempty and free of path separators");
  }
  e.seed = seed;
  e.params = read_params(kind, r);
  if (single) {
    r.get_optional<std::uint64_t>("seed");
    r.get_optional<std::string>("output");
  }
  r.finish();
  return e;
}

}  // namespace

TestConfig TestConfig::p_norm_test(double p, Calibration calibration) {
  TestConfig t;
  t.kind = Kind::p_norm;
  t.p = p;
  t.calibration = calibration;
  return t;
}

TestConfig TestConfig::higher_criticism_test(double fraction, Calibration calibration) {
  TestConfig t;
  t.kind = Kind::higher_criticism;
  t.fraction = fraction;
  t.calibration = calibration;
  return t;
}

TestConfig TestConfig::combined_test(TestConfig primary, TestConfig enhancement) {
  TestConfig t;
  t.kind = Kind::combined;
  t.calibration = {CalibrationMethod::fixed, 0};
  t.children = {std::move(primary), std::move(enhancement)};
  return t;
}

std::string label(const TestConfig& test) {
  std::string out;
  switch (test.kind) {
    case TestConfig::Kind::p_norm:
      out = "p_norm(p=" + (std::isinf(test.p) ? std::string("inf") : format_number(test.p)) + ")";
      break;
    case TestConfig::Kind::higher_criticism:
      out = "higher_criticism(fraction=" + format_number(test.fraction) + ")";
      break;
    case TestConfig::Kind::combined:
      return "combined(" + label(test.children.at(0)) + "; " + label(test.children.at(1)) + ")";
  }
  out += "/" + method_name(test.calibration.method);
  if (test.calibration.method == CalibrationMethod::monte_carlo) {
    out += "(n=" + std::to_string(test.calibration.n) + ")";
  }
  if (test.calibration.method == CalibrationMethod::fixed) {
    out += "(kappa=" + format_number(test.critical_value) + ")";
  }
  if (test.alpha) out += "@alpha=" + format_number(*test.alpha);
  return out;
}

std::string label(const AlternativeConfig& a) {
  const auto rule = [](const DimensionRule& r) {
    return format_number(r.coefficient) + "*d^" + format_number(r.exponent) + "*ln(d)^" +
           format_number(r.log_power);
  };
  switch (a.family) {
    case AlternativeFamily::dense: return "dense(" + rule(a.amplitude) + ")";
    case AlternativeFamily::sparse_spike:
      return "sparse_spike(k=" + std::to_string(a.k) + ", " + rule(a.amplitude) + ")";
    default: return "zero";
  }
}

AlternativeRule AlternativeConfig::rule() const {
  switch (family) {
    case AlternativeFamily::dense: return AlternativeRule::dense(amplitude);
    case AlternativeFamily::sparse_spike: return AlternativeRule::sparse_spike(k, amplitude);
    default: return AlternativeRule::zero();
  }
}

TestSpec build_test(const TestConfig& test, std::size_t d, double alpha, const RngStream& rng,
                    unsigned workers) {
  const double a = test.alpha.value_or(alpha);
  switch (test.kind) {
    case TestConfig::Kind::combined:
      return combine(build_test(test.children.at(0), d, a, rng.child(0), workers),
                     build_test(test.children.at(1), d, a, rng.child(1), workers));
    case TestConfig::Kind::p_norm:
    case TestConfig::Kind::higher_criticism: {
      const TestFamily family = test.kind == TestConfig::Kind::p_norm
                                    ? TestFamily{PNormFamily{test.p}}
                                    : TestFamily{HigherCriticismFamily{test.fraction}};
      if (test.calibration.method == CalibrationMethod::fixed) {
        return TestSpec(family, d, test.critical_value, a, test.calibration);
      }
      return make_calibrated_test(family, d, a, test.calibration, rng, workers);
    }
  }
  fail(ErrorKind::invalid_input, "unknown test kind");
}

std::string_view kind_name(const ExperimentParams& params) {
  static constexpr std::string_view names[] = {"calibrate",       "power_curve",  "volume_sweep",
                                               "verify_theorem2", "verify_prop4", "wap_check",
                                               "lipschitz_check"};
  return names[params.index()];
}

SuiteConfig parse_suite(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::config_parse, std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) parse_error("<root>", "expected an object");

  SuiteConfig suite;
  if (root.contains("experiments")) {
    Reader r(root, "");
    suite.seed = r.get_or<std::uint64_t>("seed", 0);
    suite.output = r.get_optional<std::string>("output");
    const json& list = r.raw("experiments");
    if (!list.is_array() || list.empty()) parse_error("experiments", "expected a nonempty list");
    std::set<std::string> names;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "experiments[" + std::to_string(i) + "]";
      auto e = read_experiment(list[i], path, suite.seed, false);
      if (!names.insert(e.name).second) parse_error(path + ".name", "duplicate name '" + e.name + "'");
      suite.experiments.push_back(std::move(e));
    }
    r.finish();
  } else {
    suite.single = true;
    suite.seed = root.contains("seed") ? Reader::convert<std::uint64_t>(root["seed"], "seed") : 0;
    if (root.contains("output")) suite.output = Reader::convert<std::string>(root["output"], "output");
    suite.experiments.push_back(read_experiment(root, "", suite.seed, true));
  }
  return suite;
}

std::string to_text(const ExperimentConfig& experiment) {
  json out = write_experiment(experiment);
  out["seed"] = experiment.seed;
  return out.dump();
}

std::string to_text(const SuiteConfig& suite) {
  json out;
  if (suite.single) {
    out = write_experiment(suite.experiments.at(0));
    out["seed"] = suite.seed;
  } else {
    out["seed"] = suite.seed;
    json list = json::array();
    for (const auto& e : suite.experiments) list.push_back(write_experiment(e));
    out["experiments"] = list;
  }
  if (suite.output) out["output"] = *suite.output;
  return out.dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& experiment) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_text(experiment)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

// ---- validation ------------------------------------------------------------

namespace {

void check(bool ok, const std::string& where, const std::string& what) {
  if (!ok) fail(ErrorKind::invalid_input, where + ": " + what);
}

void check_alpha(double alpha, const std::string& where) {
  check(alpha > 0.0 && alpha < 1.0, where, "alpha must lie in (0,1)");
}

void check_dims(const std::vector<std::size_t>& d, const std::string& where) {
  check(!d.empty(), where, "d grid must not be empty");
  for (auto v : d) check(v >= 1, where, "d must be >= 1");
}

void check_test(const TestConfig& t, std::size_t d, double alpha, const std::string& where) {
  const double a = t.alpha.value_or(alpha);
  check_alpha(a, where);
  if (t.kind == TestConfig::Kind::combined) {
    check(t.children.size() == 2, where, "combined test needs primary and enhancement");
    check_test(t.children[0], d, a, where + ".primary");
    check_test(t.children[1], d, a, where + ".enhancement");
    return;
  }
  const bool hc = t.kind == TestConfig::Kind::higher_criticism;
  if (hc) {
    check(t.fraction > 0.0 && t.fraction <= 1.0, where, "fraction must lie in (0,1]");
    check(d >= 2, where, "higher criticism needs d >= 2");
  } else {
    check(t.p > 0.0, where, "p must be > 0");
  }
  switch (t.calibration.method) {
    case CalibrationMethod::exact:
      check(!hc && (t.p == 2.0 || std::isinf(t.p)), where,
            "exact calibration exists only for p = 2 and p = inf");
      break;
    case CalibrationMethod::clt_approx:
      check(!hc && std::isfinite(t.p), where, "clt_approx needs a finite-p p-norm test");
      break;
    case CalibrationMethod::monte_carlo:
      if (static_cast<double>(t.calibration.n) * a < 20.0) {
        fail(ErrorKind::calibration_insufficient,
             where + ": monte_carlo calibration needs n * alpha >= 20 (n=" +
                 std::to_string(t.calibration.n) + ")");
      }
      break;
    case CalibrationMethod::fixed:
      check(!std::isnan(t.critical_value), where, "critical_value must be a number");
      break;
  }
}

bool needs_size(const TestConfig& t) {
  if (t.kind == TestConfig::Kind::combined) return true;
  return t.calibration.method != CalibrationMethod::exact;
}

struct Validator {
  const std::string& name;

  std::string at(const std::string& key) const { return name + "." + key; }

  void tests(const std::vector<TestConfig>& ts, const std::vector<std::size_t>& d, double alpha,
             std::uint64_t size_n) const {
    check(!ts.empty(), at("tests"), "need at least one test");
    for (std::size_t i = 0; i < ts.size(); ++i) {
      for (auto dd : d) check_test(ts[i], dd, alpha, at("tests[" + std::to_string(i) + "]"));
      if (needs_size(ts[i])) check(size_n >= 100, at("size_n"), "size_n must be >= 100");
    }
  }

  void operator()(const CalibrateConfig& c) const {
    check_dims(c.d, at("d"));
    for (double a : c.alpha) {
      check_alpha(a, at("alpha"));
      for (std::size_t i = 0; i < c.tests.size(); ++i) {
        for (auto d : c.d) check_test(c.tests[i], d, a, at("tests[" + std::to_string(i) + "]"));
      }
    }
    check(!c.tests.empty(), at("tests"), "need at least one test");
    check(c.size_n == 0 || c.size_n >= 100, at("size_n"), "size_n must be 0 or >= 100");
    check(c.band_level > 0.0 && c.band_level < 1.0, at("band_level"), "must lie in (0,1)");
  }
  void operator()(const PowerCurveConfig& c) const {
    check_dims(c.d, at("d"));
    for (double a : c.alpha) {
      for (auto d : c.d) check_test(c.test, d, a, at("test"));
    }
    for (double r : c.radius) check(r >= 0.0 && std::isfinite(r), at("radius"), "radius must be finite and >= 0");
    if (c.alternative) {
      for (auto d : c.d) {
        check(c.alternative->family != AlternativeFamily::sparse_spike || c.alternative->k <= d,
              at("alternative.k"), "spike count exceeds d=" + std::to_string(d));
        check(std::isfinite(c.alternative->amplitude(d)), at("alternative"),
              "amplitude is not finite at d=" + std::to_string(d));
      }
    }
    check(c.n >= 100, at("n"), "n must be >= 100");
    if (needs_size(c.test)) check(c.size_n >= 100, at("size_n"), "size_n must be >= 100");
  }
  void operator()(const VolumeSweepConfig& c) const {
    check_dims(c.d, at("d"));
    check(c.p > 0.0, at("p"), "p must be > 0");
    if (!c.t) check(std::isfinite(c.p), at("t"), "t = u_d needs a finite p");
    if (c.t) check(*c.t >= 0.0, at("t"), "t must be >= 0");
    check(c.n >= 1000, at("n"), "n must be >= 1000");
  }
  void operator()(const Theorem2Config& c) const {
    check_dims(c.d, at("d"));
    check(c.p > 0.0, at("p"), "p must be > 0");
    check(c.n >= 1000, at("n"), "n must be >= 1000");
    for (auto d : c.d) {
      check(c.radius(d) > 0.0 && std::isfinite(c.radius(d)), at("radius"),
            "r_d must be finite and > 0 at d=" + std::to_string(d));
      check(c.threshold(d) >= 0.0, at("threshold"), "s_d must be >= 0 at d=" + std::to_string(d));
    }
    if (c.test) {
      check(c.test->kind == TestConfig::Kind::p_norm && std::isfinite(c.test->p) && c.test->p == c.p,
            at("test"), "the bound check needs a finite-p p-norm test with the sweep's p");
      for (auto d : c.d) check_test(*c.test, d, c.alpha, at("test"));
      check(c.d.size() >= 2, at("d"), "the bound check needs at least two grid points");
      if (needs_size(*c.test)) check(c.size_n >= 100, at("size_n"), "size_n must be >= 100");
      Theorem3Config t3;
      t3.family = PNormFamily{c.p};
      t3.d_grid = c.d;
      t3.radius = c.radius;
      t3.threshold = c.threshold;
      check_theorem3_premise(t3);
    }
  }
  void operator()(const Prop4Config& c) const {
    check_dims(c.d, at("d"));
    check_alpha(c.alpha, at("alpha"));
    tests(c.tests, c.d, c.alpha, c.size_n);
    check(c.epsilon > 0.0 && c.epsilon < 1.0, at("epsilon"), "epsilon must lie in (0,1)");
    check(c.outer_n >= 1, at("outer_n"), "outer_n must be >= 1");
    check(3.0 / std::sqrt(static_cast<double>(c.inner_n)) <= c.epsilon / 4.0, at("inner_n"),
          "need 3/sqrt(inner_n) <= epsilon/4");
    check(c.decision_margin >= 0.0, at("decision_margin"), "must be >= 0");
    for (auto d : c.d) check(c.radius(d) > 0.0, at("radius"), "r must be > 0");
  }
  void operator()(const WapConfig& c) const {
    check_alpha(c.alpha, at("alpha"));
    std::vector<std::size_t> dims;
    for (const auto& p : c.points) {
      check(p.d >= 1 && p.r > 0.0, at("points"), "need d >= 1 and r > 0");
      dims.push_back(p.d);
    }
    tests(c.tests, dims, c.alpha, c.size_n);
    check(c.outer_n >= 2, at("outer_n"), "outer_n must be >= 2");
    check(c.inner_n >= 1, at("inner_n"), "inner_n must be >= 1");
  }
  void operator()(const LipschitzConfig& c) const {
    check_dims(c.d, at("d"));
    check_alpha(c.alpha, at("alpha"));
    tests(c.tests, c.d, c.alpha, 100);
    check(c.panel >= 1, at("panel"), "panel must be >= 1");
    check(c.inner_n >= 100, at("inner_n"), "inner_n must be >= 100");
    check(c.signal_scale >= 0.0 && c.max_step >= 0.0, at("max_step"), "scales must be >= 0");
  }
};

}  // namespace

void validate(const ExperimentConfig& experiment) {
  std::visit(Validator{experiment.name}, experiment.params);
}

}  // namespace hdlab
