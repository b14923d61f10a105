#include "retroimg/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "retroimg/error.hpp"

namespace retroimg {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || (s[i] == ',' && depth == 0)) {
      const auto item = trim(s.substr(start, i - start));
      if (!item.empty()) out.push_back(item);
      start = i + 1;
    } else if (s[i] == '(') {
      ++depth;
    } else if (s[i] == ')') {
      --depth;
    }
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

class LineError {
 public:
  explicit LineError(std::size_t line) : line_(line) {}
  [[noreturn]] void operator()(const std::string& what) const {
    std::ostringstream msg;
    msg << "config line " << line_ << ": " << what;
    throw Error(ErrorCode::Validation, msg.str());
  }

 private:
  std::size_t line_;
};

double parse_number(std::string_view v, const LineError& err) {
  const auto d = to_double(v);
  if (!d) err("expected a number, got '" + std::string(v) + "'");
  return *d;
}

double parse_positive(std::string_view v, const LineError& err) {
  const double d = parse_number(v, err);
  if (!(d > 0.0)) err("value must be positive, got '" + std::string(v) + "'");
  return d;
}

bool parse_bool(std::string_view v, const LineError& err) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  err("expected true or false, got '" + std::string(v) + "'");
}

const std::map<std::string_view, ScenarioKind> kScenarioNames = {
    {"fig3-direct", ScenarioKind::Fig3Direct},
    {"fourier-2f", ScenarioKind::Fourier2f},
    {"custom", ScenarioKind::Custom},
};
const std::map<std::string_view, DetectorKind> kDetectorNames = {
    {"gaussian", DetectorKind::Gaussian},
    {"tophat", DetectorKind::TopHat},
    {"point", DetectorKind::Point},
};
const std::map<std::string_view, MaskKind> kMaskNames = {
    {"none", MaskKind::None},
    {"double-slit", MaskKind::DoubleSlit},
    {"single-slit", MaskKind::SingleSlit},
    {"gaussian-aperture", MaskKind::GaussianAperture},
    {"table", MaskKind::Table},
};

template <class Enum>
Enum lookup(const std::map<std::string_view, Enum>& names, std::string_view v, const LineError& err) {
  const auto it = names.find(v);
  if (it == names.end()) {
    std::string options;
    for (const auto& [name, _] : names) options += (options.empty() ? "" : " | ") + std::string(name);
    err("unknown value '" + std::string(v) + "' (expected " + options + ")");
  }
  return it->second;
}

template <class Enum>
std::string_view name_of(const std::map<std::string_view, Enum>& names, Enum e) {
  for (const auto& [name, value] : names)
    if (value == e) return name;
  return "?";
}

// Element token grammar: propagate(z) | fourier_lens | quadratic_phase(f) | mask
struct ElementToken {
  std::string name;
  std::optional<double> argument;
};

std::optional<ElementToken> parse_element_token(std::string_view tok) {
  const auto open = tok.find('(');
  if (open == std::string_view::npos) return ElementToken{std::string(trim(tok)), std::nullopt};
  if (tok.back() != ')') return std::nullopt;
  const auto arg = to_double(trim(tok.substr(open + 1, tok.size() - open - 2)));
  if (!arg) return std::nullopt;
  return ElementToken{std::string(trim(tok.substr(0, open))), arg};
}

void check_element_token(std::string_view tok, const LineError& err) {
  const auto parsed = parse_element_token(tok);
  if (!parsed) err("malformed element '" + std::string(tok) + "'");
  const auto& [name, arg] = *parsed;
  const bool needs_arg = name == "propagate" || name == "quadratic_phase";
  const bool bare = name == "fourier_lens" || name == "mask";
  if (!needs_arg && !bare) err("unknown element '" + name + "'");
  if (needs_arg && !arg) err("element '" + name + "' needs an argument, e.g. " + name + "(2)");
  if (bare && arg) err("element '" + name + "' takes no argument");
}

void validate(const ScenarioConfig& c) {
  TransverseGrid grid(c.n, c.extent);  // throws for bad n / extent
  (void)grid;
  if (c.scenario != ScenarioKind::Custom && (!c.arm1.empty() || !c.arm2.empty()))
    fail("arm1/arm2 may only be given for scenario = custom");
  if (c.mask.kind == MaskKind::Table && c.mask.file.empty())
    fail("mask = table needs mask.file");
  if (c.mask.kind == MaskKind::DoubleSlit && !(c.mask.separation > c.mask.width))
    fail("double slit needs mask.separation > mask.width");
  for (const auto& tok : c.arm1) {
    if (tok == "mask" && c.mask.kind == MaskKind::None)
      fail("arm1 lists a mask element but mask = none");
  }
  for (const auto& tok : c.arm2) {
    if (tok == "mask" && c.mask.kind == MaskKind::None)
      fail("arm2 lists a mask element but mask = none");
  }
}

std::vector<std::pair<double, cplx>> read_mask_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open mask table '" + path + "'");
  std::vector<std::pair<double, cplx>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto cols = split_list(body);
    std::vector<double> nums;
    for (auto col : cols) {
      const auto d = to_double(col);
      if (!d) {
        if (rows.empty() && nums.empty()) break;  // header line
        std::ostringstream msg;
        msg << "mask table '" << path << "' line " << lineno << ": bad number '" << col << "'";
        fail(msg.str());
      }
      nums.push_back(*d);
    }
    if (nums.empty()) continue;
    if (nums.size() < 2 || nums.size() > 3) {
      std::ostringstream msg;
      msg << "mask table '" << path << "' line " << lineno << ": expected x, re[, im]";
      fail(msg.str());
    }
    rows.emplace_back(nums[0], cplx{nums[1], nums.size() == 3 ? nums[2] : 0.0});
  }
  if (rows.size() < 2) fail("mask table '" + path + "' needs at least two rows");
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].first > rows[i - 1].first)) fail("mask table '" + path + "' x must increase");
  return rows;
}

Element build_element(const ElementToken& tok, const ScenarioConfig& c, const Field& mask) {
  if (tok.name == "propagate") return Propagate{*tok.argument, c.k_z, c.fresnel_half_factor};
  if (tok.name == "fourier_lens") return FourierLens{};
  if (tok.name == "quadratic_phase") return QuadraticPhase{*tok.argument, c.k_z};
  return make_mask(mask);
}

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig c;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  std::map<std::string, std::size_t> seen;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos
                                                                           : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++lineno;
    const LineError err(lineno);

    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) err("expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) err("missing key");
    if (auto [it, fresh] = seen.emplace(key, lineno); !fresh) {
      std::ostringstream msg;
      msg << "duplicate key '" << key << "' (first set on line " << it->second << ")";
      err(msg.str());
    }

    if (key == "scenario") {
      c.scenario = lookup(kScenarioNames, value, err);
    } else if (key == "grid.n") {
      const double d = parse_positive(value, err);
      if (d != std::floor(d) || d > 1 << 24) err("grid.n must be an integer");
      c.n = static_cast<std::size_t>(d);
      const bool pow2 = (c.n & (c.n - 1)) == 0;
      if (!pow2 || c.n < 8) err("grid.n = " + std::string(value) + " is not a power of two >= 8");
    } else if (key == "grid.extent") {
      c.extent = parse_positive(value, err);
    } else if (key == "k_z") {
      c.k_z = parse_positive(value, err);
    } else if (key == "f") {
      c.focal_length = parse_positive(value, err);
    } else if (key == "kappa") {
      c.kappa = parse_positive(value, err);
    } else if (key == "fresnel_half_factor") {
      c.fresnel_half_factor = parse_bool(value, err);
    } else if (key == "detector.shape") {
      c.detector = lookup(kDetectorNames, value, err);
    } else if (key == "detector.sigma") {
      c.detector_sigma = parse_positive(value, err);
    } else if (key == "detector.width") {
      c.detector_width = parse_positive(value, err);
    } else if (key == "detector.x1") {
      c.x1 = parse_number(value, err);
    } else if (key == "detector.sweep") {
      c.sweep.clear();
      for (auto item : split_list(value)) c.sweep.push_back(parse_number(item, err));
    } else if (key == "mask") {
      c.mask.kind = lookup(kMaskNames, value, err);
    } else if (key == "mask.width") {
      c.mask.width = parse_positive(value, err);
    } else if (key == "mask.separation") {
      c.mask.separation = parse_positive(value, err);
    } else if (key == "mask.sigma") {
      c.mask.sigma = parse_positive(value, err);
    } else if (key == "mask.file") {
      c.mask.file = std::string(value);
    } else if (key == "arm1" || key == "arm2") {
      auto& arm = key == "arm1" ? c.arm1 : c.arm2;
      arm.clear();
      for (auto item : split_list(value)) {
        check_element_token(item, err);
        arm.emplace_back(item);
      }
    } else if (key == "edge_guard") {
      c.edge_guard = parse_number(value, err);
      if (c.edge_guard < 0.0) err("edge_guard must be >= 0");
    } else if (key == "output.dir") {
      if (value.empty()) err("output.dir must not be empty");
      c.output_dir = std::string(value);
    } else if (key == "output.stages") {
      c.write_stages = parse_bool(value, err);
    } else {
      err("unknown key '" + key + "'");
    }
  }
  validate(c);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream out;
  auto list = [](const auto& items, auto fmt) {
    std::string s;
    for (const auto& item : items) s += (s.empty() ? "" : ", ") + fmt(item);
    return s;
  };
  out << "scenario = " << name_of(kScenarioNames, c.scenario) << "\n"
      << "grid.n = " << c.n << "\n"
      << "grid.extent = " << format_double(c.extent) << "\n"
      << "k_z = " << format_double(c.k_z) << "\n"
      << "f = " << format_double(c.focal_length) << "\n"
      << "kappa = " << format_double(c.kappa) << "\n"
      << "fresnel_half_factor = " << (c.fresnel_half_factor ? "true" : "false") << "\n"
      << "detector.shape = " << name_of(kDetectorNames, c.detector) << "\n"
      << "detector.sigma = " << format_double(c.detector_sigma) << "\n"
      << "detector.width = " << format_double(c.detector_width) << "\n"
      << "detector.x1 = " << format_double(c.x1) << "\n";
  if (!c.sweep.empty()) out << "detector.sweep = " << list(c.sweep, format_double) << "\n";
  out << "mask = " << name_of(kMaskNames, c.mask.kind) << "\n"
      << "mask.width = " << format_double(c.mask.width) << "\n"
      << "mask.separation = " << format_double(c.mask.separation) << "\n"
      << "mask.sigma = " << format_double(c.mask.sigma) << "\n";
  if (!c.mask.file.empty()) out << "mask.file = " << c.mask.file << "\n";
  auto same = [](const std::string& s) { return s; };
  if (!c.arm1.empty()) out << "arm1 = " << list(c.arm1, same) << "\n";
  if (!c.arm2.empty()) out << "arm2 = " << list(c.arm2, same) << "\n";
  out << "edge_guard = " << format_double(c.edge_guard) << "\n"
      << "output.dir = " << c.output_dir << "\n"
      << "output.stages = " << (c.write_stages ? "true" : "false") << "\n";
  return out.str();
}

Field build_mask(const MaskSpec& spec, const TransverseGrid& grid) {
  Field t(grid);
  // Edges that land on a sample count as open on both sides of x = 0.
  const double eps = 1e-9 * grid.dx();
  auto inside = [&](double x, double centre, double width) {
    return std::abs(x - centre) <= 0.5 * width + eps;
  };
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.x(i);
    switch (spec.kind) {
      case MaskKind::None:
        t[i] = 1.0;
        break;
      case MaskKind::SingleSlit:
        t[i] = inside(x, 0.0, spec.width) ? 1.0 : 0.0;
        break;
      case MaskKind::DoubleSlit:
        t[i] = inside(x, -0.5 * spec.separation, spec.width) ||
                       inside(x, 0.5 * spec.separation, spec.width)
                   ? 1.0
                   : 0.0;
        break;
      case MaskKind::GaussianAperture:
        t[i] = std::exp(-x * x / (2.0 * spec.sigma * spec.sigma));
        break;
      case MaskKind::Table:
        break;
    }
  }
  if (spec.kind == MaskKind::Table) {
    const auto rows = read_mask_table(spec.file);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.x(i);
      if (x < rows.front().first || x > rows.back().first) continue;
      auto hi = std::lower_bound(rows.begin(), rows.end(), x,
                                 [](const auto& r, double v) { return r.first < v; });
      if (hi == rows.begin()) {
        t[i] = hi->second;
        continue;
      }
      auto lo = std::prev(hi);
      const double s = (x - lo->first) / (hi->first - lo->first);
      t[i] = (1.0 - s) * lo->second + s * hi->second;
    }
  }
  return t;
}

ImagingSetup build_setup(const ScenarioConfig& c) {
  validate(c);
  const TransverseGrid grid(c.n, c.extent);
  const Field t = build_mask(c.mask, grid);
  const bool has_mask = c.mask.kind != MaskKind::None;
  const double f = c.focal_length;
  const Propagate prop_f{f, c.k_z, c.fresnel_half_factor};

  std::vector<Element> arm1;
  std::vector<Element> arm2;
  switch (c.scenario) {
    case ScenarioKind::Fig3Direct:
    case ScenarioKind::Fourier2f:
      // Detector -> lens -> object; the object sits against the crystal.
      arm1 = {prop_f, FourierLens{}};
      if (has_mask) arm1.push_back(make_mask(t));
      if (c.scenario == ScenarioKind::Fig3Direct) {
        arm2 = {prop_f, FourierLens{}};
      } else {
        const Propagate prop_2f{2.0 * f, c.k_z, c.fresnel_half_factor};
        arm2 = {prop_2f, QuadraticPhase{f, c.k_z}, prop_2f};
      }
      break;
    case ScenarioKind::Custom:
      for (const auto& tok : c.arm1) arm1.push_back(build_element(*parse_element_token(tok), c, t));
      for (const auto& tok : c.arm2) arm2.push_back(build_element(*parse_element_token(tok), c, t));
      break;
  }

  DetectorProfile detector;
  switch (c.detector) {
    case DetectorKind::Gaussian:
      detector.shape = GaussianShape{c.detector_sigma};
      break;
    case DetectorKind::TopHat:
      detector.shape = TopHatShape{c.detector_width};
      break;
    case DetectorKind::Point:
      detector.shape = PointShape{};
      break;
  }
  detector.center = c.x1;

  ImagingSetup setup{grid, std::move(arm1), std::move(arm2),
                     make_biphoton_delta_correlated(grid, c.kappa), detector, c.edge_guard};
  for (const Element& e : setup.arm1)
    if (const auto* p = std::get_if<Propagate>(&e)) check_sampling(*p, grid);
  for (const Element& e : setup.arm2)
    if (const auto* p = std::get_if<Propagate>(&e)) check_sampling(*p, grid);
  // Resolvability of the detector is checked here rather than at run time.
  (void)materialize_detector(detector, grid);
  return setup;
}

std::vector<RetrodictiveResult> run_scenario(const ScenarioConfig& config) {
  const ImagingSetup setup = build_setup(config);
  if (config.sweep.empty()) {
    const double x1 = config.x1;
    return sweep_conditioning(setup, std::span<const double>(&x1, 1));
  }
  return sweep_conditioning(setup, config.sweep);
}

void write_conditional_csv(std::ostream& out, const ConditionalDistribution& dist) {
  out << "x2,probability_density\n";
  for (std::size_t i = 0; i < dist.density.size(); ++i)
    out << format_double(dist.grid.x(i)) << ',' << format_double(dist.density[i]) << '\n';
}

std::vector<std::pair<double, double>> read_conditional_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "x2,probability_density")
    fail("conditional CSV: missing header 'x2,probability_density'");
  std::vector<std::pair<double, double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto comma = body.find(',');
    const auto x = comma == std::string_view::npos ? std::nullopt : to_double(body.substr(0, comma));
    const auto p = comma == std::string_view::npos ? std::nullopt : to_double(body.substr(comma + 1));
    if (!x || !p) {
      std::ostringstream msg;
      msg << "conditional CSV line " << lineno << ": expected 'x2,probability_density'";
      fail(msg.str());
    }
    rows.emplace_back(*x, *p);
  }
  return rows;
}

std::string stages_json(const RetrodictiveResult& result) {
  const auto& stages = result.stages;
  const auto& grid = result.distribution.grid;
  nlohmann::json doc;
  doc["grid"] = {{"n", grid.size()}, {"extent", grid.extent()}, {"dx", grid.dx()}};
  doc["x1"] = result.distribution.conditioning_position.value_or(0.0);
  doc["x"] = grid.x_values();
  auto encode = [](const Field& f) {
    std::vector<double> mag(f.size());
    std::vector<double> phase(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      mag[i] = std::abs(f[i]);
      phase[i] = std::arg(f[i]);
    }
    return nlohmann::json{{"magnitude", mag}, {"phase", phase}};
  };
  doc["stages"] = {
      {"alpha", encode(stages.alpha)},   {"alpha1", encode(stages.alpha1)},
      {"alpha2", encode(stages.alpha2)}, {"alpha3", encode(stages.alpha3)},
      {"beta1", encode(stages.beta1)},   {"beta2", encode(stages.beta2)},
  };
  return doc.dump(1);
}

std::vector<std::filesystem::path> write_outputs(const ScenarioConfig& config,
                                                 const std::vector<RetrodictiveResult>& results,
                                                 const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create output directory '" + out_dir.string() + "': " + ec.message());

  const bool suffixed = !config.sweep.empty();
  std::vector<std::filesystem::path> written;
  for (const auto& r : results) {
    const std::string suffix =
        suffixed ? "_x1_" + format_double(r.distribution.conditioning_position.value_or(0.0)) : "";
    const auto csv_path = out_dir / ("conditional" + suffix + ".csv");
    {
      std::ofstream out(csv_path);
      if (!out) throw Error(ErrorCode::Io, "cannot write '" + csv_path.string() + "'");
      write_conditional_csv(out, r.distribution);
      if (!out) throw Error(ErrorCode::Io, "write failed for '" + csv_path.string() + "'");
    }
    written.push_back(csv_path);
    if (config.write_stages) {
      const auto json_path = out_dir / ("stages" + suffix + ".json");
      std::ofstream out(json_path);
      if (!out) throw Error(ErrorCode::Io, "cannot write '" + json_path.string() + "'");
      out << stages_json(r) << '\n';
      if (!out) throw Error(ErrorCode::Io, "write failed for '" + json_path.string() + "'");
      written.push_back(json_path);
    }
  }
  return written;
}

}  // namespace retroimg

namespace retroimg {

const std::vector<BuiltinScenario>& builtin_scenarios() {
  static const std::vector<BuiltinScenario> list = {
      {"fig3-direct", "lens arms, no object, gaussian detector",
       "scenario = fig3-direct\n"
       "grid.n = 256\n"
       "grid.extent = 16\n"
       "k_z = 50\n"
       "f = 2\n"
       "kappa = 4\n"
       "detector.shape = gaussian\n"
       "detector.sigma = 0.25\n"
       "detector.x1 = 0\n"
       "mask = none\n"},
      {"fig3-direct-double-slit", "lens arms, double slit against the crystal in arm 1; short Fresnel length keeps the slit-edge diffraction inside the window",
       "scenario = fig3-direct\n"
       "grid.n = 256\n"
       "grid.extent = 16\n"
       "k_z = 5000\n"
       "f = 2\n"
       "kappa = 4\n"
       "detector.shape = gaussian\n"
       "detector.sigma = 0.25\n"
       "detector.x1 = 0\n"
       "mask = double-slit\n"
       "mask.width = 0.4\n"
       "mask.separation = 2\n"},
      {"fourier-2f-single-slit", "2f-2f lens in arm 2, single slit in arm 1",
       "scenario = fourier-2f\n"
       "grid.n = 256\n"
       "grid.extent = 16\n"
       "k_z = 5000\n"
       "f = 2\n"
       "kappa = 4\n"
       "detector.shape = gaussian\n"
       "detector.sigma = 0.25\n"
       "detector.x1 = 0\n"
       "mask = single-slit\n"
       "mask.width = 0.8\n"},
  };
  return list;
}

}  // namespace retroimg
