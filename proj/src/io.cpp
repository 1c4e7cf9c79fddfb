#include "echoqm/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "echoqm/errors.hpp"

namespace echoqm {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) fail(ErrorCode::IoError, "cannot format number");
  return std::string(buf, end);
}

namespace {

double parse_double(std::string_view text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    fail(ErrorCode::SchemaMismatch, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view text) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    fail(ErrorCode::SchemaMismatch, "not an unsigned integer: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  for (std::string_view line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

template <class T>
T field(const Json& j, const char* name) {
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ConfigParse, std::string("field '") + name + "': " + e.what());
  }
}

void reject_unknown(const Json& j, std::initializer_list<std::string_view> known, std::string_view where) {
  if (!j.is_object()) fail(ErrorCode::ConfigParse, std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (std::string_view k : known) ok = ok || k == key;
    if (!ok) fail(ErrorCode::ConfigParse, "unknown field '" + key + "' in " + std::string(where));
  }
}

}  // namespace

Json to_json(const PulseTrain& train) {
  return Json{{"kind", to_string(train.kind)}, {"tau", train.tau},         {"n_steps", train.n_steps},
              {"u1", train.u1},                {"u2", train.u2},           {"epsilon", train.epsilon},
              {"kerr_sign", train.kerr_sign},  {"seed", train.seed},       {"delta_eps", train.delta_eps}};
}

PulseTrain pulse_train_from_json(const Json& j) {
  reject_unknown(j, {"kind", "tau", "n_steps", "u1", "u2", "epsilon", "kerr_sign", "seed", "delta_eps"}, "pulse train");
  PulseTrain t;
  t.kind = parse_drive_kind(field<std::string>(j, "kind"));
  t.tau = field<double>(j, "tau");
  t.n_steps = field<int>(j, "n_steps");
  t.u1 = field<std::vector<double>>(j, "u1");
  t.u2 = field<std::vector<double>>(j, "u2");
  t.epsilon = field<double>(j, "epsilon");
  t.kerr_sign = field<int>(j, "kerr_sign");
  t.seed = field<std::uint64_t>(j, "seed");
  if (j.contains("delta_eps")) t.delta_eps = field<double>(j, "delta_eps");
  if (static_cast<int>(t.u1.size()) != t.n_steps || static_cast<int>(t.u2.size()) != t.n_steps) {
    fail(ErrorCode::ConfigValidation, "amplitude arrays must have n_steps entries");
  }
  if (t.kerr_sign != 1 && t.kerr_sign != -1) fail(ErrorCode::ConfigValidation, "kerr_sign must be +1 or -1");
  return t;
}

Json to_json(const ProtocolConfig& c) {
  Json fluct = nullptr;
  if (c.fluctuation) fluct = Json{{"delta_eps", c.fluctuation->delta_eps}, {"seed", c.fluctuation->seed}};
  return Json{{"dim", c.dim},
              {"kind", to_string(c.kind)},
              {"epsilon", c.epsilon},
              {"tau", c.tau},
              {"T", c.T},
              {"kappa", c.kappa},
              {"eps_dp", c.eps_dp},
              {"povm", to_string(c.povm)},
              {"seed", c.seed},
              {"fluctuation", fluct},
              {"fluctuation_scope", to_string(c.fluctuation_scope)},
              {"loss_scope", to_string(c.loss_scope)}};
}

ProtocolConfig config_from_json(const Json& j) {
  reject_unknown(j,
                 {"dim", "kind", "epsilon", "tau", "T", "kappa", "eps_dp", "povm", "seed", "fluctuation",
                  "fluctuation_scope", "loss_scope"},
                 "config");
  ProtocolConfig c;
  if (j.contains("dim")) c.dim = field<int>(j, "dim");
  if (j.contains("kind")) c.kind = parse_drive_kind(field<std::string>(j, "kind"));
  if (j.contains("epsilon")) c.epsilon = field<double>(j, "epsilon");
  if (j.contains("tau")) c.tau = field<double>(j, "tau");
  if (j.contains("T")) c.T = field<double>(j, "T");
  if (j.contains("kappa")) c.kappa = field<double>(j, "kappa");
  if (j.contains("eps_dp")) c.eps_dp = field<double>(j, "eps_dp");
  if (j.contains("povm")) c.povm = parse_povm_kind(field<std::string>(j, "povm"));
  if (j.contains("seed")) c.seed = field<std::uint64_t>(j, "seed");
  if (j.contains("fluctuation") && !j.at("fluctuation").is_null()) {
    const Json& f = j.at("fluctuation");
    reject_unknown(f, {"delta_eps", "seed"}, "fluctuation");
    FluctuationSpec spec;
    if (f.contains("delta_eps")) spec.delta_eps = field<double>(f, "delta_eps");
    if (f.contains("seed")) spec.seed = field<std::uint64_t>(f, "seed");
    c.fluctuation = spec;
  }
  if (j.contains("fluctuation_scope")) c.fluctuation_scope = parse_fluctuation_scope(field<std::string>(j, "fluctuation_scope"));
  if (j.contains("loss_scope")) c.loss_scope = parse_loss_scope(field<std::string>(j, "loss_scope"));
  c.validate();
  return c;
}

ProtocolConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ConfigParse, path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void apply_override(ProtocolConfig& config, std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    fail(ErrorCode::ConfigParse, "override must look like key=value: '" + std::string(assignment) + "'");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  Json value;
  try {
    value = Json::parse(raw);
  } catch (const nlohmann::json::parse_error&) {
    value = raw;
  }
  Json j = to_json(config);
  if (const std::size_t dot = key.find('.'); dot != std::string::npos) {
    const std::string outer = key.substr(0, dot), inner = key.substr(dot + 1);
    if (outer != "fluctuation") fail(ErrorCode::ConfigParse, "unknown field '" + key + "'");
    if (j[outer].is_null()) j[outer] = Json{{"delta_eps", 0.0}, {"seed", 0}};
    j[outer][inner] = value;
  } else {
    if (!j.contains(key)) fail(ErrorCode::ConfigParse, "unknown field '" + key + "'");
    j[key] = value;
  }
  config = config_from_json(j);
}

std::string config_hash(const ProtocolConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json(config).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json to_json(const PropagationReport& r) {
  return Json{{"final_tail_population", r.final_tail_population},
              {"norm_defect", r.norm_defect},
              {"substeps_used", r.substeps_used}};
}

Json to_json(const ProtocolOutcome& o) {
  return Json{{"probs", o.probs},
              {"dprobs", o.dprobs},
              {"n_mean_probe", o.n_mean_probe},
              {"n_var_probe", o.n_var_probe},
              {"report", to_json(o.report)}};
}

Json to_json(const MetrologyRecord& r) {
  Json j{{"seed", r.seed},         {"theta_b", r.theta_b}, {"cfi_max", r.cfi_max},
         {"gain_max", r.gain_max}, {"n_mean", r.n_mean},   {"n_var", r.n_var},
         {"qfi", r.qfi ? Json(*r.qfi) : Json(nullptr)},     {"config", to_json(r.config)},
         {"report", to_json(r.report)}};
  if (!r.curve.empty()) {
    Json curve = Json::array();
    for (const CurvePoint& p : r.curve) curve.push_back(Json::array({p.theta, p.cfi}));
    j["curve"] = std::move(curve);
  }
  return j;
}

Json to_json(const PowerLawFit& f) {
  return Json{{"a", f.a}, {"b", f.b}, {"weighted", f.weighted}, {"points", f.points}, {"residual_rms", f.residual_rms}};
}

Json to_json(const EnsembleSummary& s) {
  auto fit = [](const std::optional<PowerLawFit>& f) { return f ? to_json(*f) : Json(nullptr); };
  Json records = Json::array();
  for (const auto& r : s.records) records.push_back(to_json(r));
  Json failures = Json::array();
  for (const auto& f : s.failures) {
    failures.push_back(Json{{"seed", f.seed}, {"error", error_name(f.code)}, {"message", f.message}});
  }
  return Json{{"base", to_json(s.base)},
              {"seed_base", s.seed_base},
              {"n_requested", s.n_requested},
              {"n_succeeded", s.records.size()},
              {"n_excluded", s.failures.size()},
              {"mean_gain", s.mean_gain},
              {"std_gain", s.std_gain},
              {"powerlaw", fit(s.powerlaw)},
              {"powerlaw_unweighted", fit(s.powerlaw_unweighted)},
              {"thetab_powerlaw", fit(s.thetab_powerlaw)},
              {"thetab_powerlaw_unweighted", fit(s.thetab_powerlaw_unweighted)},
              {"gaussian", s.gaussian ? Json{{"mu", s.gaussian->mu}, {"sigma", s.gaussian->sigma}} : Json(nullptr)},
              {"fit_weights", "half ln-spacing to neighbours"},
              {"failures", failures},
              {"records", records}};
}

std::string records_csv(const std::vector<MetrologyRecord>& records) {
  std::string out(kRecordsHeader);
  out += '\n';
  for (const MetrologyRecord& r : records) {
    const ProtocolConfig& c = r.config;
    out += std::to_string(r.seed) + ',' + std::string(to_string(c.kind)) + ',' + std::to_string(c.dim) + ',' +
           format_double(c.epsilon) + ',' + format_double(c.T) + ',' + format_double(c.tau) + ',' +
           format_double(c.kappa) + ',' + format_double(c.eps_dp) + ',' + format_double(r.n_mean) + ',' +
           format_double(r.n_var) + ',' + format_double(r.theta_b) + ',' + format_double(r.cfi_max) + ',' +
           format_double(r.gain_max) + ',' + (r.qfi ? format_double(*r.qfi) : std::string()) + '\n';
  }
  return out;
}

std::vector<MetrologyRecord> parse_records_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != kRecordsHeader) {
    fail(ErrorCode::SchemaMismatch, "records CSV must start with the header '" + std::string(kRecordsHeader) + "'");
  }
  std::vector<MetrologyRecord> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != 14) fail(ErrorCode::SchemaMismatch, "row " + std::to_string(i) + " has " + std::to_string(f.size()) + " fields");
    MetrologyRecord r;
    r.seed = parse_u64(f[0]);
    r.config.seed = r.seed;
    try {
      r.config.kind = parse_drive_kind(f[1]);
    } catch (const Error&) {
      fail(ErrorCode::SchemaMismatch, "row " + std::to_string(i) + ": unknown kind");
    }
    r.config.dim = static_cast<int>(parse_u64(f[2]));
    r.config.epsilon = parse_double(f[3]);
    r.config.T = parse_double(f[4]);
    r.config.tau = parse_double(f[5]);
    r.config.kappa = parse_double(f[6]);
    r.config.eps_dp = parse_double(f[7]);
    r.n_mean = parse_double(f[8]);
    r.n_var = parse_double(f[9]);
    r.theta_b = parse_double(f[10]);
    r.cfi_max = parse_double(f[11]);
    r.gain_max = parse_double(f[12]);
    if (!f[13].empty()) r.qfi = parse_double(f[13]);
    out.push_back(std::move(r));
  }
  return out;
}

std::string matrix_csv(std::string_view corner, const std::vector<double>& row_axis,
                       const std::vector<double>& col_axis, const RMatrix& values) {
  if (values.rows() != static_cast<Eigen::Index>(row_axis.size()) ||
      values.cols() != static_cast<Eigen::Index>(col_axis.size())) {
    fail(ErrorCode::InvalidArgument, "matrix shape does not match its axes");
  }
  std::string out(corner);
  for (double c : col_axis) out += ',' + format_double(c);
  out += '\n';
  for (std::size_t r = 0; r < row_axis.size(); ++r) {
    out += format_double(row_axis[r]);
    for (Eigen::Index c = 0; c < values.cols(); ++c) out += ',' + format_double(values(r, c));
    out += '\n';
  }
  return out;
}

std::string wigner_csv(const WignerGrid& grid) { return matrix_csv("p\\x", grid.p_axis, grid.x_axis, grid.values); }

Json wigner_sidecar(const WignerGrid& grid, double half_extent, int resolution, const std::string& hash) {
  return Json{{"stage", grid.stage},
              {"half_extent", half_extent},
              {"resolution", resolution},
              {"cell_area", grid.cell_area},
              {"convention", "alpha = (x + i p) / sqrt(2); rows p, columns x"},
              {"config_hash", hash}};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp, ec);
      fail(ErrorCode::IoError, "write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorCode::IoError, "cannot move " + tmp.string() + " to " + path.string());
  }
}

}  // namespace echoqm
