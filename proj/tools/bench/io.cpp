#include "bench/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "icmaxent/model.hpp"

namespace icmaxent::io {

using nlohmann::json;

namespace {

constexpr const char* kGraphFormat = "icmaxent-graph/1";
constexpr const char* kConstraintsFormat = "icmaxent-constraints/1";
constexpr const char* kJointFormat = "icmaxent-joint/1";
constexpr const char* kMarginalsFormat = "icmaxent-marginals/1";
constexpr const char* kScmFormat = "icmaxent-scm/1";
constexpr const char* kModelFormat = "icmaxent-model/1";

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw SchemaError((path.empty() ? std::string("/") : path) + ": " + message);
}

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path + "/" + key, "required field is missing");
  return *it;
}

void check_format(const json& j, const char* expected) {
  const auto& f = field(j, "format", "");
  if (!f.is_string() || f.get<std::string>() != expected) {
    fail("/format", std::string("expected \"") + expected + "\"");
  }
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

std::size_t as_index(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    fail(path, "expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

VarSet as_varset(const json& j, const std::string& path, std::size_t n_causes) {
  VarSet out;
  const auto& arr = as_array(j, path);
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const auto idx = as_index(arr[k], path + "/" + std::to_string(k));
    if (idx >= n_causes) fail(path + "/" + std::to_string(k), "variable index out of range");
    if (!out.empty() && !(out.back().index < idx)) fail(path, "variable indices must be strictly increasing");
    out.emplace_back(static_cast<std::uint32_t>(idx));
  }
  return out;
}

json varset_json(const VarSet& s) {
  json arr = json::array();
  for (auto v : s) arr.push_back(v.index);
  return arr;
}

std::vector<double> as_numbers(const json& j, const std::string& path) {
  std::vector<double> out;
  const auto& arr = as_array(j, path);
  for (std::size_t k = 0; k < arr.size(); ++k) out.push_back(as_number(arr[k], path + "/" + std::to_string(k)));
  return out;
}

// Object keyed by bitstrings of `width`, exactly one entry per configuration.
std::vector<double> config_table(const json& j, std::size_t width, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object keyed by configuration bitstrings");
  const std::size_t n = std::size_t{1} << width;
  std::vector<double> out(n, 0.0);
  std::vector<bool> seen(n, false);
  for (const auto& [key, value] : j.items()) {
    const std::string p = path + "/" + (key.empty() ? std::string("\"\"") : key);
    if (key.size() != width) fail(p, "bitstring must have " + std::to_string(width) + " characters");
    std::uint32_t local = 0;
    try {
      local = parse_bitstring(key);
    } catch (const Error& e) {
      fail(p, e.what());
    }
    out[local] = as_number(value, p);
    seen[local] = true;
  }
  for (std::uint32_t c = 0; c < n; ++c) {
    if (!seen[c]) fail(path, "missing configuration \"" + to_bitstring(c, width) + "\"");
  }
  return out;
}

json config_table_json(std::span<const double> values, std::size_t width) {
  json obj = json::object();
  for (std::uint32_t c = 0; c < values.size(); ++c) obj[to_bitstring(c, width)] = values[c];
  return obj;
}

}  // namespace

// --- graph -----------------------------------------------------------------

json graph_to_json(const GraphFile& g) {
  json j;
  j["format"] = kGraphFormat;
  j["causes"] = g.cause_names;
  json edges = json::array();
  for (const auto& e : g.graph.directed_edges()) edges.push_back({e.from.index, e.to.index});
  j["directed_edges"] = edges;
  json conf = json::array();
  for (const auto& group : g.graph.confounders()) conf.push_back(varset_json(group));
  j["confounders"] = conf;
  if (g.graph.y_parents()) j["y_parents"] = varset_json(*g.graph.y_parents());
  return j;
}

GraphFile graph_from_json(const json& j) {
  check_format(j, kGraphFormat);
  GraphFile out;
  const auto& causes = as_array(field(j, "causes", ""), "/causes");
  for (std::size_t k = 0; k < causes.size(); ++k) {
    if (!causes[k].is_string()) fail("/causes/" + std::to_string(k), "expected a string");
    out.cause_names.push_back(causes[k].get<std::string>());
  }
  const std::size_t d = out.cause_names.size();
  if (d == 0) fail("/causes", "at least one cause is required");

  std::vector<Edge> edges;
  if (j.contains("directed_edges")) {
    const auto& arr = as_array(j["directed_edges"], "/directed_edges");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string p = "/directed_edges/" + std::to_string(k);
      if (!arr[k].is_array() || arr[k].size() != 2) fail(p, "expected [from, to]");
      const auto from = as_index(arr[k][0], p + "/0");
      const auto to = as_index(arr[k][1], p + "/1");
      if (from >= d || to >= d) fail(p, "edge endpoint out of range");
      edges.push_back({VarId{static_cast<std::uint32_t>(from)}, VarId{static_cast<std::uint32_t>(to)}});
    }
  }
  std::vector<VarSet> confounders;
  if (j.contains("confounders")) {
    const auto& arr = as_array(j["confounders"], "/confounders");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      confounders.push_back(as_varset(arr[k], "/confounders/" + std::to_string(k), d));
    }
  }
  std::optional<VarSet> y_parents;
  if (j.contains("y_parents") && !j["y_parents"].is_null()) {
    y_parents = as_varset(j["y_parents"], "/y_parents", d);
  }
  try {
    out.graph = GraphSpec(d, std::move(edges), std::move(confounders), std::move(y_parents));
  } catch (const Error& e) {
    fail("", e.what());
  }
  return out;
}

// --- constraints -----------------------------------------------------------

json constraint_to_json(const ConstraintSpec& c) {
  json j;
  j["kind"] = std::string(to_string(c.kind));
  if (c.kind == ConstraintKind::marginal) {
    const auto& st = c.statistic;
    const std::size_t w = st.scope().size();
    const std::size_t half = std::size_t{1} << w;
    json stat;
    stat["scope"] = varset_json(st.scope());
    stat["y0"] = config_table_json(st.values().subspan(0, half), w);
    stat["y1"] = config_table_json(st.values().subspan(half, half), w);
    j["statistic"] = stat;
    j["targets"] = json{{"", c.targets[0]}};
    return j;
  }
  j["cond_set"] = varset_json(c.cond_set);
  j["int_set"] = varset_json(c.int_set);
  j["targets"] = config_table_json(c.targets, c.scope().size());
  return j;
}

ConstraintSpec constraint_from_json(const json& j, std::size_t n_causes) {
  const auto& kind_j = field(j, "kind", "");
  if (!kind_j.is_string()) fail("/kind", "expected a string");
  ConstraintKind kind;
  try {
    kind = parse_constraint_kind(kind_j.get<std::string>());
  } catch (const Error& e) {
    fail("/kind", e.what());
  }

  ConstraintSpec c;
  c.kind = kind;
  if (kind == ConstraintKind::marginal) {
    if (j.contains("statistic")) {
      const auto& st = j["statistic"];
      const VarSet scope = as_varset(field(st, "scope", "/statistic"), "/statistic/scope", n_causes);
      auto y0 = config_table(field(st, "y0", "/statistic"), scope.size(), "/statistic/y0");
      const auto y1 = config_table(field(st, "y1", "/statistic"), scope.size(), "/statistic/y1");
      y0.insert(y0.end(), y1.begin(), y1.end());
      c.statistic = StatisticTable(scope, std::move(y0));
    }
    c.targets = config_table(field(j, "targets", ""), 0, "/targets");
  } else {
    if (j.contains("cond_set")) c.cond_set = as_varset(j["cond_set"], "/cond_set", n_causes);
    if (j.contains("int_set")) c.int_set = as_varset(j["int_set"], "/int_set", n_causes);
    c.targets = config_table(field(j, "targets", ""), c.scope().size(), "/targets");
  }
  try {
    c.validate(n_causes);
  } catch (const Error& e) {
    fail("", e.what());
  }
  return c;
}

json constraints_to_json(const ConstraintFile& f) {
  json j;
  j["format"] = kConstraintsFormat;
  j["n_causes"] = f.n_causes;
  json arr = json::array();
  for (const auto& c : f.constraints) arr.push_back(constraint_to_json(c));
  j["constraints"] = arr;
  return j;
}

ConstraintFile constraints_from_json(const json& j) {
  check_format(j, kConstraintsFormat);
  ConstraintFile f;
  f.n_causes = as_index(field(j, "n_causes", ""), "/n_causes");
  if (f.n_causes == 0 || f.n_causes > kMaxCauses) fail("/n_causes", "out of range");
  const auto& arr = as_array(field(j, "constraints", ""), "/constraints");
  for (std::size_t k = 0; k < arr.size(); ++k) {
    try {
      f.constraints.push_back(constraint_from_json(arr[k], f.n_causes));
    } catch (const SchemaError& e) {
      throw SchemaError("/constraints/" + std::to_string(k) + e.what());
    }
  }
  return f;
}

// --- joint / marginals -----------------------------------------------------

json joint_to_json(const JointTable& p) {
  json j;
  j["format"] = kJointFormat;
  j["n_causes"] = p.n_causes();
  j["probs"] = std::vector<double>(p.probs().begin(), p.probs().end());
  return j;
}

JointTable joint_from_json(const json& j) {
  check_format(j, kJointFormat);
  const auto d = as_index(field(j, "n_causes", ""), "/n_causes");
  auto probs = as_numbers(field(j, "probs", ""), "/probs");
  try {
    return JointTable(d, std::move(probs));
  } catch (const Error& e) {
    fail("/probs", e.what());
  }
}

json marginals_to_json(const std::vector<double>& m) {
  json j;
  j["format"] = kMarginalsFormat;
  j["marginals"] = m;
  return j;
}

std::vector<double> marginals_from_json(const json& j) {
  check_format(j, kMarginalsFormat);
  auto m = as_numbers(field(j, "marginals", ""), "/marginals");
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (!(m[k] > 0.0 && m[k] < 1.0)) fail("/marginals/" + std::to_string(k), "must lie in (0,1)");
  }
  return m;
}

// --- scm -------------------------------------------------------------------

json scm_to_json(const ScmInstance& scm) {
  json j;
  j["format"] = kScmFormat;
  GraphFile g{{}, scm.graph()};
  for (std::size_t i = 0; i < scm.n_causes(); ++i) g.cause_names.push_back("X" + std::to_string(i + 1));
  j["graph"] = graph_to_json(g);
  json latents = json::array();
  json causes = json::array();
  for (const auto& node : scm.nodes()) {
    if (node.role == ScmNode::Role::latent) latents.push_back(node.cpt);
    if (node.role == ScmNode::Role::cause) causes.push_back(node.cpt);
  }
  j["latent_cpts"] = latents;
  j["cause_cpts"] = causes;
  j["y_cpt"] = scm.nodes().back().cpt;
  return j;
}

ScmInstance scm_from_json(const json& j) {
  check_format(j, kScmFormat);
  GraphFile g;
  try {
    g = graph_from_json(field(j, "graph", ""));
  } catch (const SchemaError& e) {
    throw SchemaError("/graph" + std::string(e.what()));
  }
  std::vector<std::vector<double>> latents;
  std::vector<std::vector<double>> causes;
  const auto& la = as_array(field(j, "latent_cpts", ""), "/latent_cpts");
  for (std::size_t k = 0; k < la.size(); ++k) latents.push_back(as_numbers(la[k], "/latent_cpts/" + std::to_string(k)));
  const auto& ca = as_array(field(j, "cause_cpts", ""), "/cause_cpts");
  for (std::size_t k = 0; k < ca.size(); ++k) causes.push_back(as_numbers(ca[k], "/cause_cpts/" + std::to_string(k)));
  auto y = as_numbers(field(j, "y_cpt", ""), "/y_cpt");
  try {
    return ScmInstance(std::move(g.graph), std::move(latents), std::move(causes), std::move(y));
  } catch (const Error& e) {
    fail("", e.what());
  }
}

// --- model -----------------------------------------------------------------

json model_to_json(const FitResult& fit) {
  const auto& m = fit.model;
  json j;
  j["format"] = kModelFormat;
  j["n_causes"] = m.n_causes();
  json cons = json::array();
  for (const auto& c : m.constraints()) cons.push_back(constraint_to_json(c));
  j["constraints"] = cons;
  json manifest = json::array();
  const auto slots = multiplier_layout(m.constraints());
  for (const auto& s : slots) {
    const auto& c = m.constraints()[s.constraint];
    const std::size_t width = c.kind == ConstraintKind::marginal ? 0 : c.scope().size();
    manifest.push_back({{"constraint", s.constraint},
                        {"kind", std::string(to_string(c.kind))},
                        {"config", to_bitstring(s.config, width)}});
  }
  j["lambda_manifest"] = manifest;
  j["lambda"] = fit.lambda.entries;
  j["beta"] = std::vector<double>(m.log_norm().begin(), m.log_norm().end());
  const auto& r = fit.report;
  j["report"] = {{"residual_norm", r.residual_norm},     {"restarts", r.restarts},
                 {"converged", r.converged},             {"optimizer_success", r.optimizer_success},
                 {"iterations", r.iterations},           {"conditional_entropy", r.conditional_entropy},
                 {"norm_history", r.norm_history}};
  return j;
}

ModelFile model_from_json(const json& j) {
  check_format(j, kModelFormat);
  ModelFile f;
  f.n_causes = as_index(field(j, "n_causes", ""), "/n_causes");
  if (f.n_causes == 0 || f.n_causes > kMaxCauses) fail("/n_causes", "out of range");
  const auto& cons = as_array(field(j, "constraints", ""), "/constraints");
  for (std::size_t k = 0; k < cons.size(); ++k) {
    try {
      f.constraints.push_back(constraint_from_json(cons[k], f.n_causes));
    } catch (const SchemaError& e) {
      throw SchemaError("/constraints/" + std::to_string(k) + e.what());
    }
  }
  f.lambda.entries = as_numbers(field(j, "lambda", ""), "/lambda");
  if (f.lambda.size() != count_multipliers(f.constraints)) fail("/lambda", "length does not match the constraints");
  f.beta = as_numbers(field(j, "beta", ""), "/beta");
  if (f.beta.size() != (std::size_t{1} << f.n_causes)) fail("/beta", "expected one entry per configuration");
  const auto& r = field(j, "report", "");
  f.report.residual_norm = as_number(field(r, "residual_norm", "/report"), "/report/residual_norm");
  f.report.restarts = static_cast<int>(as_index(field(r, "restarts", "/report"), "/report/restarts"));
  f.report.converged = as_bool(field(r, "converged", "/report"), "/report/converged");
  f.report.optimizer_success = as_bool(field(r, "optimizer_success", "/report"), "/report/optimizer_success");
  f.report.iterations = static_cast<int>(as_index(field(r, "iterations", "/report"), "/report/iterations"));
  f.report.conditional_entropy =
      as_number(field(r, "conditional_entropy", "/report"), "/report/conditional_entropy");
  if (r.contains("norm_history")) f.report.norm_history = as_numbers(r["norm_history"], "/report/norm_history");
  return f;
}

// --- files -----------------------------------------------------------------

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path.string() + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  out << j.dump(2) << '\n';
}

void write_dataset_csv(std::ostream& os, const Dataset& ds) {
  const auto cols = ds.columns();
  if (const auto& iv = ds.intervention()) {
    os << "# intervention: ";
    for (std::size_t k = 0; k < iv->vars.size(); ++k) {
      os << (k ? "," : "") << cols[iv->vars[k].index] << '=' << int(iv->values[k]);
    }
    os << '\n';
  }
  for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
  os << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t v = 0; v < ds.n_causes(); ++v) os << ((ds.x(i) >> v) & 1u) << ',';
    os << int(ds.y(i)) << '\n';
  }
}

Dataset read_dataset_csv(std::istream& is, const std::string& name) {
  std::string line;
  std::size_t line_no = 0;
  auto error = [&](const std::string& msg) { return SchemaError(name + ":" + std::to_string(line_no) + ": " + msg); };

  std::optional<Intervention> intervention;
  std::string pending_intervention;
  if (!std::getline(is, line)) throw error("empty file");
  ++line_no;
  const std::string tag = "# intervention: ";
  if (line.rfind(tag, 0) == 0) {
    pending_intervention = line.substr(tag.size());
    if (!std::getline(is, line)) throw error("missing header");
    ++line_no;
  }
  // Header.
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
  }
  if (cols.size() < 2 || cols.back() != "Y") throw error("header must be X1,...,XD,Y");
  const std::size_t d = cols.size() - 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (cols[i] != "X" + std::to_string(i + 1)) throw error("header column " + std::to_string(i + 1) + " must be X" + std::to_string(i + 1));
  }
  if (!pending_intervention.empty()) {
    Intervention iv;
    std::stringstream ss(pending_intervention);
    std::string item;
    std::vector<std::pair<std::uint32_t, std::uint8_t>> items;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || item.size() != eq + 2 || (item[eq + 1] != '0' && item[eq + 1] != '1')) {
        line_no = 1;
        throw error("malformed intervention item \"" + item + "\"");
      }
      const auto col = std::find(cols.begin(), cols.end() - 1, item.substr(0, eq));
      if (col == cols.end() - 1) {
        line_no = 1;
        throw error("unknown intervened column \"" + item.substr(0, eq) + "\"");
      }
      items.emplace_back(static_cast<std::uint32_t>(col - cols.begin()), static_cast<std::uint8_t>(item[eq + 1] - '0'));
    }
    std::sort(items.begin(), items.end());
    for (const auto& [v, val] : items) {
      iv.vars.emplace_back(v);
      iv.values.push_back(val);
    }
    intervention = std::move(iv);
  }

  Dataset ds(d, intervention);
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.size() != 2 * cols.size() - 1) throw error("expected " + std::to_string(cols.size()) + " binary cells");
    std::uint32_t x = 0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const char ch = line[2 * k];
      if ((ch != '0' && ch != '1') || (k + 1 < cols.size() && line[2 * k + 1] != ',')) {
        throw error("cells must be 0 or 1 separated by commas");
      }
      if (k < d) x |= static_cast<std::uint32_t>(ch - '0') << k;
    }
    try {
      ds.add_row(x, static_cast<std::uint8_t>(line.back() - '0'));
    } catch (const Error& e) {
      throw error(e.what());
    }
  }
  return ds;
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  write_dataset_csv(out, ds);
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path.string() + ": cannot open file");
  return read_dataset_csv(in, path.string());
}

}  // namespace icmaxent::io
