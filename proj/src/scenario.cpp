#include "rigidsim/scenario.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rigidsim/io.hpp"

namespace rigidsim {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"", {"name"}},
      {"graph", {"agents", "dim", "edges", "targets"}},
      {"initial", {}},
      {"controller", {"kind"}},
      {"trigger", {"gamma", "gamma_i", "a_i", "v_i", "theta_i"}},
      {"integration", {"step", "duration", "sample_every", "bisection"}},
  };
  return keys;
}

[[noreturn]] void fail(const std::string& field, int line, const std::string& what) {
  std::ostringstream msg;
  if (line > 0) msg << "line " << line << ": ";
  msg << field << ": " << what;
  throw ScenarioError(msg.str());
}

double to_double(const std::string& tok, const std::string& field, int line) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) fail(field, line, "expected a number, got '" + tok + "'");
  return v;
}

std::size_t to_count(const std::string& tok, const std::string& field, int line) {
  std::size_t v = 0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    fail(field, line, "expected a non-negative integer, got '" + tok + "'");
  }
  return v;
}

std::vector<double> numbers(const Entry& e, const std::string& field) {
  std::vector<double> out;
  for (const auto& tok : split_ws(e.value)) out.push_back(to_double(tok, field, e.line));
  return out;
}

const Entry& required(const std::map<std::string, Section>& doc, const std::string& section,
                      const std::string& key) {
  auto s = doc.find(section);
  if (s == doc.end()) fail("[" + section + "]", 0, "section is required");
  auto k = s->second.find(key);
  if (k == s->second.end()) fail(section + "." + key, 0, "key is required");
  return k->second;
}

const Entry* optional_entry(const std::map<std::string, Section>& doc, const std::string& section,
                            const std::string& key) {
  auto s = doc.find(section);
  if (s == doc.end()) return nullptr;
  auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

std::vector<double> per_agent(const std::map<std::string, Section>& doc, const std::string& key,
                              std::size_t agents, double fallback) {
  const Entry* e = optional_entry(doc, "trigger", key);
  if (!e) return std::vector<double>(agents, fallback);
  const auto field = "trigger." + key;
  auto v = numbers(*e, field);
  if (v.size() == 1) return std::vector<double>(agents, v[0]);
  if (v.size() != agents) {
    fail(field, e->line, "expected 1 or " + std::to_string(agents) + " values, got " +
                             std::to_string(v.size()));
  }
  return v;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += ' ';
    out += format_double(v[k]);
  }
  return out;
}

}  // namespace

Scenario parse_scenario_text(std::string_view text) {
  std::map<std::string, Section> doc;
  doc[""];
  std::string section;
  std::istringstream in{std::string(text)};
  int line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("section header", line_no, "missing closing ']'");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_keys().count(section)) fail("[" + section + "]", line_no, "unknown section");
      if (doc.count(section)) fail("[" + section + "]", line_no, "section appears twice");
      doc[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("line", line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string field = section.empty() ? key : section + "." + key;
    const bool initial_key = section == "initial" && key.size() > 1 && key[0] == 'p';
    if (!initial_key && !known_keys().at(section).count(key)) fail(field, line_no, "unknown key");
    if (!doc[section].emplace(key, Entry{value, line_no}).second) {
      fail(field, line_no, "key appears twice");
    }
  }

  const Entry& agents_e = required(doc, "graph", "agents");
  const Entry& dim_e = required(doc, "graph", "dim");
  const std::size_t agents = to_count(agents_e.value, "graph.agents", agents_e.line);
  const std::size_t dim = to_count(dim_e.value, "graph.dim", dim_e.line);

  const Entry& edges_e = required(doc, "graph", "edges");
  std::vector<Edge> edges;
  for (const auto& tok : split_ws(edges_e.value)) {
    const auto dash = tok.find('-');
    if (dash == std::string::npos) fail("graph.edges", edges_e.line, "expected 'i-j', got '" + tok + "'");
    const std::size_t i = to_count(tok.substr(0, dash), "graph.edges", edges_e.line);
    const std::size_t j = to_count(tok.substr(dash + 1), "graph.edges", edges_e.line);
    if (i < 1 || j < 1) fail("graph.edges", edges_e.line, "vertices are 1-based");
    edges.push_back({i - 1, j - 1});
  }
  const Entry& targets_e = required(doc, "graph", "targets");
  auto targets = numbers(targets_e, "graph.targets");
  if (targets.size() == 1 && edges.size() > 1) targets.assign(edges.size(), targets[0]);

  std::optional<FormationGraph> graph;
  try {
    graph.emplace(agents, dim, std::move(edges), std::move(targets));
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }

  Vector p(static_cast<Eigen::Index>(agents * dim));
  for (std::size_t i = 0; i < agents; ++i) {
    const std::string key = "p" + std::to_string(i + 1);
    const Entry& e = required(doc, "initial", key);
    const auto coords = numbers(e, "initial." + key);
    if (coords.size() != dim) {
      fail("initial." + key, e.line, "expected " + std::to_string(dim) + " coordinates");
    }
    for (std::size_t c = 0; c < dim; ++c) p(static_cast<Eigen::Index>(i * dim + c)) = coords[c];
  }
  if (doc["initial"].size() != agents) {
    fail("[initial]", 0, "expected exactly p1..p" + std::to_string(agents));
  }

  const Entry& kind_e = required(doc, "controller", "kind");
  const auto kind = parse_controller_kind(kind_e.value);
  if (!kind) fail("controller.kind", kind_e.line, "unknown controller '" + kind_e.value + "'");

  Scenario s{std::string{}, *graph, FormationState{p, 0.0}, *kind, TriggerParams{}, 1e-3, 20.0, 10,
             true};
  if (const Entry* e = optional_entry(doc, "", "name")) s.name = e->value;
  if (const Entry* e = optional_entry(doc, "trigger", "gamma")) {
    s.trigger.gamma = to_double(e->value, "trigger.gamma", e->line);
  }
  s.trigger.gamma_i = per_agent(doc, "gamma_i", agents, 0.8);
  s.trigger.a_i = per_agent(doc, "a_i", agents, 0.6);
  s.trigger.v_i = per_agent(doc, "v_i", agents, 1.0);
  s.trigger.theta_i = per_agent(doc, "theta_i", agents, 10.0);

  if (const Entry* e = optional_entry(doc, "integration", "step")) {
    s.step = to_double(e->value, "integration.step", e->line);
  }
  if (const Entry* e = optional_entry(doc, "integration", "duration")) {
    s.duration = to_double(e->value, "integration.duration", e->line);
  }
  if (const Entry* e = optional_entry(doc, "integration", "sample_every")) {
    s.sample_every = to_count(e->value, "integration.sample_every", e->line);
  }
  if (const Entry* e = optional_entry(doc, "integration", "bisection")) {
    if (e->value == "on" || e->value == "true") {
      s.bisection = true;
    } else if (e->value == "off" || e->value == "false") {
      s.bisection = false;
    } else {
      fail("integration.bisection", e->line, "expected on or off");
    }
  }
  try {
    s.validate();
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
  const FormationGraph& g = s.graph;
  std::ostringstream out;
  if (!s.name.empty()) out << "name = " << s.name << "\n\n";
  out << "[graph]\n";
  out << "agents = " << g.agents() << "\n";
  out << "dim = " << g.dim() << "\n";
  out << "edges =";
  for (const auto& e : g.edges()) out << ' ' << e.i + 1 << '-' << e.j + 1;
  out << "\ntargets = " << join(g.targets()) << "\n\n";
  out << "[initial]\n";
  for (std::size_t i = 0; i < g.agents(); ++i) {
    const Vector a = s.initial.agent(i, g.dim());
    out << 'p' << i + 1 << " = " << join(std::vector<double>(a.data(), a.data() + a.size())) << "\n";
  }
  out << "\n[controller]\nkind = " << to_string(s.controller) << "\n\n";
  out << "[trigger]\n";
  out << "gamma = " << format_double(s.trigger.gamma) << "\n";
  out << "gamma_i = " << join(s.trigger.gamma_i) << "\n";
  out << "a_i = " << join(s.trigger.a_i) << "\n";
  out << "v_i = " << join(s.trigger.v_i) << "\n";
  out << "theta_i = " << join(s.trigger.theta_i) << "\n\n";
  out << "[integration]\n";
  out << "step = " << format_double(s.step) << "\n";
  out << "duration = " << format_double(s.duration) << "\n";
  out << "sample_every = " << s.sample_every << "\n";
  out << "bisection = " << (s.bisection ? "on" : "off") << "\n";
  return out.str();
}

std::vector<std::string> preset_names() {
  return {"paper-centralized", "paper-distributed", "paper-modified", "paper-continuous"};
}

std::optional<Scenario> preset(std::string_view name) {
  const FormationGraph graph = double_tetrahedron_graph(2.0);
  const TriggerParams trigger = TriggerParams::uniform(graph.agents(), 0.6, 0.8, 0.6, 1.0, 10.0);
  Scenario s{std::string(name), graph, double_tetrahedron_initial_state(),
             ControllerKind::CentralizedEvent, trigger, 1e-3, 20.0, 10, true};
  if (name == "paper-centralized") return s;
  if (name == "paper-distributed") {
    s.controller = ControllerKind::DistributedEvent;
    s.duration = 30.0;
    return s;
  }
  if (name == "paper-modified") {
    s.controller = ControllerKind::ModifiedDistributedEvent;
    s.duration = 30.0;
    return s;
  }
  if (name == "paper-continuous") {
    s.controller = ControllerKind::Continuous;
    return s;
  }
  return std::nullopt;
}

Scenario resolve_scenario(const std::string& name_or_path) {
  if (auto p = preset(name_or_path)) return *p;
  if (std::filesystem::exists(name_or_path)) return load_scenario(name_or_path);
  throw ScenarioError("'" + name_or_path + "' is neither a preset nor a readable scenario file");
}

void apply_parameter(Scenario& s, const std::string& parameter, double value) {
  const std::size_t n = s.graph.agents();
  if (parameter == "gamma") {
    s.trigger.gamma = value;
  } else if (parameter == "gamma_i") {
    s.trigger.gamma_i.assign(n, value);
  } else if (parameter == "a_i") {
    s.trigger.a_i.assign(n, value);
  } else if (parameter == "v_i") {
    s.trigger.v_i.assign(n, value);
  } else if (parameter == "theta_i") {
    s.trigger.theta_i.assign(n, value);
  } else if (parameter == "step") {
    s.step = value;
  } else {
    throw ScenarioError("unknown sweep parameter '" + parameter +
                        "' (expected gamma, gamma_i, a_i, v_i, theta_i or step)");
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
}

}  // namespace rigidsim
