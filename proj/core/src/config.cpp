#include <qperf/config.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include <qperf/numeric.hpp>

namespace qperf {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_number(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(line, "expected a number, got '" + s + "'");
  }
}

long long parse_integer(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(line, "expected an integer, got '" + s + "'");
  }
}

struct RawEntry {
  std::string value;
  int line = 0;
};

// Section -> key -> entry, with duplicate detection during the scan.
using RawConfig = std::map<std::string, std::map<std::string, RawEntry>>;

bool is_map_detail_key(const std::string& key) {
  if (key.rfind("row_", 0) == 0) {
    return key.size() > 4 &&
           std::all_of(key.begin() + 4, key.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  }
  if (key.rfind("inc_", 0) == 0) {
    const std::size_t us = key.find('_', 4);
    if (us == std::string::npos || us + 1 >= key.size()) return false;
    return std::all_of(key.begin() + 4, key.begin() + static_cast<long>(us),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) &&
           std::all_of(key.begin() + static_cast<long>(us) + 1, key.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  }
  return false;
}

const std::map<std::string, std::vector<std::string>>& known_keys() {
  static const std::map<std::string, std::vector<std::string>> k = {
      {"scenario", {"name", "description", "regime", "horizon"}},
      {"arrival", {"process", "states", "initial_state"}},
      {"capacity", {"process", "states", "initial_state"}},
      {"bounds",
       {"select", "theta_min", "theta_max", "theta_points", "holder_p",
        "p_grid"}},
      {"grid", {"measure", "points", "min", "max", "violation"}},
      {"montecarlo", {"paths", "seed", "confidence_z", "limit_report"}},
      {"output", {"dir"}},
  };
  return k;
}

RawConfig scan(std::string_view text) {
  RawConfig raw;
  std::string section;
  int line_no = 0;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') {
        throw ConfigError(line_no, "unterminated section header");
      }
      section = trim(body.substr(1, body.size() - 2));
      if (known_keys().find(section) == known_keys().end()) {
        throw ConfigError(line_no, "unknown section [" + section + "]");
      }
      continue;
    }
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line_no, "expected 'key = value'");
    }
    if (section.empty()) {
      throw ConfigError(line_no, "key outside of any section");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    const auto& allowed = known_keys().at(section);
    const bool known =
        std::find(allowed.begin(), allowed.end(), key) != allowed.end() ||
        ((section == "arrival" || section == "capacity") &&
         is_map_detail_key(key));
    if (!known) {
      throw ConfigError(line_no, "unknown key '" + key + "' in [" + section + "]");
    }
    auto [it, inserted] = raw[section].emplace(key, RawEntry{value, line_no});
    if (!inserted) {
      throw ConfigError(line_no, "duplicate key '" + key + "' (first at line " +
                                     std::to_string(it->second.line) + ")");
    }
  }
  return raw;
}

const RawEntry* find(const RawConfig& raw, const std::string& section,
                     const std::string& key) {
  const auto sit = raw.find(section);
  if (sit == raw.end()) return nullptr;
  const auto kit = sit->second.find(key);
  if (kit == sit->second.end()) return nullptr;
  return &kit->second;
}

const RawEntry& require(const RawConfig& raw, const std::string& section,
                        const std::string& key) {
  const RawEntry* e = find(raw, section, key);
  if (e == nullptr) {
    throw ConfigError(0, "missing required key '" + key + "' in [" + section + "]");
  }
  return *e;
}

// "v:p" pairs for finite supports.
void parse_support_pairs(const std::vector<std::string>& toks,
                         std::size_t first, int line,
                         std::vector<double>* values,
                         std::vector<double>* probs) {
  for (std::size_t i = first; i < toks.size(); ++i) {
    const std::size_t colon = toks[i].find(':');
    if (colon == std::string::npos) {
      throw ConfigError(line, "expected value:probability, got '" + toks[i] + "'");
    }
    values->push_back(parse_number(toks[i].substr(0, colon), line));
    probs->push_back(parse_number(toks[i].substr(colon + 1), line));
  }
  if (values->empty()) {
    throw ConfigError(line, "finite support needs at least one value:probability");
  }
}

std::map<std::string, double> parse_kv_numbers(
    const std::vector<std::string>& toks, std::size_t first, int line) {
  std::map<std::string, double> kv;
  for (std::size_t i = first; i < toks.size(); ++i) {
    const std::size_t eq = toks[i].find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line, "expected key=value, got '" + toks[i] + "'");
    }
    kv[toks[i].substr(0, eq)] = parse_number(toks[i].substr(eq + 1), line);
  }
  return kv;
}

double kv_get(const std::map<std::string, double>& kv, const char* key,
              int line) {
  const auto it = kv.find(key);
  if (it == kv.end()) {
    throw ConfigError(line, std::string("missing parameter '") + key + "'");
  }
  return it->second;
}

// Inline (non-map, non-channel) distribution, used for MAP increments.
IncrementDistribution parse_inline_dist(const std::string& value, int line) {
  const auto toks = split_ws(value);
  if (toks.empty()) throw ConfigError(line, "empty distribution spec");
  if (toks[0] == "constant") {
    if (toks.size() != 2) throw ConfigError(line, "usage: constant <value>");
    return IncrementDistribution::constant(parse_number(toks[1], line));
  }
  if (toks[0] == "poisson") {
    if (toks.size() != 2) throw ConfigError(line, "usage: poisson <lambda>");
    return IncrementDistribution::poisson(parse_number(toks[1], line));
  }
  if (toks[0] == "finite") {
    std::vector<double> values, probs;
    parse_support_pairs(toks, 1, line, &values, &probs);
    try {
      return IncrementDistribution::finite_support(values, probs);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(line, e.what());
    }
  }
  throw ConfigError(line, "unknown distribution kind '" + toks[0] + "'");
}

ProcessConfig parse_process(const RawConfig& raw, const std::string& section) {
  const RawEntry& proc = require(raw, section, "process");
  const auto toks = split_ws(proc.value);
  if (toks.empty()) throw ConfigError(proc.line, "empty process spec");
  const std::string& kind = toks[0];

  if (kind == "constant") {
    if (toks.size() != 2) {
      throw ConfigError(proc.line, "usage: process = constant <value>");
    }
    return ConstantProcessConfig{parse_number(toks[1], proc.line)};
  }

  if (kind == "poisson") {
    PoissonProcessConfig p;
    if (toks.size() == 2 && toks[1].find('=') == std::string::npos) {
      p.lambda = parse_number(toks[1], proc.line);
    } else {
      const auto kv = parse_kv_numbers(toks, 1, proc.line);
      for (const auto& [k, v] : kv) {
        if (k == "lambda") {
          p.lambda = v;
        } else if (k == "rate_factor") {
          p.rate_factor = v;
        } else {
          throw ConfigError(proc.line, "unknown poisson parameter '" + k + "'");
        }
      }
    }
    if (p.lambda.has_value() == p.rate_factor.has_value()) {
      throw ConfigError(proc.line,
                        "poisson needs exactly one of lambda / rate_factor");
    }
    if (p.rate_factor && section != "arrival") {
      throw ConfigError(proc.line, "rate_factor applies to the arrival side");
    }
    return p;
  }

  if (kind == "finite") {
    FiniteProcessConfig f;
    parse_support_pairs(toks, 1, proc.line, &f.values, &f.probs);
    return f;
  }

  if (kind == "channel") {
    if (section != "capacity") {
      throw ConfigError(proc.line, "channel models only describe capacity");
    }
    if (toks.size() < 2) {
      throw ConfigError(proc.line, "usage: process = channel <model> key=value ...");
    }
    const auto kv = parse_kv_numbers(toks, 2, proc.line);
    ChannelProcessConfig c;
    if (toks[1] == "attenuation") {
      c.spec = AttenuationSpec{kv_get(kv, "l", proc.line),
                               kv_get(kv, "l_a", proc.line)};
    } else if (toks[1] == "broadband") {
      c.spec = BroadbandLossySpec{kv_get(kv, "eta", proc.line),
                                  kv_get(kv, "power_ratio", proc.line)};
    } else if (toks[1] == "freespace") {
      c.spec = FreeSpaceSpec{kv_get(kv, "omega_c", proc.line),
                             kv_get(kv, "power_ratio", proc.line)};
    } else if (toks[1] == "qubit") {
      c.spec = QubitSpec{kv_get(kv, "alpha", proc.line),
                         kv_get(kv, "beta", proc.line)};
    } else {
      throw ConfigError(proc.line, "unknown channel model '" + toks[1] + "'");
    }
    return c;
  }

  if (kind == "map") {
    MapProcessConfig m;
    const RawEntry& states = require(raw, section, "states");
    const long long n = parse_integer(states.value, states.line);
    if (n < 1 || n > 64) {
      throw ConfigError(states.line, "states must lie in [1, 64]");
    }
    m.states = static_cast<std::size_t>(n);
    m.rows.resize(m.states);
    m.increments.assign(
        m.states, std::vector<IncrementDistribution>(
                      m.states, IncrementDistribution::constant(0.0)));
    for (std::size_t i = 0; i < m.states; ++i) {
      const RawEntry& row =
          require(raw, section, "row_" + std::to_string(i));
      const auto rtoks = split_ws(row.value);
      if (rtoks.size() != m.states) {
        throw ConfigError(row.line, "row needs one probability per state");
      }
      for (const auto& tok : rtoks) {
        m.rows[i].push_back(parse_number(tok, row.line));
      }
      for (std::size_t j = 0; j < m.states; ++j) {
        const std::string key =
            "inc_" + std::to_string(i) + "_" + std::to_string(j);
        const RawEntry* inc = find(raw, section, key);
        if (inc != nullptr) {
          m.increments[i][j] = parse_inline_dist(inc->value, inc->line);
        } else if (m.rows[i][j] > 0.0) {
          throw ConfigError(row.line, "missing " + key + " for a reachable transition");
        }
      }
    }
    if (const RawEntry* init = find(raw, section, "initial_state")) {
      const long long s = parse_integer(init->value, init->line);
      if (s < 0 || static_cast<std::size_t>(s) >= m.states) {
        throw ConfigError(init->line, "initial_state out of range");
      }
      m.initial_state = static_cast<std::size_t>(s);
    }
    return m;
  }

  throw ConfigError(proc.line, "unknown process kind '" + kind + "'");
}

void reject_map_details_without_map(const RawConfig& raw,
                                    const std::string& section,
                                    const ProcessConfig& p) {
  if (std::holds_alternative<MapProcessConfig>(p)) return;
  const auto sit = raw.find(section);
  if (sit == raw.end()) return;
  for (const auto& [key, entry] : sit->second) {
    if (is_map_detail_key(key) || key == "states" || key == "initial_state") {
      throw ConfigError(entry.line,
                        "'" + key + "' requires process = map");
    }
  }
}

Measure parse_measure(const std::string& s, int line) {
  if (s == "backlog") return Measure::backlog;
  if (s == "delay") return Measure::delay;
  if (s == "throughput") return Measure::throughput;
  throw ConfigError(line, "unknown measure '" + s + "'");
}

std::string render_inline_dist(const IncrementDistribution& d) {
  std::ostringstream os;
  switch (d.kind()) {
    case IncrementDistribution::Kind::constant:
      os << "constant " << format_double(d.constant_value());
      break;
    case IncrementDistribution::Kind::poisson:
      os << "poisson " << format_double(d.poisson_lambda());
      break;
    case IncrementDistribution::Kind::finite_support: {
      os << "finite";
      for (std::size_t i = 0; i < d.support_values().size(); ++i) {
        os << ' ' << format_double(d.support_values()[i]) << ':'
           << format_double(d.support_probs()[i]);
      }
      break;
    }
  }
  return os.str();
}

void render_process(std::ostringstream& os, const std::string& section,
                    const ProcessConfig& p) {
  os << '[' << section << "]\n";
  if (const auto* c = std::get_if<ConstantProcessConfig>(&p)) {
    os << "process = constant " << format_double(c->value) << '\n';
  } else if (const auto* po = std::get_if<PoissonProcessConfig>(&p)) {
    if (po->lambda) {
      os << "process = poisson lambda=" << format_double(*po->lambda) << '\n';
    } else {
      os << "process = poisson rate_factor=" << format_double(*po->rate_factor)
         << '\n';
    }
  } else if (const auto* f = std::get_if<FiniteProcessConfig>(&p)) {
    os << "process = finite";
    for (std::size_t i = 0; i < f->values.size(); ++i) {
      os << ' ' << format_double(f->values[i]) << ':'
         << format_double(f->probs[i]);
    }
    os << '\n';
  } else if (const auto* ch = std::get_if<ChannelProcessConfig>(&p)) {
    os << "process = channel ";
    if (const auto* a = std::get_if<AttenuationSpec>(&ch->spec)) {
      os << "attenuation l=" << format_double(a->l)
         << " l_a=" << format_double(a->l_a);
    } else if (const auto* b = std::get_if<BroadbandLossySpec>(&ch->spec)) {
      os << "broadband eta=" << format_double(b->eta)
         << " power_ratio=" << format_double(b->power_ratio);
    } else if (const auto* fs = std::get_if<FreeSpaceSpec>(&ch->spec)) {
      os << "freespace omega_c=" << format_double(fs->omega_c)
         << " power_ratio=" << format_double(fs->power_ratio);
    } else if (const auto* q = std::get_if<QubitSpec>(&ch->spec)) {
      os << "qubit alpha=" << format_double(q->alpha)
         << " beta=" << format_double(q->beta);
    }
    os << '\n';
  } else if (const auto* m = std::get_if<MapProcessConfig>(&p)) {
    os << "process = map\n";
    os << "states = " << m->states << '\n';
    for (std::size_t i = 0; i < m->states; ++i) {
      os << "row_" << i << " =";
      for (double v : m->rows[i]) os << ' ' << format_double(v);
      os << '\n';
    }
    for (std::size_t i = 0; i < m->states; ++i) {
      for (std::size_t j = 0; j < m->states; ++j) {
        if (m->rows[i][j] > 0.0) {
          os << "inc_" << i << '_' << j << " = "
             << render_inline_dist(m->increments[i][j]) << '\n';
        }
      }
    }
    os << "initial_state = " << m->initial_state << '\n';
  }
}

IncrementDistribution resolve_iid(const ProcessConfig& p, double capacity_rate) {
  if (const auto* c = std::get_if<ConstantProcessConfig>(&p)) {
    return IncrementDistribution::constant(c->value);
  }
  if (const auto* po = std::get_if<PoissonProcessConfig>(&p)) {
    const double lambda =
        po->lambda ? *po->lambda : *po->rate_factor * capacity_rate;
    if (!(lambda >= 0.0)) {
      throw ConfigError(0, "resolved poisson rate is negative");
    }
    return IncrementDistribution::poisson(lambda);
  }
  if (const auto* f = std::get_if<FiniteProcessConfig>(&p)) {
    try {
      return IncrementDistribution::finite_support(f->values, f->probs);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(0, e.what());
    }
  }
  if (const auto* ch = std::get_if<ChannelProcessConfig>(&p)) {
    try {
      const double q = channel_capacity(ch->spec);
      if (!std::isfinite(q)) {
        throw ConfigError(0, "channel capacity is not finite");
      }
      return IncrementDistribution::constant(q);
    } catch (const std::exception& e) {
      throw ConfigError(0, std::string("channel capacity: ") + e.what());
    }
  }
  throw ConfigError(0, "process is not i.i.d.");
}

ProcessSpec resolve_process(const ProcessConfig& p, double capacity_rate) {
  if (const auto* m = std::get_if<MapProcessConfig>(&p)) {
    try {
      return MapProcess{MapKernel(m->rows, m->increments), m->initial_state};
    } catch (const std::invalid_argument& e) {
      throw ConfigError(0, e.what());
    }
  }
  return resolve_iid(p, capacity_rate);
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  const RawConfig raw = scan(text);
  ExperimentConfig cfg;

  if (const RawEntry* e = find(raw, "scenario", "name")) cfg.name = e->value;
  if (const RawEntry* e = find(raw, "scenario", "description")) {
    cfg.description = e->value;
  }
  const RawEntry& regime = require(raw, "scenario", "regime");
  if (regime.value == "classical") {
    cfg.regime = Regime::classical;
  } else if (regime.value == "quantum") {
    cfg.regime = Regime::quantum;
  } else {
    throw ConfigError(regime.line, "regime must be classical or quantum");
  }
  const RawEntry& horizon = require(raw, "scenario", "horizon");
  const long long t = parse_integer(horizon.value, horizon.line);
  if (t < 1 || t > 10000000) {
    throw ConfigError(horizon.line, "horizon must lie in [1, 1e7]");
  }
  cfg.horizon = static_cast<std::size_t>(t);

  cfg.arrival = parse_process(raw, "arrival");
  reject_map_details_without_map(raw, "arrival", cfg.arrival);
  cfg.capacity = parse_process(raw, "capacity");
  reject_map_details_without_map(raw, "capacity", cfg.capacity);

  if (const RawEntry* e = find(raw, "bounds", "select")) {
    cfg.bounds.select = split_ws(e->value);
  }
  if (const RawEntry* e = find(raw, "bounds", "theta_min")) {
    cfg.bounds.theta.min = parse_number(e->value, e->line);
  }
  if (const RawEntry* e = find(raw, "bounds", "theta_max")) {
    cfg.bounds.theta.max = parse_number(e->value, e->line);
  }
  if (const RawEntry* e = find(raw, "bounds", "theta_points")) {
    cfg.bounds.theta.points =
        static_cast<int>(parse_integer(e->value, e->line));
  }
  if (!(cfg.bounds.theta.min > 0.0) ||
      !(cfg.bounds.theta.max > cfg.bounds.theta.min) ||
      cfg.bounds.theta.points < 2) {
    throw ConfigError(0, "malformed theta grid in [bounds]");
  }
  if (const RawEntry* e = find(raw, "bounds", "holder_p")) {
    cfg.bounds.holder_p = parse_number(e->value, e->line);
    if (!(cfg.bounds.holder_p > 1.0)) {
      throw ConfigError(e->line, "holder_p must exceed 1");
    }
  }
  if (const RawEntry* e = find(raw, "bounds", "p_grid")) {
    for (const auto& tok : split_ws(e->value)) {
      const double p = parse_number(tok, e->line);
      if (!(p > 1.0)) throw ConfigError(e->line, "p_grid entries must exceed 1");
      cfg.bounds.p_grid.push_back(p);
    }
  }

  const RawEntry& measure = require(raw, "grid", "measure");
  cfg.grid.measure = parse_measure(measure.value, measure.line);
  if (const RawEntry* e = find(raw, "grid", "points")) {
    const long long n = parse_integer(e->value, e->line);
    if (n < 2 || n > 100000) throw ConfigError(e->line, "points must lie in [2, 1e5]");
    cfg.grid.points = static_cast<int>(n);
  }
  if (const RawEntry* e = find(raw, "grid", "min")) {
    cfg.grid.min = parse_number(e->value, e->line);
  }
  if (const RawEntry* e = find(raw, "grid", "max")) {
    cfg.grid.max = parse_number(e->value, e->line);
  }
  if (cfg.grid.min && cfg.grid.max && !(*cfg.grid.max > *cfg.grid.min)) {
    throw ConfigError(0, "grid max must exceed grid min");
  }
  if (const RawEntry* e = find(raw, "grid", "violation")) {
    cfg.grid.violation = parse_number(e->value, e->line);
    if (!(cfg.grid.violation > 0.0) || !(cfg.grid.violation < 1.0)) {
      throw ConfigError(e->line, "violation must lie in (0, 1)");
    }
  }

  if (const RawEntry* e = find(raw, "montecarlo", "paths")) {
    const long long n = parse_integer(e->value, e->line);
    if (n < 1) throw ConfigError(e->line, "paths must be at least 1");
    cfg.montecarlo.paths = static_cast<std::size_t>(n);
  }
  if (const RawEntry* e = find(raw, "montecarlo", "seed")) {
    cfg.montecarlo.seed =
        static_cast<std::uint64_t>(parse_integer(e->value, e->line));
  }
  if (const RawEntry* e = find(raw, "montecarlo", "confidence_z")) {
    cfg.montecarlo.confidence_z = parse_number(e->value, e->line);
    if (!(cfg.montecarlo.confidence_z > 0.0)) {
      throw ConfigError(e->line, "confidence_z must be positive");
    }
  }
  if (const RawEntry* e = find(raw, "montecarlo", "limit_report")) {
    if (e->value == "true") {
      cfg.montecarlo.limit_report = true;
    } else if (e->value == "false") {
      cfg.montecarlo.limit_report = false;
    } else {
      throw ConfigError(e->line, "limit_report must be true or false");
    }
  }

  if (const RawEntry* e = find(raw, "output", "dir")) cfg.output_dir = e->value;

  return cfg;
}

std::string render_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "[scenario]\n";
  os << "name = " << cfg.name << '\n';
  if (!cfg.description.empty()) os << "description = " << cfg.description << '\n';
  os << "regime = " << (cfg.regime == Regime::classical ? "classical" : "quantum")
     << '\n';
  os << "horizon = " << cfg.horizon << '\n';
  os << '\n';
  render_process(os, "arrival", cfg.arrival);
  os << '\n';
  render_process(os, "capacity", cfg.capacity);
  os << '\n';
  os << "[bounds]\n";
  if (!cfg.bounds.select.empty()) {
    os << "select =";
    for (const auto& s : cfg.bounds.select) os << ' ' << s;
    os << '\n';
  }
  os << "theta_min = " << format_double(cfg.bounds.theta.min) << '\n';
  os << "theta_max = " << format_double(cfg.bounds.theta.max) << '\n';
  os << "theta_points = " << cfg.bounds.theta.points << '\n';
  os << "holder_p = " << format_double(cfg.bounds.holder_p) << '\n';
  if (!cfg.bounds.p_grid.empty()) {
    os << "p_grid =";
    for (double p : cfg.bounds.p_grid) os << ' ' << format_double(p);
    os << '\n';
  }
  os << '\n';
  os << "[grid]\n";
  os << "measure = " << to_string(cfg.grid.measure) << '\n';
  os << "points = " << cfg.grid.points << '\n';
  if (cfg.grid.min) os << "min = " << format_double(*cfg.grid.min) << '\n';
  if (cfg.grid.max) os << "max = " << format_double(*cfg.grid.max) << '\n';
  os << "violation = " << format_double(cfg.grid.violation) << '\n';
  os << '\n';
  os << "[montecarlo]\n";
  os << "paths = " << cfg.montecarlo.paths << '\n';
  os << "seed = " << cfg.montecarlo.seed << '\n';
  os << "confidence_z = " << format_double(cfg.montecarlo.confidence_z) << '\n';
  os << "limit_report = " << (cfg.montecarlo.limit_report ? "true" : "false")
     << '\n';
  os << '\n';
  os << "[output]\n";
  os << "dir = " << cfg.output_dir << '\n';
  return os.str();
}

double resolve_capacity_rate(const ExperimentConfig& cfg) {
  const ProcessSpec capacity = resolve_process(cfg.capacity, 0.0);
  return mean_rate(capacity);
}

Scenario resolve_scenario(const ExperimentConfig& cfg) {
  Scenario s;
  s.regime = cfg.regime;
  s.horizon = cfg.horizon;
  s.capacity = resolve_process(cfg.capacity, 0.0);
  s.arrival = resolve_process(cfg.arrival, mean_rate(s.capacity));
  try {
    validate_scenario(s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
  return s;
}

std::vector<std::string> resolve_bound_selection(const ExperimentConfig& cfg,
                                                 const Scenario& scenario) {
  if (!cfg.bounds.select.empty()) return cfg.bounds.select;
  const bool a_iid = is_iid(scenario.arrival);
  const bool c_iid = is_iid(scenario.capacity);
  if (cfg.regime == Regime::quantum) {
    if (a_iid && c_iid) return {"iid_band"};
    if (!a_iid && !c_iid) return {"map_band"};
    return {"map_constant_band"};
  }
  if (a_iid && c_iid) return {"chernoff_union"};
  if (cfg.grid.measure == Measure::throughput) return {"map_throughput"};
  return {"map_lundberg"};
}

const std::vector<CatalogEntry>& builtin_scenarios() {
  static const std::vector<CatalogEntry> catalog = {
      {"fig1a",
       "quantum backlog band at the capacity crossover (lambda = Q), "
       "attenuation channel, t = 1000",
       R"(# Signed backlog of quantum information transmission when the Poisson
# arrival rate matches the attenuation-channel rate.
[scenario]
name = fig1a
description = quantum backlog band at the capacity crossover (lambda = Q), attenuation channel, t = 1000
regime = quantum
horizon = 1000

[arrival]
process = poisson rate_factor=1

[capacity]
process = channel attenuation l=10 l_a=50

[bounds]
select = iid_band

[grid]
measure = backlog
points = 100

[montecarlo]
paths = 100000
seed = 424243
confidence_z = 3
limit_report = true

[output]
dir = out/fig1a
)"},
      {"fig1b",
       "quantum delay band under tenfold overload (lambda = 10 Q), "
       "attenuation channel, t = 1000",
       R"(# Virtual delay when arrivals outpace the channel tenfold; the mean
# delay settles near nine tenths of the horizon.
[scenario]
name = fig1b
description = quantum delay band under tenfold overload (lambda = 10 Q), attenuation channel, t = 1000
regime = quantum
horizon = 1000

[arrival]
process = poisson rate_factor=10

[capacity]
process = channel attenuation l=10 l_a=50

[bounds]
select = iid_band chernoff

[grid]
measure = delay
points = 100

[montecarlo]
paths = 100000
seed = 424244
confidence_z = 3
limit_report = false

[output]
dir = out/fig1b
)"},
      {"fig1c",
       "quantum transient throughput band at half load (lambda = Q/2) with "
       "1e-5 violation quantile, t = 1000",
       R"(# Transient throughput at half load; the summary extracts the rate
# quantile whose violation probability the band caps at 1e-5.
[scenario]
name = fig1c
description = quantum transient throughput band at half load (lambda = Q/2) with 1e-5 violation quantile, t = 1000
regime = quantum
horizon = 1000

[arrival]
process = poisson rate_factor=0.5

[capacity]
process = channel attenuation l=10 l_a=50

[bounds]
select = iid_band

[grid]
measure = throughput
points = 100
violation = 1e-5

[montecarlo]
paths = 100000
seed = 424245
confidence_z = 3
limit_report = false

[output]
dir = out/fig1c
)"},
      {"classical-poisson",
       "classical backlog: Poisson(1) arrivals into constant capacity 2; "
       "union and Lundberg bounds",
       R"(# Classical M/D-style slotted queue with negative drift; steady-state
# Lundberg tail plus the transient union bound.
[scenario]
name = classical-poisson
description = classical backlog: Poisson(1) arrivals into constant capacity 2; union and Lundberg bounds
regime = classical
horizon = 2000

[arrival]
process = poisson lambda=1

[capacity]
process = constant 2

[bounds]
select = chernoff_union lundberg

[grid]
measure = backlog
points = 60

[montecarlo]
paths = 100000
seed = 424246
confidence_z = 3
limit_report = false

[output]
dir = out/classical-poisson
)"},
      {"map-2state",
       "quantum backlog band for a bursty two-state Markov arrival against "
       "the attenuation channel",
       R"(# Two-state Markov-modulated arrivals (calm rate 1, bursty rate 4)
# against the constant attenuation-channel capacity.
[scenario]
name = map-2state
description = quantum backlog band for a bursty two-state Markov arrival against the attenuation channel
regime = quantum
horizon = 1000

[arrival]
process = map
states = 2
row_0 = 0.9 0.1
row_1 = 0.2 0.8
inc_0_0 = constant 1
inc_0_1 = constant 1
inc_1_0 = constant 4
inc_1_1 = constant 4
initial_state = 0

[capacity]
process = channel attenuation l=10 l_a=50

[bounds]
select = map_constant_band

[grid]
measure = backlog
points = 100

[montecarlo]
paths = 100000
seed = 424247
confidence_z = 3
limit_report = false

[output]
dir = out/map-2state
)"},
      {"classical-map-2state",
       "classical backlog for the two-state Markov arrival against constant "
       "capacity 3; Markov Lundberg bound",
       R"(# The same bursty arrival chain feeding a classical queue; the
# steady-state bound carries the eigenvector prefactor.
[scenario]
name = classical-map-2state
description = classical backlog for the two-state Markov arrival against constant capacity 3; Markov Lundberg bound
regime = classical
horizon = 2000

[arrival]
process = map
states = 2
row_0 = 0.9 0.1
row_1 = 0.2 0.8
inc_0_0 = constant 1
inc_0_1 = constant 1
inc_1_0 = constant 4
inc_1_1 = constant 4
initial_state = 0

[capacity]
process = constant 3

[bounds]
select = map_lundberg

[grid]
measure = backlog
points = 60

[montecarlo]
paths = 100000
seed = 424248
confidence_z = 3
limit_report = false

[output]
dir = out/classical-map-2state
)"},
  };
  return catalog;
}

}  // namespace qperf
