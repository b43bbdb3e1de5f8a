#include "qhd/lab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "qhd/error.hpp"
#include "qhd/monad_scale.hpp"

namespace qhd::lab {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  return s;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"grid", {"n", "d", "points", "lengths", "allow_high_rank"}},
      {"physics", {"hbar", "mass", "monads_per_particle", "mu", "eta"}},
      {"potential", {"external", "omega", "center", "external_file", "pairwise", "pairwise_file"}},
      {"nonlinearity", {"kind", "a", "b"}},
      {"initial_state", {"kind", "k", "widths", "centers", "file"}},
      {"run", {"engine", "dt", "steps", "record_every", "seed", "tolerance", "dealias", "filter"}},
      {"output", {"directory", "formats"}},
      {"kinetics", {"monads", "d", "mu", "box", "temperature", "axis_temperatures", "drift",
                    "density_amplitude", "cells", "collision_rate", "sample_every", "min_count",
                    "force", "force_vector", "stiffness"}},
  };
  return keys;
}

class Reader {
 public:
  explicit Reader(const IniDocument& doc) : doc_(doc) {}

  std::optional<std::string> text(const std::string& s, const std::string& k) const {
    return doc_.get(s, k);
  }

  double number(const std::string& s, const std::string& k, double fallback) const {
    const auto v = doc_.get(s, k);
    return v ? parse_double(s, k, *v) : fallback;
  }

  std::size_t count(const std::string& s, const std::string& k, std::size_t fallback) const {
    const auto v = doc_.get(s, k);
    if (!v) return fallback;
    const double d = parse_double(s, k, *v);
    if (d < 0 || d != std::floor(d)) fail(s, k, "expected a non-negative integer");
    return std::size_t(d);
  }

  std::uint64_t unsigned64(const std::string& s, const std::string& k, std::uint64_t fallback) const {
    const auto v = doc_.get(s, k);
    if (!v) return fallback;
    try {
      std::size_t used = 0;
      const auto x = std::stoull(*v, &used);
      if (used != v->size()) fail(s, k, "expected an unsigned integer");
      return x;
    } catch (const std::logic_error&) {
      fail(s, k, "expected an unsigned integer");
    }
  }

  bool flag(const std::string& s, const std::string& k, bool fallback) const {
    const auto v = doc_.get(s, k);
    if (!v) return fallback;
    const auto t = lower(*v);
    if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
    if (t == "false" || t == "no" || t == "off" || t == "0") return false;
    fail(s, k, "expected a boolean");
  }

  std::vector<double> numbers(const std::string& s, const std::string& k) const {
    std::vector<double> out;
    const auto v = doc_.get(s, k);
    if (!v) return out;
    for (const auto& w : words(*v)) out.push_back(parse_double(s, k, w));
    return out;
  }

  std::vector<std::size_t> counts(const std::string& s, const std::string& k) const {
    std::vector<std::size_t> out;
    for (double d : numbers(s, k)) {
      if (d < 0 || d != std::floor(d)) fail(s, k, "expected non-negative integers");
      out.push_back(std::size_t(d));
    }
    return out;
  }

  static std::vector<std::string> words(const std::string& v) {
    std::string t = v;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream in(t);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
  }

  [[noreturn]] static void fail(const std::string& s, const std::string& k, const std::string& why) {
    throw ValidationError("[" + s + "] " + k + ": " + why);
  }

 private:
  static double parse_double(const std::string& s, const std::string& k, const std::string& v) {
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used != v.size() || !std::isfinite(d)) fail(s, k, "expected a finite number, got '" + v + "'");
      return d;
    } catch (const std::logic_error&) {
      fail(s, k, "expected a number, got '" + v + "'");
    }
  }

  const IniDocument& doc_;
};

Engine parse_engine(const std::string& name) {
  const auto n = lower(name);
  if (n == "schrodinger") return Engine::schrodinger;
  if (n == "madelung") return Engine::madelung;
  if (n == "groundstate") return Engine::groundstate;
  if (n == "compare") return Engine::compare;
  if (n == "kinetics") return Engine::kinetics;
  if (n == "check") return Engine::check;
  throw ValidationError("[run] engine: unknown engine '" + name + "'");
}

void require_file(const std::filesystem::path& p, const std::string& key) {
  if (!std::filesystem::is_regular_file(p))
    throw ValidationError(key + ": file '" + p.string() + "' does not exist");
}

void validate_fields(const ExperimentConfig& c) {
  const bool field_engine = c.engine != Engine::kinetics && c.engine != Engine::check;
  if (c.dt && !(*c.dt > 0.0)) throw ValidationError("[run] dt: must be > 0");
  if (c.steps < 1) throw ValidationError("[run] steps: must be >= 1");
  if (c.record_every < 1) throw ValidationError("[run] record_every: must be >= 1");
  if (!(c.tolerance > 0.0)) throw ValidationError("[run] tolerance: must be > 0");
  if (field_engine) {
    if (!(c.hbar > 0.0)) throw ValidationError("[physics] hbar: must be > 0");
    if (!(c.mass > 0.0)) throw ValidationError("[physics] mass: must be > 0");
    if (c.points.empty()) throw ValidationError("[grid] points: required");
    if (c.lengths.empty()) throw ValidationError("[grid] lengths: required");
    if (c.external != "none" && c.external != "harmonic" && c.external != "samples")
      throw ValidationError("[potential] external: expected none, harmonic or samples");
    if (c.external == "harmonic" && !(c.omega > 0.0))
      throw ValidationError("[potential] omega: must be > 0");
    if (c.external == "samples") require_file(c.external_file, "[potential] external_file");
    if (c.pairwise != "none" && c.pairwise != "radial")
      throw ValidationError("[potential] pairwise: expected none or radial");
    if (c.pairwise == "radial") require_file(c.pairwise_file, "[potential] pairwise_file");
    static const std::set<std::string> initial = {"plane_wave", "gaussian", "periodic_gaussian",
                                                  "harmonic", "uniform", "file"};
    if (!initial.count(c.initial))
      throw ValidationError("[initial_state] kind: unknown kind '" + c.initial + "'");
    if (c.initial == "file") require_file(c.initial_file, "[initial_state] file");
    if ((c.initial == "gaussian" || c.initial == "periodic_gaussian") && c.widths.empty())
      throw ValidationError("[initial_state] widths: required for gaussian states");
    if (c.initial == "plane_wave" && c.wavenumbers.empty())
      throw ValidationError("[initial_state] k: required for plane_wave");
    if (c.initial == "harmonic" && c.external != "harmonic")
      throw ValidationError("[initial_state] kind: harmonic needs a harmonic external potential");
  }
  if (c.engine == Engine::groundstate && c.initial == "plane_wave")
    throw ValidationError("[initial_state] kind: use a positive initial state for groundstate");
  if (c.engine == Engine::kinetics) {
    if (c.monads < 2) throw ValidationError("[kinetics] monads: must be >= 2");
    if (c.monad_dims < 1 || c.monad_dims > 3) throw ValidationError("[kinetics] d: must be 1, 2 or 3");
    if (!(c.monad_mass > 0.0)) throw ValidationError("[kinetics] mu: must be > 0");
    if (c.box.size() != c.monad_dims) throw ValidationError("[kinetics] box: one length per axis");
    for (double l : c.box)
      if (!(l > 0.0)) throw ValidationError("[kinetics] box: lengths must be > 0");
    if (c.cells.size() != c.monad_dims) throw ValidationError("[kinetics] cells: one count per axis");
    for (auto n : c.cells)
      if (n < 1) throw ValidationError("[kinetics] cells: counts must be >= 1");
    if (!c.dt) throw ValidationError("[run] dt: required for kinetics");
    if (!(c.temperature >= 0.0)) throw ValidationError("[kinetics] temperature: must be >= 0");
    if (!(c.collision_rate >= 0.0)) throw ValidationError("[kinetics] collision_rate: must be >= 0");
    if (c.sample_every < 1) throw ValidationError("[kinetics] sample_every: must be >= 1");
    if (c.force != "none" && c.force != "uniform" && c.force != "harmonic")
      throw ValidationError("[kinetics] force: expected none, uniform or harmonic");
    if (c.force == "uniform" && c.force_vector.size() != c.monad_dims)
      throw ValidationError("[kinetics] force_vector: one component per axis");
    if (!c.drift.empty() && c.drift.size() != c.monad_dims)
      throw ValidationError("[kinetics] drift: one component per axis");
    if (std::abs(c.density_amplitude) >= 1.0)
      throw ValidationError("[kinetics] density_amplitude: must be below 1 in magnitude");
  }
}

}  // namespace

IniDocument IniDocument::parse(std::string_view text) {
  IniDocument doc;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto cut = raw.find_first_of("#;");
    const auto line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError("line " + std::to_string(line_no) + ": bad section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (!known_keys().count(section))
        throw ValidationError("line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      doc.values_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("line " + std::to_string(line_no) + ": expected key = value");
    if (section.empty())
      throw ValidationError("line " + std::to_string(line_no) + ": key outside a section");
    const auto key = lower(trim(line.substr(0, eq)));
    if (!known_keys().at(section).count(key))
      throw ValidationError("line " + std::to_string(line_no) + ": unknown key '" + key + "' in [" +
                            section + "]");
    auto& slot = doc.values_[section];
    if (slot.count(key))
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    slot[key] = trim(line.substr(eq + 1));
  }
  return doc;
}

bool IniDocument::has(const std::string& section, const std::string& key) const {
  return get(section, key).has_value();
}

std::optional<std::string> IniDocument::get(const std::string& section, const std::string& key) const {
  const auto s = values_.find(section);
  if (s == values_.end()) return std::nullopt;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

std::vector<std::string> IniDocument::sections() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : values_) out.push_back(name);
  return out;
}

std::vector<std::string> IniDocument::keys(const std::string& section) const {
  std::vector<std::string> out;
  if (const auto s = values_.find(section); s != values_.end())
    for (const auto& [k, _] : s->second) out.push_back(k);
  return out;
}

const char* to_string(Engine engine) {
  switch (engine) {
    case Engine::schrodinger: return "schrodinger";
    case Engine::madelung: return "madelung";
    case Engine::groundstate: return "groundstate";
    case Engine::compare: return "compare";
    case Engine::kinetics: return "kinetics";
    case Engine::check: return "check";
  }
  return "unknown";
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ExperimentConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(source_text)));
  return buf;
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  const auto doc = IniDocument::parse(text);
  const Reader r(doc);
  ExperimentConfig c;
  c.source_text = std::string(text);
  c.base_dir = base_dir;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };

  const auto engine = r.text("run", "engine");
  if (!engine) throw ValidationError("[run] engine: required");
  c.engine = parse_engine(*engine);

  c.n_particles = r.count("grid", "n", 1);
  c.dims_per_particle = r.count("grid", "d", 1);
  c.points = r.counts("grid", "points");
  c.lengths = r.numbers("grid", "lengths");
  c.allow_high_rank = r.flag("grid", "allow_high_rank", false);
  const std::size_t rank = c.n_particles * c.dims_per_particle;
  if (c.points.size() == 1 && rank > 1) c.points.assign(rank, c.points[0]);
  if (c.lengths.size() == 1 && rank > 1) c.lengths.assign(rank, c.lengths[0]);

  const bool monad_units = doc.has("physics", "monads_per_particle") || doc.has("physics", "mu") ||
                           doc.has("physics", "eta");
  if (monad_units) {
    if (doc.has("physics", "hbar") || doc.has("physics", "mass"))
      throw ValidationError("[physics]: give either hbar/mass or monads_per_particle/mu/eta");
    const MonadScale scale(r.number("physics", "monads_per_particle", 0.0),
                           r.number("physics", "mu", 0.0), r.number("physics", "eta", 0.0));
    c.hbar = scale.hbar();
    c.mass = scale.mass();
  } else {
    c.hbar = r.number("physics", "hbar", 1.0);
    c.mass = r.number("physics", "mass", 1.0);
  }

  c.external = lower(r.text("potential", "external").value_or("none"));
  c.omega = r.number("potential", "omega", 1.0);
  c.center = r.numbers("potential", "center");
  if (auto f = r.text("potential", "external_file")) c.external_file = resolve(*f);
  c.pairwise = lower(r.text("potential", "pairwise").value_or("none"));
  if (auto f = r.text("potential", "pairwise_file")) c.pairwise_file = resolve(*f);

  const auto nl = lower(r.text("nonlinearity", "kind").value_or("none"));
  if (nl == "none")
    c.nonlinear = NonlinearTerm::none();
  else if (nl == "cubic")
    c.nonlinear = NonlinearTerm::cubic(r.number("nonlinearity", "a", 0.0));
  else if (nl == "log" || nl == "logarithmic")
    c.nonlinear = NonlinearTerm::logarithmic(r.number("nonlinearity", "b", 0.0));
  else
    throw ValidationError("[nonlinearity] kind: expected none, cubic or log");

  c.initial = lower(r.text("initial_state", "kind").value_or("gaussian"));
  c.wavenumbers = r.numbers("initial_state", "k");
  c.widths = r.numbers("initial_state", "widths");
  c.centers = r.numbers("initial_state", "centers");
  if (c.widths.size() == 1 && rank > 1) c.widths.assign(rank, c.widths[0]);
  if (auto f = r.text("initial_state", "file")) c.initial_file = resolve(*f);

  if (doc.has("run", "dt")) c.dt = r.number("run", "dt", 0.0);
  c.steps = r.count("run", "steps", 1);
  c.record_every = r.count("run", "record_every", 1);
  c.seed = r.unsigned64("run", "seed", 0);
  c.tolerance = r.number("run", "tolerance", 1e-10);
  c.dealias = r.flag("run", "dealias", false);
  c.spectral_filter = r.flag("run", "filter", false);

  c.directory = resolve(r.text("output", "directory").value_or("out"));
  if (auto formats = r.text("output", "formats")) {
    c.write_csv = c.write_snapshot = c.write_plot = false;
    for (const auto& f : Reader::words(lower(*formats))) {
      if (f == "csv") c.write_csv = true;
      else if (f == "snapshot") c.write_snapshot = true;
      else if (f == "plot") c.write_plot = true;
      else throw ValidationError("[output] formats: unknown format '" + f + "'");
    }
  }

  c.monads = r.count("kinetics", "monads", 0);
  c.monad_dims = r.count("kinetics", "d", 1);
  c.monad_mass = r.number("kinetics", "mu", 1.0);
  c.box = r.numbers("kinetics", "box");
  if (c.box.size() == 1 && c.monad_dims > 1) c.box.assign(c.monad_dims, c.box[0]);
  c.temperature = r.number("kinetics", "temperature", 1.0);
  c.axis_temperatures = r.numbers("kinetics", "axis_temperatures");
  c.drift = r.numbers("kinetics", "drift");
  c.density_amplitude = r.number("kinetics", "density_amplitude", 0.0);
  c.cells = r.counts("kinetics", "cells");
  if (c.cells.empty()) c.cells.assign(c.monad_dims, 1);
  c.collision_rate = r.number("kinetics", "collision_rate", 0.0);
  c.sample_every = r.count("kinetics", "sample_every", 1);
  c.min_count = r.count("kinetics", "min_count", 20);
  c.force = lower(r.text("kinetics", "force").value_or("none"));
  c.force_vector = r.numbers("kinetics", "force_vector");
  c.stiffness = r.number("kinetics", "stiffness", 0.0);

  validate_fields(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace qhd::lab
