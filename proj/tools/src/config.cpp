#include "goalrom/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <set>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "goalrom/csv.hpp"
#include "goalrom/errors.hpp"

namespace goalrom {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"grid", {"num_nodes", "x_lo", "x_hi"}},
      {"domain", {"b_lo", "b_hi", "a_lo", "a_hi", "fixed_amplitude"}},
      {"sampling", {"mode", "tolerance", "initial_per_dim", "max_cycles", "exclusion", "training_subset"}},
      {"ecsw", {"training", "nnls_tolerance"}},
      {"solver", {"fom_tolerance", "fom_max_iterations", "rom_tolerance", "rom_max_iterations"}},
      {"verify", {"b", "residual_eps", "jacobian_eps"}},
      {"validation", {"points", "seed", "jitter"}},
      {"greedy", {"work_budget", "budget_from", "reference_mode", "probe_b"}},
      {"output", {"directory"}},
  };
  return keys;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  bool has(const std::string& section, const std::string& key) const {
    return tree_.get_child_optional(pt::ptree::path_type(section + "." + key)).has_value();
  }

  std::string text(const std::string& section, const std::string& key) const {
    std::string v = tree_.get<std::string>(pt::ptree::path_type(section + "." + key));
    boost::trim(v);
    return v;
  }

  double number(const std::string& section, const std::string& key, double fallback) const {
    if (!has(section, key)) return fallback;
    return parse_number(section + "." + key, text(section, key));
  }

  long integer(const std::string& section, const std::string& key, long fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = text(section, key);
    long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
      throw ConfigError(section + "." + key + ": expected an integer, got '" + v + "'");
    }
    return out;
  }

  std::vector<double> list(const std::string& section, const std::string& key,
                           const std::vector<double>& fallback) const {
    if (!has(section, key)) return fallback;
    std::vector<std::string> parts;
    const std::string v = text(section, key);
    boost::split(parts, v, boost::is_any_of(","));
    std::vector<double> out;
    for (std::string& p : parts) {
      boost::trim(p);
      out.push_back(parse_number(section + "." + key, p));
    }
    return out;
  }

 private:
  static double parse_number(const std::string& where, const std::string& v) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
      throw ConfigError(where + ": expected a number, got '" + v + "'");
    }
    return out;
  }

  const pt::ptree& tree_;
};

void check_keys(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) {
      if (body.empty()) throw ConfigError("key '" + section + "' outside of any section");
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key " + section + "." + key);
    }
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += CsvWriter::cell(values[i]);
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  check_keys(tree);
  const Reader r(tree);

  ExperimentConfig c;
  SamplerConfig& s = c.sampler;
  s.num_nodes = static_cast<int>(r.integer("grid", "num_nodes", s.num_nodes));
  s.x_lo = r.number("grid", "x_lo", s.x_lo);
  s.x_hi = r.number("grid", "x_hi", s.x_hi);
  require(s.num_nodes >= 3, "grid.num_nodes must be at least 3");
  require(s.x_hi > s.x_lo, "grid.x_hi must exceed grid.x_lo");

  const double b_lo = r.number("domain", "b_lo", 0.01);
  const double b_hi = r.number("domain", "b_hi", 0.1);
  require(b_hi > b_lo, "domain.b_hi must exceed domain.b_lo");
  s.fixed_amplitude = r.number("domain", "fixed_amplitude", s.fixed_amplitude);
  require(s.fixed_amplitude > 0.0, "domain.fixed_amplitude must be positive");
  const bool two_params = r.has("domain", "a_lo") || r.has("domain", "a_hi");
  if (two_params) {
    require(r.has("domain", "a_lo") && r.has("domain", "a_hi"), "domain.a_lo and domain.a_hi go together");
    const double a_lo = r.number("domain", "a_lo", 0.0);
    const double a_hi = r.number("domain", "a_hi", 0.0);
    require(a_hi > a_lo && a_lo > 0.0, "domain: need 0 < a_lo < a_hi");
    c.domain = ParameterDomain(Eigen::Vector2d(b_lo, a_lo), Eigen::Vector2d(b_hi, a_hi));
  } else {
    c.domain = ParameterDomain(Vector::Constant(1, b_lo), Vector::Constant(1, b_hi));
  }

  try {
    if (r.has("sampling", "mode")) s.mode = parse_sampling_mode(r.text("sampling", "mode"));
    if (r.has("ecsw", "training")) s.training = parse_training_mode(r.text("ecsw", "training"));
    if (r.has("greedy", "reference_mode")) c.reference_mode = parse_sampling_mode(r.text("greedy", "reference_mode"));
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  require(c.reference_mode != SamplingMode::greedy, "greedy.reference_mode must be a goal-oriented mode");
  s.tolerance = r.number("sampling", "tolerance", s.tolerance);
  s.initial_per_dim = static_cast<int>(r.integer("sampling", "initial_per_dim", s.initial_per_dim));
  s.max_cycles = static_cast<int>(r.integer("sampling", "max_cycles", s.max_cycles));
  s.exclusion = r.number("sampling", "exclusion", s.exclusion);
  if (r.has("sampling", "training_subset")) {
    const std::string v = r.text("sampling", "training_subset");
    if (v == "all") {
      s.train_on_initial_grid = false;
    } else if (v == "initial") {
      s.train_on_initial_grid = true;
    } else if (v != "auto") {
      throw ConfigError("sampling.training_subset must be all, initial or auto");
    }
  }
  require(s.tolerance > 0.0, "sampling.tolerance must be positive");
  require(s.initial_per_dim >= 2, "sampling.initial_per_dim must be at least 2");
  require(s.max_cycles >= 0, "sampling.max_cycles must be non-negative");
  require(s.exclusion > 0.0 && s.exclusion < 1.0, "sampling.exclusion must lie in (0, 1)");

  s.nnls_tolerance = r.number("ecsw", "nnls_tolerance", s.nnls_tolerance);
  require(s.nnls_tolerance > 0.0 && s.nnls_tolerance < 1.0, "ecsw.nnls_tolerance must lie in (0, 1)");

  s.fom.tolerance = r.number("solver", "fom_tolerance", s.fom.tolerance);
  s.fom.max_iterations = static_cast<int>(r.integer("solver", "fom_max_iterations", s.fom.max_iterations));
  s.rom.tolerance = r.number("solver", "rom_tolerance", s.rom.tolerance);
  s.rom.max_iterations = static_cast<int>(r.integer("solver", "rom_max_iterations", s.rom.max_iterations));
  require(s.fom.tolerance > 0.0 && s.rom.tolerance > 0.0, "solver tolerances must be positive");
  require(s.fom.max_iterations > 0 && s.rom.max_iterations > 0, "solver iteration caps must be positive");

  c.verify_rate = r.number("verify", "b", c.verify_rate);
  c.residual_eps = r.list("verify", "residual_eps", c.residual_eps);
  c.jacobian_eps = r.list("verify", "jacobian_eps", c.jacobian_eps);
  for (const auto* eps_list : {&c.residual_eps, &c.jacobian_eps}) {
    for (double e : *eps_list) require(e > 0.0 && e < 1.0, "verify: ECSW tolerances must lie in (0, 1)");
  }
  require(c.verify_rate >= b_lo && c.verify_rate <= b_hi, "verify.b must lie in the parameter domain");

  c.validation_points = static_cast<int>(r.integer("validation", "points", c.validation_points));
  const long seed = r.integer("validation", "seed", c.seed);
  require(seed >= 0, "validation.seed must be non-negative");
  c.seed = static_cast<unsigned>(seed);
  c.jitter = r.number("validation", "jitter", c.jitter);
  require(c.validation_points >= 2, "validation.points must be at least 2");
  require(c.jitter >= 0.0 && c.jitter < 0.5, "validation.jitter must lie in [0, 0.5)");

  c.work_budget = r.number("greedy", "work_budget", c.work_budget);
  if (r.has("greedy", "budget_from")) c.budget_from = r.text("greedy", "budget_from");
  c.probe_rates = r.list("greedy", "probe_b", c.probe_rates);
  for (double b : c.probe_rates) require(b >= b_lo && b <= b_hi, "greedy.probe_b values must lie in the domain");

  if (r.has("output", "directory")) c.output_dir = r.text("output", "directory");
  require(!c.output_dir.empty(), "output.directory must not be empty");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  return parse_config(in);
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  const SamplerConfig& s = c.sampler;
  const auto num = [](double v) { return CsvWriter::cell(v); };
  out << "[grid]\nnum_nodes = " << s.num_nodes << "\nx_lo = " << num(s.x_lo) << "\nx_hi = " << num(s.x_hi) << "\n\n";
  out << "[domain]\nb_lo = " << num(c.domain.lo(0)) << "\nb_hi = " << num(c.domain.hi(0)) << '\n';
  if (c.domain.dim() == 2) out << "a_lo = " << num(c.domain.lo(1)) << "\na_hi = " << num(c.domain.hi(1)) << '\n';
  out << "fixed_amplitude = " << num(s.fixed_amplitude) << "\n\n";
  out << "[sampling]\nmode = " << to_string(s.mode) << "\ntolerance = " << num(s.tolerance)
      << "\ninitial_per_dim = " << s.initial_per_dim << "\nmax_cycles = " << s.max_cycles
      << "\nexclusion = " << num(s.exclusion) << "\ntraining_subset = "
      << (s.train_on_initial_grid ? (*s.train_on_initial_grid ? "initial" : "all") : "auto") << "\n\n";
  out << "[ecsw]\ntraining = " << to_string(s.training) << "\nnnls_tolerance = " << num(s.nnls_tolerance) << "\n\n";
  out << "[solver]\nfom_tolerance = " << num(s.fom.tolerance) << "\nfom_max_iterations = " << s.fom.max_iterations
      << "\nrom_tolerance = " << num(s.rom.tolerance) << "\nrom_max_iterations = " << s.rom.max_iterations << "\n\n";
  out << "[verify]\nb = " << num(c.verify_rate) << "\nresidual_eps = " << join(c.residual_eps)
      << "\njacobian_eps = " << join(c.jacobian_eps) << "\n\n";
  out << "[validation]\npoints = " << c.validation_points << "\nseed = " << c.seed << "\njitter = " << num(c.jitter)
      << "\n\n";
  out << "[greedy]\nwork_budget = " << num(c.work_budget) << '\n';
  if (!c.budget_from.empty()) out << "budget_from = " << c.budget_from << '\n';
  out << "reference_mode = " << to_string(c.reference_mode) << "\nprobe_b = " << join(c.probe_rates) << "\n\n";
  out << "[output]\ndirectory = " << c.output_dir << '\n';
}

std::vector<Vector> validation_lattice(const ExperimentConfig& c) {
  const int m = c.validation_points;
  const int dim = c.domain.dim();
  std::mt19937 rng(c.seed);
  std::uniform_real_distribution<double> shift(-c.jitter, c.jitter);
  const auto coordinate = [&](int k) {
    double u = static_cast<double>(k) / (m - 1);
    if (c.jitter > 0.0 && k > 0 && k < m - 1) u += shift(rng) / (m - 1);
    return u;
  };
  std::vector<Vector> out;
  if (dim == 1) {
    for (int k = 0; k < m; ++k) out.push_back(c.domain.from_unit(Vector::Constant(1, coordinate(k))));
  } else {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const double ui = coordinate(i);
        const double uj = coordinate(j);
        out.push_back(c.domain.from_unit(Eigen::Vector2d(ui, uj)));
      }
    }
  }
  return out;
}

}  // namespace goalrom
