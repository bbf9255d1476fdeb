#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rotnum/analysis.hpp"
#include "rotnum/errors.hpp"
#include "rotnum/io.hpp"
#include "rotnum/measures.hpp"
#include "rotnum/rotation.hpp"
#include "rotnum/schrodinger.hpp"
#include "validate.hpp"

namespace rotnum::tools {

namespace {

using json = nlohmann::ordered_json;

const char* const kFamilyHelp = "rigid | iid_rotation | anderson | morse_smale | background";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Args {
 public:
  Args(const CommandSpec& spec, const std::map<std::string, std::string>& given)
      : spec_(spec), given_(given) {
    for (const auto& [key, value] : given) {
      if (!find(key)) throw UsageError("unknown key --" + key + " for command " + spec.name);
    }
  }

  bool has(const std::string& key) const { return given_.count(key) > 0; }

  std::string str(const std::string& key) const {
    if (auto it = given_.find(key); it != given_.end()) return it->second;
    const KeySpec* k = find(key);
    if (!k || k->fallback.empty()) throw UsageError("missing required key --" + key);
    return k->fallback;
  }

  std::string str_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? given_.at(key) : fallback;
  }

  double num(const std::string& key) const { return to_double(key, str(key)); }

  std::int64_t integer(const std::string& key) const {
    const double v = num(key);
    if (v != std::floor(v) || std::abs(v) > 9.0e15) {
      throw UsageError("--" + key + " must be an integer, got " + str(key));
    }
    return static_cast<std::int64_t>(v);
  }

  Distribution law(const std::string& key, const std::string& fallback) const {
    const std::string text = str_or(key, fallback);
    try {
      return Distribution::parse(text);
    } catch (const ParameterError& e) {
      throw UsageError("invalid distribution for --" + key + ": " + e.what());
    }
  }

  std::vector<double> grid(const std::string& key) const {
    try {
      return parse_grid(str(key));
    } catch (const UsageError& e) {
      throw UsageError("--" + key + ": " + e.what());
    }
  }

  /// Resolved value of every key that has one, for provenance records.
  Params resolved() const {
    Params p;
    for (const auto& k : spec_.keys) {
      if (has(k.name)) {
        p[k.name] = given_.at(k.name);
      } else if (!k.fallback.empty()) {
        p[k.name] = k.fallback;
      }
    }
    return p;
  }

 private:
  const KeySpec* find(const std::string& key) const {
    for (const auto& k : spec_.keys) {
      if (k.name == key) return &k;
    }
    return nullptr;
  }

  static double to_double(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v)) {
      throw UsageError("--" + key + " expects a number, got '" + text + "'");
    }
    return v;
  }

  const CommandSpec& spec_;
  const std::map<std::string, std::string>& given_;
};

struct Sink {
  explicit Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream = &fallback;
    } else {
      file.open(path, std::ios::binary);
      if (!file) throw UsageError("cannot open output file " + path);
      stream = &file;
    }
  }
  std::ostream& operator*() { return *stream; }
  std::ofstream file;
  std::ostream* stream = nullptr;
};

std::string pm(double value, double err) {
  std::ostringstream os;
  os.precision(10);
  os << value << " ± ";
  os.precision(2);
  os << err;
  return os.str();
}

std::string num10(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::int64_t default_burn_in(const Args& a, std::int64_t n) {
  if (a.has("burn-in")) return a.integer("burn-in");
  return std::min<std::int64_t>(1000, n / 10);
}

BirkhoffOptions birkhoff_options(const Args& a, const RunConfig& cfg) {
  BirkhoffOptions b;
  b.n = a.integer("n");
  b.burn_in = default_burn_in(a, b.n);
  b.replicas = static_cast<int>(a.integer("replicas"));
  b.seed = cfg.seed;
  b.workers = cfg.workers;
  return b;
}

PotentialSpec potential_from(const Args& a, const std::string& kind) {
  PotentialSpec spec;
  if (kind == "free") return spec;
  spec.noise = a.law("noise", "uniform(0,1)");
  if (kind == "anderson") return spec;
  if (kind != "background") {
    throw UsageError("unknown potential '" + kind + "', expected free | anderson | background");
  }
  const double coupling = a.num("coupling");
  spec.background = RotationBase(a.num("frequency"), a.num("x0"), TrigPolynomial{0.0, {{coupling, 0.0}}});
  return spec;
}

SchrodingerCocycle background_cocycle(const Args& a) {
  const PotentialSpec spec = potential_from(a, "background");
  const double b = spec.bound();
  return make_schrodinger_cocycle(spec, -3.0 - b, 3.0 + b);
}

CocycleFamily family_from(const Args& a) {
  const std::string f = a.str("family");
  if (f == "rigid") return rigid_rotation_family(a.num("alpha"));
  if (f == "iid_rotation") return iid_rotation_family(a.law("law", "uniform(0,0.1)"));
  if (f == "anderson") return anderson_family(a.law("law", "uniform(0,1)"));
  if (f == "morse_smale") return morse_smale_family(a.num("s"), a.law("law", "atoms((1,0.5),(2,0.5))"));
  if (f == "background") return background_cocycle(a).family;
  throw UsageError("unknown family '" + f + "', expected " + kFamilyHelp);
}

std::vector<KeySpec> family_keys() {
  return {{"family", "", kFamilyHelp},
          {"alpha", "0.41421356237309503", "rigid rotation angle"},
          {"law", "", "driver law (iid_rotation, anderson, morse_smale)"},
          {"s", "0.5", "Morse-Smale strength, 0 < s < 1"},
          {"noise", "uniform(0,1)", "noise law (background)"},
          {"coupling", "0.5", "background amplitude a in a cos(2 pi x)"},
          {"frequency", "0.41421356237309503", "background rotation frequency"},
          {"x0", "0", "background starting point"}};
}

std::vector<KeySpec> with(std::vector<KeySpec> a, const std::vector<KeySpec>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// rotation ------------------------------------------------------------------

int cmd_rotation(const Args& a, const RunConfig& cfg, std::ostream& out) {
  const CocycleFamily family = family_from(a);
  const BirkhoffOptions opt = birkhoff_options(a, cfg);
  Sink sink(cfg.out, out);
  if (!a.has("energies")) {
    const double e = a.num("E");
    const Estimate r = birkhoff_rho(family, e, opt);
    Params p = a.resolved();
    p["command"] = "rotation";
    p["burn-in"] = std::to_string(opt.burn_in);
    *sink << estimate_json(r, p) << "\n";
    out << "rho = " << pm(r.value, r.std_error) << " (family " << a.str("family") << ", E "
        << num10(e) << ", n " << opt.n << ", replicas " << opt.replicas << ", seed "
        << cfg.seed << ")\n";
    return 0;
  }
  const auto energies = a.grid("energies");
  *sink << "energy,rho,stderr,n,replicas,seed\n";
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double e : energies) {
    const Estimate r = birkhoff_rho(family, e, opt);
    *sink << format_double(e) << ',' << format_double(r.value) << ',' << format_double(r.std_error)
          << ',' << r.n << ',' << r.replicas << ',' << r.seed << '\n';
    lo = std::min(lo, r.value);
    hi = std::max(hi, r.value);
  }
  out << "rho over " << energies.size() << " energies in [" << num10(lo) << ", "
      << num10(hi) << "] (n " << opt.n << ", seed " << cfg.seed << ")\n";
  return 0;
}

// increment -----------------------------------------------------------------

int cmd_increment(const Args& a, const RunConfig& cfg, std::ostream& out) {
  const double e1 = a.num("E1"), e2 = a.num("E2");
  const std::string method = a.str("method");
  const std::string fam = a.str("family");
  const bool background = fam == "background";
  const std::vector<std::string> known =
      background ? std::vector<std::string>{"background", "birkhoff", "all"}
                 : std::vector<std::string>{"thm2", "corollary", "birkhoff", "all"};
  if (std::find(known.begin(), known.end(), method) == known.end()) {
    throw UsageError("--method " + method + " is not available for family " + fam);
  }
  const bool all = method == "all";
  Sink sink(cfg.out, out);
  Params base = a.resolved();
  base["command"] = "increment";
  const auto emit = [&](const std::string& name, const Estimate& est) {
    Params p = base;
    p["method"] = name;
    *sink << estimate_json(est, p) << "\n";
    out << name << " increment = " << pm(est.value, est.std_error) << " (E1 " << num10(e1)
        << ", E2 " << num10(e2) << ", seed " << cfg.seed << ")\n";
  };

  if (background) {
    const SchrodingerCocycle c = background_cocycle(a);
    if (all || method == "background") {
      BackgroundIncrementOptions o;
      o.n_path = a.integer("n-path");
      o.n_base = a.integer("n-base");
      o.fiber_samples = a.integer("fiber-samples");
      o.seed = cfg.seed;
      o.workers = cfg.workers;
      const std::string orient = a.str("orientation");
      if (orient == "as_printed") {
        o.orientation = PhiOrientation::as_printed;
      } else if (orient != "derived") {
        throw UsageError("--orientation must be derived or as_printed");
      }
      emit("background", increment_ergodic_background(c, e1, e2, o));
    }
    if (all || method == "birkhoff") {
      const BirkhoffOptions b = birkhoff_options(a, cfg);
      const Estimate r1 = birkhoff_rho(c.family, e1, b), r2 = birkhoff_rho(c.family, e2, b);
      emit("birkhoff", {r2.value - r1.value, combined_error(r1, r2), b.n, b.replicas, cfg.seed});
    }
    return 0;
  }

  const CocycleFamily family = family_from(a);
  if (all || method == "thm2" || method == "corollary") {
    StationaryOptions so;
    so.n_burn = a.integer("n-burn");
    so.n_samples = a.integer("n-samples");
    so.seed = cfg.seed;
    const auto plus = estimate_stationary(family, e1, Direction::forward, so);
    const auto minus = estimate_stationary(family, e2, Direction::backward, so);
    McOptions mc;
    mc.n_mc = a.integer("n-mc");
    mc.seed = cfg.seed;
    mc.workers = cfg.workers;
    if (all || method == "thm2") emit("thm2", increment_thm2(family, e1, e2, plus.measure, minus.measure, mc));
    if (all || method == "corollary") {
      emit("corollary", increment_corollary(family, e1, e2, plus.measure, minus.measure, mc));
    }
  }
  if (all || method == "birkhoff") {
    const BirkhoffOptions b = birkhoff_options(a, cfg);
    const Estimate r1 = birkhoff_rho(family, e1, b), r2 = birkhoff_rho(family, e2, b);
    emit("birkhoff", {r2.value - r1.value, combined_error(r1, r2), b.n, b.replicas, cfg.seed});
  }
  return 0;
}

// stationary ----------------------------------------------------------------

int cmd_stationary(const Args& a, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const CocycleFamily family = family_from(a);
  const double e = a.num("E");
  const std::string dir = a.str("direction");
  if (dir != "forward" && dir != "backward") throw UsageError("--direction must be forward or backward");
  StationaryOptions so;
  so.n_burn = a.integer("n-burn");
  so.n_samples = a.integer("n-samples");
  so.tolerance = a.num("tolerance");
  so.seed = cfg.seed;
  const auto st = estimate_stationary(family, e, dir == "forward" ? Direction::forward : Direction::backward, so);
  {
    Sink sink(cfg.out, out);
    write_measure_csv(*sink, st.measure);
  }
  if (!cfg.out.empty()) {
    std::ofstream meta(cfg.out + ".json", std::ios::binary);
    if (!meta) throw UsageError("cannot open output file " + cfg.out + ".json");
    json j;
    j["residual"] = st.residual;
    j["converged"] = st.converged;
    j["n_samples"] = st.n_samples;
    j["atoms"] = st.measure.size();
    j["seed"] = cfg.seed;
    j["params"] = a.resolved();
    meta << j.dump(2) << "\n";
  }
  if (!st.converged) err << "warning: residual above tolerance " << format_double(so.tolerance) << "\n";
  out << "stationary " << dir << " measure: " << st.measure.size() << " atoms, residual "
      << num10(st.residual) << (st.converged ? "" : " (not converged)") << ", n "
      << st.n_samples << ", seed " << cfg.seed << "\n";
  return 0;
}

// ids -----------------------------------------------------------------------

int cmd_ids(const Args& a, const RunConfig& cfg, std::ostream& out) {
  const std::string kind = a.str("spec");
  const PotentialSpec spec = potential_from(a, kind);
  const auto energies = a.grid("energies");
  const std::string method = a.str("method");
  if (method != "spectral" && method != "dynamical" && method != "both") {
    throw UsageError("--method must be spectral, dynamical or both");
  }
  std::optional<IdsCurve> spectral, dynamical;
  if (method != "dynamical") {
    SpectralOptions so;
    so.length = a.integer("L");
    so.replicas = static_cast<int>(a.integer("replicas"));
    so.seed = cfg.seed;
    so.workers = cfg.workers;
    spectral = ids_spectral_curve(spec, energies, so);
  }
  if (method != "spectral") {
    const double b = spec.bound();
    const double e_ref = a.has("E-ref") ? a.num("E-ref") : -3.0 - b;
    const double e_hi = std::max(3.0 + b, *std::max_element(energies.begin(), energies.end()));
    SchrodingerCocycle c = make_schrodinger_cocycle(spec, e_ref, e_hi);
    AnchorOptions ao;
    ao.birkhoff.seed = cfg.seed;
    ao.birkhoff.workers = cfg.workers;
    c = calibrate_ids_anchor(c, e_ref, ao);
    BirkhoffOptions bo;
    bo.n = a.integer("n");
    bo.burn_in = default_burn_in(a, bo.n);
    bo.replicas = static_cast<int>(a.integer("replicas"));
    bo.seed = cfg.seed;
    bo.workers = cfg.workers;
    dynamical = ids_dynamical_curve(c, energies, bo);
  }
  Sink sink(cfg.out, out);
  bool header = true;
  for (const auto* curve : {spectral ? &*spectral : nullptr, dynamical ? &*dynamical : nullptr}) {
    if (!curve) continue;
    write_ids_csv(*sink, *curve, header);
    header = false;
  }
  if (spectral && dynamical) {
    // Dirichlet counts and single orbits are each within 2/size of the limit.
    const double finite_size = 2.0 / static_cast<double>(spectral->size) + 2.0 / static_cast<double>(dynamical->size);
    double worst = 0.0;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < energies.size(); ++i) {
      const double d = std::abs(spectral->ids[i] - dynamical->ids[i]);
      worst = std::max(worst, d);
      if (d < 4.0 * std::hypot(spectral->std_errors[i], dynamical->std_errors[i]) + finite_size) ++agree;
    }
    out << "ids " << kind << ": " << agree << "/" << energies.size()
        << " energies agree within 4 sigma + 2/L + 2/n, max |spectral - dynamical| = " << num10(worst)
        << " (seed " << cfg.seed << ")\n";
  } else {
    const IdsCurve& c = spectral ? *spectral : *dynamical;
    out << "ids " << kind << " " << c.method << ": " << energies.size() << " energies, from "
        << num10(c.ids.front()) << " to " << num10(c.ids.back()) << " (seed "
        << cfg.seed << ")\n";
  }
  return 0;
}

// holder --------------------------------------------------------------------

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  return cells;
}

std::vector<CurvePoint> read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read --input " + path);
  std::string line;
  if (!std::getline(in, line)) throw UsageError("--input " + path + " is empty");
  const auto header = split_csv_line(line);
  const auto column = [&](std::initializer_list<const char*> names) -> int {
    for (std::size_t i = 0; i < header.size(); ++i) {
      for (const char* n : names) {
        if (header[i] == n) return static_cast<int>(i);
      }
    }
    return -1;
  };
  const int ce = column({"energy", "E", "e"});
  const int cv = column({"value", "ids", "rho"});
  const int cs = column({"stderr", "std_error"});
  if (ce < 0 || cv < 0) throw UsageError("--input needs an energy column and a value/ids/rho column");
  std::vector<CurvePoint> curve;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    const auto cell = [&](int c) {
      if (c >= static_cast<int>(cells.size())) throw UsageError("short row in --input: " + line);
      return std::stod(cells[c]);
    };
    curve.push_back({cell(ce), cell(cv), cs >= 0 ? cell(cs) : 0.0});
  }
  return curve;
}

PairRule pair_rule(const std::string& s) {
  if (s == "adjacent") return PairRule::adjacent;
  if (s == "anchored") return PairRule::anchored;
  if (s == "all") return PairRule::all;
  throw UsageError("--rule must be adjacent, anchored or all");
}

json fit_json(const HolderFit& fit) {
  json j;
  j["alpha"] = fit.fitted_alpha;
  j["intercept"] = fit.intercept;
  j["r2"] = fit.fit_r2;
  j["pairs"] = fit.pairs.size();
  j["window"] = {fit.window_lo, fit.window_hi};
  return j;
}

int cmd_holder(const Args& a, const RunConfig& cfg, std::ostream& out) {
  std::vector<CurvePoint> curve;
  if (a.has("input") == a.has("synthetic")) throw UsageError("give exactly one of --input and --synthetic");
  if (a.has("input")) {
    curve = read_curve_csv(a.str("input"));
  } else {
    const std::string kind = a.str("synthetic");
    for (double e : a.grid("energies")) {
      double v = 0.0;
      if (kind == "linear") {
        v = e;
      } else if (kind == "sqrt") {
        v = std::sqrt(e);
      } else if (kind == "loglaw") {
        v = e > 0.0 ? 1.0 / std::pow(std::log(1.0 / e), 2) : 0.0;
      } else {
        throw UsageError("--synthetic must be linear, sqrt or loglaw");
      }
      curve.push_back({e, v, 0.0});
    }
  }
  HolderFitOptions fo;
  fo.rule = pair_rule(a.str("rule"));
  fo.signal_sigmas = a.num("sigmas");
  if (a.has("dmin")) fo.delta_min = a.num("dmin");
  if (a.has("dmax")) fo.delta_max = a.num("dmax");
  const HolderFit fit = holder_fit(curve, fo);
  Sink sink(cfg.out, out);
  json j = fit_json(fit);
  j["params"] = a.resolved();
  *sink << j.dump() << "\n";
  out << "holder exponent = " << num10(fit.fitted_alpha) << " (r2 " << num10(fit.fit_r2)
      << ", " << fit.pairs.size() << " pairs)\n";
  return 0;
}

// example53 -----------------------------------------------------------------

int cmd_example53(const Args& a, const RunConfig& cfg, std::ostream& out) {
  Example53Config ec;
  ec.s = a.num("s");
  ec.e_grid = a.grid("energies");
  ec.n = a.integer("n");
  ec.burn_in = a.integer("burn-in");
  ec.replicas = static_cast<int>(a.integer("replicas"));
  ec.seed = cfg.seed;
  ec.workers = cfg.workers;
  const auto rows = example53_run(ec);
  Sink sink(cfg.out, out);
  *sink << "energy,rho,stderr,M_E,compensated,n,replicas,seed\n";
  std::vector<CurvePoint> curve;
  std::vector<double> log_inv, ms, comp;
  for (const auto& r : rows) {
    *sink << format_double(r.e) << ',' << format_double(r.rho) << ',' << format_double(r.std_error)
          << ',' << r.m_e << ',' << format_double(r.compensated) << ',' << ec.n << ','
          << ec.replicas << ',' << ec.seed << '\n';
    curve.push_back({r.e, r.rho, r.std_error});
    if (r.e > 0.0) {
      log_inv.push_back(std::log(1.0 / r.e));
      ms.push_back(static_cast<double>(r.m_e));
      comp.push_back(r.compensated);
    }
  }
  std::ostringstream summary;
  if (log_inv.size() >= 2) {
    const LineFit mfit = fit_line(log_inv, ms);
    summary << "M_E ~ " << num10(mfit.slope) << " log(1/E) (r2 " << num10(mfit.r2) << ")";
  }
  if (!comp.empty()) {
    std::vector<double> sorted = comp;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    summary << ", compensated ratio in [" << num10(sorted.front() / median) << ", "
            << num10(sorted.back() / median) << "] of median";
  }
  HolderFitOptions fo;
  fo.rule = PairRule::anchored;
  fo.delta_min = a.num("fit-lo");
  fo.delta_max = a.num("fit-hi");
  try {
    const HolderFit fit = holder_fit(curve, fo);
    summary << ", holder exponent " << num10(fit.fitted_alpha) << " (r2 "
            << num10(fit.fit_r2) << ")";
  } catch (const InsufficientSignal& e) {
    summary << ", holder fit skipped: " << e.what();
  } catch (const ParameterError& e) {
    summary << ", holder fit skipped: " << e.what();
  }
  out << "example53: " << summary.str() << "\n";
  return 0;
}

// validate ------------------------------------------------------------------

int cmd_validate(const Args& a, const RunConfig& cfg, std::ostream& out) {
  SuiteOptions so;
  so.cases = a.integer("cases");
  so.seed = cfg.seed;
  so.workers = cfg.workers;
  const auto results = run_invariant_suite(so);
  Sink sink(cfg.out, out);
  bool ok = true;
  for (const auto& r : results) {
    *sink << format_check(r) << "\n";
    ok = ok && r.passed;
  }
  out << (ok ? "PASS" : "FAIL") << " invariant suite (" << results.size() << " checks)\n";
  return ok ? 0 : 2;
}

}  // namespace

const std::vector<CommandSpec>& commands() {
  static const std::vector<CommandSpec> specs = [] {
    const std::vector<KeySpec> birk = {{"n", "1000000", "Birkhoff orbit length"},
                                       {"burn-in", "", "discarded steps (default min(1000, n/10))"},
                                       {"replicas", "16", "independent replicas"}};
    return std::vector<CommandSpec>{
        {"rotation", "Birkhoff rotation number at E or over a grid",
         with(with(family_keys(), birk),
              {{"E", "0", "parameter value"}, {"energies", "", "grid lo:hi:count[:log] or list"}})},
        {"increment", "rho(E2) - rho(E1) from the measure formulas and the Birkhoff oracle",
         with(with(family_keys(), birk),
              {{"E1", "", "first energy"},
               {"E2", "", "second energy"},
               {"method", "all", "thm2 | corollary | birkhoff | background | all"},
               {"n-mc", "1000000", "Monte Carlo samples"},
               {"n-samples", "100000", "stationary measure atoms"},
               {"n-burn", "1000", "stationary burn-in"},
               {"n-path", "200", "background fiber path length"},
               {"n-base", "1024", "background base points"},
               {"fiber-samples", "64", "background atoms per fiber"},
               {"orientation", "derived", "derived | as_printed"}})},
        {"stationary", "stationary measure of an iid family",
         with(family_keys(), {{"E", "0", "parameter value"},
                              {"direction", "forward", "forward | backward"},
                              {"n-burn", "1000", "burn-in steps"},
                              {"n-samples", "100000", "orbit points"},
                              {"tolerance", "0.05", "residual tolerance"}})},
        {"ids", "integrated density of states of a Schrodinger operator",
         {{"spec", "", "free | anderson | background"},
          {"noise", "uniform(0,1)", "noise law"},
          {"coupling", "0.5", "background amplitude"},
          {"frequency", "0.41421356237309503", "background frequency"},
          {"x0", "0", "background starting point"},
          {"method", "both", "spectral | dynamical | both"},
          {"energies", "", "grid lo:hi:count[:log] or list"},
          {"L", "100000", "box size for eigenvalue counting"},
          {"n", "1000000", "Birkhoff orbit length"},
          {"burn-in", "", "discarded steps (default min(1000, n/10))"},
          {"replicas", "16", "independent replicas"},
          {"E-ref", "", "anchor energy below the spectrum (default -3 - sup|v|)"}}},
        {"holder", "log-log Holder exponent of a curve",
         {{"input", "", "CSV with energy, value/ids/rho and optional stderr columns"},
          {"synthetic", "", "linear | sqrt | loglaw"},
          {"energies", "1e-5:1e-1:9:log", "grid for synthetic curves"},
          {"rule", "adjacent", "adjacent | anchored | all"},
          {"sigmas", "4", "signal threshold in standard errors"},
          {"dmin", "", "smallest energy gap"},
          {"dmax", "", "largest energy gap"}}},
        {"example53", "Morse-Smale family with non-Holder rotation number at E = 0",
         {{"s", "0.5", "Morse-Smale strength"},
          {"energies", "0,0.01,0.0031622776601683794,0.001,0.00031622776601683794,0.0001,3.1622776601683795e-05,1e-05", "energies in [0, 0.1]"},
          {"n", "10000000", "Birkhoff orbit length"},
          {"burn-in", "10000", "discarded steps"},
          {"replicas", "16", "independent replicas"},
          {"fit-lo", "1e-5", "smallest energy in the Holder fit"},
          {"fit-hi", "1e-3", "largest energy in the Holder fit"}}},
        {"validate", "invariant suite", {{"cases", "1000", "randomized cases per check"}}},
    };
  }();
  return specs;
}

std::map<std::string, std::string> parse_config_file(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty()) throw UsageError("config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  const auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) {
      throw UsageError("bad number '" + s + "' in grid '" + text + "'");
    }
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(trim(p));
    if (parts.size() < 3 || parts.size() > 4 || (parts.size() == 4 && parts[3] != "log")) {
      throw UsageError("grid '" + text + "' is not lo:hi:count or lo:hi:count:log");
    }
    const double lo = number(parts[0]), hi = number(parts[1]), cnt = number(parts[2]);
    if (cnt < 1 || cnt != std::floor(cnt) || cnt > 1e7) throw UsageError("grid count must be a positive integer");
    const bool log = parts.size() == 4;
    if (log && !(lo > 0.0 && hi > 0.0)) throw UsageError("log grid needs positive endpoints");
    const auto n = static_cast<std::int64_t>(cnt);
    for (std::int64_t i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      out.push_back(log ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo));
    }
    if (n > 1) out.back() = hi;
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(number(trim(item)));
  }
  if (out.empty()) throw UsageError("empty grid");
  return out;
}

bool parse_args(int argc, const char* const* argv, RunConfig& config, std::ostream& out) {
  CLI::App app{"rotnum: fibered rotation numbers of circle-cocycle families"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string out_path, config_path;
  auto* o_seed = app.add_option("--seed", seed, "random seed (default 0)");
  auto* o_workers = app.add_option("--workers", workers, "worker threads (default 1)");
  auto* o_out = app.add_option("--out", out_path, "artifact path (default stdout)");
  app.add_option("--config", config_path, "key = value config file; flags override it");

  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::map<std::string, CLI::Option*>> options;
  for (const auto& c : commands()) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    for (const auto& k : c.keys) {
      std::string help = k.help;
      if (!k.fallback.empty()) help += " [" + k.fallback + "]";
      options[c.name][k.name] = sub->add_option("--" + k.name, values[c.name][k.name], help);
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, out);
      return false;
    }
    throw UsageError(e.what());
  }

  CLI::App* chosen = app.get_subcommands().front();
  config.command = chosen->get_name();
  config.params.clear();
  for (const auto& [key, opt] : options[config.command]) {
    if (opt->count() > 0) config.params[key] = values[config.command][key];
  }
  config.seed = seed;
  config.workers = workers;
  config.out = out_path;

  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw UsageError("cannot read --config " + config_path);
    for (const auto& [key, value] : parse_config_file(in)) {
      const auto as_number = [&](const char* what) {
        try {
          return std::stoull(value);
        } catch (const std::exception&) {
          throw UsageError(std::string("config key ") + what + " expects an integer");
        }
      };
      if (key == "seed") {
        if (o_seed->count() == 0) config.seed = as_number("seed");
      } else if (key == "workers") {
        if (o_workers->count() == 0) config.workers = static_cast<unsigned>(as_number("workers"));
      } else if (key == "out") {
        if (o_out->count() == 0) config.out = value;
      } else {
        config.params.emplace(key, value);  // flags win
      }
    }
  }
  if (config.workers < 1) throw UsageError("--workers must be at least 1");
  return true;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const auto& specs = commands();
    const auto it = std::find_if(specs.begin(), specs.end(),
                                 [&](const CommandSpec& c) { return c.name == config.command; });
    if (it == specs.end()) throw UsageError("unknown command '" + config.command + "'");
    const Args a(*it, config.params);
    if (config.command == "rotation") return cmd_rotation(a, config, out);
    if (config.command == "increment") return cmd_increment(a, config, out);
    if (config.command == "stationary") return cmd_stationary(a, config, out, err);
    if (config.command == "ids") return cmd_ids(a, config, out);
    if (config.command == "holder") return cmd_holder(a, config, out);
    if (config.command == "example53") return cmd_example53(a, config, out);
    return cmd_validate(a, config, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace rotnum::tools
