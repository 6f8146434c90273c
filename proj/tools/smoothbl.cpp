// smoothbl: batch front-end over instance files.
//
// exit codes: 0 ok, 1 usage or precondition, 2 schema, 3 enumeration cap,
// 4 a converse bound was violated (UNSOUND).

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smoothbl/smoothbl.hpp"

using namespace smoothbl;
using io::Json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitSchema = 2;
constexpr int kExitCap = 3;
constexpr int kExitUnsound = 4;

struct Globals {
  bool bits = false;
  bool json = false;
  int threads = 1;
};

std::string fmt(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Key/value report, printed as "key: value" lines or as one JSON object.
class Report {
 public:
  explicit Report(const Globals& g) : g_(g) {}

  double info(double nats) const { return g_.bits ? nats_to_bits(nats) : nats; }

  void put(const std::string& key, const Json& v) {
    json_[key] = v;
    order_.push_back(key);
  }
  void num(const std::string& key, double v) { put(key, io::detail::write_number(v)); }
  void nats(const std::string& key, double v) { num(key, info(v)); }
  void note(const std::string& s) { notes_.push_back(s); }

  void print() const {
    if (g_.json) {
      Json out = json_;
      if (!notes_.empty()) out["notes"] = notes_;
      std::cout << out.dump(2) << "\n";
      return;
    }
    for (const auto& k : order_) {
      const Json& v = json_.at(k);
      std::cout << k << ": ";
      if (v.is_number_float()) std::cout << fmt(v.get<double>());
      else if (v.is_string()) std::cout << v.get<std::string>();
      else std::cout << v.dump();
      std::cout << "\n";
    }
    for (const auto& n : notes_) std::cout << "note: " << n << "\n";
  }

 private:
  const Globals& g_;
  Json json_ = Json::object();
  std::vector<std::string> order_;
  std::vector<std::string> notes_;
};

Json vec_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(std::stod(fmt(x)));
  return a;
}

io::InstanceFile load(const std::string& path, const std::string& want) {
  auto f = io::load_instance(path);
  for (const auto& w : f.warnings) std::cerr << "warning: " << w << "\n";
  if (!want.empty() && f.kind != want && want.find(f.kind) == std::string::npos)
    throw io::SchemaError("/kind", "expected " + want + ", got " + f.kind);
  return f;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DomainError(std::string(what) + ": cannot parse \"" + item + "\"");
    }
  }
  return v;
}

std::vector<std::vector<double>> parse_grid(const std::string& s) {
  std::vector<std::vector<double>> grid;
  std::stringstream ss(s);
  std::string point;
  while (std::getline(ss, point, ';'))
    if (point.find_first_not_of(" \t") != std::string::npos) grid.push_back(parse_list(point, "--c-grid"));
  return grid;
}

const io::DiscreteGbllFile& as_gbll(const io::InstanceFile& f, bool need_distribution) {
  const auto& g = std::get<io::DiscreteGbllFile>(f.payload);
  if (need_distribution && !g.mu_normalized)
    throw io::SchemaError("/mu_normalized", "this command needs mu to be the source distribution Q_X");
  return g;
}

Json labelled(const FiniteMeasure& p, const std::vector<std::string>& labels) {
  if (labels.size() != p.size()) return vec_json(p.vec());
  Json o = Json::object();
  for (std::size_t i = 0; i < p.size(); ++i) o[labels[i]] = std::stod(fmt(p[i]));
  return o;
}

// ---------------------------------------------------------------------------

struct GbllArgs {
  std::string file;
  std::optional<double> delta;
  std::size_t tensor_n = 1;
  int restarts = 64;
  std::uint64_t seed = 0;
};

int cmd_gbll(const GbllArgs& a, const Globals& g) {
  const auto f = load(a.file, "discrete-gbll");
  const auto& file = as_gbll(f, false);
  const auto n = static_cast<double>(a.tensor_n);
  const auto inst = a.tensor_n > 1 ? tensor_power(file.instance, a.tensor_n) : file.instance;
  OptimizerOptions opts;
  opts.restarts = a.restarts;
  opts.seed = a.seed;
  Report r(g);
  r.put("units", g.bits ? "bits" : "nats");
  r.put("n", a.tensor_n);
  const auto res = gbll_constant(inst, opts);
  r.nats("d", res.constant_d / n);
  r.put("diverged", res.diverged);
  if (file.mu_normalized) {
    const auto& s = file.instance;
    r.nats("d_star", dstar(s.mu, s.channels, s.weights).value);
    bool marginals = true;
    for (std::size_t j = 0; j < s.m(); ++j)
      for (std::size_t y = 0; y < s.nus[j].size(); ++y)
        marginals = marginals && std::abs(s.nus[j][y] - push_forward(s.mu, s.channels[j])[y]) <= 1e-12;
    if (!marginals) r.note("nu_j differ from the output marginals; d >= d* is only guaranteed when they agree");
  }
  if (a.delta) {
    if (!file.mu_normalized) throw io::SchemaError("/mu_normalized", "smoothing needs mu to be a distribution");
    SmoothOptions so;
    so.inner = opts;
    const auto sm = smooth_constant(inst, *a.delta, so);
    r.num("delta", *a.delta);
    r.nats("d_delta", sm.value / n);
    r.put("d_delta_exhaustive", sm.exhaustive);
  }
  if (!res.diverged) {
    const bool names = a.tensor_n == 1 && file.labels && !file.labels->x.empty();
    r.put("maximizer", names ? labelled(res.maximizer, file.labels->x) : vec_json(res.maximizer.vec()));
    Json locals = Json::array();
    for (const auto& [v, p] : res.local_maxima) locals.push_back(std::stod(fmt(r.info(v / n))));
    r.put("local_maxima", locals);
    // duality audit: worst functions at d close the gap, at d - 0.1 they break it
    const double at = worst_case_functions(inst, res.constant_d, opts).gap;
    const double below = worst_case_functions(inst, res.constant_d - 0.1, opts).gap;
    r.num("audit_gap_at_d", at);
    r.num("audit_gap_at_d_minus_0.1", below);
    r.put("audit", std::abs(at) <= 1e-4 && below > 0.0 ? "ok" : "FAILED");
  } else {
    r.note("d = +inf: some input reaches an output with zero reference mass");
  }
  r.print();
  return 0;
}

struct DstarArgs {
  std::string file;
  std::size_t u_cap = 0;
  int restarts = 32;
  std::uint64_t seed = 0;
  bool sensitivity = false;
};

int cmd_dstar(const DstarArgs& a, const Globals& g) {
  const auto f = load(a.file, "discrete-gbll");
  const auto& s = as_gbll(f, true).instance;
  DstarOptions o;
  o.u_cap = a.u_cap;
  o.restarts = a.restarts;
  o.seed = a.seed;
  const auto res = dstar(s.mu, s.channels, s.weights, o);
  Report r(g);
  r.put("units", g.bits ? "bits" : "nats");
  r.nats("d_star", res.value);
  r.put("u_weights", vec_json(res.decomposition.u_weights));
  Json comps = Json::array();
  for (const auto& c : res.decomposition.components) comps.push_back(vec_json(c.vec()));
  r.put("components", comps);
  if (a.sensitivity) {
    Json sens = Json::array();
    for (const auto& [cap, v] : dstar_cap_sensitivity(s.mu, s.channels, s.weights, s.mu.size() + 2, o))
      sens.push_back({cap, std::stod(fmt(r.info(v)))});
    r.put("cap_sensitivity", sens);
  }
  r.print();
  return 0;
}

struct SmoothArgs {
  std::string file;
  double delta = 0.0;
  std::size_t tensor_n = 1;
  std::size_t curve = 0;
  std::uint64_t seed = 0;
};

int cmd_smooth(const SmoothArgs& a, const Globals& g) {
  const auto f = load(a.file, "discrete-gbll");
  const auto& s = as_gbll(f, true).instance;
  SmoothOptions so;
  so.inner.seed = a.seed;
  if (a.curve > 0) {
    const auto c = smooth_rate_curve(s.mu, s.channels, s.weights, a.delta, a.curve, so);
    Report rr(g);
    std::cout << "n,value,slack,d,d_star\n";
    for (const auto& p : c.points)
      std::cout << p.n << "," << fmt(rr.info(p.value)) << "," << fmt(rr.info(p.slack)) << "," << fmt(rr.info(c.d))
                << "," << fmt(rr.info(c.d_star)) << "\n";
    return 0;
  }
  const auto inst = a.tensor_n > 1 ? tensor_power(s, a.tensor_n) : s;
  const auto res = smooth_constant(inst, a.delta, so);
  const double n = static_cast<double>(a.tensor_n);
  Report r(g);
  r.put("units", g.bits ? "bits" : "nats");
  r.put("n", a.tensor_n);
  r.num("delta", a.delta);
  r.nats("d_delta", res.value / n);
  r.nats("d", gbll_constant(inst, so.inner).constant_d / n);
  r.num("e1_used", res.e1_used);
  r.put("exhaustive", res.exhaustive);
  r.put("candidates", res.candidates);
  if (res.smoothing_measure.size() <= 64) r.put("smoothing_measure", vec_json(res.smoothing_measure.vec()));
  r.print();
  return 0;
}

struct RegionArgs {
  std::string file;
  std::string c_grid;
  std::string rj;
};

int cmd_region(const RegionArgs& a, const Globals& g) {
  const auto f = load(a.file, "discrete-gbll");
  const auto& s = as_gbll(f, true).instance;
  const auto grid = parse_grid(a.c_grid);
  auto rj = parse_list(a.rj, "--rj");
  if (rj.empty()) rj.assign(s.m(), 0.0);
  if (rj.size() != s.m()) throw DomainError("--rj: need one rate per channel");
  for (const auto& c : grid)
    if (c.size() != s.m()) throw DomainError("--c-grid: every point needs one weight per channel");
  const auto trace = region_trace([&](const std::vector<double>& c) { return dstar(s.mu, s.channels, c).value; }, grid,
                                  rj);
  Report r(g);
  for (std::size_t j = 0; j < s.m(); ++j) std::cout << "c_" << j + 1 << ",";
  std::cout << "dstar,R_max\n";
  for (const auto& p : trace.points) {
    for (double c : p.c) std::cout << fmt(c) << ",";
    std::cout << fmt(r.info(p.dstar)) << "," << fmt(r.info(p.r_max)) << "\n";
  }
  for (const auto& n : trace.notes) std::cerr << "note: " << n << "\n";
  return 0;
}

struct GaussianArgs {
  std::string file;
  int restarts = 4;
  std::uint64_t seed = 0;
};

int cmd_gaussian(const GaussianArgs& a, const Globals& g) {
  const auto f = load(a.file, "gaussian");
  const auto& inst = std::get<io::GaussianFile>(f.payload).instance;
  GaussianOptions o;
  o.restarts = a.restarts;
  o.seed = a.seed;
  Report r(g);
  r.put("units", g.bits ? "bits" : "nats");
  const auto fr = gaussian_F(inst.sigma, inst, o);
  r.nats("F_sigma", fr.value);
  if (fr.diverged()) r.put("F_diverged", *fr.diverged_reason);
  r.nats("C", gaussian_C(inst));
  r.nats("d_star", gaussian_dstar(inst, o));
  r.nats("V", variance_V(inst));
  r.print();
  return 0;
}

struct CertifyArgs {
  std::string file;
  double delta = 0.0;
  std::string weights;
  std::optional<double> d;
  std::size_t schemes = 0;
  std::uint64_t seed = 0;
};

// d for the scheme's block length: n d(Q) unsmoothed, d_delta(Q^n) smoothed.
double certificate_d(const CrScheme& s, const std::vector<double>& c, double delta) {
  const auto single = omniscient_instance(s.source, s.alphabets, c);
  if (delta == 0.0) return static_cast<double>(s.n) * gbll_constant(single).constant_d;
  return smooth_constant(tensor_power(single, s.n), delta).value;
}

int certify_queries(const io::BoundsQueryFile& b, const Globals& g) {
  bool sound = true;
  std::cout << "label,bound,value,actual,verdict\n";
  for (const auto& q : b.queries) {
    double value = 0.0;
    std::string kind, verdict;
    if (const auto* o = std::get_if<io::OmniQuery>(&q.query)) {
      kind = "omni";
      value = omni_bound(o->sizes, o->weights, o->d, o->delta);
    } else if (const auto* c = std::get_if<io::OneCommQuery>(&q.query)) {
      kind = "one-comm";
      value = one_comm_bound(c->params, c->sizes);
    } else if (const auto* t = std::get_if<io::TvRenyiQuery>(&q.query)) {
      kind = "tv-renyi";
      value = tv_renyi_bound(t->m, t->alpha, t->renyi);
    } else {
      const auto& rq = std::get<io::RegionQuery>(q.query);
      kind = "region";
      value = region_check(rq.point, rq.dstar, rq.weights) ? 1.0 : 0.0;
      verdict = value == 1.0 ? "INSIDE" : "OUTSIDE";
    }
    if (verdict.empty()) {
      if (q.actual) {
        const bool ok = *q.actual >= value - 1e-9;
        sound = sound && ok;
        verdict = ok ? (value <= 0.0 ? "SOUND (vacuous)" : "SOUND") : "UNSOUND";
      } else {
        verdict = value <= 0.0 ? "vacuous" : "-";
      }
    }
    std::cout << q.label << "," << kind << "," << fmt(value) << "," << (q.actual ? fmt(*q.actual) : "") << ","
              << verdict << "\n";
  }
  (void)g;
  return sound ? 0 : kExitUnsound;
}

int cmd_certify(const CertifyArgs& a, const Globals& g) {
  const auto f = load(a.file, "cr-scheme,bounds-query");
  if (f.kind == "bounds-query") return certify_queries(std::get<io::BoundsQueryFile>(f.payload), g);
  const auto& file = std::get<io::CrSchemeFile>(f.payload);
  auto c = a.weights.empty() ? file.weights : parse_list(a.weights, "--weights");
  if (c.size() != file.scheme.m()) throw DomainError("--weights: need one weight per terminal");
  if (!(a.delta >= 0.0 && a.delta < 1.0)) throw DomainError("--delta must lie in [0,1)");
  const double d = a.d ? *a.d : certificate_d(file.scheme, c, a.delta);
  const auto rep = converse_certificate(file.scheme, c, d, a.delta);
  Report r(g);
  r.put("verdict", rep.sound ? "SOUND" : "UNSOUND");
  if (rep.vacuous) r.note("vacuous: the bound is <= 0");
  r.num("bound", rep.bound);
  r.num("actual_tv", rep.actual);
  r.nats("d", rep.d);
  r.num("delta", rep.delta);
  r.print();
  return rep.sound ? 0 : kExitUnsound;
}

int cmd_simulate(const CertifyArgs& a, const Globals& g) {
  const auto f = load(a.file, "cr-scheme");
  const auto& file = std::get<io::CrSchemeFile>(f.payload);
  const auto& s = file.scheme;
  if (a.schemes == 0) {
    const auto ev = evaluate_scheme(s);
    Report r(g);
    r.num("p_agree", ev.p_agree);
    r.num("tv_to_ideal", ev.tv_to_ideal);
    r.num("tv_full", ev.tv_full);
    r.num("delta1", ev.delta1);
    r.num("delta2", ev.delta2);
    r.print();
    return 0;
  }
  // batch of random-binning schemes with the file's sizes, certified one by one
  auto c = a.weights.empty() ? file.weights : parse_list(a.weights, "--weights");
  if (c.size() != s.m()) throw DomainError("--weights: need one weight per terminal");
  const double d = a.d ? *a.d : certificate_d(s, c, a.delta);
  bool all = true;
  std::cout << "index,seed,p_agree,tv_to_ideal,bound,verdict\n";
  for (std::size_t i = 0; i < a.schemes; ++i) {
    const std::uint64_t seed = a.seed + i;
    const auto sch = random_binning_scheme(s.source, s.alphabets, s.n, s.k_size, s.w_sizes, seed);
    const auto ev = evaluate_scheme(sch);
    const auto rep = converse_certificate(sch, c, d, a.delta);
    all = all && rep.sound;
    std::cout << i << "," << seed << "," << fmt(ev.p_agree) << "," << fmt(rep.actual) << "," << fmt(rep.bound) << ","
              << (rep.sound ? "SOUND" : "UNSOUND") << "\n";
  }
  return all ? 0 : kExitUnsound;
}

struct SecondOrderArgs {
  std::string file;
  double d1 = 0.5;
  double d2 = 0.5;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  std::optional<long> dim;
};

int cmd_second_order(const SecondOrderArgs& a, const Globals& g) {
  const auto f = load(a.file, "gaussian");
  const auto& inst = std::get<io::GaussianFile>(f.payload).instance;
  for (std::size_t j = 0; j < inst.m(); ++j)
    if (inst.maps[j].rows() != 1 || !inst.noise[j].isZero())
      throw io::SchemaError("/maps", "second-order needs X = (Y_1..Y_m) with noiseless scalar outputs");
  std::optional<Eigen::Index> dim;
  if (a.dim) dim = static_cast<Eigen::Index>(*a.dim);
  const auto rep = second_order_bound(inst, a.d1, a.d2, a.samples, a.seed, dim);
  Report r(g);
  r.num("V", rep.variance);
  r.put("wigner_dim", static_cast<long>(rep.dim));
  r.num("wigner_cdf", rep.wigner.estimate);
  r.num("wigner_stderr", rep.wigner.std_error);
  r.num("tail", rep.tail);
  r.num("bound", rep.bound);
  r.num("bound_clamped", clamp_unit(rep.bound));
  r.print();
  return 0;
}

// Quick end-to-end checks against closed forms.
int cmd_selftest(const Globals&) {
  int failed = 0;
  auto check = [&failed](const char* name, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << " (" << detail << ")\n";
    if (!ok) ++failed;
  };
  {
    Philox4x32 rng(1);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const std::size_t k = 1 + rng.below(10);
      const FiniteMeasure nu(rng.dirichlet1(k)), mu(rng.dirichlet1(k));
      const double gamma = 1.0 + 2.0 * rng.uniform();
      double best = 0.0;
      for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        double v = 0.0;
        for (std::size_t i = 0; i < k; ++i)
          if (mask >> i & 1) v += nu[i] - gamma * mu[i];
        best = std::max(best, v);
      }
      worst = std::max(worst, std::abs(best - e_gamma(nu, mu, gamma)));
    }
    check("e_gamma closed form", worst <= 1e-15, "max err " + fmt(worst));
  }
  const double p = 0.11, rho = 1.0 - 2.0 * p;
  const auto q = FiniteMeasure::uniform(2);
  const std::vector<Channel> bsc{Channel::bsc(p)};
  {
    const double lo = dstar(q, bsc, {0.9 / (rho * rho)}).value;
    const double hi = dstar(q, bsc, {1.05 / (rho * rho)}).value;
    check("hypercontractivity threshold", lo <= 1e-5 && hi >= 1e-3, "d* " + fmt(lo) + " / " + fmt(hi));
  }
  {
    const double z = dstar(q, bsc, {1.0}).value;
    check("data processing zero", std::abs(z) <= 1e-8, "d* " + fmt(z));
  }
  {
    const auto inst = star_instance(q, bsc, {2.0});
    const double d = gbll_constant(inst).constant_d;
    const double at = worst_case_functions(inst, d).gap;
    const double below = worst_case_functions(inst, d - 0.1).gap;
    check("functional duality", std::abs(at) <= 1e-4 && below > 0.0, "gap " + fmt(at) + ", " + fmt(below));
  }
  {
    Eigen::MatrixXd s(1, 1);
    s << 1.0;
    const auto gi = GaussianInstance::coordinates(s, {0.6});
    const double f1 = gaussian_F(s, gi).value, f2 = gaussian_F(1.5 * s, gi).value;
    const double want = 0.5 * std::log(1.5) * (1.0 - 0.6);
    check("gaussian scaling", std::abs(f2 - f1 - want) <= 1e-8, "err " + fmt(f2 - f1 - want));
  }
  {
    const auto e = wigner_lambda_max_cdf(1, 1.0, 100000, 7);
    const double want = normal_cdf(1.0 / std::sqrt(2.0));
    check("wigner dim 1", std::abs(e.estimate - want) <= 3 * e.std_error, fmt(e.estimate) + " vs " + fmt(want));
  }
  {
    const double v = omni_bound({1024, {2}}, {2.0}, 0.0, 0.0);
    check("omniscient bound", std::abs(v - (1.0 - 1.0 / 1024 - 2.0 / 32.0)) <= 1e-15, fmt(v));
  }
  return failed == 0 ? 0 : 1;
}

// (0,1) open interval, the second-order theorem range for D1 and D2.
const CLI::Validator kOpenUnit(
    [](std::string& s) -> std::string {
      try {
        const double v = std::stod(s);
        if (v > 0.0 && v < 1.0) return {};
      } catch (const std::exception&) {
      }
      return "value " + s + " outside the open interval (0,1)";
    },
    "in (0,1)");

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smoothbl: best constants, smoothing and converse bounds"};
  app.require_subcommand(1);
  Globals g;
  app.add_flag("--bits", g.bits, "report information quantities in bits (computations stay in nats)");
  app.add_flag("--json", g.json, "emit reports as JSON");
  app.add_option("--threads", g.threads, "worker threads (accepted; computations currently run on one)")
      ->check(CLI::PositiveNumber);
  app.fallthrough();

  GbllArgs ga;
  auto* gbll = app.add_subcommand("gbll", "best constant d, d*, optional d_delta and a duality audit");
  gbll->add_option("file", ga.file)->required()->check(CLI::ExistingFile);
  gbll->add_option("--delta", ga.delta, "also compute the delta-smooth constant")->check(CLI::Range(0.0, 1.0));
  gbll->add_option("--tensor-n", ga.tensor_n, "use the n-fold product and report per-letter values")
      ->check(CLI::PositiveNumber);
  gbll->add_option("--restarts", ga.restarts)->check(CLI::NonNegativeNumber);
  gbll->add_option("--seed", ga.seed);

  DstarArgs da;
  auto* ds = app.add_subcommand("dstar", "auxiliary-variable constant d* with its decomposition");
  ds->add_option("file", da.file)->required()->check(CLI::ExistingFile);
  ds->add_option("--u-cap", da.u_cap, "auxiliary alphabet cap (default |X|+1)");
  ds->add_option("--restarts", da.restarts)->check(CLI::NonNegativeNumber);
  ds->add_option("--seed", da.seed);
  ds->add_flag("--cap-sensitivity", da.sensitivity, "report d* for caps 1..|X|+2");

  SmoothArgs sa;
  auto* sm = app.add_subcommand("smooth", "delta-smooth constant of a product source");
  sm->add_option("file", sa.file)->required()->check(CLI::ExistingFile);
  sm->add_option("--delta", sa.delta)->required()->check(CLI::Range(0.0, 1.0));
  sm->add_option("--tensor-n", sa.tensor_n)->check(CLI::PositiveNumber);
  sm->add_option("--curve", sa.curve, "CSV of normalized values for n = 1..N");
  sm->add_option("--seed", sa.seed);

  RegionArgs ra;
  auto* rg = app.add_subcommand("region", "CSV of R_max(c) over a weight grid");
  rg->add_option("file", ra.file)->required()->check(CLI::ExistingFile);
  rg->add_option("--c-grid", ra.c_grid, "points separated by ';', coordinates by ','");
  rg->add_option("--rj", ra.rj, "message rates R_j, comma separated (default 0)");

  GaussianArgs gsa;
  auto* gs = app.add_subcommand("gaussian", "F(Sigma), C, d* and V of a Gaussian instance");
  gs->add_option("file", gsa.file)->required()->check(CLI::ExistingFile);
  gs->add_option("--restarts", gsa.restarts)->check(CLI::NonNegativeNumber);
  gs->add_option("--seed", gsa.seed);

  CertifyArgs ca;
  auto* ce = app.add_subcommand("certify", "check the omniscient-helper converse on a scheme or a bounds query");
  ce->add_option("file", ca.file)->required()->check(CLI::ExistingFile);
  ce->add_option("--delta", ca.delta, "smoothing level (0 = unsmoothed)")->check(CLI::Range(0.0, 1.0));
  ce->add_option("--weights", ca.weights, "c_j, comma separated (default from file)");
  ce->add_option("--d", ca.d, "use this d instead of computing it");

  CertifyArgs sia;
  auto* si = app.add_subcommand("simulate", "evaluate a scheme, or certify a batch of random-binning schemes");
  si->add_option("file", sia.file)->required()->check(CLI::ExistingFile);
  si->add_option("--schemes", sia.schemes, "number of random schemes (0 = evaluate the file's scheme)");
  si->add_option("--seed", sia.seed);
  si->add_option("--delta", sia.delta)->check(CLI::Range(0.0, 1.0));
  si->add_option("--weights", sia.weights);
  si->add_option("--d", sia.d);

  SecondOrderArgs so;
  auto* sec = app.add_subcommand("second-order", "second-order TV bound for X = Y^m Gaussian sources");
  sec->add_option("file", so.file)->required()->check(CLI::ExistingFile);
  sec->add_option("--d1", so.d1)->required()->check(kOpenUnit);
  sec->add_option("--d2", so.d2)->required()->check(kOpenUnit);
  sec->add_option("--samples", so.samples)->check(CLI::PositiveNumber);
  sec->add_option("--seed", so.seed);
  sec->add_option("--dim", so.dim, "Wigner dimension (default: dimension of X)")->check(CLI::PositiveNumber);

  auto* st = app.add_subcommand("selftest", "quick checks against closed forms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gbll) return cmd_gbll(ga, g);
    if (*ds) return cmd_dstar(da, g);
    if (*sm) return cmd_smooth(sa, g);
    if (*rg) return cmd_region(ra, g);
    if (*gs) return cmd_gaussian(gsa, g);
    if (*ce) return cmd_certify(ca, g);
    if (*si) return cmd_simulate(sia, g);
    if (*sec) return cmd_second_order(so, g);
    if (*st) return cmd_selftest(g);
  } catch (const io::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const ResourceCapError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return kExitCap;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
