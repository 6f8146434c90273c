#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "smoothbl/bounds.hpp"
#include "smoothbl/core.hpp"
#include "smoothbl/crsim.hpp"
#include "smoothbl/gaussian.hpp"
#include "smoothbl/measures.hpp"

// JSON instance files. Every document carries a top-level "kind"; matrices are
// row-major nested arrays; +/-inf are written as the strings "inf" / "-inf".
// Probability rows within 1e-9 of normalized are taken as is, rows that drift
// by at most 1e-6 are renormalized with a warning, anything else is an error.

namespace smoothbl::io {

using Json = nlohmann::ordered_json;

class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& msg)
      : Error((path.empty() ? std::string("/") : path) + ": " + msg), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

inline constexpr double kRowTolerance = 1e-9;
inline constexpr double kRenormalizeLimit = 1e-6;

// ----------------------------------------------------------------------------
// payloads

struct Labels {
  std::vector<std::string> x;
  std::vector<std::vector<std::string>> y;
  friend bool operator==(const Labels&, const Labels&) = default;
};

struct DiscreteGbllFile {
  GbllInstance instance;
  bool mu_normalized = true;
  std::optional<Labels> labels;
};

struct GaussianFile {
  GaussianInstance instance;
};

// Random-binning recipe; the scheme is rebuilt from it on load.
struct BinningRecipe {
  std::uint64_t seed = 0;
  double eta = 0.0;
  std::uint64_t perturb_seed = 0;
  friend bool operator==(const BinningRecipe&, const BinningRecipe&) = default;
};

struct CrSchemeFile {
  CrScheme scheme;
  std::vector<double> weights;  // c_j for the certificate, default all ones
  std::optional<BinningRecipe> binning;
};

struct OmniQuery {
  SchemeSizes sizes;
  std::vector<double> weights;
  double d = 0.0;
  double delta = 0.0;
};

struct OneCommQuery {
  OneCommParams params;
  SchemeSizes sizes;
};

struct TvRenyiQuery {
  std::uint64_t m = 1;
  double alpha = 0.5;
  double renyi = 0.0;
};

struct RegionQuery {
  RatePoint point;
  double dstar = 0.0;
  std::vector<double> weights;
};

struct BoundQuery {
  std::string label;
  std::variant<OmniQuery, OneCommQuery, TvRenyiQuery, RegionQuery> query;
  std::optional<double> actual;  // observed TV to compare against a bound
};

struct BoundsQueryFile {
  std::vector<BoundQuery> queries;
};

struct InstanceFile {
  std::string kind;
  Json metadata = Json::object();
  std::variant<DiscreteGbllFile, GaussianFile, CrSchemeFile, BoundsQueryFile> payload;
  std::vector<std::string> warnings;  // renormalization notices from loading
};

namespace detail {

inline std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
inline std::string child(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

inline double read_number(const Json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw SchemaError(path, "expected a number (or \"inf\" / \"-inf\")");
}

inline std::uint64_t read_count(const Json& j, const std::string& path, std::uint64_t min = 1) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
    throw SchemaError(path, "expected a nonnegative integer");
  const auto v = j.get<std::uint64_t>();
  if (v < min) throw SchemaError(path, "must be >= " + std::to_string(min));
  return v;
}

inline Json write_number(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

inline const Json& field(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(child(path, key), "missing required field");
  return *it;
}

inline const Json* optional_field(const Json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

inline std::vector<double> read_vector(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a nonempty array of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(read_number(j[i], child(path, i)));
  return v;
}

inline std::vector<std::size_t> read_sizes(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a nonempty array of sizes");
  std::vector<std::size_t> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(static_cast<std::size_t>(read_count(j[i], child(path, i))));
  return v;
}

inline Eigen::MatrixXd read_matrix(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a nonempty array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < j.size(); ++i) {
    rows.push_back(read_vector(j[i], child(path, i)));
    if (rows.back().size() != rows.front().size())
      throw SchemaError(child(path, i), "row length " + std::to_string(rows.back().size()) + ", expected " +
                                            std::to_string(rows.front().size()));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

inline Json write_vector(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(write_number(x));
  return a;
}

inline Json write_matrix(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(write_number(m(r, c)));
    a.push_back(std::move(row));
  }
  return a;
}

inline void require_nonnegative(const std::vector<double>& v, const std::string& path) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] >= 0.0) || !std::isfinite(v[i])) throw SchemaError(child(path, i), "must be finite and >= 0");
}

inline void normalize_row(std::vector<double>& v, const std::string& path, std::vector<std::string>& warnings) {
  require_nonnegative(v, path);
  double t = 0.0;
  for (double x : v) t += x;
  const double drift = std::abs(t - 1.0);
  if (drift <= kRowTolerance) return;
  if (drift > kRenormalizeLimit) {
    std::ostringstream os;
    os.precision(12);
    os << "probability row sums to " << t;
    throw SchemaError(path, os.str());
  }
  for (double& x : v) x /= t;
  std::ostringstream os;
  os << path << ": renormalized (drift " << drift << ")";
  warnings.push_back(os.str());
}

inline Eigen::MatrixXd read_stochastic(const Json& j, const std::string& path, std::vector<std::string>& warnings) {
  Eigen::MatrixXd m = read_matrix(j, path);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    normalize_row(row, child(path, static_cast<std::size_t>(r)), warnings);
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = row[static_cast<std::size_t>(c)];
  }
  return m;
}

inline FiniteMeasure read_measure(const Json& j, const std::string& path) {
  auto v = read_vector(j, path);
  require_nonnegative(v, path);
  try {
    return FiniteMeasure(std::move(v));
  } catch (const Error& e) {
    throw SchemaError(path, e.what());
  }
}

inline FiniteMeasure read_distribution(const Json& j, const std::string& path, std::vector<std::string>& warnings) {
  auto v = read_vector(j, path);
  normalize_row(v, path, warnings);
  return FiniteMeasure(std::move(v));
}

inline std::vector<double> read_weights(const Json& j, const std::string& path) {
  auto v = read_vector(j, path);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) throw SchemaError(child(path, i), "weights must be positive and finite");
  return v;
}

inline std::vector<std::string> read_strings(const Json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array of strings");
  std::vector<std::string> v;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) throw SchemaError(child(path, i), "expected a string");
    v.push_back(j[i].get<std::string>());
  }
  return v;
}

// --- discrete-gbll ----------------------------------------------------------

inline DiscreteGbllFile read_gbll(const Json& doc, std::vector<std::string>& warnings) {
  DiscreteGbllFile f;
  if (const Json* n = optional_field(doc, "mu_normalized")) {
    if (!n->is_boolean()) throw SchemaError("/mu_normalized", "expected a boolean");
    f.mu_normalized = n->get<bool>();
  }
  auto& inst = f.instance;
  inst.mu = f.mu_normalized ? read_distribution(field(doc, "mu", ""), "/mu", warnings)
                            : read_measure(field(doc, "mu", ""), "/mu");
  const Json& chs = field(doc, "channels", "");
  if (!chs.is_array() || chs.empty()) throw SchemaError("/channels", "expected a nonempty array of matrices");
  for (std::size_t j = 0; j < chs.size(); ++j) {
    const auto path = child("/channels", j);
    Eigen::MatrixXd k = read_stochastic(chs[j], path, warnings);
    if (static_cast<std::size_t>(k.rows()) != inst.mu.size())
      throw SchemaError(path, "has " + std::to_string(k.rows()) + " rows, |X| = " + std::to_string(inst.mu.size()));
    inst.channels.emplace_back(std::move(k));
  }
  inst.weights = read_weights(field(doc, "weights", ""), "/weights");
  if (inst.weights.size() != chs.size()) throw SchemaError("/weights", "need one weight per channel");
  if (const Json* nus = optional_field(doc, "nus")) {
    if (!nus->is_array() || nus->size() != chs.size()) throw SchemaError("/nus", "need one measure per channel");
    for (std::size_t j = 0; j < nus->size(); ++j) {
      inst.nus.push_back(read_measure((*nus)[j], child("/nus", j)));
      if (inst.nus[j].size() != inst.channels[j].outputs())
        throw SchemaError(child("/nus", j), "length must equal the channel's output alphabet");
    }
  } else {
    // default reference measures are the output marginals
    for (const auto& ch : inst.channels) inst.nus.push_back(push_forward(inst.mu, ch));
  }
  if (const Json* lab = optional_field(doc, "labels")) {
    Labels l;
    if (const Json* x = optional_field(*lab, "x")) l.x = read_strings(*x, "/labels/x");
    if (!l.x.empty() && l.x.size() != inst.mu.size()) throw SchemaError("/labels/x", "one label per input symbol");
    if (const Json* y = optional_field(*lab, "y")) {
      if (!y->is_array() || y->size() != chs.size()) throw SchemaError("/labels/y", "one label list per channel");
      for (std::size_t j = 0; j < y->size(); ++j) {
        l.y.push_back(read_strings((*y)[j], child("/labels/y", j)));
        if (l.y[j].size() != inst.channels[j].outputs())
          throw SchemaError(child("/labels/y", j), "one label per output symbol");
      }
    }
    f.labels = std::move(l);
  }
  return f;
}

inline void write_gbll(Json& doc, const DiscreteGbllFile& f) {
  const auto& inst = f.instance;
  if (!f.mu_normalized) doc["mu_normalized"] = false;
  doc["mu"] = write_vector(inst.mu.vec());
  doc["channels"] = Json::array();
  for (const auto& ch : inst.channels) doc["channels"].push_back(write_matrix(ch.kernel()));
  doc["nus"] = Json::array();
  for (const auto& nu : inst.nus) doc["nus"].push_back(write_vector(nu.vec()));
  doc["weights"] = write_vector(inst.weights);
  if (f.labels) {
    Json l = Json::object();
    if (!f.labels->x.empty()) l["x"] = f.labels->x;
    if (!f.labels->y.empty()) l["y"] = f.labels->y;
    doc["labels"] = std::move(l);
  }
}

// --- gaussian ---------------------------------------------------------------

inline GaussianFile read_gaussian(const Json& doc) {
  GaussianFile f;
  auto& g = f.instance;
  g.sigma = read_matrix(field(doc, "sigma", ""), "/sigma");
  g.weights = read_weights(field(doc, "weights", ""), "/weights");
  const Json* maps = optional_field(doc, "maps");
  if (!maps) {
    // X = (Y_1..Y_m) with scalar coordinates
    if (g.weights.size() != static_cast<std::size_t>(g.sigma.rows()))
      throw SchemaError("/weights", "without maps, need one weight per coordinate of X");
    g = GaussianInstance::coordinates(g.sigma, g.weights);
  } else {
    if (!maps->is_array() || maps->size() != g.weights.size())
      throw SchemaError("/maps", "need one matrix per weight");
    for (std::size_t j = 0; j < maps->size(); ++j) g.maps.push_back(read_matrix((*maps)[j], child("/maps", j)));
    const Json* noise = optional_field(doc, "noise");
    if (noise && (!noise->is_array() || noise->size() != g.maps.size()))
      throw SchemaError("/noise", "need one covariance per map");
    for (std::size_t j = 0; j < g.maps.size(); ++j)
      g.noise.push_back(noise ? read_matrix((*noise)[j], child("/noise", j))
                              : Eigen::MatrixXd::Zero(g.maps[j].rows(), g.maps[j].rows()));
  }
  try {
    g.validate();
  } catch (const Error& e) {
    throw SchemaError("", e.what());
  }
  return f;
}

inline void write_gaussian(Json& doc, const GaussianFile& f) {
  const auto& g = f.instance;
  doc["sigma"] = write_matrix(g.sigma);
  doc["maps"] = Json::array();
  doc["noise"] = Json::array();
  for (std::size_t j = 0; j < g.m(); ++j) {
    doc["maps"].push_back(write_matrix(g.maps[j]));
    doc["noise"].push_back(write_matrix(g.noise[j]));
  }
  doc["weights"] = write_vector(g.weights);
}

// --- cr-scheme --------------------------------------------------------------

inline CrSchemeFile read_cr(const Json& doc, std::vector<std::string>& warnings) {
  CrSchemeFile f;
  auto& s = f.scheme;
  s.n = static_cast<std::size_t>(read_count(field(doc, "n", ""), "/n"));
  s.source = read_distribution(field(doc, "source", ""), "/source", warnings);
  s.alphabets = read_sizes(field(doc, "alphabets", ""), "/alphabets");
  s.k_size = static_cast<std::size_t>(read_count(field(doc, "k_size", ""), "/k_size"));
  s.w_sizes = read_sizes(field(doc, "w_sizes", ""), "/w_sizes");
  if (s.w_sizes.size() != s.alphabets.size()) throw SchemaError("/w_sizes", "need one message size per terminal");
  if (s.letters() != s.source.size())
    throw SchemaError("/source", "length must equal the product of the alphabet sizes");
  if (const Json* w = optional_field(doc, "weights")) {
    f.weights = read_weights(*w, "/weights");
    if (f.weights.size() != s.m()) throw SchemaError("/weights", "need one weight per terminal");
  } else {
    f.weights.assign(s.m(), 1.0);
  }
  const Json* bin = optional_field(doc, "binning");
  const Json* enc = optional_field(doc, "encoder");
  if (bin && enc) throw SchemaError("/binning", "give either a binning recipe or explicit encoder/decoders");
  if (bin) {
    BinningRecipe r;
    if (const Json* v = optional_field(*bin, "seed")) r.seed = read_count(*v, "/binning/seed", 0);
    if (const Json* v = optional_field(*bin, "eta")) r.eta = read_number(*v, "/binning/eta");
    if (const Json* v = optional_field(*bin, "perturb_seed")) r.perturb_seed = read_count(*v, "/binning/perturb_seed", 0);
    if (!(r.eta >= 0.0 && r.eta <= 1.0)) throw SchemaError("/binning/eta", "must lie in [0,1]");
    s = random_binning_scheme(s.source, s.alphabets, s.n, s.k_size, s.w_sizes, r.seed);
    if (r.eta > 0.0) s = perturbed_scheme(s, r.eta, r.perturb_seed);
    f.binning = r;
    return f;
  }
  if (!enc) throw SchemaError("/encoder", "missing (or give a binning recipe)");
  s.encoder = read_stochastic(*enc, "/encoder", warnings);
  const Json& decs = field(doc, "decoders", "");
  if (!decs.is_array() || decs.size() != s.m()) throw SchemaError("/decoders", "need one decoder per terminal");
  for (std::size_t j = 0; j < decs.size(); ++j) s.decoders.push_back(read_stochastic(decs[j], child("/decoders", j), warnings));
  try {
    s.validate();
  } catch (const ResourceCapError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError("", e.what());
  }
  return f;
}

inline void write_cr(Json& doc, const CrSchemeFile& f) {
  const auto& s = f.scheme;
  doc["n"] = s.n;
  doc["source"] = write_vector(s.source.vec());
  doc["alphabets"] = s.alphabets;
  doc["k_size"] = s.k_size;
  doc["w_sizes"] = s.w_sizes;
  doc["weights"] = write_vector(f.weights);
  if (f.binning) {
    doc["binning"] = {{"seed", f.binning->seed}, {"eta", f.binning->eta}, {"perturb_seed", f.binning->perturb_seed}};
    return;
  }
  doc["encoder"] = write_matrix(s.encoder);
  doc["decoders"] = Json::array();
  for (const auto& d : s.decoders) doc["decoders"].push_back(write_matrix(d));
}

// --- bounds-query -----------------------------------------------------------

inline SchemeSizes read_scheme_sizes(const Json& q, const std::string& path) {
  SchemeSizes s;
  s.k_size = read_count(field(q, "k_size", path), child(path, "k_size"));
  const Json& w = field(q, "w_sizes", path);
  if (!w.is_array() || w.empty()) throw SchemaError(child(path, "w_sizes"), "expected a nonempty array");
  for (std::size_t i = 0; i < w.size(); ++i) s.w_sizes.push_back(read_count(w[i], child(child(path, "w_sizes"), i)));
  return s;
}

inline BoundQuery read_query(const Json& q, const std::string& path) {
  BoundQuery b;
  const Json& type = field(q, "bound", path);
  if (!type.is_string()) throw SchemaError(child(path, "bound"), "expected a string");
  const auto t = type.get<std::string>();
  auto num = [&](const char* key) { return read_number(field(q, key, path), child(path, key)); };
  if (const Json* l = optional_field(q, "label")) {
    if (!l->is_string()) throw SchemaError(child(path, "label"), "expected a string");
    b.label = l->get<std::string>();
  }
  if (const Json* a = optional_field(q, "actual")) b.actual = read_number(*a, child(path, "actual"));
  if (t == "omni") {
    OmniQuery o{read_scheme_sizes(q, path), read_weights(field(q, "weights", path), child(path, "weights")),
                num("d"), num("delta")};
    if (o.weights.size() != o.sizes.w_sizes.size())
      throw SchemaError(child(path, "weights"), "need one weight per message");
    b.query = std::move(o);
  } else if (t == "one-comm") {
    OneCommQuery o;
    o.sizes = read_scheme_sizes(q, path);
    o.params = {num("delta"), num("delta1"), num("delta3"), num("delta4"), num("eps"), num("eps_prime"), num("c"),
                num("d")};
    b.query = std::move(o);
  } else if (t == "tv-renyi") {
    b.query = TvRenyiQuery{read_count(field(q, "M", path), child(path, "M")), num("alpha"), num("renyi")};
  } else if (t == "region") {
    RegionQuery o;
    o.point.R = num("R");
    o.point.Rj = read_vector(field(q, "Rj", path), child(path, "Rj"));
    o.dstar = num("dstar");
    o.weights = read_weights(field(q, "weights", path), child(path, "weights"));
    if (o.weights.size() != o.point.Rj.size()) throw SchemaError(child(path, "weights"), "need one weight per R_j");
    b.query = std::move(o);
  } else {
    throw SchemaError(child(path, "bound"), "unknown bound \"" + t + "\" (omni, one-comm, tv-renyi, region)");
  }
  return b;
}

inline Json write_query(const BoundQuery& b) {
  Json q = Json::object();
  if (!b.label.empty()) q["label"] = b.label;
  auto sizes = [&q](const SchemeSizes& s) {
    q["k_size"] = s.k_size;
    q["w_sizes"] = s.w_sizes;
  };
  if (const auto* o = std::get_if<OmniQuery>(&b.query)) {
    q["bound"] = "omni";
    sizes(o->sizes);
    q["weights"] = write_vector(o->weights);
    q["d"] = write_number(o->d);
    q["delta"] = write_number(o->delta);
  } else if (const auto* c = std::get_if<OneCommQuery>(&b.query)) {
    q["bound"] = "one-comm";
    sizes(c->sizes);
    const auto& p = c->params;
    q["delta"] = p.delta;
    q["delta1"] = p.delta1;
    q["delta3"] = p.delta3;
    q["delta4"] = p.delta4;
    q["eps"] = p.eps;
    q["eps_prime"] = p.eps_prime;
    q["c"] = p.c;
    q["d"] = write_number(p.d);
  } else if (const auto* r = std::get_if<TvRenyiQuery>(&b.query)) {
    q["bound"] = "tv-renyi";
    q["M"] = r->m;
    q["alpha"] = r->alpha;
    q["renyi"] = write_number(r->renyi);
  } else {
    const auto& g = std::get<RegionQuery>(b.query);
    q["bound"] = "region";
    q["R"] = g.point.R;
    q["Rj"] = write_vector(g.point.Rj);
    q["dstar"] = g.dstar;
    q["weights"] = write_vector(g.weights);
  }
  if (b.actual) q["actual"] = write_number(*b.actual);
  return q;
}

}  // namespace detail

/// Parses a document already read into JSON. Throws SchemaError.
inline InstanceFile parse_instance(const Json& doc) {
  if (!doc.is_object()) throw SchemaError("", "top level must be an object");
  const Json& kind = detail::field(doc, "kind", "");
  if (!kind.is_string()) throw SchemaError("/kind", "expected a string");
  InstanceFile f;
  f.kind = kind.get<std::string>();
  if (const Json* meta = detail::optional_field(doc, "metadata")) {
    if (!meta->is_object()) throw SchemaError("/metadata", "expected an object");
    f.metadata = *meta;
  }
  try {
    if (f.kind == "discrete-gbll") {
      f.payload = detail::read_gbll(doc, f.warnings);
    } else if (f.kind == "gaussian") {
      f.payload = detail::read_gaussian(doc);
    } else if (f.kind == "cr-scheme") {
      f.payload = detail::read_cr(doc, f.warnings);
    } else if (f.kind == "bounds-query") {
      const Json& qs = detail::field(doc, "queries", "");
      if (!qs.is_array()) throw SchemaError("/queries", "expected an array");
      BoundsQueryFile b;
      for (std::size_t i = 0; i < qs.size(); ++i) b.queries.push_back(detail::read_query(qs[i], detail::child("/queries", i)));
      f.payload = std::move(b);
    } else {
      throw SchemaError("/kind", "unknown kind \"" + f.kind + "\" (discrete-gbll, gaussian, cr-scheme, bounds-query)");
    }
  } catch (const Json::exception& e) {
    throw SchemaError("", e.what());
  }
  return f;
}

inline InstanceFile parse_instance_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    // message carries "line L, column C"
    throw SchemaError("", e.what());
  }
  return parse_instance(doc);
}

inline InstanceFile load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance_text(ss.str());
}

inline Json to_json(const InstanceFile& f) {
  Json doc = Json::object();
  doc["kind"] = f.kind;
  if (!f.metadata.empty()) doc["metadata"] = f.metadata;
  std::visit(
      [&doc](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DiscreteGbllFile>) {
          detail::write_gbll(doc, p);
        } else if constexpr (std::is_same_v<T, GaussianFile>) {
          detail::write_gaussian(doc, p);
        } else if constexpr (std::is_same_v<T, CrSchemeFile>) {
          detail::write_cr(doc, p);
        } else {
          doc["queries"] = Json::array();
          for (const auto& q : p.queries) doc["queries"].push_back(detail::write_query(q));
        }
      },
      f.payload);
  return doc;
}

// ----------------------------------------------------------------------------
// semantic equality (what a round trip must preserve)

namespace detail {

inline bool same(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

inline bool same(const GaussianInstance& a, const GaussianInstance& b) {
  if (!same(a.sigma, b.sigma) || a.weights != b.weights || a.m() != b.m()) return false;
  for (std::size_t j = 0; j < a.m(); ++j)
    if (!same(a.maps[j], b.maps[j]) || !same(a.noise[j], b.noise[j])) return false;
  return true;
}

inline bool same(const CrScheme& a, const CrScheme& b) {
  if (a.n != b.n || !(a.source == b.source) || a.alphabets != b.alphabets || a.k_size != b.k_size ||
      a.w_sizes != b.w_sizes || !same(a.encoder, b.encoder) || a.decoders.size() != b.decoders.size())
    return false;
  for (std::size_t j = 0; j < a.decoders.size(); ++j)
    if (!same(a.decoders[j], b.decoders[j])) return false;
  return true;
}

inline bool same(const SchemeSizes& a, const SchemeSizes& b) { return a.k_size == b.k_size && a.w_sizes == b.w_sizes; }

inline bool same(const BoundQuery& a, const BoundQuery& b) {
  if (a.label != b.label || a.actual != b.actual || a.query.index() != b.query.index()) return false;
  if (const auto* x = std::get_if<OmniQuery>(&a.query)) {
    const auto& y = std::get<OmniQuery>(b.query);
    return same(x->sizes, y.sizes) && x->weights == y.weights && x->d == y.d && x->delta == y.delta;
  }
  if (const auto* x = std::get_if<OneCommQuery>(&a.query)) {
    const auto& y = std::get<OneCommQuery>(b.query);
    const auto &p = x->params, &q = y.params;
    return same(x->sizes, y.sizes) && p.delta == q.delta && p.delta1 == q.delta1 && p.delta3 == q.delta3 &&
           p.delta4 == q.delta4 && p.eps == q.eps && p.eps_prime == q.eps_prime && p.c == q.c && p.d == q.d;
  }
  if (const auto* x = std::get_if<TvRenyiQuery>(&a.query)) {
    const auto& y = std::get<TvRenyiQuery>(b.query);
    return x->m == y.m && x->alpha == y.alpha && x->renyi == y.renyi;
  }
  const auto& x = std::get<RegionQuery>(a.query);
  const auto& y = std::get<RegionQuery>(b.query);
  return x.point.R == y.point.R && x.point.Rj == y.point.Rj && x.dstar == y.dstar && x.weights == y.weights;
}

}  // namespace detail

inline bool semantically_equal(const InstanceFile& a, const InstanceFile& b) {
  if (a.kind != b.kind || a.metadata != b.metadata || a.payload.index() != b.payload.index()) return false;
  if (const auto* x = std::get_if<DiscreteGbllFile>(&a.payload)) {
    const auto& y = std::get<DiscreteGbllFile>(b.payload);
    return x->instance == y.instance && x->mu_normalized == y.mu_normalized && x->labels == y.labels;
  }
  if (const auto* x = std::get_if<GaussianFile>(&a.payload))
    return detail::same(x->instance, std::get<GaussianFile>(b.payload).instance);
  if (const auto* x = std::get_if<CrSchemeFile>(&a.payload)) {
    const auto& y = std::get<CrSchemeFile>(b.payload);
    return detail::same(x->scheme, y.scheme) && x->weights == y.weights && x->binning == y.binning;
  }
  const auto& x = std::get<BoundsQueryFile>(a.payload);
  const auto& y = std::get<BoundsQueryFile>(b.payload);
  if (x.queries.size() != y.queries.size()) return false;
  for (std::size_t i = 0; i < x.queries.size(); ++i)
    if (!detail::same(x.queries[i], y.queries[i])) return false;
  return true;
}

}  // namespace smoothbl::io
