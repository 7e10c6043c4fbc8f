#include "hamlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <utility>
#include <vector>

#include "hamlab/families.hpp"
#include "hamlab/field.hpp"
#include "hamlab/flow.hpp"
#include "hamlab/hofer.hpp"
#include "hamlab/homology.hpp"
#include "hamlab/orbits.hpp"
#include "hamlab/phase.hpp"
#include "hamlab/profile.hpp"
#include "hamlab/propagation.hpp"

namespace hamlab {

ConfigError::ConfigError(std::string path, const std::string& message)
    : std::runtime_error(path.empty() ? message : path + ": " + message),
      path_(std::move(path)) {}

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path, message);
}

std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

std::string elem_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

// printf-style formatting for verdicts and CSV cells.
std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

// Full-precision decimal for CSV bodies; round-trips the double exactly.
std::string g17(double x) { return strf("%.17g", x); }

// ---------------------------------------------------------------------------
// typed field access with path-carrying errors

const json* find_key(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) fail(join_path(path, item.key()), "unknown field");
  }
}

const json& obj_field(const json& obj, const std::string& path, const char* key) {
  const json* v = find_key(obj, key);
  if (!v) fail(join_path(path, key), "missing required field");
  if (!v->is_object()) fail(join_path(path, key), "expected an object");
  return *v;
}

std::string str_field(const json& obj, const std::string& path, const char* key) {
  const json* v = find_key(obj, key);
  if (!v) fail(join_path(path, key), "missing required field");
  if (!v->is_string()) fail(join_path(path, key), "expected a string");
  return v->get<std::string>();
}

double num_field(const json& obj, const std::string& path, const char* key,
                 std::optional<double> def = std::nullopt) {
  const json* v = find_key(obj, key);
  if (!v) {
    if (def) return *def;
    fail(join_path(path, key), "missing required field");
  }
  if (!v->is_number()) fail(join_path(path, key), "expected a number");
  double x = v->get<double>();
  if (!std::isfinite(x)) fail(join_path(path, key), "must be finite");
  return x;
}

long long int_field(const json& obj, const std::string& path, const char* key,
                    std::optional<long long> def = std::nullopt) {
  const json* v = find_key(obj, key);
  if (!v) {
    if (def) return *def;
    fail(join_path(path, key), "missing required field");
  }
  if (!v->is_number_integer()) fail(join_path(path, key), "expected an integer");
  return v->get<long long>();
}

long long int_field_range(const json& obj, const std::string& path,
                          const char* key, long long lo, long long hi,
                          std::optional<long long> def = std::nullopt) {
  long long v = int_field(obj, path, key, def);
  if (v < lo || v > hi)
    fail(join_path(path, key),
         strf("must be in [%lld, %lld]", lo, hi));
  return v;
}

bool bool_field(const json& obj, const std::string& path, const char* key,
                bool def) {
  const json* v = find_key(obj, key);
  if (!v) return def;
  if (!v->is_boolean()) fail(join_path(path, key), "expected a boolean");
  return v->get<bool>();
}

std::vector<long long> int_array_field(const json& obj, const std::string& path,
                                       const char* key, std::size_t max_len) {
  const json* v = find_key(obj, key);
  if (!v) fail(join_path(path, key), "missing required field");
  std::string p = join_path(path, key);
  if (!v->is_array() || v->empty()) fail(p, "expected a nonempty array");
  if (v->size() > max_len)
    fail(p, strf("too many entries (max %zu)", max_len));
  std::vector<long long> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    const json& e = (*v)[i];
    if (!e.is_number_integer()) fail(elem_path(p, i), "expected an integer");
    out.push_back(e.get<long long>());
  }
  return out;
}

std::vector<double> num_array_field(const json& obj, const std::string& path,
                                    const char* key, std::size_t max_len) {
  const json* v = find_key(obj, key);
  if (!v) fail(join_path(path, key), "missing required field");
  std::string p = join_path(path, key);
  if (!v->is_array() || v->empty()) fail(p, "expected a nonempty array");
  if (v->size() > max_len)
    fail(p, strf("too many entries (max %zu)", max_len));
  std::vector<double> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    const json& e = (*v)[i];
    if (!e.is_number()) fail(elem_path(p, i), "expected a number");
    double x = e.get<double>();
    if (!std::isfinite(x)) fail(elem_path(p, i), "must be finite");
    out.push_back(x);
  }
  return out;
}

// ---------------------------------------------------------------------------
// block parsers (operate on already-normalized json)

ProfileFunction parse_profile(const json& p) {
  std::string type = p.at("type").get<std::string>();
  if (type == "cut-parabola")
    return cut_parabola(p.at("height").get<double>(),
                        p.at("cut_start").get<double>(),
                        p.at("cut_end").get<double>());
  if (type == "sharpness")
    return sharpness_profile(p.at("height").get<double>(),
                             p.at("delta").get<double>());
  if (type == "cosine-squared") {
    // Hermite knot fit of cos^2(pi r) on [0, 1/2). The analytic function has
    // curvature +2 pi^2 at r = 1/2, so the final piece lands on an exact zero
    // state instead; downstream consumers measure slopes from the fitted
    // profile itself, which keeps their certificates internally consistent.
    int pieces = static_cast<int>(p.at("pieces").get<long long>());
    std::vector<Knot> knots;
    for (int j = 0; j < pieces; ++j) {
      double r = 0.5 * j / pieces;
      double c = std::cos(kPi * r);
      knots.push_back({r, c * c, -kPi * std::sin(2.0 * kPi * r),
                       -2.0 * kPi * kPi * std::cos(2.0 * kPi * r)});
    }
    knots.push_back({0.5, 0.0, 0.0, 0.0});
    return ProfileFunction::from_knots(std::move(knots));
  }
  // normalize_profile restricts to the cases above plus raw knot text
  return ProfileFunction::deserialize(p.at("text").get<std::string>());
}

json normalize_profile(const json& p, const std::string& path) {
  if (!p.is_object()) fail(path, "expected an object");
  std::string type = str_field(p, path, "type");
  json out;
  out["type"] = type;
  if (type == "cut-parabola") {
    check_keys(p, path, {"type", "height", "cut_start", "cut_end"});
    double h = num_field(p, path, "height", 2.0);
    if (!(h > 0)) fail(join_path(path, "height"), "must be > 0");
    double cs = num_field(p, path, "cut_start", 0.9);
    double ce = num_field(p, path, "cut_end", 0.97);
    if (!(cs > 0 && cs < 1)) fail(join_path(path, "cut_start"), "must be in (0, 1)");
    if (!(ce > cs && ce < 1))
      fail(join_path(path, "cut_end"), "must be in (cut_start, 1)");
    out["height"] = h;
    out["cut_start"] = cs;
    out["cut_end"] = ce;
  } else if (type == "sharpness") {
    check_keys(p, path, {"type", "height", "delta"});
    double h = num_field(p, path, "height", 1.0);
    if (!(h > 0)) fail(join_path(path, "height"), "must be > 0");
    double d = num_field(p, path, "delta", 0.1);
    if (!(d > 0 && d < 0.5)) fail(join_path(path, "delta"), "must be in (0, 0.5)");
    out["height"] = h;
    out["delta"] = d;
  } else if (type == "cosine-squared") {
    check_keys(p, path, {"type", "pieces"});
    out["pieces"] = int_field_range(p, path, "pieces", 8, 4096, 32);
  } else if (type == "knots") {
    check_keys(p, path, {"type", "text"});
    out["text"] = str_field(p, path, "text");
  } else {
    fail(join_path(path, "type"),
         "unknown profile type \"" + type +
             "\" (expected cut-parabola, sharpness, cosine-squared or knots)");
  }
  try {
    parse_profile(out);
  } catch (const std::exception& e) {
    fail(path, std::string("profile rejected: ") + e.what());
  }
  return out;
}

HamiltonianField parse_field(const json& f);

json normalize_field(const json& f, const std::string& path, int depth = 0) {
  if (depth > 6) fail(path, "field nesting too deep");
  if (!f.is_object()) fail(path, "expected an object");
  std::string type = str_field(f, path, "type");
  json out;
  out["type"] = type;
  if (type == "zero") {
    check_keys(f, path, {"type", "n"});
    out["n"] = int_field_range(f, path, "n", 1, 8);
  } else if (type == "profile") {
    check_keys(f, path, {"type", "n", "profile"});
    out["n"] = int_field_range(f, path, "n", 1, 8);
    out["profile"] = normalize_profile(obj_field(f, path, "profile"),
                                       join_path(path, "profile"));
  } else if (type == "cosine-bump") {
    check_keys(f, path, {"type", "n", "wave", "amp", "phase", "time_wobble"});
    long long n = int_field_range(f, path, "n", 1, 8);
    auto wave = int_array_field(f, path, "wave", 8);
    if (wave.size() != static_cast<std::size_t>(n))
      fail(join_path(path, "wave"), "length must equal n");
    out["n"] = n;
    out["wave"] = wave;
    out["amp"] = num_field(f, path, "amp");
    out["phase"] = num_field(f, path, "phase", 0.0);
    out["time_wobble"] = num_field(f, path, "time_wobble", 0.0);
  } else if (type == "sum") {
    check_keys(f, path, {"type", "terms"});
    const json* terms = find_key(f, "terms");
    std::string tp = join_path(path, "terms");
    if (!terms || !terms->is_array() || terms->empty())
      fail(tp, "expected a nonempty array of field blocks");
    if (terms->size() > 16) fail(tp, "too many terms (max 16)");
    json nt = json::array();
    for (std::size_t i = 0; i < terms->size(); ++i)
      nt.push_back(normalize_field((*terms)[i], elem_path(tp, i), depth + 1));
    out["terms"] = std::move(nt);
  } else if (type == "iterate") {
    check_keys(f, path, {"type", "base", "k"});
    out["base"] = normalize_field(obj_field(f, path, "base"),
                                  join_path(path, "base"), depth + 1);
    out["k"] = int_field_range(f, path, "k", 1, 10000);
  } else {
    fail(join_path(path, "type"),
         "unknown field type \"" + type +
             "\" (expected zero, profile, cosine-bump, sum or iterate)");
  }
  try {
    parse_field(out);
  } catch (const std::exception& e) {
    fail(path, std::string("field rejected: ") + e.what());
  }
  return out;
}

HamiltonianField parse_field(const json& f) {
  std::string type = f.at("type").get<std::string>();
  if (type == "zero") return zero_field(static_cast<int>(f.at("n").get<long long>()));
  if (type == "profile")
    return make_momentum_hamiltonian(static_cast<int>(f.at("n").get<long long>()),
                                     parse_profile(f.at("profile")));
  if (type == "cosine-bump") {
    std::vector<std::int64_t> wave;
    for (const auto& w : f.at("wave")) wave.push_back(w.get<std::int64_t>());
    return cosine_bump(static_cast<int>(f.at("n").get<long long>()),
                       std::move(wave), f.at("amp").get<double>(),
                       f.at("phase").get<double>(),
                       f.at("time_wobble").get<double>());
  }
  if (type == "sum") {
    const json& terms = f.at("terms");
    HamiltonianField acc = parse_field(terms[0]);
    for (std::size_t i = 1; i < terms.size(); ++i)
      acc = sum_field(acc, parse_field(terms[i]));
    return acc;
  }
  return iterate_hamiltonian(parse_field(f.at("base")),
                             static_cast<int>(f.at("k").get<long long>()));
}

int field_dim(const json& f) { return parse_field(f).dim(); }

// u(s) = s + beta (9/16 - s^2) inside |s| < 3/4, identity outside; increasing
// for beta <= 0.6 since u' = 1 - 2 beta s >= 1 - 1.5 beta > 0 there.
std::function<double(double)> damping_map(double beta) {
  return [beta](double s) {
    if (std::fabs(s) >= 0.75) return s;
    return s + beta * (0.5625 - s * s);
  };
}

SequentialSystem parse_system(const json& s, const IntegrateOptions& integ) {
  std::string type = s.at("type").get<std::string>();
  if (type == "constant")
    return SequentialSystem::constant(parse_field(s.at("field")), integ);
  if (type == "perturbed") {
    HamiltonianField base = parse_field(s.at("field"));
    PerturbationProvider prov;
    prov.dim = base.dim();
    prov.bound = s.at("bound").get<double>();
    prov.seed = s.at("perturbation_seed").get<std::uint64_t>();
    return SequentialSystem::perturbed(std::move(base), prov, integ);
  }
  if (type == "skew-product") {
    SkewProductSystem sk;
    for (const auto& a : s.at("alpha")) sk.alpha.push_back(a.get<double>());
    for (const auto& y : s.at("y0")) sk.y0.push_back(y.get<double>());
    sk.base_dim = static_cast<int>(sk.alpha.size());
    HamiltonianField base = parse_field(s.at("base_field"));
    if (s.contains("modulation")) {
      const json& m = s.at("modulation");
      std::vector<std::int64_t> wave;
      for (const auto& w : m.at("wave")) wave.push_back(w.get<std::int64_t>());
      double amp = m.at("amp").get<double>();
      int n = base.dim();
      sk.field_of = [base, wave, amp, n](const std::vector<double>& y) {
        return sum_field(base,
                         cosine_bump(n, wave, amp * std::cos(2.0 * kPi * y[0]),
                                     0.0));
      };
    } else {
      sk.field_of = [base](const std::vector<double>&) { return base; };
    }
    return SequentialSystem::skew_product(std::move(sk), integ);
  }
  // damped
  DampedSystem d(parse_profile(s.at("profile")),
                 damping_map(s.at("beta").get<double>()));
  return build_damped_system(std::move(d));
}

int system_dim(const json& s) {
  std::string type = s.at("type").get<std::string>();
  if (type == "constant" || type == "perturbed") return field_dim(s.at("field"));
  if (type == "skew-product") return field_dim(s.at("base_field"));
  return 1;
}

json normalize_system(const json& s, const std::string& path,
                      const IntegrateOptions& integ) {
  if (!s.is_object()) fail(path, "expected an object");
  std::string type = str_field(s, path, "type");
  json out;
  out["type"] = type;
  if (type == "constant") {
    check_keys(s, path, {"type", "field"});
    out["field"] = normalize_field(obj_field(s, path, "field"),
                                   join_path(path, "field"));
  } else if (type == "perturbed") {
    check_keys(s, path, {"type", "field", "bound", "perturbation_seed"});
    out["field"] = normalize_field(obj_field(s, path, "field"),
                                   join_path(path, "field"));
    double b = num_field(s, path, "bound", 0.1);
    if (!(b > 0)) fail(join_path(path, "bound"), "must be > 0");
    out["bound"] = b;
    const json* ps = find_key(s, "perturbation_seed");
    std::uint64_t seed = 1;
    if (ps) {
      if (!ps->is_number_unsigned() &&
          !(ps->is_number_integer() && ps->get<long long>() >= 0))
        fail(join_path(path, "perturbation_seed"),
             "expected a nonnegative integer");
      seed = ps->get<std::uint64_t>();
    }
    out["perturbation_seed"] = seed;
  } else if (type == "skew-product") {
    check_keys(s, path, {"type", "alpha", "y0", "base_field", "modulation"});
    auto alpha = num_array_field(s, path, "alpha", 4);
    out["alpha"] = alpha;
    if (find_key(s, "y0")) {
      auto y0 = num_array_field(s, path, "y0", 4);
      if (y0.size() != alpha.size())
        fail(join_path(path, "y0"), "length must match alpha");
      out["y0"] = y0;
    } else {
      out["y0"] = std::vector<double>(alpha.size(), 0.0);
    }
    out["base_field"] = normalize_field(obj_field(s, path, "base_field"),
                                        join_path(path, "base_field"));
    if (find_key(s, "modulation")) {
      const json& m = obj_field(s, path, "modulation");
      std::string mp = join_path(path, "modulation");
      check_keys(m, mp, {"wave", "amp"});
      auto wave = int_array_field(m, mp, "wave", 8);
      int n = field_dim(out["base_field"]);
      if (wave.size() != static_cast<std::size_t>(n))
        fail(join_path(mp, "wave"), "length must equal base field dimension");
      json nm;
      nm["wave"] = wave;
      nm["amp"] = num_field(m, mp, "amp");
      out["modulation"] = std::move(nm);
    }
  } else if (type == "damped") {
    check_keys(s, path, {"type", "profile", "beta"});
    out["profile"] = normalize_profile(obj_field(s, path, "profile"),
                                       join_path(path, "profile"));
    double beta = num_field(s, path, "beta", 0.28);
    if (!(beta > 0 && beta <= 0.6))
      fail(join_path(path, "beta"), "must be in (0, 0.6]");
    out["beta"] = beta;
  } else {
    fail(join_path(path, "type"),
         "unknown system type \"" + type +
             "\" (expected constant, perturbed, skew-product or damped)");
  }
  try {
    parse_system(out, integ);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(path, std::string("system rejected: ") + e.what());
  }
  return out;
}

HomotopyClass parse_class(const json& arr) {
  HomotopyClass e;
  for (const auto& v : arr) e.e.push_back(v.get<std::int64_t>());
  return e;
}

std::string format_class(const HomotopyClass& e) {
  std::string s = "(";
  for (std::size_t i = 0; i < e.e.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(e.e[i]);
  }
  return s + ")";
}

json normalize_class_field(const json& obj, const std::string& path,
                           const char* key, int dim) {
  auto v = int_array_field(obj, path, key, 8);
  if (v.size() != static_cast<std::size_t>(dim))
    fail(join_path(path, key), "length must match the system dimension");
  for (std::size_t i = 0; i < v.size(); ++i)
    if (std::llabs(v[i]) > 1000000)
      fail(elem_path(join_path(path, key), i), "entry out of range");
  return json(v);
}

// Seed grids for the propagation experiments: either a momentum line through
// q = 0 along the first axis or the shared fundamental-domain tensor grid.
json normalize_grid(const json* g, const std::string& path, json def) {
  if (!g) return def;
  if (!g->is_object()) fail(path, "expected an object");
  std::string type = str_field(*g, path, "type");
  json out;
  out["type"] = type;
  if (type == "momentum-line") {
    check_keys(*g, path, {"type", "points", "momentum_cap"});
    out["points"] = int_field_range(*g, path, "points", 2, 100000, 200);
    double cap = num_field(*g, path, "momentum_cap", 0.999);
    if (!(cap > 0 && cap < 1))
      fail(join_path(path, "momentum_cap"), "must be in (0, 1)");
    out["momentum_cap"] = cap;
  } else if (type == "fundamental") {
    check_keys(*g, path, {"type", "resolution", "momentum_cap"});
    out["resolution"] = int_field_range(*g, path, "resolution", 1, 64, 8);
    double cap = num_field(*g, path, "momentum_cap", 0.97);
    if (!(cap > 0 && cap < 1))
      fail(join_path(path, "momentum_cap"), "must be in (0, 1)");
    out["momentum_cap"] = cap;
  } else {
    fail(join_path(path, "type"),
         "unknown grid type \"" + type +
             "\" (expected momentum-line or fundamental)");
  }
  return out;
}

json default_momentum_line(int points, double cap) {
  json g;
  g["type"] = "momentum-line";
  g["points"] = points;
  g["momentum_cap"] = cap;
  return g;
}

std::vector<LiftedPoint> parse_grid(const json& g, int n) {
  std::vector<LiftedPoint> pts;
  if (g.at("type").get<std::string>() == "momentum-line") {
    int count = static_cast<int>(g.at("points").get<long long>());
    double cap = g.at("momentum_cap").get<double>();
    for (int i = 0; i < count; ++i) {
      Vec p(n, 0.0);
      p[0] = -cap + 2.0 * cap * i / (count - 1);
      pts.push_back(LiftedPoint{Vec(n, 0.0), std::move(p)});
    }
    return pts;
  }
  return sample_fundamental_domain(
      n, static_cast<int>(g.at("resolution").get<long long>()),
      g.at("momentum_cap").get<double>());
}

json normalize_case(const json* c, const std::string& path) {
  json out;
  if (!c) {
    out["circles"] = false;
    out["n"] = 2;
    return out;
  }
  if (!c->is_object()) fail(path, "expected an object");
  check_keys(*c, path, {"circles", "n"});
  out["circles"] = bool_field(*c, path, "circles", false);
  out["n"] = int_field_range(*c, path, "n", 1, 8, 2);
  return out;
}

OrbitCase parse_case(const json& c) {
  OrbitCase oc;
  oc.circles = c.at("circles").get<bool>();
  oc.n = static_cast<int>(c.at("n").get<long long>());
  return oc;
}

// ---------------------------------------------------------------------------
// deterministic worker pool: items write their own result slots, so the
// outcome is the same for every thread count

void parallel_for(int count, int threads,
                  const std::function<void(int)>& item) {
  int workers = std::min(std::max(threads, 1), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) item(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  auto body = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        item(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// run context

struct RunContext {
  json cfg;
  std::uint64_t seed = 0;
  IntegrateOptions integ;
  fs::path out_dir;
  int threads = 1;

  json results = json::object();
  std::vector<std::string> files;
  std::string verdict;
  int exit_code = 0;

  const json& params() const { return cfg.at("params"); }

  void emit(const std::string& name, const std::string& body) {
    std::ofstream os(out_dir / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + (out_dir / name).string());
    os << body;
    if (!os) throw std::runtime_error("write failed for " + name);
    files.push_back(name);
  }
};

ShootOptions shoot_options(const RunContext& ctx) {
  ShootOptions so;
  so.integ = ctx.integ;
  const json& P = ctx.params();
  if (P.contains("residual_tol")) so.residual_tol = P.at("residual_tol").get<double>();
  if (P.contains("max_newton_iters"))
    so.max_iters = static_cast<int>(P.at("max_newton_iters").get<long long>());
  return so;
}

std::string csv_point_header(int n) {
  std::string h;
  for (int i = 0; i < n; ++i) h += ",q" + std::to_string(i);
  for (int i = 0; i < n; ++i) h += ",p" + std::to_string(i);
  return h;
}

std::string csv_point_cells(const LiftedPoint& x) {
  std::string s;
  for (double v : x.q) s += "," + g17(v);
  for (double v : x.p) s += "," + g17(v);
  return s;
}

double momentum_radius(const LiftedPoint& x) {
  double s = 0;
  for (double v : x.p) s += v * v;
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// orbit

void run_orbit(RunContext& ctx) {
  const json& P = ctx.params();
  HamiltonianField H = parse_field(P.at("field"));
  HomotopyClass e = parse_class(P.at("e"));
  ShootOptions so = shoot_options(ctx);
  int radial = static_cast<int>(P.at("radial_seeds").get<long long>());

  auto seeds = default_orbit_seeds(H, e, radial);
  std::vector<char> converged(seeds.size(), 0);
  std::vector<PeriodicOrbit> hits(seeds.size());
  parallel_for(static_cast<int>(seeds.size()), ctx.threads, [&](int i) {
    auto r = find_orbit(H, e, seeds[i], so);
    if (r.status == ShootStatus::converged) {
      converged[i] = 1;
      hits[i] = std::move(r.orbit);
    }
  });

  std::vector<PeriodicOrbit> found;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (!converged[i]) continue;
    bool dup = false;
    for (const auto& o : found) {
      if (std::fabs(o.action - hits[i].action) < 1e-6 &&
          std::fabs(momentum_radius(o.x0) - momentum_radius(hits[i].x0)) < 1e-6) {
        dup = true;
        break;
      }
    }
    if (!dup) found.push_back(std::move(hits[i]));
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
                     return a.action < b.action;
                   });

  std::string cls = format_class(e);
  if (H.profile()) {
    auto rows = enumerate_profile_orbits(*H.profile(), e.norm());
    std::string csv = "radius,sign,action,nondegenerate,manifold_dim\n";
    for (const auto& d : rows)
      csv += g17(d.radius) + "," + std::to_string(d.sign) + "," + g17(d.action) +
             "," + (d.nondegenerate ? "1" : "0") + "," +
             std::to_string(H.dim()) + "\n";
    ctx.emit("profile_orbits.csv", csv);
  }

  json actions = json::array();
  for (const auto& o : found) actions.push_back(o.action);
  ctx.results["seeds_tried"] = seeds.size();
  ctx.results["orbit_count"] = found.size();
  ctx.results["actions"] = std::move(actions);
  ctx.results["found"] = !found.empty();

  if (found.empty()) {
    ctx.verdict = strf("no periodic orbit found in class %s from %zu seeds",
                       cls.c_str(), seeds.size());
    ctx.exit_code = 2;
    return;
  }

  std::string csv = "index,action,radius,residual,kernel_dim" +
                    csv_point_header(H.dim()) + "\n";
  for (std::size_t i = 0; i < found.size(); ++i) {
    const auto& o = found[i];
    csv += std::to_string(i) + "," + g17(o.action) + "," +
           g17(momentum_radius(o.x0)) + "," + g17(o.residual) + "," +
           std::to_string(o.kernel_dim) + csv_point_cells(o.x0) + "\n";
  }
  ctx.emit("orbits.csv", csv);

  const PeriodicOrbit& primary = found.back();
  {
    std::ostringstream os;
    write_trajectory_csv(os, primary.trajectory);
    ctx.emit("trajectory.csv", os.str());
  }
  ctx.results["action"] = primary.action;
  ctx.results["radius"] = momentum_radius(primary.x0);
  ctx.results["residual"] = primary.residual;
  ctx.results["kernel_dim"] = primary.kernel_dim;
  ctx.verdict =
      strf("orbit found in class %s: action %.10g, radius %.6g, residual %.3g",
           cls.c_str(), primary.action, momentum_radius(primary.x0),
           primary.residual);
}

// ---------------------------------------------------------------------------
// spectrum

void run_spectrum(RunContext& ctx) {
  const json& P = ctx.params();
  HamiltonianField H = parse_field(P.at("field"));
  HomotopyClass e = parse_class(P.at("e"));
  ShootOptions so = shoot_options(ctx);
  int radial = static_cast<int>(P.at("radial_seeds").get<long long>());

  auto res = action_spectrum(H, e, default_orbit_seeds(H, e, radial), so);

  std::string csv = "index,action\n";
  for (std::size_t i = 0; i < res.actions.size(); ++i)
    csv += std::to_string(i) + "," + g17(res.actions[i]) + "\n";
  ctx.emit("spectrum.csv", csv);

  ctx.results["actions"] = res.actions;
  ctx.results["converged_seeds"] = res.converged_seeds;
  ctx.results["skipped_seeds"] = res.skipped_seeds;

  std::string cls = format_class(e);
  if (res.actions.empty()) {
    ctx.verdict = strf("action spectrum in class %s empty (%d of %d seeds converged)",
                       cls.c_str(), res.converged_seeds,
                       res.converged_seeds + res.skipped_seeds);
    ctx.exit_code = 2;
    return;
  }
  ctx.verdict = strf("action spectrum in class %s: %zu values in [%.10g, %.10g]",
                     cls.c_str(), res.actions.size(), res.actions.front(),
                     res.actions.back());
}

// ---------------------------------------------------------------------------
// propagate

void run_propagate(RunContext& ctx) {
  const json& P = ctx.params();
  SequentialSystem sys = parse_system(P.at("system"), ctx.integ);
  int k = static_cast<int>(P.at("k").get<long long>());
  auto grid = parse_grid(P.at("grid"), sys.dim());

  auto res = propagation_speed(sys, k, grid);

  std::string csv = "step,radius,radius_over_k\n";
  for (int j = 0; j < k; ++j)
    csv += std::to_string(j + 1) + "," + g17(res.radius[j]) + "," +
           g17(res.radius_over_k[j]) + "\n";
  ctx.emit("propagation.csv", csv);

  ctx.results["k"] = k;
  ctx.results["grid_points"] = grid.size();
  ctx.results["speed_estimate"] = res.speed_estimate;
  ctx.results["final_radius"] = res.radius.back();
  ctx.results["final_radius_over_k"] = res.radius_over_k.back();
  ctx.results["grid_dispersion"] = res.grid_dispersion;
  ctx.verdict = strf(
      "propagation speed estimate %.6g after %d steps (ball radius %.6g, radius/k %.6g)",
      res.speed_estimate, k, res.radius.back(), res.radius_over_k.back());
}

// ---------------------------------------------------------------------------
// fixed-point

void run_fixed_point(RunContext& ctx) {
  const json& P = ctx.params();
  SequentialSystem sys = parse_system(P.at("system"), ctx.integ);
  int k = static_cast<int>(P.at("k").get<long long>());
  HomotopyClass v = parse_class(P.at("v"));

  FixedPointSearchOptions o;
  o.q_resolution = static_cast<int>(P.at("q_resolution").get<long long>());
  o.p_resolution = static_cast<int>(P.at("p_resolution").get<long long>());
  o.residual_tol = P.at("residual_tol").get<double>();
  o.max_seeds = static_cast<int>(P.at("max_seeds").get<long long>());
  o.shoot.integ = ctx.integ;

  auto rep = find_displacement_fixed_point(sys, k, v, o);

  ctx.results["hypothesis_met"] = rep.hypothesis_met;
  ctx.results["hypothesis_margin"] = rep.hypothesis_margin;
  ctx.results["found"] = rep.found;
  ctx.results["seeds_tried"] = rep.seeds_tried;
  ctx.results["newton_iters"] = rep.newton_iters;

  std::string cls = format_class(v);
  if (!rep.hypothesis_met) {
    ctx.verdict = strf(
        "displacement hypothesis unmet for v=%s at k=%d (margin %.4g)",
        cls.c_str(), k, rep.hypothesis_margin);
    ctx.exit_code = 2;
    return;
  }
  if (!rep.found) {
    ctx.verdict = strf("no fixed point with displacement %s found (%d seeds tried)",
                       cls.c_str(), rep.seeds_tried);
    ctx.exit_code = 2;
    return;
  }

  std::string csv = "index" + csv_point_header(sys.dim()) + "\n";
  for (std::size_t i = 0; i < rep.orbit.size(); ++i)
    csv += std::to_string(i) + csv_point_cells(rep.orbit[i]) + "\n";
  ctx.emit("chain.csv", csv);

  ctx.results["residual"] = rep.residual;
  ctx.results["x0_q"] = rep.x0.q;
  ctx.results["x0_p"] = rep.x0.p;
  ctx.verdict = strf(
      "fixed point with displacement %s over %d steps: residual %.3g (%d seeds, %d Newton iterations)",
      cls.c_str(), k, rep.residual, rep.seeds_tried, rep.newton_iters);
}

// ---------------------------------------------------------------------------
// rotation-set

void run_rotation_set(RunContext& ctx) {
  const json& P = ctx.params();
  SequentialSystem sys = parse_system(P.at("system"), ctx.integ);
  int k = static_cast<int>(P.at("k").get<long long>());

  RotationSetOptions o;
  o.phase_resolution = static_cast<int>(P.at("phase_resolution").get<long long>());
  o.base_resolution = static_cast<int>(P.at("base_resolution").get<long long>());
  o.momentum_cap = P.at("momentum_cap").get<double>();
  o.max_samples = static_cast<int>(P.at("max_samples").get<long long>());

  auto est = rotation_set_estimate(sys, k, o);

  {
    std::string csv = "index";
    for (int i = 0; i < sys.dim(); ++i) csv += ",v" + std::to_string(i);
    csv += "\n";
    for (std::size_t i = 0; i < est.vectors.size(); ++i) {
      csv += std::to_string(i);
      for (double c : est.vectors[i]) csv += "," + g17(c);
      csv += "\n";
    }
    ctx.emit("vectors.csv", csv);
  }
  {
    std::string csv = "index,x,y\n";
    for (std::size_t i = 0; i < est.hull.size(); ++i)
      csv += std::to_string(i) + "," + g17(est.hull[i][0]) + "," +
             g17(est.hull[i][1]) + "\n";
    ctx.emit("hull.csv", csv);
  }

  json hull = json::array();
  for (const auto& v : est.hull) hull.push_back({v[0], v[1]});
  ctx.results["samples"] = est.vectors.size();
  ctx.results["hull"] = std::move(hull);
  ctx.results["inscribed_radius"] = est.inscribed_radius;
  ctx.results["extremal_points"] = est.extremal_points.size();
  ctx.results["extremal_samples"] = est.extremal_samples.size();
  ctx.verdict = strf(
      "rotation set from %zu samples: %zu hull vertices, inscribed radius %.6g",
      est.vectors.size(), est.hull.size(), est.inscribed_radius);
}

// ---------------------------------------------------------------------------
// counterexample

void run_counterexample(RunContext& ctx) {
  const json& P = ctx.params();
  DampedSystem d(parse_profile(P.at("profile")),
                 damping_map(P.at("beta").get<double>()));
  SequentialSystem sys = build_damped_system(std::move(d));
  int k = static_cast<int>(P.at("k").get<long long>());
  auto grid = parse_grid(P.at("grid"), 1);

  auto rep = verify_damped_bound(sys, grid, k);

  // per-horizon displacement curve for the data file
  std::vector<std::vector<double>> disp(grid.size());
  parallel_for(static_cast<int>(grid.size()), ctx.threads, [&](int i) {
    Trajectory traj = evolve(sys, grid[i], k);
    std::vector<double> row(k, 0.0);
    double q0 = traj.states[0][0];
    for (int j = 1; j <= k; ++j)
      row[j - 1] = std::fabs(traj.states[j][0] - q0);
    disp[i] = std::move(row);
  });
  std::string csv = "step,max_displacement,bound\n";
  std::string bound_s = g17(rep.bound);
  double running = 0.0;
  for (int j = 0; j < k; ++j) {
    for (const auto& row : disp) running = std::max(running, row[j]);
    csv += std::to_string(j + 1) + "," + g17(running) + "," + bound_s + "\n";
  }
  ctx.emit("displacement.csv", csv);

  const DampedSystem* ds = sys.damped();
  ctx.results["gamma"] = ds->gamma;
  ctx.results["escape_steps"] = ds->escape_steps;
  ctx.results["bound"] = rep.bound;
  ctx.results["max_displacement"] = rep.max_displacement;
  ctx.results["holds"] = rep.holds;
  ctx.results["k"] = k;
  ctx.results["grid_points"] = grid.size();

  if (rep.holds) {
    ctx.verdict = strf(
        "bound holds: max displacement %.6g within (N+1) gamma = %.6g (N = %ld, gamma = %.6g) over %d steps",
        rep.max_displacement, rep.bound, ds->escape_steps, ds->gamma, k);
  } else {
    ctx.verdict = strf("bound violated: max displacement %.6g exceeds %.6g",
                       rep.max_displacement, rep.bound);
    ctx.exit_code = 2;
  }
}

// ---------------------------------------------------------------------------
// capacity

void run_capacity(RunContext& ctx) {
  const json& P = ctx.params();
  OrbitCase oc = parse_case(P.at("case"));
  OrbitClassKind ck = P.at("class").get<std::string>() == "zero"
                          ? OrbitClassKind::zero
                          : OrbitClassKind::nonzero;
  double ell = P.at("ell").get<double>();
  auto a_values = P.at("a_values").get<std::vector<double>>();
  bool scan = P.at("scan").get<bool>();
  double scan_tol = P.at("scan_tol").get<double>();

  std::vector<double> caps(a_values.size());
  std::vector<double> scans(a_values.size(), 0.0);
  parallel_for(static_cast<int>(a_values.size()), ctx.threads, [&](int i) {
    caps[i] = capacity_hat(oc, ck, a_values[i], ell);
    if (scan) scans[i] = capacity_hat_scan(oc, ck, a_values[i], ell, scan_tol);
  });

  std::string csv =
      scan ? "a,capacity,scan_value,scan_gap\n" : "a,capacity\n";
  double max_gap = 0.0;
  json values = json::array();
  for (std::size_t i = 0; i < a_values.size(); ++i) {
    json row;
    row["a"] = a_values[i];
    row["capacity"] = caps[i];
    csv += g17(a_values[i]) + "," + g17(caps[i]);
    if (scan) {
      double gap = std::fabs(scans[i] - caps[i]);
      max_gap = std::max(max_gap, gap);
      row["scan_value"] = scans[i];
      csv += "," + g17(scans[i]) + "," + g17(gap);
    }
    csv += "\n";
    values.push_back(std::move(row));
  }
  ctx.emit("capacity.csv", csv);

  ctx.results["case"] = oc.label();
  ctx.results["values"] = std::move(values);
  if (scan) {
    ctx.results["max_scan_gap"] = max_gap;
    ctx.verdict = strf(
        "capacity computed at %zu window levels; limit scan agrees within %.3g",
        a_values.size(), max_gap);
  } else {
    ctx.verdict = strf("capacity computed at %zu window levels", a_values.size());
  }
}

// ---------------------------------------------------------------------------
// sh-table

void run_sh_table(RunContext& ctx) {
  const json& P = ctx.params();
  OrbitCase oc = parse_case(P.at("case"));
  double ell = P.at("ell").get<double>();
  auto a_values = P.at("a_values").get<std::vector<double>>();
  auto c_values = P.at("c_values").get<std::vector<double>>();
  std::vector<std::string> classes = P.at("classes").get<std::vector<std::string>>();

  struct Cell {
    OrbitClassKind ck;
    double a;
    double c;
  };
  std::vector<Cell> cells;
  for (const auto& cls : classes) {
    OrbitClassKind ck =
        cls == "zero" ? OrbitClassKind::zero : OrbitClassKind::nonzero;
    for (double a : a_values)
      for (double c : c_values) cells.push_back({ck, a, c});
  }

  std::vector<SHTableRow> rows(cells.size());
  parallel_for(static_cast<int>(cells.size()), ctx.threads, [&](int i) {
    double l = cells[i].ck == OrbitClassKind::zero ? 0.0 : ell;
    rows[i] = compute_SH_tables(oc, cells[i].ck, cells[i].a, cells[i].c, l);
  });

  {
    std::ostringstream os;
    write_sh_table_csv(os, rows);
    ctx.emit("sh_table.csv", os.str());
  }

  std::map<std::string, int> patterns;
  for (const auto& r : rows)
    ++patterns[strf("inverse=%d direct=%d iso=%d", r.inverse_rank, r.direct_rank,
                    r.t_iso ? 1 : 0)];
  json hist = json::object();
  for (const auto& [key, count] : patterns) hist[key] = count;
  ctx.results["case"] = oc.label();
  ctx.results["rows"] = rows.size();
  ctx.results["patterns"] = std::move(hist);
  ctx.verdict = strf("%zu homology table rows computed (%zu distinct rank patterns)",
                     rows.size(), patterns.size());
}

// ---------------------------------------------------------------------------
// hofer-certify

void run_hofer_certify(RunContext& ctx) {
  const json& P = ctx.params();
  HamiltonianField H = parse_field(P.at("field"));
  SampleSpec spec;
  spec.space_points = static_cast<int>(P.at("space_points").get<long long>());
  spec.time_points = static_cast<int>(P.at("time_points").get<long long>());
  spec.seed = ctx.seed;
  int iterate = static_cast<int>(P.at("iterate").get<long long>());

  std::vector<std::pair<std::string, GeneratorCertificate>> stages;
  bool rejected = false;
  std::string reject_reason;
  try {
    GeneratorCertificate cur = certify(H, spec, "field");
    stages.emplace_back("field", cur);
    if (iterate > 1) {
      cur = iterate_certificate(cur, iterate);
      stages.emplace_back(strf("iterate^%d", iterate), cur);
    }
    if (P.contains("perturbation_field")) {
      SampleSpec pspec = spec;
      pspec.seed = ctx.seed + 1;
      GeneratorCertificate pc =
          certify(parse_field(P.at("perturbation_field")), pspec, "perturbation");
      stages.emplace_back("perturbation", pc);
      if (P.contains("transfer")) {
        const json& t = P.at("transfer");
        cur = transfer_zero_section_bound(cur, t.at("floor").get<double>(), pc,
                                          t.at("budget").get<double>());
        stages.emplace_back("transfer", cur);
      } else {
        cur = compose_certificates(cur, pc);
        stages.emplace_back("compose", cur);
      }
    }
  } catch (const CertificateError& e) {
    rejected = true;
    reject_reason = e.what();
  }

  std::string csv =
      "stage,osc_upper,zero_section_lower,sampled_sup,sampled_inf,space_points,time_points\n";
  for (const auto& [name, cert] : stages)
    csv += name + "," + g17(cert.osc_upper) + "," +
           g17(cert.zero_section_lower) + "," + g17(cert.sampled_sup) + "," +
           g17(cert.sampled_inf) + "," + std::to_string(cert.space_points) +
           "," + std::to_string(cert.time_points) + "\n";
  ctx.emit("stages.csv", csv);

  ctx.results["stages"] = stages.size();
  if (rejected) {
    ctx.verdict = "certificate rejected: " + reject_reason;
    ctx.exit_code = 2;
    return;
  }

  const GeneratorCertificate& final_cert = stages.back().second;
  std::string cert_text = certificate_json(final_cert);
  if (cert_text.empty() || cert_text.back() != '\n') cert_text += '\n';
  ctx.emit("certificate.json", cert_text);

  ctx.results["osc_upper"] = final_cert.osc_upper;
  ctx.results["zero_section_lower"] = final_cert.zero_section_lower;
  ctx.results["provenance"] = final_cert.provenance;
  ctx.verdict = strf(
      "certificate issued: oscillation <= %.6g, zero-section values >= %.6g",
      final_cert.osc_upper, final_cert.zero_section_lower);
}

// ---------------------------------------------------------------------------
// per-kind schemas

json normalize_orbit_like(const json& p, const std::string& path) {
  check_keys(p, path,
             {"field", "e", "radial_seeds", "residual_tol", "max_newton_iters"});
  json out;
  out["field"] = normalize_field(obj_field(p, path, "field"),
                                 join_path(path, "field"));
  out["e"] = normalize_class_field(p, path, "e", field_dim(out["field"]));
  out["radial_seeds"] = int_field_range(p, path, "radial_seeds", 1, 100000, 64);
  double tol = num_field(p, path, "residual_tol", 1e-8);
  if (!(tol > 0 && tol <= 1e-2))
    fail(join_path(path, "residual_tol"), "must be in (0, 1e-2]");
  out["residual_tol"] = tol;
  out["max_newton_iters"] =
      int_field_range(p, path, "max_newton_iters", 1, 1000, 50);
  return out;
}

json normalize_propagate(const json& p, const std::string& path,
                         const IntegrateOptions& integ) {
  check_keys(p, path, {"system", "k", "grid"});
  json out;
  out["system"] =
      normalize_system(obj_field(p, path, "system"), join_path(path, "system"), integ);
  if (system_dim(out["system"]) > 2)
    fail(join_path(path, "system"),
         "propagation radius measurement supports dimension <= 2");
  out["k"] = int_field_range(p, path, "k", 1, 1000000);
  out["grid"] = normalize_grid(find_key(p, "grid"), join_path(path, "grid"),
                               default_momentum_line(200, 0.999));
  return out;
}

json normalize_fixed_point(const json& p, const std::string& path,
                           const IntegrateOptions& integ) {
  check_keys(p, path,
             {"system", "k", "v", "q_resolution", "p_resolution", "residual_tol",
              "max_seeds"});
  json out;
  out["system"] =
      normalize_system(obj_field(p, path, "system"), join_path(path, "system"), integ);
  if (out["system"].at("type") == "damped")
    fail(join_path(path, "system"),
         "fixed-point search needs Hamiltonian factors; damped systems have none");
  out["k"] = int_field_range(p, path, "k", 1, 10000);
  out["v"] = normalize_class_field(p, path, "v", system_dim(out["system"]));
  out["q_resolution"] = int_field_range(p, path, "q_resolution", 1, 200, 9);
  out["p_resolution"] = int_field_range(p, path, "p_resolution", 1, 500, 33);
  double tol = num_field(p, path, "residual_tol", 1e-7);
  if (!(tol > 0 && tol <= 1e-2))
    fail(join_path(path, "residual_tol"), "must be in (0, 1e-2]");
  out["residual_tol"] = tol;
  out["max_seeds"] = int_field_range(p, path, "max_seeds", 0, 1000000, 0);
  return out;
}

json normalize_rotation_set(const json& p, const std::string& path,
                            const IntegrateOptions& integ) {
  check_keys(p, path,
             {"system", "k", "phase_resolution", "base_resolution",
              "momentum_cap", "max_samples"});
  json out;
  out["system"] =
      normalize_system(obj_field(p, path, "system"), join_path(path, "system"), integ);
  if (system_dim(out["system"]) > 2)
    fail(join_path(path, "system"),
         "rotation set hulls are computed for dimension <= 2");
  out["k"] = int_field_range(p, path, "k", 1, 1000000);
  out["phase_resolution"] =
      int_field_range(p, path, "phase_resolution", 1, 100, 8);
  out["base_resolution"] = int_field_range(p, path, "base_resolution", 1, 100, 4);
  double cap = num_field(p, path, "momentum_cap", 0.97);
  if (!(cap > 0 && cap < 1))
    fail(join_path(path, "momentum_cap"), "must be in (0, 1)");
  out["momentum_cap"] = cap;
  out["max_samples"] = int_field_range(p, path, "max_samples", 0, 10000000, 0);
  return out;
}

json normalize_counterexample(const json& p, const std::string& path) {
  check_keys(p, path, {"profile", "beta", "k", "grid"});
  json out;
  const json* prof = find_key(p, "profile");
  if (prof) {
    out["profile"] = normalize_profile(*prof, join_path(path, "profile"));
  } else {
    json def;
    def["type"] = "cosine-squared";
    def["pieces"] = 32;
    out["profile"] = def;
  }
  double beta = num_field(p, path, "beta", 0.28);
  if (!(beta > 0 && beta <= 0.6))
    fail(join_path(path, "beta"), "must be in (0, 0.6]");
  out["beta"] = beta;
  out["k"] = int_field_range(p, path, "k", 1, 1000000, 500);
  out["grid"] = normalize_grid(find_key(p, "grid"), join_path(path, "grid"),
                               default_momentum_line(200, 0.999));
  // surface damped-build contract violations (profile support, u shape) now
  try {
    DampedSystem d(parse_profile(out["profile"]), damping_map(beta));
    build_damped_system(std::move(d));
  } catch (const std::exception& e) {
    fail(path, std::string("damped system rejected: ") + e.what());
  }
  return out;
}

json normalize_capacity(const json& p, const std::string& path) {
  check_keys(p, path, {"case", "class", "ell", "a_values", "scan", "scan_tol"});
  json out;
  out["case"] = normalize_case(find_key(p, "case"), join_path(path, "case"));
  std::string cls = str_field(p, path, "class");
  if (cls != "zero" && cls != "nonzero")
    fail(join_path(path, "class"), "expected \"zero\" or \"nonzero\"");
  out["class"] = cls;
  bool circles = out["case"].at("circles").get<bool>();
  if (cls == "zero") {
    double ell = num_field(p, path, "ell", 0.0);
    if (ell != 0.0)
      fail(join_path(path, "ell"), "the contractible class has ell = 0");
    if (circles)
      fail(join_path(path, "case"),
           "the contractible class is computed for the torus case only");
    out["ell"] = 0.0;
  } else {
    double ell = num_field(p, path, "ell", 1.0);
    if (!(ell > 0)) fail(join_path(path, "ell"), "must be > 0");
    out["ell"] = ell;
  }
  out["a_values"] = num_array_field(p, path, "a_values", 10000);
  bool scan = bool_field(p, path, "scan", false);
  out["scan"] = scan;
  double tol = num_field(p, path, "scan_tol", 1e-6);
  if (!(tol >= 1e-12 && tol <= 1e-2))
    fail(join_path(path, "scan_tol"), "must be in [1e-12, 1e-2]");
  out["scan_tol"] = tol;
  if (scan) {
    const auto& av = out["a_values"];
    for (std::size_t i = 0; i < av.size(); ++i)
      if (!(av[i].get<double>() > 0))
        fail(elem_path(join_path(path, "a_values"), i),
             "limit scans need a > 0 (the direct formula handles a <= 0)");
  }
  return out;
}

json normalize_sh_table(const json& p, const std::string& path) {
  check_keys(p, path, {"case", "classes", "ell", "a_values", "c_values"});
  json out;
  out["case"] = normalize_case(find_key(p, "case"), join_path(path, "case"));
  const json* classes = find_key(p, "classes");
  std::string cp = join_path(path, "classes");
  if (!classes || !classes->is_array() || classes->empty())
    fail(cp, "expected a nonempty array of class names");
  std::vector<std::string> cls;
  for (std::size_t i = 0; i < classes->size(); ++i) {
    const json& e = (*classes)[i];
    if (!e.is_string() ||
        (e.get<std::string>() != "zero" && e.get<std::string>() != "nonzero"))
      fail(elem_path(cp, i), "expected \"zero\" or \"nonzero\"");
    std::string name = e.get<std::string>();
    if (std::find(cls.begin(), cls.end(), name) != cls.end())
      fail(elem_path(cp, i), "duplicate class name");
    cls.push_back(name);
  }
  if (std::find(cls.begin(), cls.end(), "zero") != cls.end() &&
      out["case"].at("circles").get<bool>())
    fail(cp, "the contractible class is computed for the torus case only");
  out["classes"] = cls;
  double ell = num_field(p, path, "ell", 1.0);
  if (!(ell > 0)) fail(join_path(path, "ell"), "must be > 0");
  out["ell"] = ell;
  out["a_values"] = num_array_field(p, path, "a_values", 1000);
  out["c_values"] = num_array_field(p, path, "c_values", 1000);
  for (const char* key : {"a_values", "c_values"}) {
    const auto& vals = out[key];
    for (std::size_t i = 0; i < vals.size(); ++i)
      if (!(vals[i].get<double>() > 0))
        fail(elem_path(join_path(path, key), i), "window levels must be > 0");
  }
  std::size_t cell_count =
      cls.size() * out["a_values"].size() * out["c_values"].size();
  if (cell_count > 100000)
    fail(path, strf("grid too large (%zu cells, max 100000)", cell_count));
  return out;
}

json normalize_hofer_certify(const json& p, const std::string& path) {
  check_keys(p, path,
             {"field", "space_points", "time_points", "iterate",
              "perturbation_field", "transfer"});
  json out;
  out["field"] = normalize_field(obj_field(p, path, "field"),
                                 join_path(path, "field"));
  out["space_points"] =
      int_field_range(p, path, "space_points", 100, 10000000, 10000);
  out["time_points"] = int_field_range(p, path, "time_points", 1, 10000, 64);
  out["iterate"] = int_field_range(p, path, "iterate", 1, 10000, 1);
  if (find_key(p, "perturbation_field")) {
    json pf = normalize_field(obj_field(p, path, "perturbation_field"),
                              join_path(path, "perturbation_field"));
    if (field_dim(pf) != field_dim(out["field"]))
      fail(join_path(path, "perturbation_field"),
           "dimension must match the main field");
    out["perturbation_field"] = std::move(pf);
  }
  if (find_key(p, "transfer")) {
    if (!out.contains("perturbation_field"))
      fail(join_path(path, "transfer"), "transfer requires perturbation_field");
    const json& t = obj_field(p, path, "transfer");
    std::string tp = join_path(path, "transfer");
    check_keys(t, tp, {"floor", "budget"});
    json nt;
    nt["floor"] = num_field(t, tp, "floor");
    double budget = num_field(t, tp, "budget");
    if (!(budget > 0)) fail(join_path(tp, "budget"), "must be > 0");
    nt["budget"] = budget;
    out["transfer"] = std::move(nt);
  }
  return out;
}

// ---------------------------------------------------------------------------
// kind table and catalog

struct KindEntry {
  const char* kind;
  const char* summary;
  json (*normalize)(const json& params, const std::string& path,
                    const IntegrateOptions& integ);
  void (*run)(RunContext& ctx);
};

json norm_orbit(const json& p, const std::string& path, const IntegrateOptions&) {
  return normalize_orbit_like(p, path);
}
json norm_spectrum(const json& p, const std::string& path, const IntegrateOptions&) {
  return normalize_orbit_like(p, path);
}
json norm_propagate(const json& p, const std::string& path,
                    const IntegrateOptions& integ) {
  return normalize_propagate(p, path, integ);
}
json norm_fixed_point(const json& p, const std::string& path,
                      const IntegrateOptions& integ) {
  return normalize_fixed_point(p, path, integ);
}
json norm_rotation_set(const json& p, const std::string& path,
                       const IntegrateOptions& integ) {
  return normalize_rotation_set(p, path, integ);
}
json norm_counterexample(const json& p, const std::string& path,
                         const IntegrateOptions&) {
  return normalize_counterexample(p, path);
}
json norm_capacity(const json& p, const std::string& path,
                   const IntegrateOptions&) {
  return normalize_capacity(p, path);
}
json norm_sh_table(const json& p, const std::string& path,
                   const IntegrateOptions&) {
  return normalize_sh_table(p, path);
}
json norm_hofer_certify(const json& p, const std::string& path,
                        const IntegrateOptions&) {
  return normalize_hofer_certify(p, path);
}

const KindEntry kKinds[] = {
    {"orbit",
     "search for a periodic orbit in a homotopy class and report its action",
     norm_orbit, run_orbit},
    {"spectrum",
     "collect the action spectrum of a homotopy class from a seed sweep",
     norm_spectrum, run_spectrum},
    {"propagate",
     "measure how far a sequential system spreads a seed grid per step",
     norm_propagate, run_propagate},
    {"fixed-point",
     "search a perturbed sequence for a point displaced by an integer vector",
     norm_fixed_point, run_fixed_point},
    {"rotation-set",
     "estimate the set of asymptotic displacement directions with its hull",
     norm_rotation_set, run_rotation_set},
    {"counterexample",
     "check the uniform displacement bound of a damped momentum compression",
     norm_counterexample, run_counterexample},
    {"capacity",
     "evaluate the window capacity profile, optionally cross-checked by scan",
     norm_capacity, run_capacity},
    {"sh-table",
     "tabulate filtered homology ranks and the connecting map over a grid",
     norm_sh_table, run_sh_table},
    {"hofer-certify",
     "issue sampled oscillation and zero-section certificates for a generator",
     norm_hofer_certify, run_hofer_certify},
};

const KindEntry* find_kind(const std::string& kind) {
  for (const auto& k : kKinds)
    if (kind == k.kind) return &k;
  return nullptr;
}

json normalize_integrator(const json* integ) {
  json out;
  std::string path = "integrator";
  if (integ && !integ->is_object()) fail(path, "expected an object");
  const json empty = json::object();
  const json& src = integ ? *integ : empty;
  check_keys(src, path, {"dt", "fp_tol", "max_fp_iters", "force_stepping"});
  double dt = num_field(src, path, "dt", 1e-3);
  if (!(dt > 0 && dt <= 0.5)) fail(join_path(path, "dt"), "must be in (0, 0.5]");
  out["dt"] = dt;
  double fp = num_field(src, path, "fp_tol", 1e-12);
  if (!(fp > 0 && fp <= 1e-6))
    fail(join_path(path, "fp_tol"), "must be in (0, 1e-6]");
  out["fp_tol"] = fp;
  out["max_fp_iters"] = int_field_range(src, path, "max_fp_iters", 1, 10000, 50);
  out["force_stepping"] = bool_field(src, path, "force_stepping", false);
  return out;
}

IntegrateOptions integrate_options_from(const json& integ) {
  IntegrateOptions o;
  o.dt = integ.at("dt").get<double>();
  o.fp_tol = integ.at("fp_tol").get<double>();
  o.max_fp_iters = static_cast<int>(integ.at("max_fp_iters").get<long long>());
  o.force_stepping = integ.at("force_stepping").get<bool>();
  return o;
}

std::string utc_now() {
  std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

const std::vector<ExperimentDoc>& experiment_catalog() {
  static const std::vector<ExperimentDoc> catalog = [] {
    std::vector<ExperimentDoc> out;
    auto field_doc = [](const char* name) {
      return ParamDoc{name,
                      "field block: zero {n} | profile {n, profile} | "
                      "cosine-bump {n, wave, amp, phase=0, time_wobble=0} | "
                      "sum {terms} | iterate {base, k}"};
    };
    auto system_doc = [] {
      return ParamDoc{"system",
                      "system block: constant {field} | perturbed {field, "
                      "bound, perturbation_seed=1} | skew-product {alpha, "
                      "y0=0, base_field, modulation {wave, amp}} | damped "
                      "{profile, beta=0.28}"};
    };
    auto grid_doc = [](const char* def) {
      return ParamDoc{
          "grid", strf("seed grid: momentum-line {points, momentum_cap} | "
                       "fundamental {resolution, momentum_cap}; default %s",
                       def)};
    };
    for (const auto& k : kKinds) {
      ExperimentDoc d;
      d.kind = k.kind;
      d.summary = k.summary;
      std::string kind = k.kind;
      if (kind == "orbit" || kind == "spectrum") {
        d.params = {
            field_doc("field"),
            {"e", "homotopy class, integer vector of the field dimension"},
            {"radial_seeds", "shooting seeds per direction (default 64)"},
            {"residual_tol", "Newton convergence threshold (default 1e-8)"},
            {"max_newton_iters", "Newton iteration cap (default 50)"},
        };
      } else if (kind == "propagate") {
        d.params = {
            system_doc(),
            {"k", "number of sequence steps to evolve"},
            grid_doc("momentum-line {points=200, momentum_cap=0.999}"),
        };
      } else if (kind == "fixed-point") {
        d.params = {
            system_doc(),
            {"k", "number of sequence steps the displacement spans"},
            {"v", "target integer displacement vector"},
            {"q_resolution", "seed grid resolution per position axis (default 9)"},
            {"p_resolution", "seed grid resolution per momentum axis (default 33)"},
            {"residual_tol", "chain closure tolerance (default 1e-7)"},
            {"max_seeds", "cap on ranked seeds to try, 0 = all (default 0)"},
        };
      } else if (kind == "rotation-set") {
        d.params = {
            system_doc(),
            {"k", "averaging horizon in steps"},
            {"phase_resolution", "fundamental-domain resolution (default 8)"},
            {"base_resolution", "skew base grid resolution (default 4)"},
            {"momentum_cap", "seed momentum radius bound (default 0.97)"},
            {"max_samples", "sample cap, 0 = no cap (default 0)"},
        };
      } else if (kind == "counterexample") {
        d.params = {
            {"profile",
             "momentum profile supported inside |p| < 1/2 (default "
             "cosine-squared {pieces=32})"},
            {"beta", "momentum compression strength in (0, 0.6] (default 0.28)"},
            {"k", "horizon in steps (default 500)"},
            grid_doc("momentum-line {points=200, momentum_cap=0.999}"),
        };
      } else if (kind == "capacity") {
        d.params = {
            {"case", "orbit case {circles=false, n=2}"},
            {"class", "\"zero\" (contractible, ell = 0) or \"nonzero\""},
            {"ell", "class slope, > 0 for nonzero (default 1; forced 0 for zero)"},
            {"a_values", "window levels to evaluate"},
            {"scan", "cross-check each value by limit scan (default false)"},
            {"scan_tol", "scan bisection tolerance (default 1e-6)"},
        };
      } else if (kind == "sh-table") {
        d.params = {
            {"case", "orbit case {circles=false, n=2}"},
            {"classes", "subset of [\"zero\", \"nonzero\"]"},
            {"ell", "class slope for nonzero entries (default 1)"},
            {"a_values", "window levels a > 0"},
            {"c_values", "window levels c > 0"},
        };
      } else {
        d.params = {
            field_doc("field"),
            {"space_points", "sample sweep size in phase space (default 10000)"},
            {"time_points", "sample sweep size in time (default 64)"},
            {"iterate", "certify the k-th iterate when > 1 (default 1)"},
            {"perturbation_field", "optional second field block to certify"},
            {"transfer",
             "optional {floor, budget}: transfer the zero-section floor "
             "through the perturbation (audited at tolerance 1e-3)"},
        };
      }
      out.push_back(std::move(d));
    }
    return out;
  }();
  return catalog;
}

nlohmann::json validate_config(const nlohmann::json& config) {
  if (!config.is_object()) fail("", "config must be a JSON object");
  check_keys(config, "",
             {"spec_version", "kind", "seed", "integrator", "params", "out_dir"});
  std::string version = str_field(config, "", "spec_version");
  if (version != "1")
    fail("spec_version",
         "unsupported version \"" + version + "\" (this tool reads \"1\")");
  std::string kind = str_field(config, "", "kind");
  const KindEntry* entry = find_kind(kind);
  if (!entry) fail("kind", "unknown experiment kind \"" + kind + "\"");

  json out;
  out["spec_version"] = "1";
  out["kind"] = kind;
  const json* seed = find_key(config, "seed");
  std::uint64_t seed_v = 2026;
  if (seed) {
    if (!seed->is_number_unsigned() &&
        !(seed->is_number_integer() && seed->get<long long>() >= 0))
      fail("seed", "expected a nonnegative integer");
    seed_v = seed->get<std::uint64_t>();
  }
  out["seed"] = seed_v;
  if (find_key(config, "out_dir")) {
    std::string dir = str_field(config, "", "out_dir");
    if (dir.empty()) fail("out_dir", "must be a nonempty path");
    out["out_dir"] = dir;
  } else {
    out["out_dir"] = "runs/" + kind;
  }
  out["integrator"] = normalize_integrator(find_key(config, "integrator"));
  const json& params = obj_field(config, "", "params");
  out["params"] = entry->normalize(params, "params",
                                   integrate_options_from(out["integrator"]));
  return out;
}

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError(path, "cannot open config file");
  std::ostringstream buf;
  buf << is.rdbuf();
  json parsed;
  try {
    // comments allowed: configs are hand-edited
    parsed = json::parse(buf.str(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, e.what());
  }
  return validate_config(parsed);
}

ExperimentOutcome run_experiment(const nlohmann::json& config,
                                 const std::string& out_dir, int threads) {
  RunContext ctx;
  ctx.cfg = validate_config(config);
  ctx.seed = ctx.cfg.at("seed").get<std::uint64_t>();
  ctx.integ = integrate_options_from(ctx.cfg.at("integrator"));
  ctx.out_dir = fs::path(out_dir);
  ctx.threads = std::max(1, threads);
  fs::create_directories(ctx.out_dir);

  const KindEntry* entry = find_kind(ctx.cfg.at("kind").get<std::string>());
  entry->run(ctx);

  json summary;
  summary["spec_version"] = "1";
  summary["kind"] = entry->kind;
  summary["verdict"] = ctx.verdict;
  summary["exit_code"] = ctx.exit_code;
  summary["config"] = ctx.cfg;
  summary["results"] = ctx.results;
  summary["files"] = ctx.files;
  summary["meta"] = {{"finished_at", utc_now()}, {"threads", ctx.threads}};
  ctx.emit("summary.json", summary.dump(2) + "\n");

  ExperimentOutcome outcome;
  outcome.exit_code = ctx.exit_code;
  outcome.verdict = ctx.verdict;
  outcome.files = ctx.files;
  return outcome;
}

}  // namespace hamlab
