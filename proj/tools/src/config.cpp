#include <cmath>
#include <cstdio>
#include <set>

#include "qustat/error.hpp"
#include "qustat_cli/cli.hpp"

namespace qustat::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError("config " + (path.empty() ? std::string("<root>") : path) + ": " + what);
}

// Reads fields of one JSON object and rejects whatever was not read.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) fail(at(key), "missing required field");
    return j_.at(key);
  }

  const json* optional(const std::string& key) {
    seen_.insert(key);
    return has(key) ? &j_.at(key) : nullptr;
  }

  double number(const std::string& key, std::optional<double> def = std::nullopt) {
    const json* v = optional(key);
    if (!v) {
      if (!def) fail(at(key), "missing required field");
      return *def;
    }
    if (!v->is_number()) fail(at(key), "expected a number");
    return v->get<double>();
  }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> def = std::nullopt) {
    const json* v = optional(key);
    if (!v) {
      if (!def) fail(at(key), "missing required field");
      return *def;
    }
    if (!v->is_number_integer()) fail(at(key), "expected an integer");
    if (v->is_number_unsigned() && v->get<std::uint64_t>() > std::uint64_t(INT64_MAX))
      fail(at(key), "integer out of range");
    return v->get<std::int64_t>();
  }

  std::string string(const std::string& key, std::optional<std::string> def = std::nullopt) {
    const json* v = optional(key);
    if (!v) {
      if (!def) fail(at(key), "missing required field");
      return *def;
    }
    if (!v->is_string()) fail(at(key), "expected a string");
    return v->get<std::string>();
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [k, _] : j_.items())
      if (!seen_.count(k)) fail(at(k), "unknown field");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json matrix_spec(const json& j, const std::string& path) {
  Fields f(j, path);
  const auto dim = f.integer("dim");
  if (dim < 1) fail(f.at("dim"), "must be >= 1");
  auto rows = [&](const std::string& key) {
    const json& m = f.raw(key);
    if (!m.is_array() || static_cast<std::int64_t>(m.size()) != dim) fail(f.at(key), "expected dim rows");
    for (const auto& row : m) {
      if (!row.is_array() || static_cast<std::int64_t>(row.size()) != dim) fail(f.at(key), "expected dim columns");
      for (const auto& x : row)
        if (!x.is_number()) fail(f.at(key), "entries must be numbers");
    }
    return m;
  };
  json out = {{"dim", dim}, {"re", rows("re")}, {"im", rows("im")}};
  f.finish();
  return out;
}

json state_spec(const json& j, const std::string& path) {
  Fields f(j, path);
  json out;
  if (f.has("matrix")) {
    if (f.has("eigenvalues") || f.has("rotation")) fail(path, "give either matrix or eigenvalues");
    out["matrix"] = matrix_spec(f.raw("matrix"), f.at("matrix"));
  } else {
    const json& ev = f.raw("eigenvalues");
    if (!ev.is_array() || ev.empty()) fail(f.at("eigenvalues"), "expected a non-empty list");
    for (const auto& x : ev)
      if (!x.is_number()) fail(f.at("eigenvalues"), "entries must be numbers");
    out["eigenvalues"] = ev;
    const json* rot = f.optional("rotation");
    out["rotation"] = rot ? matrix_spec(*rot, f.at("rotation")) : json(nullptr);
    if (rot && (*rot)["dim"] != ev.size()) fail(f.at("rotation"), "dimension differs from the eigenvalue count");
  }
  f.finish();
  return out;
}

const std::set<std::string> kPresets = {"pauli-xy", "pauli-xx-yy", "goodness", "homogeneity"};

json kernel_spec(const json& j, const std::string& path) {
  Fields f(j, path);
  json out;
  const int kinds = f.has("preset") + f.has("matrix") + f.has("factors");
  if (kinds != 1) fail(path, "give exactly one of preset, matrix, factors");
  if (f.has("preset")) {
    const auto name = f.string("preset");
    if (!kPresets.count(name)) fail(f.at("preset"), "unknown preset '" + name + "'");
    out["preset"] = name;
  } else if (f.has("matrix")) {
    out["matrix"] = matrix_spec(f.raw("matrix"), f.at("matrix"));
    const auto d = f.integer("d"), r = f.integer("r");
    if (d < 1 || r < 1) fail(path, "need d >= 1 and r >= 1");
    out["d"] = d;
    out["r"] = r;
  } else {
    const json& fs = f.raw("factors");
    if (!fs.is_array() || fs.empty()) fail(f.at("factors"), "expected a non-empty list of matrices");
    json list = json::array();
    for (std::size_t i = 0; i < fs.size(); ++i)
      list.push_back(matrix_spec(fs[i], f.at("factors") + "[" + std::to_string(i) + "]"));
    out["factors"] = list;
  }
  f.finish();
  return out;
}

json int_list(Fields& f, const std::string& key, std::int64_t min_value) {
  const json& v = f.raw(key);
  if (!v.is_array() || v.empty()) fail(f.at(key), "expected a non-empty list of integers");
  json out = json::array();
  for (const auto& x : v) {
    if (!x.is_number_integer()) fail(f.at(key), "entries must be integers");
    const auto i = x.get<std::int64_t>();
    if (x.is_number_unsigned() && x.get<std::uint64_t>() > 1000000) fail(f.at(key), "entry out of range");
    if (i < min_value) fail(f.at(key), "entries must be >= " + std::to_string(min_value));
    if (i > 1000000) fail(f.at(key), "entry out of range");
    out.push_back(i);
  }
  return out;
}

json positive_list(Fields& f, const std::string& key) {
  const json& v = f.raw(key);
  if (!v.is_array() || v.empty()) fail(f.at(key), "expected a non-empty list of numbers");
  for (const auto& x : v)
    if (!x.is_number() || !(x.get<double>() > 0)) fail(f.at(key), "entries must be positive numbers");
  return v;
}

double positive(Fields& f, const std::string& key, double def) {
  const double v = f.number(key, def);
  if (!(v > 0)) fail(f.at(key), "must be positive");
  return v;
}

json tolerances(const json* j) {
  const json empty = json::object();
  Fields f(j ? *j : empty, "tolerances");
  json out;
  const json* h = f.optional("hoeffding");
  if (h && !(h->is_number() && h->get<double>() > 0)) fail("tolerances.hoeffding", "must be a positive number");
  out["hoeffding"] = h ? *h : json(nullptr);
  out["gap"] = positive(f, "gap", 1e-9);
  out["route"] = positive(f, "route", 1e-6);
  out["tail"] = positive(f, "tail", 1e-12);
  out["hermite"] = positive(f, "hermite", 1e-8);
  out["merge"] = positive(f, "merge", 1e-9);
  f.finish();
  return out;
}

json budget(const json* j) {
  const json empty = json::object();
  Fields f(j ? *j : empty, "budget");
  json out;
  const auto max_dim = f.integer("max_dim", std::int64_t{1} << 14);
  const auto max_terms = f.integer("max_terms", std::int64_t{1} << 20);
  if (max_dim < 1 || max_terms < 1) fail("budget", "limits must be >= 1");
  out["max_dim"] = max_dim;
  out["max_terms"] = max_terms;
  f.finish();
  return out;
}

json scaling(const json* j) {
  const json empty = json::object();
  Fields f(j ? *j : empty, "scaling");
  json out;
  const json* e = f.optional("exponent");
  if (e && !(e->is_number_integer() && e->get<std::int64_t>() >= 0 && e->get<std::int64_t>() <= 64))
    fail("scaling.exponent", "must be an integer in [0, 64]");
  out["exponent"] = e ? *e : json(nullptr);
  const auto base = f.string("base", "n");
  if (base != "n" && base != "n-1") fail("scaling.base", "must be \"n\" or \"n-1\"");
  out["base"] = base;
  f.finish();
  return out;
}

json limit_section(const json* j, const std::string& default_method) {
  const json empty = json::object();
  Fields f(j ? *j : empty, "limit");
  json out;
  const auto method = f.string("method", default_method);
  if (method != "wick" && method != "fock" && method != "both" && method != "none")
    fail("limit.method", "must be one of wick, fock, both, none");
  out["method"] = method;
  const auto trunc = f.integer("trunc", 64);
  if (trunc < 2 || trunc > 4096) fail("limit.trunc", "must lie in [2, 4096]");
  out["trunc"] = trunc;
  f.finish();
  return out;
}

json test_section(const json* j) {
  const json empty = json::object();
  Fields f(j ? *j : empty, "test");
  json out;
  const double alpha = f.number("alpha", 0.05);
  if (!(alpha > 0 && alpha < 1)) fail("test.alpha", "must lie in (0, 1)");
  out["alpha"] = alpha;
  const auto reps = f.integer("replicates", 10000);
  if (reps < 2) fail("test.replicates", "must be >= 2");
  out["replicates"] = reps;
  const auto draws = f.integer("limit_draws", 1000000);
  if (draws < 2) fail("test.limit_draws", "must be >= 2");
  out["limit_draws"] = draws;
  const auto kind = f.string("interval_kind", "upper");
  if (kind != "upper" && kind != "equal-tail") fail("test.interval_kind", "must be \"upper\" or \"equal-tail\"");
  out["interval_kind"] = kind;
  const auto base = f.string("base", "n");
  if (base != "n" && base != "n-1") fail("test.base", "must be \"n\" or \"n-1\"");
  out["base"] = base;
  const auto trunc = f.integer("trunc", 64);
  if (trunc < 2 || trunc > 4096) fail("test.trunc", "must lie in [2, 4096]");
  out["trunc"] = trunc;
  const json* iv = f.optional("interval");
  if (iv) {
    if (!iv->is_array() || iv->size() != 2) fail("test.interval", "expected [a, b]");
    for (const auto& x : *iv)
      if (!x.is_null() && !x.is_number()) fail("test.interval", "endpoints must be numbers or null");
    const double a = (*iv)[0].is_null() ? -INFINITY : (*iv)[0].get<double>();
    const double b = (*iv)[1].is_null() ? INFINITY : (*iv)[1].get<double>();
    if (!(a < b)) fail("test.interval", "need a < b");
  }
  out["interval"] = iv ? *iv : json(nullptr);
  const json* alt = f.optional("alternative");
  out["alternative"] = alt ? state_spec(*alt, "test.alternative") : json(nullptr);
  f.finish();
  return out;
}

json metrology_section(const json* j) {
  if (!j) fail("metrology", "missing required section");
  Fields f(*j, "metrology");
  json out = {{"t", f.number("t")}, {"g1", f.number("g1")}, {"g2", f.number("g2")}};
  f.finish();
  return out;
}

json hermite_section(const json* j) {
  const json empty = json::object();
  Fields f(j ? *j : empty, "hermite");
  json out;
  out["sigma_sq_list"] = f.has("sigma_sq_list") ? positive_list(f, "sigma_sq_list") : json::array({0.75, 1.0, 2.0});
  for (const auto& s : out["sigma_sq_list"])
    if (s.get<double>() < 0.5) fail("hermite.sigma_sq_list", "thermal variances must be >= 1/2");
  const auto order = f.integer("max_order", 6);
  if (order < 1 || order > 12) fail("hermite.max_order", "must lie in [1, 12]");
  out["max_order"] = order;
  const auto trunc = f.integer("trunc", 64);
  if (trunc < 2 || trunc > 4096) fail("hermite.trunc", "must lie in [2, 4096]");
  out["trunc"] = trunc;
  f.finish();
  return out;
}

}  // namespace

Config parse_config(const json& raw, std::optional<std::uint64_t> seed_override) {
  Fields f(raw, "");
  Config c;
  c.command = f.string("command");
  static const std::set<std::string> commands = {"decompose",   "moments",  "limit",        "convergence",
                                                 "test-sim",    "metrology", "hermite-check"};
  if (!commands.count(c.command)) fail("command", "unknown command '" + c.command + "'");
  const std::string& cmd = c.command;

  json n;
  n["command"] = cmd;
  const json* seed = f.optional("seed");
  std::uint64_t s = 0;
  if (seed) {
    if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<std::int64_t>() >= 0))
      fail("seed", "expected a non-negative 64-bit integer");
    s = seed->get<std::uint64_t>();
  }
  if (seed_override) s = *seed_override;
  n["seed"] = s;
  n["tolerances"] = tolerances(f.optional("tolerances"));
  n["budget"] = budget(f.optional("budget"));

  const bool needs_state = cmd != "hermite-check";
  const bool needs_kernel = cmd == "decompose" || cmd == "moments" || cmd == "limit" || cmd == "convergence" ||
                            cmd == "metrology";
  const bool needs_n = cmd == "moments" || cmd == "convergence" || cmd == "test-sim" || cmd == "metrology";
  const bool needs_p = cmd == "moments" || cmd == "convergence" || cmd == "limit";

  if (needs_state) n["state"] = state_spec(f.raw("state"), "state");
  if (needs_kernel) {
    n["kernel"] = kernel_spec(f.raw("kernel"), "kernel");
    if (n["kernel"].value("preset", "") == "homogeneity") {
      const json* s2 = f.optional("state2");
      n["state2"] = s2 ? state_spec(*s2, "state2") : json(nullptr);
    }
  }
  if (needs_n) n["n_list"] = int_list(f, "n_list", cmd == "test-sim" ? 2 : 1);
  if (needs_p) n["p_list"] = int_list(f, "p_list", 1);
  if (cmd == "moments" || cmd == "convergence") n["scaling"] = scaling(f.optional("scaling"));
  if (cmd == "moments") n["limit"] = limit_section(f.optional("limit"), "wick");
  if (cmd == "convergence" || cmd == "limit") n["limit"] = limit_section(f.optional("limit"), "both");
  if (cmd == "test-sim") n["test"] = test_section(f.optional("test"));
  if (cmd == "metrology") n["metrology"] = metrology_section(f.optional("metrology"));
  if (cmd == "hermite-check") n["hermite"] = hermite_section(f.optional("hermite"));
  f.finish();
  c.normalized = std::move(n);
  return c;
}

std::string config_hash(const json& normalized) {
  const std::string text = normalized.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace qustat::cli
