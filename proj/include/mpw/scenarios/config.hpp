#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mpw/scenarios/box.hpp"
#include "mpw/scenarios/coulomb.hpp"
#include "mpw/scenarios/double_slit.hpp"
#include "mpw/scenarios/harmonic.hpp"
#include "mpw/scenarios/tunneling.hpp"

namespace mpw {

using json = nlohmann::json;

struct EprConfig {
  std::vector<double> angles_deg{0, 45, 90, 135};
  double alpha_o = 0.3, beta_o = 1.1;  // hidden initial direction
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 20240611;
};

// grid and evaluation settings shared by the scenario runs
struct RunGrid {
  double lo = -3, hi = 3;
  std::size_t nodes = 301;
  double t = 1;
  double source = 0.5;  // point source or packet centre
};

struct KeplerConfig {
  double mass = 1;
  double omega = 0.5;
  std::vector<double> q0{1.0, 0.2};
  std::vector<double> p0{0.3, 1.4};
  double dt = 1e-3;
  int periods = 1;

  void validate() const {
    if (!(mass > 0) || !(omega > 0) || !(dt > 0) || periods < 1) throw ConfigError("Kepler constants must be positive");
    if (q0.size() != p0.size() || (q0.size() != 2 && q0.size() != 4))
      throw ConfigError("Kepler state must be 2D or 4D");
  }
};

template <class V> void visit(V& v, HarmonicConfig& c) {
  v("mass", c.mass);
  v("omega", c.omega);
  v("hbar", c.hbar);
  v("dim", c.dim);
  v("k_max", c.k_max);
  v("caustic_eps", c.caustic_eps);
}

template <class V> void visit(V& v, BoxConfig& c) {
  v("mass", c.mass);
  v("hbar", c.hbar);
  v("L", c.L);
  v("x0", c.x0);
  v("k_max", c.k_max);
}

template <class V> void visit(V& v, TunnelingConfig& c) {
  v("mass", c.mass);
  v("hbar", c.hbar);
  v("p0", c.p0);
  v("V", c.V);
  v("rho0", c.rho0);
}

template <class V> void visit(V& v, DoubleSlitConfig& c) {
  v("mass", c.mass);
  v("hbar", c.hbar);
  v("p0", c.p0);
  v("slit_y", c.slit_y);
  v("screen_x", c.screen_x);
  v("finite_width", c.finite_width);
  v("width", c.width);
  v("width_samples", c.width_samples);
}

template <class V> void visit(V& v, AharonovBohmConfig& c) {
  v("slit", c.slit);
  v("charge", c.charge);
  v("flux", c.flux);
  v("c1", c.c1);
  v("c2", c.c2);
}

template <class V> void visit(V& v, CoulombConfig& c) {
  v("mass", c.mass);
  v("G", c.G);
  v("hbar", c.hbar);
  v("k_max", c.k_max);
  v("scale", c.scale);
}

template <class V> void visit(V& v, EprConfig& c) {
  v("angles_deg", c.angles_deg);
  v("alpha_o", c.alpha_o);
  v("beta_o", c.beta_o);
  v("samples", c.samples);
  v("seed", c.seed);
}

template <class V> void visit(V& v, RunGrid& c) {
  v("lo", c.lo);
  v("hi", c.hi);
  v("nodes", c.nodes);
  v("t", c.t);
  v("source", c.source);
}

template <class V> void visit(V& v, KeplerConfig& c) {
  v("mass", c.mass);
  v("omega", c.omega);
  v("q0", c.q0);
  v("p0", c.p0);
  v("dt", c.dt);
  v("periods", c.periods);
}

namespace detail {

template <class T> constexpr const char* type_name() {
  if constexpr (std::is_same_v<T, bool>) return "boolean";
  else if constexpr (std::is_integral_v<T>) return "integer";
  else if constexpr (std::is_floating_point_v<T>) return "number";
  else if constexpr (std::is_same_v<T, std::string>) return "string";
  else return "array";
}

template <class T> constexpr bool is_nested = !std::is_arithmetic_v<T> && !std::is_same_v<T, std::string> &&
                                               !std::is_same_v<T, std::vector<double>> &&
                                               !std::is_same_v<T, std::map<std::string, double>>;

}  // namespace detail

struct JsonReader {
  const json& j;
  std::string where;
  std::set<std::string> known;

  template <class T> void operator()(const char* key, T& val) {
    known.insert(key);
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    const std::string path = where.empty() ? key : where + "." + key;
    if constexpr (detail::is_nested<T>) {
      if (!v.is_object()) throw ConfigError(path + " must be an object");
      JsonReader sub{v, path, {}};
      visit(sub, val);
      sub.finish();
    } else {
      bool ok;
      if constexpr (std::is_same_v<T, bool>) ok = v.is_boolean();
      else if constexpr (std::is_integral_v<T>) ok = v.is_number_integer() && (std::is_signed_v<T> || v.get<long long>() >= 0);
      else if constexpr (std::is_floating_point_v<T>) ok = v.is_number();
      else if constexpr (std::is_same_v<T, std::string>) ok = v.is_string();
      else ok = v.is_array() || v.is_object();
      if (!ok) throw ConfigError(path + " must be of type " + detail::type_name<T>());
      try {
        val = v.get<T>();
      } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
      }
    }
  }

  void finish() const {
    for (auto& [k, _] : j.items())
      if (!known.count(k)) throw ConfigError("unknown key '" + (where.empty() ? k : where + "." + k) + "'");
  }
};

struct JsonWriter {
  json j = json::object();
  template <class T> void operator()(const char* key, T& val) {
    if constexpr (detail::is_nested<T>) {
      JsonWriter sub;
      visit(sub, val);
      j[key] = sub.j;
    } else {
      j[key] = val;
    }
  }
};

struct SchemaWriter {
  json j = json::object();
  template <class T> void operator()(const char* key, T& val) {
    if constexpr (detail::is_nested<T>) {
      SchemaWriter sub;
      visit(sub, val);
      j[key] = {{"type", "object"}, {"properties", sub.j}};
    } else {
      j[key] = {{"type", detail::type_name<T>()}, {"default", val}};
    }
  }
};

template <class T> T from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  T c{};
  JsonReader r{j, "", {}};
  visit(r, c);
  r.finish();
  return c;
}

template <class T> json to_json(T c) {
  JsonWriter w;
  visit(w, c);
  return w.j;
}

template <class T> json schema_of() {
  T c{};
  SchemaWriter s;
  visit(s, c);
  return {{"type", "object"}, {"additionalProperties", false}, {"properties", s.j}};
}

inline json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// FNV-1a over the canonical (sorted-key) dump
inline std::string config_hash(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mpw
