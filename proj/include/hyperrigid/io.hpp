#pragma once

// JSON instance files, verdict records and witness certificates. Every exact
// number travels as a rational string ("p" or "p/q").

#include "hyperrigid/fock_witness.hpp"
#include "hyperrigid/topograph.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace hyperrigid::io {

using nlohmann::json;
using nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

namespace detail {

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw MalformedInput(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw MalformedInput(where + ": missing field '" + key + "'");
  return *it;
}

inline std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) throw MalformedInput(where + ": expected a string");
  return j.get<std::string>();
}

inline Rational rational(const json& j, const std::string& where) {
  return parse_rational(text(j, where));
}

inline Count count(const json& j, const std::string& where) {
  if (j.is_string() && j.get<std::string>() == "omega") return Count::omega();
  if (j.is_number_unsigned() || (j.is_number_integer() && j.get<long long>() >= 0))
    return Count::finite(j.get<std::uint64_t>());
  throw MalformedInput(where + ": expected a non-negative integer or \"omega\"");
}

inline ordered_json count_json(const Count& c) { return c.is_omega() ? ordered_json("omega") : ordered_json(c.value()); }

inline Bound bound(const json& j, const std::string& where) {
  std::string s = text(j, where);
  if (s == "-inf") return Bound::neg_inf();
  if (s == "inf" || s == "+inf") return Bound::pos_inf();
  return Bound::at(parse_rational(s));
}

inline std::string bound_text(const Bound& b) {
  switch (b.kind) {
    case Bound::Kind::NegInf: return "-inf";
    case Bound::Kind::PosInf: return "inf";
    default: return to_string(b.value);
  }
}

inline bool closed_flag(const json& j, const std::string& where) {
  std::string s = text(j, where);
  if (s == "closed") return true;
  if (s == "open") return false;
  throw MalformedInput(where + ": endpoint flag must be \"open\" or \"closed\"");
}

// ["lo", "hi", "closed"|"open", "closed"|"open"]
inline Interval interval(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) throw MalformedInput(where + ": interval must be [lo, hi, flag, flag]");
  return Interval::make(bound(j[0], where), bound(j[1], where), closed_flag(j[2], where), closed_flag(j[3], where));
}

inline ordered_json interval_json(const Interval& iv) {
  return ordered_json::array({bound_text(iv.lo), bound_text(iv.hi), iv.lo_closed ? "closed" : "open",
                      iv.hi_closed ? "closed" : "open"});
}

inline IntervalSet interval_set(const json& j, const std::string& where) {
  if (!j.is_array()) throw MalformedInput(where + ": expected a list of intervals");
  std::vector<Interval> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(interval(j[i], where + "[" + std::to_string(i) + "]"));
  return IntervalSet::normalize(out);
}

inline PiecewiseAffineMap affine_map(const json& j, const IntervalSet& source, const IntervalSet& target,
                                     const std::string& where) {
  const json& pieces = field(j, "pieces", where);
  if (!pieces.is_array() || pieces.empty()) throw MalformedInput(where + ": 'pieces' must be a non-empty list");
  std::vector<AffinePiece> out;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    std::string w = where + ".pieces[" + std::to_string(i) + "]";
    out.push_back({interval(field(pieces[i], "dom", w), w), rational(field(pieces[i], "slope", w), w),
                   rational(field(pieces[i], "offset", w), w)});
  }
  return PiecewiseAffineMap::make(std::move(out), source, target);
}

inline ordered_json gaussian_json(const Gaussian& z) { return ordered_json::array({to_string(z.re), to_string(z.im)}); }

inline Gaussian gaussian(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw MalformedInput(where + ": expected [re, im]");
  return {rational(j[0], where), rational(j[1], where)};
}

inline ordered_json vector_json(const SparseVec& v) {
  ordered_json out = ordered_json::array();
  for (const auto& [i, z] : v) out.push_back(ordered_json::array({i, to_string(z.re), to_string(z.im)}));
  return out;
}

inline SparseVec vector_from(const json& j, const std::string& where) {
  if (!j.is_array()) throw MalformedInput(where + ": expected a sparse vector");
  SparseVec v;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_number_unsigned())
      throw MalformedInput(where + ": sparse entry must be [index, re, im]");
    v[e[0].get<std::size_t>()] = Gaussian(rational(e[1], where), rational(e[2], where));
  }
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Instances.

inline DiscreteGraphPresentation parse_discrete(const json& j) {
  const json& vs = detail::field(j, "vertices", "instance");
  const json& es = detail::field(j, "edges", "instance");
  if (!vs.is_array() || !es.is_array()) throw MalformedInput("instance: 'vertices' and 'edges' must be lists");
  std::vector<VertexClass> vertices;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    std::string w = "vertices[" + std::to_string(i) + "]";
    vertices.push_back({detail::text(detail::field(vs[i], "name", w), w), detail::count(detail::field(vs[i], "count", w), w)});
  }
  std::vector<EdgeSpec> edges;
  for (std::size_t i = 0; i < es.size(); ++i) {
    std::string w = "edges[" + std::to_string(i) + "]";
    const json& e = es[i];
    Count mult = e.contains("mult") ? detail::count(e["mult"], w) : Count::finite(1);
    if (mult.is_zero()) throw MalformedInput(w + ": multiplicity 0");
    edges.push_back({detail::text(detail::field(e, "name", w), w), detail::text(detail::field(e, "source", w), w),
                     detail::text(detail::field(e, "range", w), w), mult});
  }
  return DiscreteGraphPresentation::make(std::move(vertices), std::move(edges));
}

inline IntervalGraphPresentation parse_interval(const json& j) {
  IntervalSet g0 = detail::interval_set(detail::field(j, "G0", "instance"), "G0");
  IntervalSet g1 = detail::interval_set(detail::field(j, "G1", "instance"), "G1");
  auto r = detail::affine_map(detail::field(j, "r", "instance"), g1, g0, "r");
  auto s = detail::affine_map(detail::field(j, "s", "instance"), g1, g0, "s");
  return IntervalGraphPresentation::make(std::move(g0), std::move(g1), std::move(r), std::move(s));
}

/// Validates the document shape, then builds the presentation.
inline GraphPresentation parse_instance(const json& j) {
  if (!j.is_object()) throw MalformedInput("instance: top level must be an object");
  if (j.contains("version")) {
    if (!j["version"].is_number_integer() || j["version"].get<int>() != kSchemaVersion)
      throw MalformedInput("instance: unsupported schema version");
  }
  std::string kind = detail::text(detail::field(j, "kind", "instance"), "kind");
  if (kind == "discrete") return parse_discrete(j);
  if (kind == "interval") return parse_interval(j);
  throw MalformedInput("instance: unknown kind '" + kind + "'");
}

inline GraphPresentation parse_instance_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw MalformedInput(std::string("not valid JSON: ") + e.what());
  }
  return parse_instance(j);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedInput("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline GraphPresentation read_instance(const std::string& path) { return parse_instance_text(read_file(path)); }

inline ordered_json instance_json(const DiscreteGraphPresentation& g) {
  ordered_json j;
  j["version"] = kSchemaVersion;
  j["kind"] = "discrete";
  j["vertices"] = ordered_json::array();
  for (const auto& v : g.atoms().classes()) j["vertices"].push_back({{"name", v.name}, {"count", detail::count_json(v.count)}});
  j["edges"] = ordered_json::array();
  for (const auto& e : g.edges())
    j["edges"].push_back(
        {{"name", e.name}, {"source", e.source}, {"range", e.range}, {"mult", detail::count_json(e.mult)}});
  return j;
}

inline ordered_json instance_json(const IntervalGraphPresentation& g) {
  auto set_json = [](const IntervalSet& s) {
    ordered_json a = ordered_json::array();
    for (const auto& iv : s.pieces()) a.push_back(detail::interval_json(iv));
    return a;
  };
  auto map_json = [](const PiecewiseAffineMap& f) {
    ordered_json pieces = ordered_json::array();
    for (const auto& p : f.pieces())
      pieces.push_back({{"dom", detail::interval_json(p.domain)}, {"slope", to_string(p.slope)}, {"offset", to_string(p.offset)}});
    return ordered_json{{"pieces", pieces}};
  };
  ordered_json j;
  j["version"] = kSchemaVersion;
  j["kind"] = "interval";
  j["G0"] = set_json(g.g0());
  j["G1"] = set_json(g.g1());
  j["r"] = map_json(g.r());
  j["s"] = map_json(g.s());
  return j;
}

inline ordered_json instance_json(const GraphPresentation& g) {
  return std::visit([](const auto& x) { return instance_json(x); }, g);
}

// ---------------------------------------------------------------------------
// Verdicts.

inline ordered_json routes_json(const Routes& r) {
  ordered_json j;
  j["nondegeneracy"] = r.nondegeneracy ? ordered_json(*r.nondegeneracy) : ordered_json(nullptr);
  j["proper"] = r.proper;
  j["range_inclusion"] = r.range_inclusion;
  j["range_condition"] = r.range_condition();
  j["reg_preimage"] = r.reg_preimage;
  j["row_finite"] = r.row_finite ? ordered_json(*r.row_finite) : ordered_json(nullptr);
  return j;
}

inline Routes routes_from(const json& j) {
  Routes r;
  auto opt = [&](const char* k) -> std::optional<bool> {
    const json& v = detail::field(j, k, "routes");
    if (v.is_null()) return std::nullopt;
    if (!v.is_boolean()) throw MalformedInput(std::string("routes: '") + k + "' must be boolean or null");
    return v.get<bool>();
  };
  auto req = [&](const char* k) {
    auto v = opt(k);
    if (!v) throw MalformedInput(std::string("routes: '") + k + "' must be boolean");
    return *v;
  };
  r.nondegeneracy = opt("nondegeneracy");
  r.proper = req("proper");
  r.range_inclusion = req("range_inclusion");
  r.reg_preimage = req("reg_preimage");
  r.row_finite = opt("row_finite");
  if (req("range_condition") != r.range_condition()) throw MalformedInput("routes: inconsistent range_condition");
  return r;
}

inline ordered_json verdict_json(const Verdict& v) {
  ordered_json j;
  j["hyperrigid"] = v.hyperrigid;
  j["certificate_kind"] = v.certificate_kind;
  j["routes"] = routes_json(v.routes);
  j["statement"] = v.statement;
  if (v.witness) {
    const auto& w = *v.witness;
    j["witness"] = {{"edge", w.edge},
                    {"vertex", w.vertex},
                    {"fiber_size", w.fiber_size},
                    {"norm2", to_string(w.norm2)},
                    {"pairing_max", to_string(w.pairing_max)},
                    {"witness_finite", w.witness_finite}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

inline Verdict verdict_from(const json& j) {
  Verdict v;
  const json& h = detail::field(j, "hyperrigid", "verdict");
  if (!h.is_boolean()) throw MalformedInput("verdict: 'hyperrigid' must be boolean");
  v.hyperrigid = h.get<bool>();
  v.certificate_kind = detail::text(detail::field(j, "certificate_kind", "verdict"), "certificate_kind");
  v.routes = routes_from(detail::field(j, "routes", "verdict"));
  v.statement = detail::text(detail::field(j, "statement", "verdict"), "statement");
  const json& w = detail::field(j, "witness", "verdict");
  if (!w.is_null()) {
    WitnessHandle h2;
    h2.edge = detail::text(detail::field(w, "edge", "witness"), "edge");
    h2.vertex = detail::text(detail::field(w, "vertex", "witness"), "vertex");
    h2.fiber_size = detail::field(w, "fiber_size", "witness").get<std::size_t>();
    h2.norm2 = detail::rational(detail::field(w, "norm2", "witness"), "norm2");
    h2.pairing_max = detail::rational(detail::field(w, "pairing_max", "witness"), "pairing_max");
    h2.witness_finite = detail::field(w, "witness_finite", "witness").get<bool>();
    v.witness = h2;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Witness certificates.

inline ordered_json certificate_json(const WitnessCertificate& c) {
  ordered_json j;
  j["instance"] = c.instance;
  j["witness_edge"] = c.witness_edge;
  j["sigma"] = c.sigma;
  j["depth"] = c.depth;
  j["levels"] = c.levels;
  ordered_json gram = ordered_json::array();
  for (const auto& level : c.gram) {
    ordered_json l = ordered_json::array();
    for (const auto& [i, k, z] : level) l.push_back({i, k, to_string(z.re), to_string(z.im)});
    gram.push_back(l);
  }
  j["gram"] = gram;
  ordered_json m0 = ordered_json::array();
  for (const auto& v : c.m0) m0.push_back(detail::vector_json(v));
  j["m0"] = m0;
  ordered_json m = ordered_json::array();
  for (const auto& level : c.m) {
    ordered_json l = ordered_json::array();
    for (const auto& v : level) l.push_back(detail::vector_json(v));
    m.push_back(l);
  }
  j["m"] = m;
  ordered_json res;
  for (const auto& [name, v] : c.residuals) res[name] = to_string(v);
  j["residuals"] = res;
  j["non_reducing"] = {{"vacuum", c.non_reducing.vacuum},
                       {"edge", c.non_reducing.edge},
                       {"projection_norm2", to_string(c.non_reducing.projection_norm2)}};
  return j;
}

inline WitnessCertificate certificate_from(const json& j) {
  const std::string w = "certificate";
  WitnessCertificate c;
  try {
    c.instance = detail::text(detail::field(j, "instance", w), "instance");
    c.witness_edge = detail::text(detail::field(j, "witness_edge", w), "witness_edge");
    c.sigma = detail::field(j, "sigma", w).get<std::vector<std::string>>();
    c.depth = detail::field(j, "depth", w).get<std::size_t>();
    c.levels = detail::field(j, "levels", w).get<std::vector<std::vector<std::string>>>();
    for (const auto& level : detail::field(j, "gram", w)) {
      std::vector<std::tuple<std::size_t, std::size_t, Gaussian>> l;
      for (const auto& e : level) {
        if (!e.is_array() || e.size() != 4) throw MalformedInput("gram entry must be [i, j, re, im]");
        l.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>(),
                       Gaussian(detail::rational(e[2], "gram"), detail::rational(e[3], "gram")));
      }
      c.gram.push_back(std::move(l));
    }
    for (const auto& v : detail::field(j, "m0", w)) c.m0.push_back(detail::vector_from(v, "m0"));
    for (const auto& level : detail::field(j, "m", w)) {
      std::vector<SparseVec> l;
      for (const auto& v : level) l.push_back(detail::vector_from(v, "m"));
      c.m.push_back(std::move(l));
    }
    const json& res = detail::field(j, "residuals", w);
    if (!res.is_object()) throw MalformedInput("residuals must be an object");
    for (const auto& [name, v] : res.items()) c.residuals[name] = detail::rational(v, "residuals." + name);
    const json& nr = detail::field(j, "non_reducing", w);
    c.non_reducing.vacuum = detail::field(nr, "vacuum", "non_reducing").get<std::size_t>();
    c.non_reducing.edge = detail::text(detail::field(nr, "edge", "non_reducing"), "edge");
    c.non_reducing.projection_norm2 =
        detail::rational(detail::field(nr, "projection_norm2", "non_reducing"), "projection_norm2");
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("certificate: ") + e.what());
  }
  return c;
}

/// First field where a claimed certificate differs from an independent
/// rebuild, or where a claimed residual is not exactly zero.
inline std::optional<std::string> first_mismatch(const WitnessCertificate& claimed, const WitnessCertificate& rebuilt) {
  if (claimed.instance != rebuilt.instance) return "instance";
  if (claimed.witness_edge != rebuilt.witness_edge) return "witness_edge";
  if (claimed.sigma != rebuilt.sigma) return "sigma";
  if (claimed.depth != rebuilt.depth) return "depth";
  if (claimed.levels != rebuilt.levels) return "levels";
  if (claimed.gram != rebuilt.gram) return "gram";
  if (claimed.m0 != rebuilt.m0) return "m0";
  if (claimed.m != rebuilt.m) return "m";
  for (const auto& [name, v] : rebuilt.residuals) {
    auto it = claimed.residuals.find(name);
    if (it == claimed.residuals.end() || it->second != v) return "residual:" + name;
  }
  if (claimed.residuals.size() != rebuilt.residuals.size()) return "residuals";
  if (claimed.non_reducing.vacuum != rebuilt.non_reducing.vacuum || claimed.non_reducing.edge != rebuilt.non_reducing.edge ||
      claimed.non_reducing.projection_norm2 != rebuilt.non_reducing.projection_norm2)
    return "non_reducing";
  if (auto bad = rebuilt.first_nonzero()) return "residual:" + *bad;
  return std::nullopt;
}

/// Witness pipeline for either kind of instance.
inline WitnessCertificate witness_for(const GraphPresentation& g, std::size_t depth, std::size_t budget) {
  WitnessCertificate cert;
  if (const auto* d = std::get_if<DiscreteGraphPresentation>(&g))
    cert = discrete_witness(build_correspondence(*d), depth, budget);
  else
    cert = interval_witness(std::get<IntervalGraphPresentation>(g), depth, budget);
  cert.instance = instance_json(g).dump();
  return cert;
}

}  // namespace hyperrigid::io
