#include "wold/serialization.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace wold {

Json matrix_to_json(const Matrix& m, bool imaginary) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(imaginary ? m(i, j).imag() : m(i, j).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

Matrix matrix_from_json(const Json& re, const Json* im, Index d, const std::string& where) {
  Matrix m = Matrix::Zero(d, d);
  auto fill = [&](const Json& src, bool imag, const std::string& path) {
    if (!src.is_array() || static_cast<Index>(src.size()) != d) throw ConfigError(path, "expected a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
    for (Index i = 0; i < d; ++i) {
      const Json& row = src[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Index>(row.size()) != d)
        throw ConfigError(path + "/" + std::to_string(i), "row has the wrong length");
      for (Index j = 0; j < d; ++j) {
        const Json& v = row[static_cast<std::size_t>(j)];
        if (!v.is_number()) throw ConfigError(path + "/" + std::to_string(i) + "/" + std::to_string(j), "not a number");
        if (imag)
          m(i, j) += Complex(0, v.get<Real>());
        else
          m(i, j) += Complex(v.get<Real>(), 0);
      }
    }
  };
  fill(re, false, where + "_re");
  if (im) fill(*im, true, where + "_im");
  return m;
}

// Scalars may be written as plain numbers when dim == 1.
const Json& as_matrix(const Json& v, Json& storage) {
  if (v.is_number()) {
    storage = Json::array({Json::array({v})});
    return storage;
  }
  return v;
}

}  // namespace

Json measure_to_json(const CircleMeasure& mu) {
  Json j;
  j["dim"] = mu.dim();
  Json atoms = Json::array();
  for (const auto& a : mu.atoms())
    atoms.push_back({{"angle", a.angle}, {"weight_re", matrix_to_json(a.weight, false)},
                     {"weight_im", matrix_to_json(a.weight, true)}});
  j["atoms"] = std::move(atoms);
  j["density_re"] = matrix_to_json(mu.density(), false);
  j["density_im"] = matrix_to_json(mu.density(), true);
  return j;
}

CircleMeasure measure_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "measure must be an object");
  if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<long long>() < 0)
    throw ConfigError(where + "/dim", "missing or not a non-negative integer");
  const Index d = j["dim"].get<Index>();
  std::vector<Atom> atoms;
  if (j.contains("atoms")) {
    if (!j["atoms"].is_array()) throw ConfigError(where + "/atoms", "must be an array");
    for (std::size_t i = 0; i < j["atoms"].size(); ++i) {
      const Json& a = j["atoms"][i];
      const std::string p = where + "/atoms/" + std::to_string(i);
      if (!a.is_object() || !a.contains("angle") || !a["angle"].is_number())
        throw ConfigError(p + "/angle", "missing or not a number");
      if (!a.contains("weight_re")) throw ConfigError(p + "/weight_re", "missing");
      Json s1, s2;
      const Json& re = as_matrix(a["weight_re"], s1);
      const Json* im = a.contains("weight_im") ? &as_matrix(a["weight_im"], s2) : nullptr;
      atoms.push_back(Atom{a["angle"].get<Real>(), matrix_from_json(re, im, d, p + "/weight")});
    }
  }
  Matrix density = Matrix::Zero(d, d);
  if (j.contains("density_re")) {
    Json s1, s2;
    const Json& re = as_matrix(j["density_re"], s1);
    const Json* im = j.contains("density_im") ? &as_matrix(j["density_im"], s2) : nullptr;
    density = matrix_from_json(re, im, d, where + "/density");
  }
  try {
    return CircleMeasure(d, std::move(atoms), std::move(density));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where, e.what());
  }
}

Json space_metadata(const GradedPolySpace& space) {
  return {{"caps", {space.caps().n1, space.caps().n2}},
          {"dim", space.dim()},
          {"size", space.size()},
          {"mu1", digest(measure_to_json(space.mu1()))},
          {"mu2", digest(measure_to_json(space.mu2()))}};
}

Json residuals_to_json(const ResidualTable& r) {
  Json j = Json::object();
  for (const auto& [name, value] : r.entries()) j[name] = value;
  return j;
}

Json decomposition_to_json(const SingleWold& w) {
  return {{"dims", {{"h0", w.h0.dim()}, {"h1", w.h1.dim()}, {"wandering", w.wandering.dim()}}},
          {"residuals", residuals_to_json(w.residuals)},
          {"extracted", measure_to_json(w.extracted)}};
}

Json decomposition_to_json(const QuadrupleDecomposition& q) {
  return {{"dims", {{"h00", q.h00.dim()}, {"h10", q.h10.dim()}, {"h01", q.h01.dim()}, {"h11", q.h11.dim()}}},
          {"wandering_dims", {{"e10", q.e10.dim()}, {"e01", q.e01.dim()}, {"e", q.e.dim()}}},
          {"residuals", residuals_to_json(q.residuals)},
          {"measures",
           {{"nu1", measure_to_json(q.nu1)},
            {"nu2", measure_to_json(q.nu2)},
            {"eta1", measure_to_json(q.eta1)},
            {"eta2", measure_to_json(q.eta2)}}}};
}

Json equivalence_to_json(const Equivalence& e) {
  Json j{{"verdict", to_string(e.verdict)}, {"discrepancy", e.discrepancy}};
  if (e.unitary) j["unitary"] = {{"re", matrix_to_json(*e.unitary, false)}, {"im", matrix_to_json(*e.unitary, true)}};
  return j;
}

Json instance_spec_to_json(const InstanceSpec& spec) {
  Json measures = Json::array();
  for (const auto& m : spec.measures) measures.push_back(measure_to_json(m));
  return {{"name", spec.name},     {"kind", spec.kind},     {"measures", measures},
          {"caps", spec.caps},     {"unitary_dims", spec.unitary_dims}, {"seed", spec.seed}};
}

InstanceSpec instance_spec_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "instance must be an object");
  InstanceSpec s;
  if (!j.contains("name") || !j["name"].is_string()) throw ConfigError(where + "/name", "missing or not a string");
  s.name = j["name"].get<std::string>();
  if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError(where + "/kind", "missing or not a string");
  s.kind = j["kind"].get<std::string>();
  static const char* kinds[] = {"shift1v", "pair2v", "direct_sum", "scrambled"};
  if (std::find(std::begin(kinds), std::end(kinds), s.kind) == std::end(kinds))
    throw ConfigError(where + "/kind", "unknown kind '" + s.kind + "'");
  if (j.contains("measures")) {
    if (!j["measures"].is_array()) throw ConfigError(where + "/measures", "must be an array");
    for (std::size_t i = 0; i < j["measures"].size(); ++i)
      s.measures.push_back(measure_from_json(j["measures"][i], where + "/measures/" + std::to_string(i)));
  }
  auto int_list = [&](const char* key, auto& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_array()) throw ConfigError(where + "/" + key, "must be an array of integers");
    for (std::size_t i = 0; i < j[key].size(); ++i) {
      if (!j[key][i].is_number_integer())
        throw ConfigError(where + "/" + key + "/" + std::to_string(i), "not an integer");
      out.push_back(j[key][i].template get<typename std::decay_t<decltype(out)>::value_type>());
    }
  };
  int_list("caps", s.caps);
  int_list("unitary_dims", s.unitary_dims);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) throw ConfigError(where + "/seed", "not an integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  return s;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest(const Json& j) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(j.dump());
  return os.str();
}

}  // namespace wold
