#ifndef WOLD_SERIALIZATION_HPP
#define WOLD_SERIALIZATION_HPP

#include <cstdint>
#include <string>

#include <json.hpp>

#include "wold/decomp.hpp"
#include "wold/instances.hpp"

namespace wold {

using Json = nlohmann::ordered_json;

/// Malformed input document; `where` is a JSON-pointer-like path.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& where, const std::string& what)
      : Error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

Json matrix_to_json(const Matrix& m, bool imaginary);
Json measure_to_json(const CircleMeasure& mu);
/// Accepts the measure schema; weight_im / density_im / density_re are optional.
CircleMeasure measure_from_json(const Json& j, const std::string& where = "measure");

Json space_metadata(const GradedPolySpace& space);
Json residuals_to_json(const ResidualTable& r);
Json decomposition_to_json(const SingleWold& w);
Json decomposition_to_json(const QuadrupleDecomposition& q);
Json equivalence_to_json(const Equivalence& e);

Json instance_spec_to_json(const InstanceSpec& spec);
InstanceSpec instance_spec_from_json(const Json& j, const std::string& where = "instance");

/// 64-bit FNV-1a of a string.
std::uint64_t fnv1a(const std::string& bytes);
/// Hex FNV-1a of the compact dump of a JSON value.
std::string digest(const Json& j);

}  // namespace wold

#endif  // WOLD_SERIALIZATION_HPP
