#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "nme/bounds.hpp"
#include "nme/equation.hpp"

namespace nme {

/// Malformed or inconsistent input file.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Entries may be [re, im] pairs or bare real numbers.
CMatrix matrix_from_json(const nlohmann::json& j, const std::string& what);
nlohmann::json matrix_to_json(const CMatrix& m);

/// {"m": int, "n": int, "Q": matrix, "A": [block₁, …, block_m]}
EquationInstance instance_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const EquationInstance& inst);

/// {"dA": [block₁, …, block_m], "dQ": matrix}
Perturbation perturbation_from_json(const nlohmann::json& j, const EquationInstance& inst);
nlohmann::json perturbation_to_json(const Perturbation& pert);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace nme
