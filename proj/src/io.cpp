#include "nme/io.hpp"

#include <fstream>

namespace nme {

using json = nlohmann::json;

namespace {

Complex entry_from_json(const json& e, const std::string& what) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return {e[0].get<double>(), e[1].get<double>()};
  throw InputError(what + ": entry must be a number or an [re, im] pair");
}

std::size_t size_field(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<long long>() < 1)
    throw InputError(std::string("instance: \"") + key + "\" must be a positive integer");
  return j[key].get<std::size_t>();
}

void expect_square(const CMatrix& m, std::size_t n, const std::string& what) {
  if (m.rows() != n || m.cols() != n)
    throw InputError(what + ": expected " + std::to_string(n) + "x" + std::to_string(n) +
                     ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

HermitianView hermitian_from(const CMatrix& m, const std::string& what) {
  try {
    return HermitianView(m);
  } catch (const std::invalid_argument&) {
    throw InputError(what + ": matrix is not Hermitian");
  }
}

}  // namespace

CMatrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty())
    throw InputError(what + ": expected a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  CMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw InputError(what + ": row " + std::to_string(r) + " has the wrong length");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = entry_from_json(j[r][c], what);
  }
  if (!m.all_finite()) throw InputError(what + ": non-finite entry");
  return m;
}

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

EquationInstance instance_from_json(const json& j) {
  if (!j.is_object()) throw InputError("instance: expected a JSON object");
  const std::size_t m = size_field(j, "m");
  const std::size_t n = size_field(j, "n");
  if (!j.contains("Q")) throw InputError("instance: missing \"Q\"");
  if (!j.contains("A") || !j["A"].is_array()) throw InputError("instance: missing \"A\" array");
  if (j["A"].size() != m)
    throw InputError("instance: \"A\" has " + std::to_string(j["A"].size()) + " blocks, m = " +
                     std::to_string(m));
  const CMatrix q = matrix_from_json(j["Q"], "Q");
  expect_square(q, n, "Q");
  std::vector<CMatrix> blocks;
  for (std::size_t i = 0; i < m; ++i) {
    const std::string name = "A" + std::to_string(i + 1);
    blocks.push_back(matrix_from_json(j["A"][i], name));
    expect_square(blocks.back(), n, name);
  }
  try {
    return EquationInstance(std::move(blocks), hermitian_from(q, "Q"));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

json instance_to_json(const EquationInstance& inst) {
  json j;
  j["m"] = inst.m();
  j["n"] = inst.n();
  j["Q"] = matrix_to_json(inst.q().matrix());
  j["A"] = json::array();
  for (const auto& a : inst.blocks()) j["A"].push_back(matrix_to_json(a));
  return j;
}

Perturbation perturbation_from_json(const json& j, const EquationInstance& inst) {
  if (!j.is_object()) throw InputError("perturbation: expected a JSON object");
  if (!j.contains("dA") || !j["dA"].is_array())
    throw InputError("perturbation: missing \"dA\" array");
  if (j["dA"].size() != inst.m())
    throw InputError("perturbation: \"dA\" has " + std::to_string(j["dA"].size()) +
                     " blocks, instance has " + std::to_string(inst.m()));
  std::vector<CMatrix> d_blocks;
  for (std::size_t i = 0; i < inst.m(); ++i) {
    const std::string name = "dA" + std::to_string(i + 1);
    d_blocks.push_back(matrix_from_json(j["dA"][i], name));
    expect_square(d_blocks.back(), inst.n(), name);
  }
  CMatrix d_q(inst.n(), inst.n());
  if (j.contains("dQ")) {
    d_q = matrix_from_json(j["dQ"], "dQ");
    expect_square(d_q, inst.n(), "dQ");
  }
  return Perturbation{std::move(d_blocks), hermitian_from(d_q, "dQ")};
}

json perturbation_to_json(const Perturbation& pert) {
  json j;
  j["dA"] = json::array();
  for (const auto& a : pert.d_blocks) j["dA"].push_back(matrix_to_json(a));
  j["dQ"] = matrix_to_json(pert.d_q.matrix());
  return j;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace nme
