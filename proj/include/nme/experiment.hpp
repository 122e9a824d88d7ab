#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "nme/bounds.hpp"
#include "nme/equation.hpp"

namespace nme {

enum class ExampleId { table1, table2, table3 };

const char* to_string(ExampleId id);

inline constexpr std::uint64_t kDefaultSeed = 20180145;

/// Standard-normal variates from std::mt19937_64 via the Box–Muller
/// transform. Both pieces are fully specified, so a seed gives the same
/// stream on every platform.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  double uniform_open();  // (0, 1]
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// SplitMix64 finaliser; used to derive independent per-(example, j) seeds.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, ExampleId id, int j);

/// Real r×c matrix with standard-normal entries, filled row by row.
CMatrix gaussian_matrix(GaussianStream& rng, std::size_t rows, std::size_t cols);

struct ExampleCase {
  EquationInstance instance;
  Perturbation perturbation;
  HermitianView x_l;                      // the constructed maximal solution
  std::optional<HermitianView> x_tilde;  // constructed perturbed solution (tables 1, 2)
};

/// Builds the instance and perturbation of one worked example at index j.
/// Q is always X_L + A*X̂_L⁻¹A for the printed X_L; for tables 1 and 2 the
/// perturbation of Q is chosen so that the printed X̃_L solves exactly.
ExampleCase gen_example(ExampleId id, int j, std::uint64_t seed = kDefaultSeed);

enum class OutputFormat { csv, json, text };

struct ExperimentConfig {
  ExampleId example = ExampleId::table1;
  std::vector<int> j_values;  // empty → the example's default sweep
  std::uint64_t seed = kDefaultSeed;
  std::vector<NormKind> norms{NormKind::spectral, NormKind::frobenius};
  std::vector<std::string> p_choices{"id", "sqrtQ", "p1"};
  bool konppa11 = true;
  bool yinwf14 = true;
  bool hasb17 = true;
  bool serr = true;
  double tol = 1e-14;
  std::size_t max_iter = 1'000'000;
  OutputFormat format = OutputFormat::text;
};

std::vector<int> default_j_values(ExampleId id);

/// Requested ratio columns in output order.
std::vector<std::string> table_columns(const ExperimentConfig& config);

struct TableRow {
  int j = 0;
  std::optional<double> actual_spec;
  std::optional<double> actual_frob;
  /// (column, ratio); nullopt marks an inapplicable bound.
  std::vector<std::pair<std::string, std::optional<double>>> ratios;
  std::optional<std::string> error;

  std::optional<double> ratio(const std::string& column) const;
};

struct TableResult {
  std::string example;
  std::uint64_t seed = kDefaultSeed;
  std::vector<std::string> columns;
  std::vector<TableRow> rows;
};

/// One row per j, in ascending j. A solver failure annotates its row and the
/// run continues.
TableResult run_table(const ExperimentConfig& config);

std::string emit(const TableResult& table, OutputFormat format);

/// Inverse of emit(…, OutputFormat::json).
TableResult parse_table_json(const std::string& text);

}  // namespace nme
