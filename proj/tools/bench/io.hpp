#pragma once

// JSON file schemas for graphs, constraints, joint tables, marginals, SCMs and
// fitted models, plus the dataset CSV layout. Configuration keys are bitstrings
// whose character k is the value of the k-th variable of the constraint scope
// (variables sorted by index).

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "icmaxent/errors.hpp"
#include "icmaxent/solver.hpp"
#include "icmaxent/synth.hpp"
#include "icmaxent/types.hpp"

namespace icmaxent::io {

/// Malformed file: carries the file name and the JSON path (or line) of the problem.
class SchemaError : public Error {
 public:
  using Error::Error;
};

struct GraphFile {
  std::vector<std::string> cause_names;
  GraphSpec graph;
};

struct ConstraintFile {
  std::size_t n_causes = 0;
  std::vector<ConstraintSpec> constraints;
};

struct ModelFile {
  std::size_t n_causes = 0;
  std::vector<ConstraintSpec> constraints;
  MultiplierVector lambda;
  std::vector<double> beta;
  FitReport report;
};

nlohmann::json graph_to_json(const GraphFile& g);
GraphFile graph_from_json(const nlohmann::json& j);

nlohmann::json constraint_to_json(const ConstraintSpec& c);
ConstraintSpec constraint_from_json(const nlohmann::json& j, std::size_t n_causes);
nlohmann::json constraints_to_json(const ConstraintFile& f);
ConstraintFile constraints_from_json(const nlohmann::json& j);

nlohmann::json joint_to_json(const JointTable& p);
JointTable joint_from_json(const nlohmann::json& j);

nlohmann::json marginals_to_json(const std::vector<double>& m);
std::vector<double> marginals_from_json(const nlohmann::json& j);

nlohmann::json scm_to_json(const ScmInstance& scm);
ScmInstance scm_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const FitResult& fit);
ModelFile model_from_json(const nlohmann::json& j);

/// Reads and parses a JSON file; syntax errors report line and column.
nlohmann::json read_json(const std::filesystem::path& path);
/// Pretty-printed (2-space indent) with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Loads `path` and applies `parse`, prefixing schema errors with the file name.
template <typename Parse>
auto load(const std::filesystem::path& path, Parse&& parse) {
  const auto j = read_json(path);
  try {
    return parse(j);
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

/// Optional first line "# intervention: X2=1,X4=0", then a header X1..XD,Y, then rows.
void write_dataset_csv(std::ostream& os, const Dataset& ds);
Dataset read_dataset_csv(std::istream& is, const std::string& name = "<dataset>");
void write_dataset_csv(const std::filesystem::path& path, const Dataset& ds);
Dataset read_dataset_csv(const std::filesystem::path& path);

}  // namespace icmaxent::io
