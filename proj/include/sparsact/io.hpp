#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sparsact/mm_solver.hpp"
#include "sparsact/selection.hpp"
#include "sparsact/types.hpp"

namespace sparsact {

/// Thrown on malformed problem files; the message names the offending
/// field.
class ProblemFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProblemFile {
  std::string kind;  // "actuator", "completion", or "sensor"
  PlantModel model;
  std::optional<CompletionData> data;
};

/// Canonical JSON text: sorted keys, matrices as nested [re, im] pairs,
/// masks as 0/1 integers. serialize(parse(serialize(p))) is
/// byte-identical.
std::string serialize_problem(const ProblemFile& problem);
ProblemFile parse_problem(const std::string& text);

ProblemFile read_problem(const std::filesystem::path& path);
void write_problem(const std::filesystem::path& path,
                   const ProblemFile& problem);

/// Writes text to path atomically (temp file in the same directory,
/// then rename).
void atomic_write(const std::filesystem::path& path, const std::string& text);

// CSV emitters. Headers are fixed; columns never reorder.
std::string sweep_csv(const std::vector<SelectionResult>& results);
std::string iteration_csv(const std::vector<IterationRecord>& history);
std::string outer_csv(const std::vector<MmOuterRecord>& history);
std::string greedy_csv(const GreedyTrace& trace);

/// Final solver matrices as canonical JSON.
std::string solution_json(const CMatrix& X, const CMatrix& Y, const CMatrix& K);

}  // namespace sparsact
