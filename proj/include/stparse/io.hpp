#pragma once
// JSON interchange for datasets, models, solutions, scenario scripts, and
// evaluation reports. Serialization is canonical — object keys sorted,
// shortest round-trip number text, two-space indent, trailing newline — so
// saving what was loaded reproduces the bytes. Loading validates the schema
// and every domain invariant; unknown fields are rejected by JSON path.
#include <string>

#include "stparse/core.hpp"
#include "stparse/likelihood.hpp"
#include "stparse/metrics.hpp"
#include "stparse/model.hpp"
#include "stparse/synth.hpp"

namespace stparse {

std::string dataset_to_json(const Dataset& dataset);
Dataset dataset_from_json(const std::string& text);

std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);

// Solutions reference the dataset they were inferred on (member ids, events).
std::string solution_to_json(const Solution& solution, const EnergyBreakdown& breakdown,
                             const Dataset& dataset);
struct LoadedSolution {
  Solution solution;
  EnergyBreakdown breakdown;
};
LoadedSolution solution_from_json(const std::string& text, const Dataset& dataset);

std::string scenario_to_json(const ScenarioScript& script);
ScenarioScript scenario_from_json(const std::string& text);

std::string eval_report_to_json(const EvalReport& report, const LabelVocabulary& vocabulary);
// Aligned human-readable table of the same report.
std::string eval_report_table(const EvalReport& report, const LabelVocabulary& vocabulary);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& dataset, const std::string& path);
Model load_model(const std::string& path);
void save_model(const Model& model, const std::string& path);
LoadedSolution load_solution(const std::string& path, const Dataset& dataset);
void save_solution(const Solution& solution, const EnergyBreakdown& breakdown,
                   const Dataset& dataset, const std::string& path);
ScenarioScript load_scenario(const std::string& path);
void save_scenario(const ScenarioScript& script, const std::string& path);

}  // namespace stparse
