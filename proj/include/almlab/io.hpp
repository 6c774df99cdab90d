#pragma once

#include <string>

#include <json.hpp>

#include "almlab/alm.hpp"
#include "almlab/multipliers.hpp"
#include "almlab/ocp.hpp"
#include "almlab/problem.hpp"

namespace almlab {

using Json = nlohmann::json;

// Fixed-width scientific with 17 significant digits (lossless doubles).
std::string format_sig17(double v);

Json set_to_json(const ConvexSet& set);
ConvexSet set_from_json(const Json& j);

// Only dense and stacked operators have a file representation.
Json operator_to_json(const LinearOperator& op);
LinearOperator operator_from_json(const Json& j);

Json problem_to_json(const ModelProblem& problem);
ModelProblem problem_from_json(const Json& j);

ModelProblem load_problem_file(const std::string& path);

std::string trace_csv_header(std::size_t probe_count);
std::string trace_csv_row(const AlmRecord& rec);
void write_trace_csv(const std::string& path, const AlmTrace& trace);

Json multiplier_report_to_json(const MultiplierReport& report);
Json proper_candidate_to_json(const ProperCandidateAnalysis& analysis);

Json study_rows_to_json(const std::vector<MeshStudyRow>& rows);
std::string study_csv(const std::vector<MeshStudyRow>& rows);

}  // namespace almlab
