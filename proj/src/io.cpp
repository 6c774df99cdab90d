#include "almlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace almlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Json bound_to_json(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

double bound_from_json(const Json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw InvalidInputError("unexpected bound string '" + s + "'");
  }
  return j.get<double>();
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(x);
  return out;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidInputError("expected a JSON array of numbers");
  Vector v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(x.get<double>());
  return v;
}

Json bounds_to_json(const Vector& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(bound_to_json(x));
  return out;
}

Vector bounds_from_json(const Json& j) {
  Vector v;
  for (const auto& x : j) v.push_back(bound_from_json(x));
  return v;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty())
    throw InvalidInputError("expected a nonempty JSON array of rows");
  std::vector<Vector> rows;
  for (const auto& r : j) rows.push_back(vector_from_json(r));
  return Matrix::from_rows(rows);
}

}  // namespace

std::string format_sig17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

Json set_to_json(const ConvexSet& set) {
  Json j;
  const auto& node = set.node();
  if (const auto* b = std::get_if<ConvexSet::Box>(&node)) {
    j["type"] = "box";
    j["lo"] = bounds_to_json(b->lo);
    j["hi"] = bounds_to_json(b->hi);
  } else if (const auto* s = std::get_if<ConvexSet::Singleton>(&node)) {
    j["type"] = "singleton";
    j["point"] = vector_to_json(s->point);
  } else if (const auto* h = std::get_if<ConvexSet::Halfspace>(&node)) {
    j["type"] = "halfspace";
    j["normal"] = vector_to_json(h->normal);
    j["offset"] = h->offset;
  } else if (const auto* b = std::get_if<ConvexSet::Ball>(&node)) {
    j["type"] = "ball";
    j["center"] = vector_to_json(b->center);
    j["radius"] = b->radius;
  } else if (const auto* s = std::get_if<ConvexSet::Shifted>(&node)) {
    j["type"] = "shift";
    j["inner"] = set_to_json(*s->inner);
    j["offset"] = vector_to_json(s->offset);
  } else if (const auto* p = std::get_if<ConvexSet::Product>(&node)) {
    j["type"] = "product";
    Json factors = Json::array();
    for (const auto& f : p->factors) factors.push_back(set_to_json(f));
    j["factors"] = std::move(factors);
  } else {
    const auto& inter = std::get<ConvexSet::Intersection>(node);
    j["type"] = "intersection";
    Json members = Json::array();
    for (const auto& m : inter.members) members.push_back(set_to_json(m));
    j["members"] = std::move(members);
  }
  return j;
}

ConvexSet set_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("type"))
    throw InvalidInputError("set: expected an object with a 'type' key");
  const std::string type = j.at("type").get<std::string>();
  if (type == "box")
    return ConvexSet::box(bounds_from_json(j.at("lo")), bounds_from_json(j.at("hi")));
  if (type == "singleton") return ConvexSet::singleton(vector_from_json(j.at("point")));
  if (type == "halfspace")
    return ConvexSet::halfspace(vector_from_json(j.at("normal")),
                                j.at("offset").get<double>());
  if (type == "ball")
    return ConvexSet::ball(vector_from_json(j.at("center")),
                           j.at("radius").get<double>());
  if (type == "shift")
    return ConvexSet::shift(set_from_json(j.at("inner")),
                            vector_from_json(j.at("offset")));
  if (type == "product") {
    std::vector<ConvexSet> factors;
    for (const auto& f : j.at("factors")) factors.push_back(set_from_json(f));
    return ConvexSet::product(std::move(factors));
  }
  if (type == "intersection") {
    std::vector<ConvexSet> members;
    for (const auto& m : j.at("members")) members.push_back(set_from_json(m));
    return ConvexSet::intersection(std::move(members));
  }
  throw InvalidInputError("set: unknown type '" + type + "'");
}

Json operator_to_json(const LinearOperator& op) {
  Json j;
  if (const auto* d = std::get_if<LinearOperator::DenseOp>(&op.node())) {
    j["kind"] = "dense";
    j["matrix"] = matrix_to_json(d->m);
    return j;
  }
  if (const auto* s = std::get_if<LinearOperator::StackOp>(&op.node())) {
    j["kind"] = "stack";
    Json blocks = Json::array();
    for (const auto& b : s->blocks) blocks.push_back(operator_to_json(b));
    j["blocks"] = std::move(blocks);
    return j;
  }
  throw InvalidInputError("operator: this operator kind has no file representation");
}

LinearOperator operator_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "dense") return LinearOperator::dense(matrix_from_json(j.at("matrix")));
  if (kind == "stack") {
    std::vector<LinearOperator> blocks;
    for (const auto& b : j.at("blocks")) blocks.push_back(operator_from_json(b));
    return LinearOperator::stack(std::move(blocks));
  }
  throw InvalidInputError("operator: unknown kind '" + kind + "'");
}

Json problem_to_json(const ModelProblem& problem) {
  if (!problem.objective.dense_curvature())
    throw InvalidInputError("problem: implicit objectives have no file representation");
  Json j;
  j["objective"] = {{"Q", matrix_to_json(*problem.objective.dense_curvature())},
                    {"b", vector_to_json(problem.objective.linear_term())},
                    {"c", problem.objective.constant_term()}};
  j["operator"] = operator_to_json(problem.S);
  j["set"] = set_to_json(problem.K);
  if (problem.feasible_witness)
    j["witness"] = vector_to_json(*problem.feasible_witness);
  return j;
}

ModelProblem problem_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInputError("problem: expected a JSON object");
  for (const char* key : {"objective", "operator", "set"})
    if (!j.contains(key))
      throw InvalidInputError(std::string("problem: missing key '") + key + "'");
  const Json& obj = j.at("objective");
  QuadraticObjective objective(matrix_from_json(obj.at("Q")),
                               vector_from_json(obj.at("b")),
                               obj.value("c", 0.0));
  LinearOperator s = operator_from_json(j.at("operator"));
  ConvexSet k = set_from_json(j.at("set"));
  std::optional<Vector> witness;
  if (j.contains("witness")) witness = vector_from_json(j.at("witness"));
  return ModelProblem(std::move(objective), std::move(s), std::move(k),
                      std::move(witness));
}

ModelProblem load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open problem file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Translate the byte offset into a line/column diagnostic.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InvalidInputError("malformed JSON in '" + path + "' at line " +
                            std::to_string(line) + ", column " + std::to_string(col) +
                            ": " + e.what());
  }
  return problem_from_json(j);
}

std::string trace_csv_header(std::size_t probe_count) {
  std::string h = "k,r_norm,objective,lambda_norm,fejer_slack,inner_iterations";
  for (std::size_t j = 0; j < probe_count; ++j) h += ",probe_" + std::to_string(j);
  h += "\n";
  return h;
}

std::string trace_csv_row(const AlmRecord& rec) {
  std::string row = std::to_string(rec.k);
  row += "," + format_sig17(rec.r_norm);
  row += "," + format_sig17(rec.objective);
  row += "," + format_sig17(rec.lambda_norm);
  row += "," + format_sig17(rec.fejer_slack);
  row += "," + std::to_string(rec.inner_iterations);
  for (double p : rec.probe_values) row += "," + format_sig17(p);
  row += "\n";
  return row;
}

void write_trace_csv(const std::string& path, const AlmTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot open '" + path + "' for writing");
  out << trace_csv_header(trace.probes.size());
  for (const auto& rec : trace.records) out << trace_csv_row(rec);
}

Json multiplier_report_to_json(const MultiplierReport& report) {
  Json j;
  if (report.essential) j["essential"] = vector_to_json(*report.essential);
  j["stationarity_residual"] = format_sig17(report.stationarity_residual);
  j["vi_violation"] = format_sig17(report.vi_violation);
  j["exists_verdict"] = report.exists_verdict;
  j["rank_S"] = report.rank_S;
  j["sigma_min_positive"] = format_sig17(report.sigma_min_positive);
  Json kernel = Json::array();
  for (const auto& v : report.kernel_S_star_basis) kernel.push_back(vector_to_json(v));
  j["kernel_S_star_basis"] = std::move(kernel);
  if (report.certificate) {
    j["certificate"] = {{"feasible", report.certificate->feasible},
                        {"multiplier_exists", report.certificate->multiplier_exists},
                        {"vi_violation", format_sig17(report.certificate->vi_violation)},
                        {"tol", report.certificate->tol},
                        {"certified", report.certificate->certified}};
  }
  return j;
}

Json proper_candidate_to_json(const ProperCandidateAnalysis& analysis) {
  Json j;
  j["candidate"] = vector_to_json(analysis.candidate);
  j["stationarity_residual"] = format_sig17(analysis.stationarity_residual);
  j["normal_cone_residual"] = format_sig17(analysis.normal_cone_residual);
  j["restriction_gap"] = format_sig17(analysis.restriction_gap);
  j["compatibility"] = analysis.compatibility;
  j["consistency"] = analysis.consistency;
  if (analysis.witness_zeta0) j["witness_zeta0"] = vector_to_json(*analysis.witness_zeta0);
  if (analysis.constructed) {
    j["constructed"] = vector_to_json(*analysis.constructed);
    j["t0"] = analysis.t0;
  }
  return j;
}

Json study_rows_to_json(const std::vector<MeshStudyRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back({{"n", r.n},
                   {"h", r.h},
                   {"lambda_norm_state", r.lambda_norm_state},
                   {"lambda_norm_control", r.lambda_norm_control},
                   {"u_dist", r.u_distance},
                   {"outer_iterations", r.iterations},
                   {"solved", r.solved},
                   {"note", r.note}});
  }
  return out;
}

std::string study_csv(const std::vector<MeshStudyRow>& rows) {
  std::string csv = "n,h,lambda_norm_state,lambda_norm_control,u_dist,outer_iterations\n";
  for (const auto& r : rows) {
    if (!r.solved) continue;
    csv += std::to_string(r.n);
    csv += "," + format_sig17(r.h);
    csv += "," + format_sig17(r.lambda_norm_state);
    csv += "," + format_sig17(r.lambda_norm_control);
    csv += "," + format_sig17(r.u_distance);
    csv += "," + std::to_string(r.iterations);
    csv += "\n";
  }
  return csv;
}

}  // namespace almlab
