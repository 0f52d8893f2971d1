#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "nij/common/tolerances.hpp"
#include "nij/field/structure.hpp"
#include "nij/model/model.hpp"
#include "nij/quadrics/quadrics.hpp"
#include "nij/webs/webs.hpp"

/// JSON file formats. Schema errors name the offending field as a path such
/// as `$.J[0][1][2].coef`; parse errors carry line and column.
///
/// Structure:  {"dim": m, "domain": {"min": [m], "max": [m]},
///              "J": m x m array of term lists [{"coef": c, "powers": [m ints]}]}
/// Diffeo:     {"dim": m, "forward": [m term lists], "inverse": [m term lists],
///              "forward_domain": box, "inverse_domain": box}
/// Tensor:     {"J": m x m numbers, "N": N[k][i][j] as m x m x m numbers}
/// Web:        {"planes": [4 planes, each a list of 2 vectors in R^4]}
/// Points:     {"points": [[m numbers], ...]}
/// Chart pts:  {"points": [{"chart": 0|1|2, "coords": [4 numbers]}, ...]}
/// Planes:     {"planes": [each a list of 4 vectors in R^6]} (next to a tensor)
namespace nij::io {

using Json = nlohmann::ordered_json;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Default degree cap for structure files.
inline constexpr int kDefaultMaxDegree = 6;

/// Rounds to 12 significant digits; the value that reports print.
double rounded(double v);
/// Rounded number, or null when not finite.
Json num(double v);

std::string read_file(const std::string& path);
Json parse_json(const std::string& text, const std::string& source);
Json read_json_file(const std::string& path);

VectorXd vector_from_json(const Json& j, const std::string& path, int size = -1);
Json vector_to_json(const VectorXd& v);
/// Row-major nested arrays.
MatrixXd matrix_from_json(const Json& j, const std::string& path, int rows = -1, int cols = -1);
Json matrix_to_json(const MatrixXd& m);

field::PolyExpr poly_from_json(const Json& j, int num_vars, const std::string& path);
Json poly_to_json(const field::PolyExpr& p);
field::Box box_from_json(const Json& j, int dim, const std::string& path);
Json box_to_json(const field::Box& b);

field::ChartedStructure structure_from_json(const Json& j, const Tolerances& tol = {},
                                            int max_degree = kDefaultMaxDegree);
Json structure_to_json(const field::ChartedStructure& s);

field::DiffeoPair diffeo_from_json(const Json& j, const Tolerances& tol = {});
Json diffeo_to_json(const field::DiffeoPair& d);

model::NTensor tensor_from_json(const Json& j, const Tolerances& tol = {});
Json tensor_to_json(const model::NTensor& n);

webs::PlaneWeb4 web_from_json(const Json& j);
Json web_to_json(const webs::PlaneWeb4& w);

std::vector<VectorXd> points_from_json(const Json& j, int dim);

std::vector<quadrics::GrChartPoint> chart_points_from_json(const Json& j);
Json chart_points_to_json(const std::vector<quadrics::GrChartPoint>& pts);

/// Plane bases (6 x 4 each) under "planes".
std::vector<MatrixXd> planes_from_json(const Json& j, int dim);

}  // namespace nij::io
