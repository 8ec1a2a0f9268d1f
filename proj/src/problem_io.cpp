#include "plqn/problem_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace plqn {

namespace {

using nlohmann::json;
constexpr const char* kModule = "cli_harness";

[[noreturn]] void schema_fail(const std::string& ptr, const std::string& msg) {
  throw SchemaError(kModule, (ptr.empty() ? std::string("/") : ptr) + ": " + msg);
}

const json& field(const json& obj, const std::string& ptr, const char* key) {
  if (!obj.is_object()) schema_fail(ptr, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_fail(ptr + "/" + key, "missing required field");
  return *it;
}

double number(const json& j, const std::string& ptr) {
  if (!j.is_number()) schema_fail(ptr, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) schema_fail(ptr, "expected an integer");
  return j.get<int>();
}

Vec vector(const json& j, const std::string& ptr, Eigen::Index size) {
  if (!j.is_array()) schema_fail(ptr, "expected an array");
  if (size >= 0 && static_cast<Eigen::Index>(j.size()) != size)
    schema_fail(ptr, "expected " + std::to_string(size) + " entries, found " + std::to_string(j.size()));
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], ptr + "/" + std::to_string(i));
  return v;
}

Mat matrix(const json& j, const std::string& ptr, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    schema_fail(ptr, "expected an array of " + std::to_string(rows) + " rows");
  Mat M(rows, cols);
  for (int r = 0; r < rows; ++r) M.row(r) = vector(j[static_cast<size_t>(r)], ptr + "/" + std::to_string(r), cols).transpose();
  return M;
}

PLQFunction plq_from_json(const json& j, const std::string& ptr) {
  const int m = integer(field(j, ptr, "m"), ptr + "/m");
  if (m < 1) schema_fail(ptr + "/m", "must be positive");
  std::vector<Hyperplane> hps;
  if (j.contains("hyperplanes")) {
    const json& arr = j["hyperplanes"];
    const std::string p = ptr + "/hyperplanes";
    if (!arr.is_array()) schema_fail(p, "expected an array");
    for (size_t i = 0; i < arr.size(); ++i) {
      const std::string pi = p + "/" + std::to_string(i);
      Hyperplane hp;
      hp.a = vector(field(arr[i], pi, "a"), pi + "/a", m);
      if (!(hp.a.norm() > 0)) schema_fail(pi + "/a", "normal must be nonzero");
      hp.alpha = number(field(arr[i], pi, "alpha"), pi + "/alpha");
      hps.push_back(hp);
    }
  }
  const json& arr = field(j, ptr, "pieces");
  const std::string p = ptr + "/pieces";
  if (!arr.is_array() || arr.empty()) schema_fail(p, "expected a nonempty array");
  std::vector<Piece> pieces;
  for (size_t k = 0; k < arr.size(); ++k) {
    const std::string pk = p + "/" + std::to_string(k);
    Piece pc;
    const Vec signs = arr[k].contains("signs") ? vector(arr[k]["signs"], pk + "/signs", static_cast<Eigen::Index>(hps.size()))
                                               : vector(json::array(), pk + "/signs", static_cast<Eigen::Index>(hps.size()));
    for (Eigen::Index i = 0; i < signs.size(); ++i) {
      if (signs(i) != 1.0 && signs(i) != -1.0) schema_fail(pk + "/signs/" + std::to_string(i), "must be +1 or -1");
      pc.signs.push_back(static_cast<int>(signs(i)));
    }
    pc.Q = arr[k].contains("Q") ? matrix(arr[k]["Q"], pk + "/Q", m, m) : Mat(Mat::Zero(m, m));
    pc.b = arr[k].contains("b") ? vector(arr[k]["b"], pk + "/b", m) : Vec(Vec::Zero(m));
    pc.beta = arr[k].contains("beta") ? number(arr[k]["beta"], pk + "/beta") : 0.0;
    pieces.push_back(pc);
  }
  return PLQFunction(m, std::move(hps), std::move(pieces));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError(kModule, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(kModule, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

LoadedProblem load_problem_text(const std::string& text, std::uint64_t seed, bool strict) {
  const json j = parse_json(text);
  const int n = integer(field(j, "", "n"), "/n");
  const int m = integer(field(j, "", "m"), "/m");
  if (n < 1) schema_fail("/n", "must be positive");
  if (m < 1) schema_fail("/m", "must be positive");
  PLQFunction h = plq_from_json(field(j, "", "h"), "/h");
  if (h.m() != m) schema_fail("/h/m", "h.m = " + std::to_string(h.m()) + " but m = " + std::to_string(m));

  const json& cj = field(j, "", "c");
  if (!cj.is_array()) schema_fail("/c", "expected an array of expression strings");
  if (static_cast<int>(cj.size()) != m)
    schema_fail("/c", "expected " + std::to_string(m) + " components, found " + std::to_string(cj.size()));
  std::vector<std::string> texts;
  for (size_t i = 0; i < cj.size(); ++i) {
    if (!cj[i].is_string()) schema_fail("/c/" + std::to_string(i), "expected a string");
    texts.push_back(cj[i].get<std::string>());
  }
  SmoothMap c = parse_map(texts, n);

  ValidationOptions vo;
  vo.seed = seed;
  vo.strict = strict;
  ValidationReport rep = validate_representation(h, vo);
  bool any_piece = false;
  for (bool f : rep.piece_feasible) any_piece = any_piece || f;
  if (!any_piece) schema_fail("/h/pieces", "dom h is empty");

  LoadedProblem lp{CompositeProblem(std::move(h), std::move(c)), {}, {}, {}, {}, {}, std::move(rep)};
  if (j.contains("reference")) {
    const json& r = j["reference"];
    lp.x_ref = vector(field(r, "/reference", "x"), "/reference/x", n);
    if (r.contains("y")) lp.y_ref = vector(r["y"], "/reference/y", m);
  }
  if (j.contains("start")) {
    const json& s = j["start"];
    lp.x0 = vector(field(s, "/start", "x"), "/start/x", n);
    if (s.contains("y")) lp.y0 = vector(s["y"], "/start/y", m);
  }
  if (j.contains("solver")) {
    const json& s = j["solver"];
    if (!s.is_object()) schema_fail("/solver", "expected an object");
    if (s.contains("method")) {
      if (!s["method"].is_string()) schema_fail("/solver/method", "expected a string");
      lp.solver.method = s["method"].get<std::string>();
      if (lp.solver.method != "newton" && lp.solver.method != "quasi" && lp.solver.method != "smooth" &&
          lp.solver.method != "enum")
        schema_fail("/solver/method", "unknown method '" + lp.solver.method + "'");
    }
    if (s.contains("tol")) lp.solver.tol = number(s["tol"], "/solver/tol");
    if (s.contains("max_iter")) lp.solver.max_iter = integer(s["max_iter"], "/solver/max_iter");
    if (s.contains("schedule")) {
      if (!s["schedule"].is_string()) schema_fail("/solver/schedule", "expected a string");
      lp.solver.schedule = s["schedule"].get<std::string>();
      if (lp.solver.schedule != "exact" && lp.solver.schedule != "decay" && lp.solver.schedule != "fixed")
        schema_fail("/solver/schedule", "unknown schedule '" + lp.solver.schedule + "'");
    }
    if (s.contains("shift")) lp.solver.shift = number(s["shift"], "/solver/shift");
  }
  return lp;
}

LoadedProblem load_problem(const std::string& path, std::uint64_t seed, bool strict) {
  return load_problem_text(slurp(path), seed, strict);
}

PointFile load_point(const std::string& path, int n, int m) {
  const json j = parse_json(slurp(path));
  PointFile pf;
  pf.x = vector(field(j, "", "x"), "/x", n);
  if (j.contains("y")) pf.y = vector(j["y"], "/y", m);
  return pf;
}

}  // namespace plqn
