#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "plqn/problem_io.hpp"
#include "plqn/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"plqnewton: Newton-type methods for convex-composite PLQ problems"};
  app.require_subcommand(1, 1);

  plqn::CliOptions opts;
  std::string file;
  std::string trace_path;
  std::string method;
  double tol = 0.0;
  int max_iter = 0;
  bool as_json = false;

  const char* cmds[][2] = {{"validate", "check the PLQ representation"},
                           {"certify", "certify CQs, partial smoothness, SOSC and subregularity at a point"},
                           {"solve", "run a solver from the problem's start point"},
                           {"rate", "run a solver and classify the observed convergence rate"},
                           {"check-derivs", "compare AD derivatives of c against finite differences"}};
  for (const auto& c : cmds) {
    CLI::App* sub = app.add_subcommand(c[0], c[1]);
    sub->add_option("file", file, "problem JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--method", method, "newton | quasi | smooth | enum")
        ->check(CLI::IsMember({"newton", "quasi", "smooth", "enum"}));
    sub->add_option("--tol", tol, "stopping tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", max_iter, "iteration cap")->check(CLI::PositiveNumber);
    sub->add_option("--seed", opts.seed, "seed for sampled checks");
    sub->add_option("--trace", trace_path, "write the iteration trace as CSV");
    sub->add_flag("--strict", opts.strict, "exact pairwise overlap LPs in validation");
    sub->add_flag("--json", as_json, "print a JSON report");
    sub->add_option("--point", opts.point, "point file, or 'random'");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : plqn::kExitInputError;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  if (!method.empty()) opts.method = method;
  if (tol > 0) opts.tol = tol;
  if (max_iter > 0) opts.max_iter = max_iter;

  try {
    const plqn::LoadedProblem lp = plqn::load_problem(file, opts.seed, opts.strict);
    const plqn::Report r = plqn::run_report(command, lp, opts);
    std::cout << (as_json ? r.json + "\n" : r.text);
    if (!trace_path.empty() && !r.trace_csv.empty()) {
      std::ofstream out(trace_path);
      if (!out) {
        std::cerr << "error: cannot write " << trace_path << "\n";
        return plqn::kExitInputError;
      }
      out << r.trace_csv;
    }
    return r.exit_code;
  } catch (const plqn::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return plqn::kExitInputError;
  } catch (const plqn::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return plqn::kExitInputError;
  } catch (const plqn::ArgumentError& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return plqn::kExitInputError;
  } catch (const plqn::RegimeError& e) {
    std::cerr << "regime error: " << e.what() << "\n";
    return plqn::kExitRegimeError;
  } catch (const plqn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return plqn::kExitCertifiedFailure;
  }
}
