#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nctorus/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"nctorus: holomorphic structures on noncommutative tori"};
  std::string input, command, output;
  nctorus::RunOptions opts;
  std::uint64_t seed = 0;
  int truncation = 0, bound = 0;
  double tol_rel = 0.0;

  app.add_option("--input", input, "problem file (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("--command", command, "command to run")->required()->check(CLI::IsMember(nctorus::command_names()));
  app.add_option("--output", output, "write the report here instead of stdout");
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides the file)");
  auto* trunc_opt = app.add_option("--truncation", truncation, "Fourier box half-width N");
  auto* tol_opt = app.add_option("--tol-rel", tol_rel, "relative kernel threshold");
  auto* bound_opt = app.add_option("--bound", bound, "search bound B");
  app.add_flag("--exact", opts.exact, "use the exact rational path where available");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : nctorus::kExitInputError;
  }
  if (*seed_opt) opts.seed = seed;
  if (*trunc_opt) opts.truncation = truncation;
  if (*tol_opt) opts.tol_rel = tol_rel;
  if (*bound_opt) opts.bound = bound;

  std::ifstream in(input);
  std::stringstream text;
  text << in.rdbuf();
  const auto result = nctorus::run_text(command, text.str(), opts);
  const std::string body = nctorus::canonical_dump(result.report);

  if (output.empty()) {
    std::cout << body;
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << output << "\n";
      return nctorus::kExitInputError;
    }
    out << body;
  }
  if (result.report.contains("error")) std::cerr << result.report["error"]["message"].get<std::string>() << "\n";
  return result.exit_code;
}
