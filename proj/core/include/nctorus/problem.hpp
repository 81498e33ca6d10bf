#pragma once

// Problem files: one JSON document describing a torus (n, Theta, J) plus optional sections that
// individual commands read. Parsing validates every invariant up front and normalizes the
// document, so emit(parse(text)) is canonical and parse(emit(pf)) == pf.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nctorus/algebra.hpp"
#include "nctorus/complex_structure.hpp"
#include "nctorus/dolbeault.hpp"
#include "nctorus/errors.hpp"
#include "nctorus/heisenberg1d.hpp"
#include "nctorus/riemann.hpp"

namespace nctorus {

/// Malformed or inconsistent problem file. `where` is a field path or "line L, column C".
class ParseError : public Error {
 public:
  ParseError(const std::string& where, const std::string& what) : Error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct ConnectionData {
  std::size_t rank = 1;
  std::vector<cd> shift;  ///< optional scalar part c_j (empty means zero)
  struct Term {
    std::size_t j = 0, row = 0, col = 0;
    Mode mode;
    cd value;
  };
  std::vector<Term> terms;

  FreeConnection build(const ThetaPtr& theta, std::size_t n) const;
};

struct SplitTorusData {
  cd tau, tau_prime, w;
};

struct ScanData {
  int samples = 100;
  int bound = 5;
  int threads = 0;  ///< 0 = hardware concurrency, capped at 8
};

struct ProblemFile {
  std::size_t n = 0;
  ThetaPtr theta;
  std::optional<ComplexStructure> cs;
  std::optional<ExactPeriod> exact_period;  ///< when J came from a period with exact entries
  std::optional<ConnectionData> connection;
  std::optional<StandardModule1D> module1d;
  int search_bound = 6;
  bool search_exact = false;
  std::optional<int> truncation_N;
  double tol_rel = kDefaultTolRel;
  std::optional<std::uint64_t> seed;
  std::optional<std::pair<std::vector<long>, std::vector<long>>> kunneth;
  std::optional<ConnectionData> pushforward;  ///< n = 1 connection on the leading block
  std::optional<ScanData> scan;
  std::optional<IntegerSkewForm> form;
  std::optional<std::vector<std::size_t>> split;
  std::optional<SplitTorusData> splittorus;
  long multiplier = 1;

  nlohmann::json normalized;  ///< the validated document in canonical form

  friend bool operator==(const ProblemFile& a, const ProblemFile& b) { return a.normalized == b.normalized; }
};

ProblemFile parse_problem_file(const std::string& text);
ProblemFile parse_problem_json(const nlohmann::json& doc);
/// Canonical text of the normalized document.
std::string emit_problem_file(const ProblemFile& pf);

/// Sorted keys, doubles rounded to 12 significant digits, -0 printed as 0, two-space indent.
std::string canonical_dump(const nlohmann::json& j);
/// x rounded to 12 significant digits (non-finite values become null).
nlohmann::json json_number(double x);
nlohmann::json json_complex(cd z);
nlohmann::json json_matrix(const Eigen::MatrixXd& m);
nlohmann::json json_matrix(const Eigen::MatrixXcd& m);
nlohmann::json json_matrix(const IntMatrix& m);

}  // namespace nctorus
