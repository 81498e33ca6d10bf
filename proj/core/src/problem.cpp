#include "nctorus/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace nctorus {

using nlohmann::json;

namespace {

struct Real {
  double value = 0.0;
  std::optional<Rational> exact;
  json normalized;
};

struct Complex {
  cd value;
  std::optional<GaussRational> exact;
  json normalized;
};

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ParseError(where, what); }

std::string idx(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where, "missing field '" + key + "'");
  return *it;
}

long as_int(const json& j, const std::string& where) {
  if (j.is_number_integer() || j.is_number_unsigned()) return j.get<long>();
  if (j.is_number_float()) {
    const double x = j.get<double>();
    if (std::floor(x) == x && std::abs(x) < 9e15) return static_cast<long>(x);
  }
  fail(where, "expected an integer");
}

BigInt as_bigint(const json& j, const std::string& where) {
  if (j.is_string()) {
    try {
      return BigInt(j.get<std::string>());
    } catch (const std::exception&) {
      fail(where, "expected an integer string");
    }
  }
  return BigInt(as_int(j, where));
}

Real parse_real(const json& j, const std::string& where) {
  Real r;
  if (j.is_number_integer() || j.is_number_unsigned()) {
    const long v = j.get<long>();
    r.value = static_cast<double>(v);
    r.exact = Rational(v);
    r.normalized = v;
    return r;
  }
  if (j.is_number_float()) {
    r.value = j.get<double>();
    if (!std::isfinite(r.value)) fail(where, "non-finite number");
    if (std::floor(r.value) == r.value && std::abs(r.value) < 9e15) {
      r.exact = Rational(static_cast<long>(r.value));
      r.normalized = static_cast<long>(r.value);
    } else {
      r.normalized = r.value;
    }
    return r;
  }
  if (j.is_object() && j.contains("num")) {
    const BigInt num = as_bigint(j.at("num"), where + ".num");
    const BigInt den = j.contains("den") ? as_bigint(j.at("den"), where + ".den") : BigInt(1);
    if (den == 0) fail(where, "zero denominator");
    const Rational q(num, den);
    r.exact = q;
    r.value = q.convert_to<double>();
    const BigInt n = boost::multiprecision::numerator(q), d = boost::multiprecision::denominator(q);
    auto int_json = [](const BigInt& x) -> json {
      if (x >= std::numeric_limits<long>::min() && x <= std::numeric_limits<long>::max()) return x.convert_to<long>();
      return x.str();
    };
    if (d == 1) r.normalized = int_json(n);
    else r.normalized = json{{"num", int_json(n)}, {"den", int_json(d)}};
    return r;
  }
  fail(where, "expected a real number or {num, den}");
}

Complex parse_complex(const json& j, const std::string& where) {
  Real re, im;
  if (j.is_array()) {
    if (j.size() != 2) fail(where, "complex numbers are [re, im]");
    re = parse_real(j[0], where + "[0]");
    im = parse_real(j[1], where + "[1]");
  } else if (j.is_object() && (j.contains("re") || j.contains("im"))) {
    re = j.contains("re") ? parse_real(j.at("re"), where + ".re") : parse_real(json(0), where);
    im = j.contains("im") ? parse_real(j.at("im"), where + ".im") : parse_real(json(0), where);
  } else {
    re = parse_real(j, where);
    im = parse_real(json(0), where);
  }
  Complex c;
  c.value = cd(re.value, im.value);
  if (re.exact && im.exact) c.exact = GaussRational(*re.exact, *im.exact);
  if (im.value == 0.0 && im.exact) c.normalized = re.normalized;
  else c.normalized = json::array({re.normalized, im.normalized});
  return c;
}

std::vector<std::vector<Real>> parse_real_matrix(const json& j, std::size_t rows, std::size_t cols,
                                                 const std::string& where) {
  if (!j.is_array() || j.size() != rows)
    fail(where, "expected " + std::to_string(rows) + " rows, got " + (j.is_array() ? std::to_string(j.size()) : "a non-array"));
  std::vector<std::vector<Real>> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != cols) fail(idx(where, r), "expected " + std::to_string(cols) + " entries");
    for (std::size_t c = 0; c < cols; ++c) out[r].push_back(parse_real(row[c], idx(idx(where, r), c)));
  }
  return out;
}

json normalized_matrix(const std::vector<std::vector<Real>>& m) {
  json out = json::array();
  for (const auto& row : m) {
    json jr = json::array();
    for (const auto& x : row) jr.push_back(x.normalized);
    out.push_back(std::move(jr));
  }
  return out;
}

ThetaPtr parse_theta(const json& j, std::size_t n, json& norm) {
  const std::size_t d = 2 * n;
  if (j.is_object()) {
    const auto& blocks = require(j, "product_blocks", "theta");
    if (!blocks.is_array() || blocks.size() != n) fail("theta.product_blocks", "expected " + std::to_string(n) + " entries");
    std::vector<double> t;
    json nb = json::array();
    for (std::size_t k = 0; k < n; ++k) {
      const auto r = parse_real(blocks[k], idx("theta.product_blocks", k));
      t.push_back(r.value);
      nb.push_back(r.normalized);
    }
    norm = json{{"product_blocks", nb}};
    return make_theta(ThetaMatrix::product_blocks(t));
  }
  const auto m = parse_real_matrix(j, d, d, "theta");
  Eigen::MatrixXd T(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) T(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = m[a][b].value;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
      if (T(ia, ib) != -T(ib, ia)) {
        std::ostringstream msg;
        msg << "not skew-symmetric: theta[" << a << "][" << b << "] = " << T(ia, ib) << " but theta[" << b << "][" << a
            << "] = " << T(ib, ia);
        fail("theta", msg.str());
      }
    }
  norm = normalized_matrix(m);
  return make_theta(ThetaMatrix(std::move(T)));
}

ComplexStructure make_cs(Eigen::MatrixXd J, const std::string& where) {
  try {
    return ComplexStructure(std::move(J));
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

ComplexStructure cs_from_period(const PeriodMatrix& pm, const std::string& where) {
  try {
    return j_from_period(pm);
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

void parse_j(const json& j, ProblemFile& pf, json& norm) {
  const std::size_t n = pf.n, d = 2 * n;
  if (j.is_array()) {
    const auto m = parse_real_matrix(j, d, d, "J");
    Eigen::MatrixXd J(d, d);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) J(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = m[a][b].value;
    pf.cs = make_cs(std::move(J), "J");
    norm = normalized_matrix(m);
    return;
  }
  if (!j.is_object() || j.size() != 1) fail("J", "expected a matrix or exactly one of {period, blocks, tau, splittorus}");
  const auto& [key, val] = *j.items().begin();
  if (key == "period") {
    if (!val.is_array() || val.size() != n) fail("J.period", "expected " + std::to_string(n) + " rows");
    PeriodMatrix pm;
    pm.Q.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    ExactPeriod ex;
    bool exact = true;
    json nq = json::array();
    for (std::size_t r = 0; r < n; ++r) {
      const auto where = idx("J.period", r);
      if (!val[r].is_array() || val[r].size() != d) fail(where, "expected " + std::to_string(d) + " entries");
      ex.Q.emplace_back();
      json nr = json::array();
      for (std::size_t c = 0; c < d; ++c) {
        const auto z = parse_complex(val[r][c], idx(where, c));
        pm.Q(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = z.value;
        if (z.exact) ex.Q.back().push_back(*z.exact);
        else exact = false;
        nr.push_back(z.normalized);
      }
      nq.push_back(std::move(nr));
    }
    pf.cs = cs_from_period(pm, "J.period");
    if (exact) pf.exact_period = std::move(ex);
    norm = json{{"period", nq}};
  } else if (key == "blocks") {
    if (!val.is_array() || val.size() != n) fail("J.blocks", "expected " + std::to_string(n) + " 2x2 blocks");
    std::vector<Eigen::Matrix2d> blocks;
    json nb = json::array();
    for (std::size_t k = 0; k < n; ++k) {
      const auto m = parse_real_matrix(val[k], 2, 2, idx("J.blocks", k));
      Eigen::Matrix2d B;
      B << m[0][0].value, m[0][1].value, m[1][0].value, m[1][1].value;
      blocks.push_back(B);
      nb.push_back(normalized_matrix(m));
    }
    try {
      pf.cs = ComplexStructure::from_blocks(blocks);
    } catch (const Error& e) {
      fail("J.blocks", e.what());
    }
    norm = json{{"blocks", nb}};
  } else if (key == "tau") {
    if (!val.is_array() || val.size() != n) fail("J.tau", "expected " + std::to_string(n) + " moduli");
    std::vector<Eigen::Matrix2d> blocks;
    json nt = json::array();
    ExactPeriod ex;
    bool exact = true;
    ex.Q.assign(n, std::vector<GaussRational>(d));
    for (std::size_t k = 0; k < n; ++k) {
      const auto z = parse_complex(val[k], idx("J.tau", k));
      if (!(z.value.imag() > 0.0)) fail(idx("J.tau", k), "modulus must have positive imaginary part");
      blocks.push_back(ComplexStructure::block_from_tau(z.value));
      nt.push_back(z.normalized);
      if (z.exact) {
        ex.Q[k][2 * k] = *z.exact;
        ex.Q[k][2 * k + 1] = GaussRational(Rational(1));
      } else {
        exact = false;
      }
    }
    pf.cs = ComplexStructure::from_blocks(blocks);
    if (exact) pf.exact_period = std::move(ex);
    norm = json{{"tau", nt}};
  } else if (key == "splittorus") {
    if (n != 2) fail("J.splittorus", "the split torus has n = 2");
    const auto t = parse_complex(require(val, "tau", "J.splittorus"), "J.splittorus.tau");
    const auto tp = parse_complex(require(val, "tau_prime", "J.splittorus"), "J.splittorus.tau_prime");
    const auto w = parse_complex(require(val, "w", "J.splittorus"), "J.splittorus.w");
    PeriodMatrix pm;
    try {
      pm = split_torus_example(t.value, tp.value, w.value);
    } catch (const Error& e) {
      fail("J.splittorus", e.what());
    }
    pf.cs = cs_from_period(pm, "J.splittorus");
    // Inexact entries are replaced by the nearest rational with denominator 10^7.
    auto rat = [](const Complex& z) {
      if (z.exact) return *z.exact;
      return GaussRational(rational_with_denominator(z.value.real(), 10000000),
                           rational_with_denominator(z.value.imag(), 10000000));
    };
    pf.exact_period = split_torus_exact(rat(t), rat(tp), rat(w));
    norm = json{{"splittorus", {{"tau", t.normalized}, {"tau_prime", tp.normalized}, {"w", w.normalized}}}};
  } else {
    fail("J." + key, "unknown J form (expected period, blocks, tau or splittorus)");
  }
}

ConnectionData parse_connection(const json& j, std::size_t n, const std::string& where, json& norm) {
  if (!j.is_object()) fail(where, "expected an object");
  ConnectionData c;
  norm = json::object();
  if (j.contains("rank")) {
    const long r = as_int(j.at("rank"), where + ".rank");
    if (r < 1 || r > 16) fail(where + ".rank", "rank must be in 1..16");
    c.rank = static_cast<std::size_t>(r);
  }
  norm["rank"] = c.rank;
  if (j.contains("shift")) {
    const auto& s = j.at("shift");
    if (!s.is_array() || s.size() != n) fail(where + ".shift", "expected " + std::to_string(n) + " values");
    json ns = json::array();
    for (std::size_t k = 0; k < n; ++k) {
      const auto z = parse_complex(s[k], idx(where + ".shift", k));
      c.shift.push_back(z.value);
      ns.push_back(z.normalized);
    }
    norm["shift"] = ns;
  }
  if (j.contains("terms")) {
    const auto& ts = j.at("terms");
    if (!ts.is_array()) fail(where + ".terms", "expected an array");
    json nt = json::array();
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const auto w = idx(where + ".terms", k);
      const auto& t = ts[k];
      ConnectionData::Term term;
      const long jj = as_int(require(t, "j", w), w + ".j");
      if (jj < 0 || static_cast<std::size_t>(jj) >= n) fail(w + ".j", "direction out of range");
      term.j = static_cast<std::size_t>(jj);
      const long row = t.contains("row") ? as_int(t.at("row"), w + ".row") : 0;
      const long col = t.contains("col") ? as_int(t.at("col"), w + ".col") : 0;
      if (row < 0 || col < 0 || static_cast<std::size_t>(row) >= c.rank || static_cast<std::size_t>(col) >= c.rank)
        fail(w, "matrix entry out of range for rank " + std::to_string(c.rank));
      term.row = static_cast<std::size_t>(row);
      term.col = static_cast<std::size_t>(col);
      // Coefficient records are {m, re, im}; {mode, value} is accepted as well.
      const json* mode = t.contains("m") ? &t.at("m") : t.contains("mode") ? &t.at("mode") : nullptr;
      if (!mode) fail(w, "missing field 'm'");
      if (!mode->is_array() || mode->size() != 2 * n) fail(w + ".m", "expected " + std::to_string(2 * n) + " integers");
      for (std::size_t m = 0; m < mode->size(); ++m) term.mode.push_back(static_cast<int>(as_int((*mode)[m], idx(w + ".m", m))));
      Real re, im;
      if (t.contains("value")) {
        const auto z = parse_complex(t.at("value"), w + ".value");
        re = parse_real(json(z.value.real()), w + ".value");
        im = parse_real(json(z.value.imag()), w + ".value");
      } else {
        re = t.contains("re") ? parse_real(t.at("re"), w + ".re") : parse_real(json(0), w);
        im = t.contains("im") ? parse_real(t.at("im"), w + ".im") : parse_real(json(0), w);
      }
      term.value = cd(re.value, im.value);
      c.terms.push_back(term);
      nt.push_back(json{{"j", term.j}, {"row", term.row}, {"col", term.col}, {"m", term.mode}, {"re", re.normalized},
                        {"im", im.normalized}});
    }
    norm["terms"] = nt;
  }
  return c;
}

}  // namespace

FreeConnection ConnectionData::build(const ThetaPtr& theta, std::size_t n) const {
  std::vector<std::vector<FourierElement::Coefficients>> coeffs(n, std::vector<FourierElement::Coefficients>(rank * rank));
  for (std::size_t j = 0; j < n && j < shift.size(); ++j)
    for (std::size_t i = 0; i < rank; ++i) coeffs[j][i * rank + i][Mode(theta->dim(), 0)] += shift[j];
  for (const auto& t : terms) {
    if (t.mode.size() != theta->dim()) throw DomainError("connection mode has the wrong dimension");
    coeffs[t.j][t.row * rank + t.col][t.mode] += t.value;
  }
  std::vector<MatrixElement> out;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<FourierElement> entries;
    for (auto& c : coeffs[j]) entries.emplace_back(theta, std::move(c));
    out.emplace_back(rank, std::move(entries));
  }
  return FreeConnection(rank, std::move(out));
}

ProblemFile parse_problem_json(const json& doc) {
  if (!doc.is_object()) fail("<root>", "expected a JSON object");
  static const std::vector<std::string> known{"n", "theta", "J", "connection", "module1d", "search", "truncation",
                                              "seed", "kunneth", "pushforward", "scan", "form", "split", "splittorus",
                                              "multiplier"};
  for (const auto& [k, v] : doc.items())
    if (std::find(known.begin(), known.end(), k) == known.end()) fail(k, "unknown section");

  ProblemFile pf;
  json norm = json::object();
  const long n = as_int(require(doc, "n", "<root>"), "n");
  if (n < 1 || n > 8) fail("n", "n must be in 1..8");
  pf.n = static_cast<std::size_t>(n);
  norm["n"] = n;

  json nt;
  pf.theta = parse_theta(require(doc, "theta", "<root>"), pf.n, nt);
  norm["theta"] = nt;
  json nj;
  parse_j(require(doc, "J", "<root>"), pf, nj);
  norm["J"] = nj;

  if (doc.contains("connection")) {
    json nc;
    pf.connection = parse_connection(doc.at("connection"), pf.n, "connection", nc);
    norm["connection"] = nc;
  }
  if (doc.contains("module1d")) {
    const auto& m = doc.at("module1d");
    StandardModule1D sm;
    json nm = json::object();
    sm.q = as_int(require(m, "q", "module1d"), "module1d.q");
    nm["q"] = sm.q;
    if (m.contains("p")) sm.p = as_int(m.at("p"), "module1d.p");
    nm["p"] = sm.p;
    // tau as one complex value, or as tau_re / tau_im.
    Real tre = parse_real(json(0), "module1d"), tim = parse_real(json(1), "module1d");
    if (m.contains("tau")) {
      const auto z = parse_complex(m.at("tau"), "module1d.tau");
      tre = parse_real(json(z.value.real()), "module1d.tau");
      tim = parse_real(json(z.value.imag()), "module1d.tau");
    }
    if (m.contains("tau_re")) tre = parse_real(m.at("tau_re"), "module1d.tau_re");
    if (m.contains("tau_im")) tim = parse_real(m.at("tau_im"), "module1d.tau_im");
    sm.tau = cd(tre.value, tim.value);
    nm["tau_re"] = tre.normalized;
    nm["tau_im"] = tim.normalized;
    if (m.contains("M")) sm.M = static_cast<int>(as_int(m.at("M"), "module1d.M"));
    nm["M"] = sm.M;
    try {
      sm.validate();
    } catch (const Error& e) {
      fail("module1d", e.what());
    }
    pf.module1d = sm;
    norm["module1d"] = nm;
  }
  if (doc.contains("search")) {
    const auto& s = doc.at("search");
    if (s.contains("bound")) pf.search_bound = static_cast<int>(as_int(s.at("bound"), "search.bound"));
    if (pf.search_bound < 1 || pf.search_bound > 50) fail("search.bound", "bound must be in 1..50");
    if (s.contains("exact")) {
      if (!s.at("exact").is_boolean()) fail("search.exact", "expected a boolean");
      pf.search_exact = s.at("exact").get<bool>();
    }
    norm["search"] = {{"bound", pf.search_bound}, {"exact", pf.search_exact}};
  }
  if (doc.contains("truncation")) {
    const auto& t = doc.at("truncation");
    json ntr = json::object();
    if (t.contains("N")) {
      const long N = as_int(t.at("N"), "truncation.N");
      if (N < 1 || N > 64) fail("truncation.N", "N must be in 1..64");
      pf.truncation_N = static_cast<int>(N);
      ntr["N"] = N;
    }
    if (t.contains("tol_rel")) {
      const auto r = parse_real(t.at("tol_rel"), "truncation.tol_rel");
      if (!(r.value > 0.0 && r.value < 1.0)) fail("truncation.tol_rel", "tol_rel must be in (0, 1)");
      pf.tol_rel = r.value;
      ntr["tol_rel"] = r.normalized;
    }
    norm["truncation"] = ntr;
  }
  if (doc.contains("seed")) {
    const auto& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long>() >= 0)) fail("seed", "expected a nonnegative integer");
    pf.seed = s.get<std::uint64_t>();
    norm["seed"] = *pf.seed;
  }
  if (doc.contains("kunneth")) {
    const auto& k = doc.at("kunneth");
    auto vec = [&](const char* key) {
      const auto where = std::string("kunneth.") + key;
      const auto& a = require(k, key, "kunneth");
      if (!a.is_array() || a.empty()) fail(where, "expected a nonempty array of integers");
      std::vector<long> v;
      for (std::size_t i = 0; i < a.size(); ++i) v.push_back(as_int(a[i], idx(where, i)));
      return v;
    };
    pf.kunneth = std::make_pair(vec("a"), vec("b"));
    norm["kunneth"] = {{"a", pf.kunneth->first}, {"b", pf.kunneth->second}};
  }
  if (doc.contains("pushforward")) {
    json np;
    pf.pushforward = parse_connection(doc.at("pushforward"), 1, "pushforward", np);
    norm["pushforward"] = np;
  }
  if (doc.contains("scan")) {
    const auto& s = doc.at("scan");
    ScanData sd;
    if (s.contains("samples")) sd.samples = static_cast<int>(as_int(s.at("samples"), "scan.samples"));
    if (s.contains("bound")) sd.bound = static_cast<int>(as_int(s.at("bound"), "scan.bound"));
    if (s.contains("threads")) sd.threads = static_cast<int>(as_int(s.at("threads"), "scan.threads"));
    if (sd.samples < 1 || sd.samples > 100000) fail("scan.samples", "samples must be in 1..100000");
    if (sd.bound < 1 || sd.bound > 20) fail("scan.bound", "bound must be in 1..20");
    if (sd.threads < 0 || sd.threads > 256) fail("scan.threads", "threads must be in 0..256");
    pf.scan = sd;
    norm["scan"] = {{"samples", sd.samples}, {"bound", sd.bound}, {"threads", sd.threads}};
  }
  if (doc.contains("form")) {
    const std::size_t d = 2 * pf.n;
    const auto& f = doc.at("form");
    if (!f.is_array() || f.size() != d) fail("form", "expected a " + std::to_string(d) + "x" + std::to_string(d) + " integer matrix");
    IntMatrix E(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t a = 0; a < d; ++a) {
      if (!f[a].is_array() || f[a].size() != d) fail(idx("form", a), "expected " + std::to_string(d) + " entries");
      for (std::size_t b = 0; b < d; ++b)
        E(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = as_int(f[a][b], idx(idx("form", a), b));
    }
    try {
      pf.form = IntegerSkewForm(E);
    } catch (const Error& e) {
      fail("form", e.what());
    }
    norm["form"] = json_matrix(E);
  }
  if (doc.contains("split")) {
    const auto& s = doc.at("split");
    if (!s.is_array() || s.size() != pf.n) fail("split", "expected " + std::to_string(pf.n) + " column indices");
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const long c = as_int(s[i], idx("split", i));
      if (c < 0 || static_cast<std::size_t>(c) >= 2 * pf.n) fail(idx("split", i), "column out of range");
      cols.push_back(static_cast<std::size_t>(c));
    }
    pf.split = cols;
    norm["split"] = cols;
  }
  if (doc.contains("splittorus")) {
    const auto& s = doc.at("splittorus");
    const auto t = parse_complex(require(s, "tau", "splittorus"), "splittorus.tau");
    const auto tp = parse_complex(require(s, "tau_prime", "splittorus"), "splittorus.tau_prime");
    const auto w = parse_complex(require(s, "w", "splittorus"), "splittorus.w");
    if (!(t.value.imag() > 0.0) || !(tp.value.imag() > 0.0)) fail("splittorus", "tau and tau_prime must have positive imaginary part");
    pf.splittorus = SplitTorusData{t.value, tp.value, w.value};
    norm["splittorus"] = {{"tau", t.normalized}, {"tau_prime", tp.normalized}, {"w", w.normalized}};
  }
  if (doc.contains("multiplier")) {
    pf.multiplier = as_int(doc.at("multiplier"), "multiplier");
    if (pf.multiplier < 1 || pf.multiplier > 1000) fail("multiplier", "multiplier must be in 1..1000");
    norm["multiplier"] = pf.multiplier;
  }
  pf.normalized = std::move(norm);
  return pf;
}

ProblemFile parse_problem_file(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Byte offset to line and column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail("line " + std::to_string(line) + ", column " + std::to_string(col), "invalid JSON");
  }
  return parse_problem_json(doc);
}

std::string emit_problem_file(const ProblemFile& pf) { return pf.normalized.dump(2) + "\n"; }

json json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  if (x == 0.0) return 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

json json_complex(cd z) { return json::array({json_number(z.real()), json_number(z.imag())}); }

json json_matrix(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(json_number(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

json json_matrix(const Eigen::MatrixXcd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(json_complex(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

json json_matrix(const IntMatrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

namespace {

json rounded(const json& j) {
  if (j.is_number_float()) return json_number(j.get<double>());
  if (j.is_array()) {
    json out = json::array();
    for (const auto& x : j) out.push_back(rounded(x));
    return out;
  }
  if (j.is_object()) {
    json out = json::object();
    for (const auto& [k, v] : j.items()) out[k] = rounded(v);
    return out;
  }
  return j;
}

}  // namespace

std::string canonical_dump(const json& j) {
  // nlohmann::json objects are std::map backed, so keys come out sorted.
  return rounded(j).dump(2) + "\n";
}

}  // namespace nctorus
