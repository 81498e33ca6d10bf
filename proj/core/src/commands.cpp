#include "nctorus/commands.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <random>
#include <thread>

#include "nctorus/ktheory.hpp"

namespace nctorus {

using nlohmann::json;

namespace {

struct Context {
  const ProblemFile& pf;
  const RunOptions& opts;
  json results = json::object();
  json diagnostics = json::object();
  json options = json::object();
  bool inconclusive = false;

  TruncationBox box() {
    TruncationBox b;
    b.N = opts.truncation ? *opts.truncation : pf.truncation_N ? *pf.truncation_N : default_truncation(pf.n);
    if (b.N < 1 || b.N > 64) throw ParseError("--truncation", "N must be in 1..64");
    options["N"] = b.N;
    return b;
  }
  double tol() {
    const double t = opts.tol_rel ? *opts.tol_rel : pf.tol_rel;
    if (!(t > 0.0 && t < 1.0)) throw ParseError("--tol-rel", "tol_rel must be in (0, 1)");
    options["tol_rel"] = t;
    return t;
  }
  int bound(int fallback) {
    const int b = opts.bound ? *opts.bound : fallback;
    if (b < 1 || b > 50) throw ParseError("--bound", "bound must be in 1..50");
    options["bound"] = b;
    return b;
  }
  std::uint64_t seed() const { return opts.seed ? *opts.seed : pf.seed ? *pf.seed : 0; }
  const ComplexStructure& cs() const { return *pf.cs; }
  FreeConnection connection() const {
    if (pf.connection) return pf.connection->build(pf.theta, pf.n);
    return FreeConnection::trivial(pf.theta, pf.n, 1);
  }
};

json longs(const std::vector<long>& v) { return json(v); }

json spectral_json(const SpectralReport& r) {
  return json{{"N", r.N}, {"dims", longs(r.dims)}, {"dims_next", longs(r.dims_next)}, {"euler", r.index},
              {"stable", r.stable}, {"fast_path", r.fast_path}};
}

json gap_json(double kept, double cut, double tol_rel) {
  return json{{"sigma_kept", json_number(kept)}, {"sigma_cut", json_number(cut)}, {"tol_rel", json_number(tol_rel)}};
}

void cmd_index(Context& c) {
  const auto box = c.box();
  const double tol = c.tol();
  const auto frame = antihol_frame(c.cs());
  const auto r = index(c.cs(), frame, c.connection(), box, tol);
  c.results = {{"N", r.N},          {"index", r.index},       {"index_next", r.index_next},
               {"ker_even", r.ker_even}, {"ker_odd", r.ker_odd}, {"stable", r.stable},
               {"fast_path", r.fast_path}};
  c.diagnostics["gap"] = gap_json(r.sigma_kept, r.sigma_cut, tol);
  c.inconclusive = r.inconclusive || !r.stable;
}

void cmd_hodge(Context& c) {
  const auto box = c.box();
  const double tol = c.tol();
  const auto frame = antihol_frame(c.cs());
  const auto conn = c.connection();
  const auto s = cohomology_dims(c.cs(), frame, conn, box, tol);
  const auto ix = index(c.cs(), frame, conn, box, tol);
  c.results = spectral_json(s);
  c.results["index"] = ix.index;
  c.results["index_matches_euler"] = ix.index == s.index;
  json per = json::array();
  for (const auto& d : s.degrees)
    per.push_back({{"kernel", d.kernel}, {"threshold", json_number(d.threshold)}, {"sigma_kept", json_number(d.sigma_kept)},
                   {"sigma_cut", json_number(d.sigma_cut)}, {"inconclusive", d.inconclusive}});
  c.diagnostics["degrees"] = per;
  c.diagnostics["gap"] = gap_json(s.sigma_kept, s.sigma_cut, tol);
  c.diagnostics["index_gap"] = gap_json(ix.sigma_kept, ix.sigma_cut, tol);
  c.inconclusive = s.inconclusive || !s.stable || ix.inconclusive || !ix.stable;
}

void cmd_flatness(Context& c) {
  const auto frame = antihol_frame(c.cs());
  const auto curv = flatness_curvature(c.connection(), frame);
  c.results = {{"max_abs", json_number(curv.max_abs)}, {"is_flat", curv.is_flat}};
  c.diagnostics["tolerance"] = json_number(kFlatTolerance);
}

void cmd_kunneth(Context& c) {
  if (c.pf.kunneth) {
    c.results["dims"] = longs(kunneth_dims(c.pf.kunneth->first, c.pf.kunneth->second));
    return;
  }
  const auto bs = detect_block_structure(*c.pf.theta, c.cs());
  if (!bs.product_type) throw ParseError("kunneth", "needs a kunneth section or a product-type (theta, J)");
  const auto box = c.box();
  const double tol = c.tol();
  std::vector<long> composed{1};
  json factors = json::array();
  const auto& J = c.cs().J();
  for (std::size_t k = 0; k < c.pf.n; ++k) {
    const auto b = static_cast<Eigen::Index>(2 * k);
    auto th = make_theta(ThetaMatrix::product_blocks(std::vector<double>{(*c.pf.theta)(2 * k, 2 * k + 1)}));
    const ComplexStructure small(J.block(b, b, 2, 2));
    const auto s = cohomology_dims(small, antihol_frame(small), FreeConnection::trivial(th, 1, 1), box, tol);
    factors.push_back(longs(s.dims));
    c.inconclusive = c.inconclusive || s.inconclusive || !s.stable;
    composed = kunneth_dims(composed, s.dims);
  }
  const auto direct = cohomology_dims(c.cs(), antihol_frame(c.cs()), FreeConnection::trivial(c.pf.theta, c.pf.n, 1), box, tol);
  c.inconclusive = c.inconclusive || direct.inconclusive || !direct.stable;
  c.results = {{"factors", factors}, {"dims", longs(composed)}, {"direct", longs(direct.dims)},
               {"match", composed == direct.dims}};
  c.diagnostics["gap"] = gap_json(direct.sigma_kept, direct.sigma_cut, tol);
}

void cmd_pushforward(Context& c) {
  if (!c.pf.pushforward) throw ParseError("pushforward", "missing section");
  if (c.pf.n < 2) throw ParseError("n", "pushforward needs n >= 2");
  const auto bs = detect_block_structure(*c.pf.theta, c.cs());
  if (!bs.splitting) throw ParseError("J", "J is not block-diagonal with a leading 2x2 block");
  const auto box = c.box();
  const double tol = c.tol();
  const ThetaMatrix small_theta = ThetaMatrix::product_blocks(std::vector<double>{*bs.theta12});
  const auto small_ptr = make_theta(small_theta);
  const ComplexStructure small_cs(c.cs().J().topLeftCorner(2, 2));
  const auto small_conn = c.pf.pushforward->build(small_ptr, 1);
  const auto small = cohomology_dims(small_cs, antihol_frame(small_cs), small_conn, box, tol);
  const auto big_frame = block_adapted_frame(antihol_frame(c.cs()));
  const auto big_conn = pushforward_connection(small_theta, small_conn, c.cs(), big_frame, c.pf.theta);
  const auto big = cohomology_dims(c.cs(), big_frame, big_conn, box, tol);
  c.results = {{"small", spectral_json(small)}, {"pushed", spectral_json(big)}, {"h0_small", small.dims[0]},
               {"h0_pushed", big.dims[0]}, {"bound_holds", big.dims[0] >= small.dims[0]}};
  c.diagnostics["small_gap"] = gap_json(small.sigma_kept, small.sigma_cut, tol);
  c.diagnostics["pushed_gap"] = gap_json(big.sigma_kept, big.sigma_cut, tol);
  c.inconclusive = small.inconclusive || big.inconclusive || !small.stable || !big.stable;
}

json standard1d_json(const Standard1DReport& r) {
  return {{"h0", r.h0}, {"h1", r.h1}, {"index", r.index}, {"h0_double", r.h0_double}, {"h1_double", r.h1_double},
          {"stable", r.stable}};
}

void cmd_standard1d(Context& c) {
  if (!c.pf.module1d) throw ParseError("module1d", "missing section");
  const auto& sm = *c.pf.module1d;
  const double tol = c.tol();
  const auto r = standard_module_cohomology(sm, tol);
  c.results = standard1d_json(r);
  c.results["degree"] = sm.q;
  c.results["rank"] = sm.p;
  c.results["one_group_nonzero"] = (r.h0 == 0) != (r.h1 == 0);
  c.diagnostics["gap"] = gap_json(r.sigma_kept, r.sigma_cut, tol);
  c.diagnostics["M"] = sm.M;
  c.inconclusive = r.inconclusive || !r.stable;
}

json pair_json(const Eigen::Vector4i& a, const Eigen::Vector4i& b) {
  return {{"alpha", {a(0), a(1), a(2), a(3)}}, {"beta", {b(0), b(1), b(2), b(3)}}};
}

json certificate_json(const NonalgCertificate& cert, std::size_t max_pairs) {
  json pairs = json::array();
  for (std::size_t i = 0; i < cert.vanishing_pairs.size() && i < max_pairs; ++i) {
    auto p = pair_json(cert.vanishing_pairs[i].alpha, cert.vanishing_pairs[i].beta);
    p["value"] = json_number(cert.vanishing_pairs[i].value);
    pairs.push_back(std::move(p));
  }
  return {{"certified", cert.certified},
          {"vanishing_pair_count", cert.vanishing_pairs.size()},
          {"vanishing_pairs", pairs},
          {"top_value", json_complex(cert.top_value)},
          {"top_nonzero", cert.top_nonzero},
          {"tol", json_number(cert.tol)}};
}

void cmd_nonalg_scan(Context& c) {
  const ScanData sd = c.pf.scan.value_or(ScanData{});
  const int B = c.bound(sd.bound);
  const std::uint64_t seed = c.seed();
  const auto samples = static_cast<std::size_t>(sd.samples);
  std::vector<NonalgCertificate> certs(samples);
  std::size_t threads = sd.threads > 0 ? static_cast<std::size_t>(sd.threads)
                                       : std::min<std::size_t>(8, std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, samples);
  // Each sample owns its seed, and results land in their own slot, so scheduling cannot change the report.
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  auto worker = [&](std::size_t w) {
    try {
      for (std::size_t i = next++; i < samples; i = next++) {
        std::mt19937_64 rng(splitmix64(seed ^ splitmix64(i)));
        const auto cs = random_complex_structure(2, rng);
        const auto th = random_theta(2, rng);
        certs[i] = nonalg_certificate(cs, th, B);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(worker, w);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::size_t certified = 0;
  json failures = json::array();
  for (std::size_t i = 0; i < samples; ++i) {
    if (certs[i].certified) {
      ++certified;
      continue;
    }
    auto f = certificate_json(certs[i], 3);
    f["sample"] = i;
    failures.push_back(std::move(f));
  }
  c.results = {{"samples", samples},
               {"bound", B},
               {"certified", certified},
               {"certified_fraction", json_number(static_cast<double>(certified) / static_cast<double>(samples))},
               {"failures", failures}};
  if (c.pf.n == 2) c.results["input"] = certificate_json(nonalg_certificate(c.cs(), *c.pf.theta, B), 8);
  c.diagnostics["threads"] = "per-sample seeds splitmix64(seed ^ splitmix64(i))";
}

RiemannSearchResult search(Context& c) {
  RiemannSearchOptions o;
  o.bound = c.bound(c.pf.search_bound);
  o.exact = c.opts.exact || c.pf.search_exact;
  o.exact_period = c.pf.exact_period;
  c.options["exact"] = o.exact;
  return riemann_form_search(c.cs(), o);
}

json hermitian_json(const HermitianFormReport& h) {
  std::vector<double> eig(h.eigenvalues.data(), h.eigenvalues.data() + h.eigenvalues.size());
  json e = json::array();
  for (double x : eig) e.push_back(json_number(x));
  return {{"eigenvalues", e}, {"positive_definite", h.positive_definite}, {"margin", json_number(h.margin)}};
}

json search_json(const RiemannSearchResult& r) {
  json out = {{"verdict", verdict_name(r.verdict)}, {"bound", r.bound},
              {"kernel_dim", r.kernel_dim},         {"real_kernel_dim", r.real_kernel_dim},
              {"exact_path", r.exact_path},         {"candidates_tested", r.candidates_tested}};
  if (r.form) {
    out["form"] = json_matrix(r.form->E);
    out["eigenvalues"] = hermitian_json(*r.hermitian)["eigenvalues"];
    try {
      out["divisors"] = frobenius_basis(*r.form).divisors;
    } catch (const OverflowError&) {
      out["divisors"] = nullptr;
    }
  }
  return out;
}

void cmd_riemann_check(Context& c) {
  const auto r = search(c);
  c.results = search_json(r);
  c.diagnostics["message"] = r.diagnostics;
  c.diagnostics["borderline_candidates"] = r.borderline_candidates;
  c.inconclusive = r.verdict == Verdict::inconclusive;
}

IntegerSkewForm form_or_search(Context& c) {
  if (c.pf.form) return *c.pf.form;
  const auto r = search(c);
  c.diagnostics["search"] = search_json(r);
  if (!r.form) throw ParseError("form", std::string("no form given and the search returned ") + verdict_name(r.verdict));
  return *r.form;
}

void cmd_frobenius(Context& c) {
  if (!c.pf.form) throw ParseError("form", "missing section");
  const auto fb = frobenius_basis(*c.pf.form);
  c.results = {{"U", json_matrix(fb.U)}, {"divisors", fb.divisors}, {"verified", verify_frobenius(*c.pf.form, fb)}};
}

void cmd_decompose(Context& c) {
  const auto E = form_or_search(c);
  const auto fb = frobenius_basis(E);
  const auto d = decompose_riemann_form(E, fb, c.cs());
  json pieces = json::array();
  for (const auto& p : d.pieces) {
    json jp = {{"S", json_matrix(p.S.E)}, {"decomposable", p.decomposable}, {"compatible", p.compatible}};
    if (p.hermitian) jp["hermitian"] = hermitian_json(*p.hermitian);
    pieces.push_back(std::move(jp));
  }
  c.results = {{"form", json_matrix(E.E)}, {"divisors", fb.divisors}, {"pieces", pieces}, {"sum_exact", d.sum_exact},
               {"all_compatible", d.all_compatible}};
}

json siegel_json(const SiegelResult& s) {
  return {{"Omega", json_matrix(s.Omega)}, {"Z", json_matrix(s.Z)}, {"symmetric", s.symmetric}, {"positive", s.positive},
          {"asymmetry", json_number(s.asymmetry)}, {"min_imag_eigenvalue", json_number(s.min_imag_eigenvalue)}};
}

std::vector<std::size_t> canonical_split(std::size_t n) {
  std::vector<std::size_t> s;
  for (std::size_t j = n; j < 2 * n; ++j) s.push_back(j);
  return s;
}

void cmd_siegel(Context& c) {
  const auto pm = period_from_j(c.cs());
  if (c.pf.form || !c.pf.split) {
    // In a Frobenius basis of a Riemann form, with the canonical split.
    const auto E = form_or_search(c);
    const auto fb = frobenius_basis(E);
    PeriodMatrix q;
    q.Q = pm.Q * fb.U.cast<double>().cast<cd>();
    c.results = siegel_json(siegel_normalize(q, canonical_split(c.pf.n), fb.divisors));
    c.results["basis"] = json_matrix(fb.U);
    c.results["divisors"] = fb.divisors;
    c.results["split"] = canonical_split(c.pf.n);
    return;
  }
  c.results = siegel_json(siegel_normalize(pm, *c.pf.split));
  c.results["split"] = *c.pf.split;
}

void cmd_splittorus(Context& c) {
  if (!c.pf.splittorus) throw ParseError("splittorus", "missing section");
  const auto& st = *c.pf.splittorus;
  const auto pm = split_torus_example(st.tau, st.tau_prime, st.w);
  const auto cs = j_from_period(pm);
  auto rat = [](cd z) {
    return GaussRational(rational_with_denominator(z.real(), 10000000), rational_with_denominator(z.imag(), 10000000));
  };
  RiemannSearchOptions o;
  o.bound = c.bound(c.pf.search_bound);
  o.exact = true;
  o.exact_period = split_torus_exact(rat(st.tau), rat(st.tau_prime), rat(st.w));
  const auto exact = riemann_form_search(cs, o);
  o.exact = false;
  o.exact_period.reset();
  const auto floating = riemann_form_search(cs, o);
  c.results = {{"Q", json_matrix(pm.Q)},
               {"J", json_matrix(cs.J())},
               {"exact", search_json(exact)},
               {"float", search_json(floating)},
               {"quotient_lattice", {json_complex(pm.Q(1, 2)), json_complex(pm.Q(1, 3))}}};
  c.diagnostics["exact"] = exact.diagnostics;
  c.diagnostics["float"] = floating.diagnostics;
  c.diagnostics["rationalization_denominator"] = 10000000;
  c.inconclusive = exact.verdict == Verdict::inconclusive;
}

void cmd_ncriemann_bound(Context& c) {
  const auto E = form_or_search(c);
  const long k = c.pf.multiplier;
  c.options["multiplier"] = k;
  const auto b = ncriemann_h0_bound(*c.pf.theta, c.cs(), E, k);
  c.results = {{"bound", b.bound},
               {"degree", b.degree},
               {"tau", json_complex(b.tau)},
               {"divisors", b.divisors},
               {"theta_small", json_number(b.theta_small)},
               {"exceeds_one", b.bound > 1},
               {"module", standard1d_json(b.module)}};
  c.diagnostics["gap"] = gap_json(b.module.sigma_kept, b.module.sigma_cut, 1e-8);
  c.inconclusive = b.module.inconclusive || !b.module.stable;
}

void cmd_detect_blocks(Context& c) {
  const auto bs = detect_block_structure(*c.pf.theta, c.cs());
  c.results = {{"product_type", bs.product_type}, {"splitting", bs.splitting},
               {"theta12", bs.theta12 ? json_number(*bs.theta12) : json(nullptr)}};
}

using Handler = std::function<void(Context&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{
      {"index", cmd_index},
      {"hodge", cmd_hodge},
      {"flatness", cmd_flatness},
      {"kunneth", cmd_kunneth},
      {"pushforward", cmd_pushforward},
      {"standard1d", cmd_standard1d},
      {"nonalg-scan", cmd_nonalg_scan},
      {"riemann-check", cmd_riemann_check},
      {"frobenius", cmd_frobenius},
      {"decompose", cmd_decompose},
      {"siegel", cmd_siegel},
      {"splittorus", cmd_splittorus},
      {"ncriemann-bound", cmd_ncriemann_bound},
      {"detect-blocks", cmd_detect_blocks},
  };
  return h;
}

json version_json() { return {{"library", kLibraryVersion}, {"schema", kReportSchema}}; }

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : handlers()) v.push_back(k);
    return v;
  }();
  return names;
}

RunResult run(const std::string& command, const ProblemFile& pf, const RunOptions& opts) {
  const auto it = handlers().find(command);
  if (it == handlers().end()) throw ParseError("--command", "unknown command '" + command + "'");
  Context c{pf, opts};
  it->second(c);
  RunResult out;
  out.report = {{"command", command},
                {"inputs", {{"problem", pf.normalized}, {"options", c.options}}},
                {"results", c.results},
                {"diagnostics", c.diagnostics},
                {"version", version_json()},
                {"seed", c.seed()}};
  out.report["results"]["conclusive"] = !c.inconclusive;
  out.exit_code = c.inconclusive ? kExitInconclusive : kExitOk;
  return out;
}

RunResult run_text(const std::string& command, const std::string& problem_text, const RunOptions& opts) {
  auto error_report = [&](const char* kind, const std::string& msg, int code) {
    RunResult r;
    r.report = {{"command", command},
                {"error", {{"kind", kind}, {"message", msg}}},
                {"version", version_json()},
                {"seed", opts.seed.value_or(0)}};
    r.exit_code = code;
    return r;
  };
  try {
    const auto pf = parse_problem_file(problem_text);
    return run(command, pf, opts);
  } catch (const ParseError& e) {
    return error_report("input", e.what(), kExitInputError);
  } catch (const DomainError& e) {
    return error_report("domain", e.what(), kExitInputError);
  } catch (const ContextError& e) {
    return error_report("context", e.what(), kExitInputError);
  } catch (const NonFlatError& e) {
    return error_report("nonflat", e.what(), kExitInputError);
  } catch (const ConditioningError& e) {
    return error_report("conditioning", e.what(), kExitInconclusive);
  } catch (const OverflowError& e) {
    return error_report("overflow", e.what(), kExitInconclusive);
  }
}

}  // namespace nctorus
