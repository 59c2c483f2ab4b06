#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "ksl/json_io.hpp"
#include "ksl/numeric.hpp"
#include "ksl/residue.hpp"

namespace {

using namespace ksl;

struct Config {
  QQ trunc = QQ(5);
  long level_cap = 8;  // bounds suite levels; 3x this caps relator searches
  long N = 3;
  long n = 2;
  unsigned seed = 1;
  double tol = 1e-9;
  long jobs = 1;
};

long env_long(const char* name, long dflt) {
  const char* v = std::getenv(name);
  return v ? std::stol(v) : dflt;
}

// one verification item; the id is a stable machine name for traceability
struct Entry {
  std::string id;
  CheckResult res;
};

const char* status_str(CheckResult::Status s) {
  switch (s) {
    case CheckResult::Status::pass: return "pass";
    case CheckResult::Status::fail: return "fail";
    default: return "inconclusive";
  }
}

int report(const std::string& suite, const std::vector<Entry>& entries) {
  njson checks = njson::array();
  bool fail = false, inc = false;
  for (const auto& e : entries) {
    checks.push_back(
        {{"id", e.id}, {"status", status_str(e.res.status)}, {"detail", e.res.detail}});
    fail = fail || e.res.status == CheckResult::Status::fail;
    inc = inc || e.res.status == CheckResult::Status::inconclusive;
  }
  int code = fail ? 1 : inc ? 3 : 0;
  njson out{{"suite", suite},
            {"status", code == 0   ? "pass"
                       : code == 1 ? "fail"
                                   : "inconclusive"},
            {"checks", checks}};
  std::cout << out.dump(2) << "\n";
  return code;
}

CheckResult as_check(bool ok, const std::string& label) {
  return ok ? CheckResult::pass(label) : CheckResult::fail(label);
}

TorsionPoint rand_point(std::mt19937& rng, long N) {
  while (true) {
    TorsionPoint p(make_q(static_cast<long>(rng() % N), N),
                   make_q(static_cast<long>(rng() % N), N));
    if (!p.is_zero()) return p;
  }
}

std::vector<Entry> suite_theta(const Config& cfg) {
  std::vector<Entry> out;
  for (long r = -1; r <= 1; ++r)
    for (long s = -1; s <= 1; ++s)
      out.push_back({"theta.transform." + std::to_string(r) + "." + std::to_string(s),
                     verify_transform(r, s, cfg.trunc)});
  out.push_back({"theta.transform.composition", verify_transform_composition(2, 2)});
  return out;
}

std::vector<Entry> suite_siegel(const Config& cfg) {
  std::vector<Entry> out;
  for (long N : {2, 3})
    for (const auto& a : torsion_points(N, false)) {
      std::string tag = ".N" + std::to_string(N) + "." + torsion_str(a);
      out.push_back({"siegel.distribution" + tag, verify_distribution(a, 2, cfg.trunc)});
      out.push_back({"siegel.link" + tag, verify_siegel_link(a, cfg.trunc)});
    }
  out.push_back({"siegel.restriction.N2", verify_restriction_all(2, cfg.trunc)});
  out.push_back({"siegel.restriction.N3", verify_restriction_all(3, cfg.trunc)});
  return out;
}

std::vector<Entry> suite_numeric(const Config& cfg) {
  std::vector<Entry> out;
  CD u(0.17, 0.23), tau(0.31, 1.27), tau2(-0.2, 0.9);
  for (long N : {1, 2, 3})
    out.push_back({"numeric.s_transform.N" + std::to_string(N),
                   verify_S_transform(u, tau, N, cfg.tol)});
  out.push_back({"numeric.eta_psi.1", verify_eta_psi(tau, cfg.tol)});
  out.push_back({"numeric.eta_psi.2", verify_eta_psi(tau2, cfg.tol)});
  out.push_back({"numeric.series_vs_product.1",
                 verify_exact_numeric_agreement(TorsionPoint(make_q(1, 3), QQ(0)), cfg.trunc, tau)});
  out.push_back({"numeric.series_vs_product.2",
                 verify_exact_numeric_agreement(TorsionPoint(make_q(1, 2), make_q(1, 2)),
                                                cfg.trunc, tau2)});
  return out;
}

Entry derive_entry(long N, const TorsionPoint& a, const TorsionPoint& b, const TorsionPoint& c) {
  std::string id = "manin.derive.N" + std::to_string(N) + "." + torsion_str(a) + "." +
                   torsion_str(b) + "." + torsion_str(c);
  if (a.is_zero() || b.is_zero() || c.is_zero()) {
    KnSym r = ksym_points({a, b}) + ksym_points({b, c}) + ksym_points({c, a});
    return {id, as_check(r.is_zero(), "degenerate triple, relator identically zero")};
  }
  try {
    KnSym derived = derive_manin(N, a, b, c);
    KnSym expected = ksym_points({a, b}) + ksym_points({b, c}) + ksym_points({c, a});
    return {id, as_check(derived == expected, "three-term relator recovered from residues")};
  } catch (const std::logic_error& e) {
    return {id, CheckResult::fail(e.what())};
  }
}

std::vector<Entry> suite_residue(const Config& cfg) {
  std::vector<Entry> out;
  long N = cfg.N;
  TorsionPoint a(make_q(1, N), QQ(0)), b(QQ(0), make_q(1, N));
  out.push_back(derive_entry(N, a, b, TorsionPoint() - a - b));
  out.push_back(derive_entry(N, a, a, TorsionPoint() - a - a));
  out.push_back({"residue.translation_sum.N" + std::to_string(N),
                 as_check(translate_sum(FreeSlot::third, a, b, N).is_zero(),
                          "theta sum over one free slot vanishes")});
  return out;
}

std::vector<Entry> suite_manin(const Config& cfg) {
  std::vector<Entry> out;
  if (cfg.N == 1) {
    out.push_back({"manin.derive.N1",
                   as_check(derive_manin(1, TorsionPoint(), TorsionPoint(), TorsionPoint())
                                .is_zero(),
                            "A(1) carries only the trivial relator")});
    return out;
  }
  for (const auto& a : torsion_points(cfg.N))
    for (const auto& b : torsion_points(cfg.N)) out.push_back(derive_entry(cfg.N, a, b, TorsionPoint() - a - b));
  return out;
}

std::vector<Entry> suite_cocycle(const Config& cfg) {
  std::vector<Entry> out;
  std::mt19937 rng(cfg.seed);
  TorsionPoint p = rand_point(rng, cfg.N);
  out.push_back({"cocycle.n1",
                 as_check(cocycle_sum({p, p}).is_zero(), "single-point cocycle cancels exactly")});
  for (long n : {2L, 3L}) {
    std::set<RelatorKind> kinds{RelatorKind::manin};
    if (n > 2) kinds.insert(RelatorKind::product_lift);
    RelatorSet rs = relators(cfg.N, n, kinds, 3 * cfg.level_cap);
    for (int k = 0; k < 5; ++k) {
      std::vector<TorsionPoint> pts(1);
      do {
        pts.resize(1);
        pts[0] = TorsionPoint();
        for (long i = 0; i < n; ++i) {
          pts.push_back(rand_point(rng, cfg.N));
          pts[0] = pts[0] + pts.back();
        }
      } while (pts[0].is_zero());
      SpanCert cert = in_span(cocycle_sum(pts), rs);
      out.push_back({"cocycle.n" + std::to_string(n) + ".case" + std::to_string(k),
                     as_check(cert.member, "alternating sum lands in the relator span")});
    }
  }
  return out;
}

std::vector<Entry> suite_mu(const Config& cfg) {
  std::vector<Entry> out;
  TestFn f1 = test_fn(2, {{coset({make_q(1, 3), QQ(0)}, lattice(mat_identity(2))), 1}});
  TestFn f2 = test_fn(2, {{coset({make_q(1, 2), make_q(1, 2)}, lattice(mat_identity(2))), 1}});
  TestFn f3 = test_fn(2, {{coset({make_q(1, 2), QQ(0)}, lattice(mat_identity(2))), 1},
                          {coset({QQ(0), QQ(0)}, lattice_scaled(QQ(2), 2)), -2}});
  out.push_back({"mu.welldef.1", verify_mu_welldef(f1, QQ(1), QQ(3), cfg.trunc)});
  out.push_back({"mu.welldef.2", verify_mu_welldef(f2, QQ(2), QQ(4), cfg.trunc)});
  out.push_back({"mu.welldef.3", verify_mu_welldef(f3, QQ(2), QQ(4), cfg.trunc)});
  return out;
}

std::vector<Entry> suite_modsym(const Config& cfg) {
  std::vector<Entry> out;
  TorsionPoint a(make_q(1, 3), QQ(0)), b(QQ(0), make_q(1, 3));
  TestFn f = test_fn(4, {{coset({a.a1, a.a2, b.a1, b.a2}, lattice(mat_identity(4))), 1}});
  Cusp inf = cusp_infinity(), zero = cusp(0, 1);

  out.push_back({"modsym.two_term.exact",
                 as_check((xi2(inf, zero, f) + xi2(zero, inf, f)).is_zero(),
                          "path reversal negates the symbol")});
  out.push_back({"modsym.torus.block",
                 as_check(verify_torus_independence(inf, zero, f, {QQ(2), QQ(1)}),
                          "diagonal rescale of the section matrix")});
  out.push_back({"modsym.cgcom.identity", as_check(verify_cgcom(mat_identity(2), f),
                                                   "kernel slopes of the identity tuple")});
  out.push_back({"modsym.cgcom.shear",
                 as_check(verify_cgcom(Mat{{QQ(1), QQ(0)}, {QQ(1), QQ(1)}}, f),
                          "kernel slopes of a shear tuple")});

  std::vector<Cusp> pool{inf, zero, cusp(1, 1), cusp(-1, 1), cusp(2, 1), cusp(1, 2)};
  std::mt19937 rng(cfg.seed);
  for (int k = 0; k < 3; ++k) {
    size_t i = rng() % pool.size(), j, l;
    do j = rng() % pool.size();
    while (j == i);
    do l = rng() % pool.size();
    while (l == i || l == j);
    ManinCertificates mc = verify_manin_modsym(pool[i], pool[j], pool[l], f);
    std::string tag = cusp_str(pool[i]) + ">" + cusp_str(pool[j]) + ">" + cusp_str(pool[l]);
    out.push_back({"modsym.manin." + tag,
                   as_check(mc.two_term.member && mc.three_term.member,
                            "certificates at level " + std::to_string(mc.level))});
  }
  return out;
}

std::vector<Entry> suite_axioms(const Config& cfg) {
  AxiomReport rep = verify_axioms(cfg.n, cfg.N, cfg.seed);
  std::vector<Entry> out;
  std::string base =
      "axioms.n" + std::to_string(rep.n) + ".N" + std::to_string(rep.level) + ".";
  for (size_t i = 0; i < rep.checks.size(); ++i)
    out.push_back({base + std::to_string(i), rep.checks[i]});
  return out;
}

int cmd_verify(const std::string& suite, const Config& cfg) {
  if ((suite == "residue" || suite == "manin") && cfg.level_cap < 3)
    throw std::invalid_argument("residue suites need KSL_LEVEL_CAP >= 3");
  if (suite == "theta") return report(suite, suite_theta(cfg));
  if (suite == "siegel") return report(suite, suite_siegel(cfg));
  if (suite == "numeric") return report(suite, suite_numeric(cfg));
  if (suite == "residue") return report(suite, suite_residue(cfg));
  if (suite == "manin") return report(suite, suite_manin(cfg));
  if (suite == "cocycle") return report(suite, suite_cocycle(cfg));
  if (suite == "mu") return report(suite, suite_mu(cfg));
  if (suite == "modsym") return report(suite, suite_modsym(cfg));
  if (suite == "axioms") return report(suite, suite_axioms(cfg));
  throw std::invalid_argument("unknown suite: " + suite);
}

std::string tq_text(const TQExp& f) {
  std::ostringstream os;
  os << "trunc " << (f.trunc ? q_str(*f.trunc) : "none") << "\n";
  QQ cur;
  bool open = false;
  for (const auto& [k, c] : f.terms) {
    if (!open || k.first != cur) {
      if (open) os << "\n";
      os << q_str(k.first) << " : ";
      cur = k.first;
      open = true;
    } else {
      os << " + ";
    }
    os << "(" << cyc_str(c) << ")*t^(" << q_str(k.second) << ")";
  }
  if (open) os << "\n";
  return os.str();
}

TorsionPoint parse_point(const std::string& s) {
  size_t comma = s.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("point needs two coordinates");
  return TorsionPoint(parse_q(s.substr(0, comma)), parse_q(s.substr(comma + 1)));
}

Mat parse_matrix(const std::string& s) {
  Mat m;
  std::stringstream rows(s);
  std::string row;
  while (std::getline(rows, row, ';')) {
    Vec r;
    std::stringstream entries(row);
    std::string e;
    while (std::getline(entries, e, ',')) r.push_back(parse_q(e));
    if (r.empty()) throw std::invalid_argument("empty matrix row");
    m.push_back(std::move(r));
  }
  if (m.empty()) throw std::invalid_argument("empty matrix");
  return m;
}

TestFn load_testfn(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return testfn_from_json(njson::parse(in));
}

long span_rank(const std::vector<KnSym>& rels) {
  std::map<std::vector<Atom>, std::map<std::vector<Atom>, QQ>> pivots;
  long rank = 0;
  for (const auto& r : rels) {
    std::map<std::vector<Atom>, QQ> row = r.terms;
    while (!row.empty()) {
      auto lead = row.begin()->first;
      auto p = pivots.find(lead);
      if (p == pivots.end()) {
        QQ inv = QQ(1) / row.begin()->second;
        for (auto& [k, v] : row) v *= inv;
        pivots.emplace(std::move(lead), std::move(row));
        ++rank;
        break;
      }
      QQ c = row.begin()->second;
      for (const auto& [k, v] : p->second) {
        auto it = row.emplace(k, QQ(0)).first;
        it->second -= c * v;
        if (it->second == 0) row.erase(it);
      }
    }
  }
  return rank;
}

const char* kind_str(RelatorKind k) {
  switch (k) {
    case RelatorKind::manin: return "manin";
    case RelatorKind::distribution: return "distribution";
    default: return "product_lift";
  }
}

RelatorKind parse_kind(const std::string& s) {
  if (s == "manin") return RelatorKind::manin;
  if (s == "distribution") return RelatorKind::distribution;
  if (s == "product_lift") return RelatorKind::product_lift;
  throw std::invalid_argument("unknown relator kind: " + s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact arithmetic of Siegel-unit symbols: expansions, relator algebra, "
               "and verification suites"};
  app.require_subcommand(1);

  Config cfg;
  cfg.level_cap = env_long("KSL_LEVEL_CAP", 8);
  std::string trunc_s = "5";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--trunc", trunc_s, "series truncation, rational p/q")->envname("KSL_TRUNC");
    sub->add_option("--N", cfg.N, "torsion level");
    sub->add_option("--n", cfg.n, "symbol arity");
    sub->add_option("--seed", cfg.seed, "rng seed for seeded batteries")->envname("KSL_SEED");
    sub->add_option("--tol", cfg.tol, "numeric tolerance")->envname("KSL_TOL");
    sub->add_option("--jobs", cfg.jobs, "parallelism cap (suites are pure)")
        ->envname("KSL_JOBS");
  };

  auto* exp = app.add_subcommand("expand", "print an exact series expansion");
  exp->require_subcommand(1);
  std::string arg1, arg2, point_s = "0,0";
  auto* exp_siegel = exp->add_subcommand("siegel", "Siegel unit g_a as a q-series");
  exp_siegel->add_option("a1", arg1, "first coordinate of a")->required();
  exp_siegel->add_option("a2", arg2, "second coordinate of a")->required();
  add_common(exp_siegel);
  auto* exp_theta = exp->add_subcommand("theta", "theta specialized along u = d1 tau + d2");
  exp_theta->add_option("d1", arg1)->required();
  exp_theta->add_option("d2", arg2)->required();
  add_common(exp_theta);
  auto* exp_ntheta = exp->add_subcommand("ntheta", "level-N theta quotient at a");
  exp_ntheta->add_option("--a", point_s, "torsion point a1,a2")->required();
  add_common(exp_ntheta);

  auto* ver = app.add_subcommand("verify", "run a verification suite, report JSON");
  std::string suite;
  ver->add_option("suite", suite,
                  "theta|siegel|numeric|residue|manin|cocycle|mu|modsym|axioms")
      ->required();
  add_common(ver);

  auto* ev = app.add_subcommand("eval", "evaluate a symbol against a test function");
  ev->require_subcommand(1);
  std::string cusp_r, cusp_s, fn_path, matrix_s;
  auto* ev_xi2 = ev->add_subcommand("xi2", "two-cusp symbol");
  ev_xi2->add_option("r", cusp_r, "source cusp, p/q or inf")->required();
  ev_xi2->add_option("s", cusp_s, "target cusp, p/q or inf")->required();
  ev_xi2->add_option("testfn", fn_path, "test function JSON path")->required();
  auto* ev_xin = ev->add_subcommand("xin", "functional-tuple symbol");
  ev_xin->add_option("--matrix", matrix_s, "rows 'a,b;c,d' of the tuple")->required();
  ev_xin->add_option("testfn", fn_path, "test function JSON path")->required();

  auto* rel = app.add_subcommand("relators", "dump a relator basis with its rank");
  std::string kinds_s = "manin";
  long cap = 0;
  rel->add_option("--N", cfg.N, "torsion level")->required();
  rel->add_option("--n", cfg.n, "symbol arity");
  rel->add_option("--kinds", kinds_s, "comma list: manin,distribution,product_lift");
  rel->add_option("--cap", cap, "level cap for distribution scalings");

  try {
    app.parse(argc, argv);
    cfg.trunc = parse_q(trunc_s);
    if (cfg.trunc <= 0) throw std::invalid_argument("truncation must be positive");

    if (exp_siegel->parsed()) {
      TorsionPoint a(parse_q(arg1), parse_q(arg2));
      std::cout << qexp_to_text(siegel_unit(a, cfg.trunc));
      return 0;
    }
    if (exp_theta->parsed()) {
      std::cout << qexp_to_text(theta_specialized(parse_q(arg1), parse_q(arg2), cfg.trunc));
      return 0;
    }
    if (exp_ntheta->parsed()) {
      NTheta nt = ntheta_a(cfg.N, parse_point(point_s), cfg.trunc);
      auto v = nt.qval();
      std::cout << "qval " << (v ? q_str(*v) : "unknown") << "\n"
                << "numerator\n"
                << tq_text(nt.num) << "denominator\n"
                << tq_text(nt.den);
      return 0;
    }
    if (ver->parsed()) return cmd_verify(suite, cfg);
    if (ev_xi2->parsed()) {
      KnSym v = xi2(cusp_parse(cusp_r), cusp_parse(cusp_s), load_testfn(fn_path));
      std::cout << knsym_to_json(v).dump() << "\n";
      return 0;
    }
    if (ev_xin->parsed()) {
      KnSym v = xi_n(parse_matrix(matrix_s), load_testfn(fn_path));
      std::cout << knsym_to_json(v).dump() << "\n";
      return 0;
    }
    if (rel->parsed()) {
      std::set<RelatorKind> kinds;
      std::stringstream ks(kinds_s);
      std::string k;
      while (std::getline(ks, k, ',')) kinds.insert(parse_kind(k));
      RelatorSet rs = relators(cfg.N, cfg.n, kinds, cap > 0 ? cap : 3 * cfg.level_cap);
      njson rjson = njson::array(), kjson = njson::array();
      for (const auto& r : rs.relators) rjson.push_back(knsym_to_json(r));
      for (RelatorKind kt : rs.kind_tags) kjson.push_back(kind_str(kt));
      njson out{{"level", rs.level},
                {"arity", rs.arity},
                {"count", rs.relators.size()},
                {"rank", span_rank(rs.relators)},
                {"kinds", kjson},
                {"relators", rjson}};
      std::cout << out.dump(2) << "\n";
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
