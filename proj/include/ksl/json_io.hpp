#pragma once

#include <json.hpp>

#include <sstream>
#include <string>

#include "ksl/modsym.hpp"
#include "ksl/qexp.hpp"

namespace ksl {

using njson = nlohmann::json;

inline njson knsym_to_json(const KnSym& x) {
  long level = 1;
  njson terms = njson::array();
  for (const auto& [tuple, c] : x.terms) {
    njson atoms = njson::array();
    for (const Atom& a : tuple) {
      level = lcm_l(level, a.p.level());
      atoms.push_back({to_long(q_num(a.p.a1)), to_long(q_den(a.p.a1)),
                       to_long(q_num(a.p.a2)), to_long(q_den(a.p.a2))});
    }
    terms.push_back({{"coef", q_str(c)}, {"atoms", atoms}});
  }
  return {{"n", x.n}, {"level", level}, {"terms", terms}};
}

inline KnSym knsym_from_json(const njson& j) {
  KnSym out(j.at("n").get<long>());
  for (const auto& term : j.at("terms")) {
    std::vector<Atom> tuple;
    for (const auto& a : term.at("atoms")) {
      if (!a.is_array() || a.size() != 4) throw std::invalid_argument("atom needs four integers");
      tuple.emplace_back(TorsionPoint(make_q(a[0].get<long>(), a[1].get<long>()),
                                      make_q(a[2].get<long>(), a[3].get<long>())));
    }
    out.add_term(std::move(tuple), parse_q(term.at("coef").get<std::string>()));
  }
  return out;
}

inline njson testfn_to_json(const TestFn& f) {
  njson terms = njson::array();
  for (const auto& [c, coef] : f.terms) {
    njson shift = njson::array();
    for (const QQ& x : c.shift) shift.push_back(q_str(x));
    njson rows = njson::array();
    for (const Vec& row : c.lattice.basis) {
      njson r = njson::array();
      for (const QQ& x : row) r.push_back(q_str(x));
      rows.push_back(r);
    }
    terms.push_back({{"coef", coef}, {"shift", shift}, {"lattice", rows}});
  }
  return {{"dim", f.dim}, {"terms", terms}};
}

inline TestFn testfn_from_json(const njson& j) {
  long dim = j.at("dim").get<long>();
  std::vector<std::pair<Coset, long>> parts;
  for (const auto& term : j.at("terms")) {
    Vec shift;
    for (const auto& s : term.at("shift")) shift.push_back(parse_q(s.get<std::string>()));
    Mat rows;
    for (const auto& row : term.at("lattice")) {
      Vec r;
      for (const auto& s : row) r.push_back(parse_q(s.get<std::string>()));
      rows.push_back(std::move(r));
    }
    parts.emplace_back(coset(shift, lattice(rows)), term.at("coef").get<long>());
  }
  return test_fn(dim, parts);
}

inline njson divisor_to_json(const DivisorDelta0& d) {
  njson terms = njson::array();
  for (const auto& [c, coef] : d.terms)
    terms.push_back({{"cusp", cusp_str(c)}, {"coef", coef}});
  return {{"terms", terms}};
}

inline DivisorDelta0 divisor_from_json(const njson& j) {
  std::vector<std::pair<Cusp, long>> parts;
  for (const auto& term : j.at("terms"))
    parts.emplace_back(cusp_parse(term.at("cusp").get<std::string>()),
                       term.at("coef").get<long>());
  return divisor(parts);
}

// text form: coefficients normalized to one conductor, exponents ascending
inline std::string qexp_to_text(const QExp& f) {
  long L = 1;
  for (const auto& [e, c] : f.terms) L = lcm_l(L, c.conductor);
  std::ostringstream os;
  os << "conductor " << L << ", trunc " << (f.trunc ? q_str(*f.trunc) : "none") << "\n";
  for (const auto& [e, c] : f.terms)
    os << q_str(e) << " : " << cyc_str(cyc_embed(c, L)) << "\n";
  return os.str();
}

inline QExp qexp_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string header;
  std::getline(is, header);
  size_t comma = header.find(", trunc ");
  if (header.rfind("conductor ", 0) != 0 || comma == std::string::npos)
    throw std::invalid_argument("expected 'conductor L, trunc T'");
  long L = std::stol(header.substr(10, comma - 10));
  if (L < 1) throw std::invalid_argument("conductor must be positive");
  std::string tr = header.substr(comma + 8);
  QExp f;
  if (tr != "none") f.trunc = parse_q(tr);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    size_t sep = line.find(" : ");
    if (sep == std::string::npos) throw std::invalid_argument("expected 'exponent : value'");
    f.add_term(parse_q(line.substr(0, sep)), cyc_parse(L, line.substr(sep + 3)));
  }
  return f;
}

}  // namespace ksl
