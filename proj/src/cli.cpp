#include "orbitspec/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "orbitspec/bitset.hpp"
#include "orbitspec/combinatorics.hpp"
#include "orbitspec/common.hpp"
#include "orbitspec/expsum.hpp"
#include "orbitspec/intlinalg.hpp"
#include "orbitspec/intpoly.hpp"
#include "orbitspec/modular.hpp"
#include "orbitspec/spectral.hpp"
#include "orbitspec/valueset.hpp"

namespace orbitspec {
namespace {

using json = nlohmann::ordered_json;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

Int parse_int(const std::string& s) {
  try {
    if (s.empty()) throw std::invalid_argument("empty");
    return Int(s);
  } catch (const std::invalid_argument&) {
    throw UsageError("not an integer: '" + s + "'");
  }
}

std::int64_t parse_i64(const std::string& s) { return to_i64(parse_int(s)); }

std::vector<std::int64_t> parse_i64_list(const std::string& s, char sep) {
  std::vector<std::int64_t> out;
  for (const auto& tok : split(s, sep)) out.push_back(parse_i64(tok));
  return out;
}

bool consume_prefix(std::string& s, const std::string& prefix) {
  if (s.rfind(prefix, 0) != 0) return false;
  s = s.substr(prefix.size());
  return true;
}

json int_json(const Int& v) { return v.get_str(); }
json rat_json(const Rat& r) { return rational_string(r); }

json int_vec_json(const std::vector<Int>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(int_json(x));
  return a;
}

json rat_vec_json(const std::vector<Rat>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(rat_json(x));
  return a;
}

json point_json(const std::vector<Int>& v) { return int_vec_json(v); }

// Long sorted residue lists compress to runs of consecutive values.
json residue_list_json(const std::vector<std::int64_t>& v) {
  if (v.size() <= 10000) return json(v);
  json runs = json::array();
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j + 1 < v.size() && v[j + 1] == v[j] + 1) ++j;
    runs.push_back(json::array({v[i], static_cast<std::int64_t>(j - i + 1)}));
    i = j + 1;
  }
  return json{{"encoding", "rle"}, {"length", v.size()}, {"runs", runs}};
}

json matrix_json(const IntMatrix& m) {
  json rows = json::array();
  for (const auto& row : m) rows.push_back(int_vec_json(row));
  return rows;
}

struct CheckList {
  json items = json::array();
  bool all_pass = true;
  void add(const std::string& id, bool ok, const std::string& detail) {
    items.push_back(json{{"id", id}, {"status", ok ? "pass" : "fail"}, {"detail", detail}});
    all_pass = all_pass && ok;
  }
};

void render_text(const json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items())
      render_text(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array()) {
    std::size_t i = 0;
    for (const auto& v : j) render_text(v, prefix + "[" + std::to_string(i++) + "]", out);
  } else if (j.is_string()) {
    out << prefix << " = " << j.get<std::string>() << "\n";
  } else {
    out << prefix << " = " << j.dump() << "\n";
  }
}

int emit_report(const RunConfig& rc, const json& inputs, const json& results,
                const CheckList& checks, int code, std::ostream& out) {
  json report;
  report["schema_version"] = 1;
  report["command"] = rc.command;
  report["seed"] = rc.seed;
  report["inputs"] = inputs;
  report["results"] = results;
  report["checks"] = checks.items;
  std::ostringstream payload;
  if (rc.format == "text") {
    render_text(report, "", payload);
  } else {
    payload << report.dump(2) << "\n";
  }
  out << payload.str();
  if (!rc.output_path.empty()) {
    std::ofstream f(rc.output_path);
    if (!f) throw UsageError("cannot write output file: " + rc.output_path);
    f << payload.str();
  }
  if (!checks.all_pass) return 3;
  return code;
}

// --set for rotation systems: element indices.
//   "0,5,7"            literal indices
//   "literal:0,5,7"    same
//   "ap:start:step:count"
//   "file:PATH"        whitespace/comma separated indices
std::vector<std::int64_t> parse_index_set(std::string spec) {
  if (spec.empty()) throw UsageError("empty set specification");
  if (consume_prefix(spec, "ap:")) {
    auto parts = split(spec, ':');
    if (parts.size() != 3) throw UsageError("ap set needs start:step:count");
    std::int64_t start = parse_i64(parts[0]), step = parse_i64(parts[1]),
                 count = parse_i64(parts[2]);
    if (count <= 0) throw UsageError("ap count must be positive");
    std::vector<std::int64_t> out;
    for (std::int64_t j = 0; j < count; ++j) out.push_back(start + j * step);
    return out;
  }
  if (consume_prefix(spec, "file:")) {
    std::ifstream f(spec);
    if (!f) throw UsageError("cannot read set file: " + spec);
    std::vector<std::int64_t> out;
    std::string tok;
    while (f >> tok) {
      for (const auto& piece : split(tok, ','))
        if (!piece.empty()) out.push_back(parse_i64(piece));
    }
    if (out.empty()) throw UsageError("set file holds no indices: " + spec);
    return out;
  }
  consume_prefix(spec, "literal:");
  return parse_i64_list(spec, ',');
}

// --set for windowed subsets of Z^d:
//   "3,5,8"                      1-dim points
//   "points:0,1;2,3"             explicit points, window = bounding box
//   "grid:x0:x1[:y0:y1...]"      all lattice points of the box
//   "ap:start:step:count"        1-dim progression
//   "bohr:a/b:e/f:lo:hi"         1-dim Bohr set on the window [lo, hi)
WindowedSet bounded_points(std::vector<std::vector<Int>> members) {
  if (members.empty()) throw UsageError("windowed set needs at least one point");
  int dim = static_cast<int>(members.front().size());
  std::vector<std::pair<Int, Int>> window;
  for (int i = 0; i < dim; ++i) {
    Int lo = members.front()[i], hi = members.front()[i];
    for (const auto& m : members) {
      if (static_cast<int>(m.size()) != dim)
        throw UsageError("windowed set points disagree on dimension");
      lo = std::min(lo, m[i]);
      hi = std::max(hi, m[i]);
    }
    window.emplace_back(lo, hi + 1);
  }
  return make_windowed_set(std::move(window), std::move(members));
}

WindowedSet parse_windowed_set(std::string spec) {
  if (spec.empty()) throw UsageError("empty set specification");
  if (consume_prefix(spec, "grid:")) {
    auto parts = split(spec, ':');
    if (parts.size() < 2 || parts.size() % 2 != 0)
      throw UsageError("grid set needs an even list of bounds x0:x1[:y0:y1...]");
    int dim = static_cast<int>(parts.size()) / 2;
    std::vector<std::pair<Int, Int>> window;
    Int volume = 1;
    for (int i = 0; i < dim; ++i) {
      Int lo = parse_int(parts[2 * i]), hi = parse_int(parts[2 * i + 1]);
      if (lo >= hi) throw UsageError("grid bounds must satisfy lo < hi");
      volume *= hi - lo;
      window.emplace_back(lo, hi);
    }
    if (volume > Limits::get().max_enum) throw BoundError("grid set too large to enumerate");
    std::vector<std::vector<Int>> members;
    std::vector<Int> cur(dim);
    for (int i = 0; i < dim; ++i) cur[i] = window[i].first;
    while (true) {
      members.push_back(cur);
      int i = dim - 1;
      while (i >= 0) {
        if (++cur[i] < window[i].second) break;
        cur[i] = window[i].first;
        --i;
      }
      if (i < 0) break;
    }
    return make_windowed_set(std::move(window), std::move(members));
  }
  if (consume_prefix(spec, "bohr:")) {
    auto parts = split(spec, ':');
    if (parts.size() != 4) throw UsageError("bohr set needs alpha:eps:lo:hi");
    Rat alpha = parse_rational(parts[0]), eps = parse_rational(parts[1]);
    Int lo = parse_int(parts[2]), hi = parse_int(parts[3]);
    auto values = bohr_set(alpha, eps, lo, hi);
    std::vector<std::vector<Int>> members;
    for (const auto& v : values) members.push_back({v});
    return make_windowed_set({{lo, hi}}, std::move(members));
  }
  if (consume_prefix(spec, "ap:")) {
    auto parts = split(spec, ':');
    if (parts.size() != 3) throw UsageError("ap set needs start:step:count");
    Int start = parse_int(parts[0]), step = parse_int(parts[1]);
    std::int64_t count = parse_i64(parts[2]);
    if (count <= 0) throw UsageError("ap count must be positive");
    std::vector<std::vector<Int>> members;
    for (std::int64_t j = 0; j < count; ++j) members.push_back({start + j * step});
    return bounded_points(std::move(members));
  }
  bool explicit_points = consume_prefix(spec, "points:");
  std::vector<std::vector<Int>> members;
  if (!explicit_points && spec.find(';') == std::string::npos) {
    for (const auto& tok : split(spec, ',')) members.push_back({parse_int(tok)});
    return bounded_points(std::move(members));
  }
  for (const auto& pt : split(spec, ';')) {
    std::vector<Int> coords;
    for (const auto& tok : split(pt, ',')) coords.push_back(parse_int(tok));
    members.push_back(std::move(coords));
  }
  return bounded_points(std::move(members));
}

RotationSystem build_system(const RunConfig& rc) {
  if (!rc.torus_text.empty()) {
    if (!rc.moduli_text.empty() || !rc.gens_text.empty())
      throw UsageError("--torus excludes --moduli and --gens");
    auto parts = split(rc.torus_text, ':');
    if (parts.size() != 2) throw UsageError("--torus needs q:d");
    std::int64_t q = parse_i64(parts[0]);
    int d = static_cast<int>(parse_i64(parts[1]));
    return RotationSystem::torus(q, d);
  }
  if (rc.moduli_text.empty())
    throw UsageError("describe the system with --moduli (optionally --gens) or --torus");
  auto moduli = parse_i64_list(rc.moduli_text, ',');
  if (rc.gens_text.empty()) return RotationSystem::diagonal(moduli);
  std::vector<std::vector<std::int64_t>> gens;
  for (const auto& row : split(rc.gens_text, ';')) gens.push_back(parse_i64_list(row, ','));
  return RotationSystem(std::move(moduli), std::move(gens));
}

json system_json(const RotationSystem& sys) {
  json gens = json::array();
  for (const auto& g : sys.generators()) gens.push_back(json(g));
  return json{{"moduli", json(sys.moduli())},
              {"generators", gens},
              {"size", sys.size()},
              {"ergodic", sys.ergodic()}};
}

json direction_json(const DirectionSearch& ds) {
  json j;
  j["found"] = ds.found;
  j["cap_exceeded"] = ds.cap_exceeded;
  j["gamma"] = ds.gamma;
  j["t_scanned"] = ds.t_scanned;
  j["t_target"] = ds.t_target;
  j["window_bound"] = int_json(ds.window_bound);
  j["best_direction"] = int_vec_json(ds.best_direction);
  j["best_line_mass"] = ds.best_line_mass;
  if (ds.found) {
    j["direction"] = int_vec_json(ds.direction);
    j["line_mass"] = ds.line_mass;
    j["line_mass_with_zero"] = ds.line_mass_with_zero;
    j["union_measure"] = rat_json(ds.union_measure);
    j["lower_bound"] = ds.lower_bound;
  }
  return j;
}

json trace_json(const IncrementTrace& tr) {
  json j;
  j["mode"] = tr.mode;
  j["eps"] = tr.eps;
  if (tr.mode == "directional") j["gamma"] = tr.gamma;
  j["initial_measure"] = tr.initial_measure;
  j["status"] = tr.status;
  j["k_total"] = int_json(tr.k_total);
  j["final_nu"] = tr.final_nu;
  j["final_size"] = tr.final_size;
  if (tr.final_union) j["final_union"] = rat_json(*tr.final_union);
  if (tr.final_direction) j["final_direction"] = direction_json(*tr.final_direction);
  json steps = json::array();
  for (const auto& s : tr.steps) {
    json e;
    e["nu_before"] = s.nu_before;
    e["nu_after"] = s.nu_after;
    e["kappa"] = s.kappa;
    e["window_mass"] = s.window_mass;
    e["denominator_bound"] = int_json(s.denominator_bound);
    e["factorial_cap"] = s.factorial_cap ? json(int_json(*s.factorial_cap)) : json(nullptr);
    e["k_step"] = int_json(s.k_step);
    e["component_count"] = s.component_count;
    if (s.union_before) e["union_before"] = rat_json(*s.union_before);
    if (!s.best_direction.empty()) {
      e["best_direction"] = int_vec_json(s.best_direction);
      e["best_line_mass"] = s.best_line_mass;
    }
    steps.push_back(std::move(e));
  }
  j["steps"] = std::move(steps);
  return j;
}

json blueprint_json(const CounterexampleBlueprint& bp) {
  json levels = json::array();
  for (std::size_t i = 0; i < bp.moduli.size(); ++i) {
    json lv;
    lv["modulus"] = int_json(bp.moduli[i]);
    lv["value_set_size"] = bp.value_sets[i].size();
    lv["set_size"] = bp.sets[i].size();
    lv["density"] = rat_json(make_rat(Int(bp.sets[i].size()), bp.moduli[i]));
    lv["value_set"] = residue_list_json(bp.value_sets[i]);
    lv["set"] = residue_list_json(bp.sets[i]);
    levels.push_back(std::move(lv));
  }
  return json{{"poly", bp.poly.to_string()},
              {"depth", bp.depth},
              {"lambda", rat_json(bp.lambda)},
              {"primes", int_vec_json(bp.primes)},
              {"period", int_json(bp.period())},
              {"levels", std::move(levels)}};
}

void check_blueprint(const CounterexampleBlueprint& bp, CheckList& checks) {
  bool coprime = true;
  for (std::size_t i = 0; i < bp.moduli.size(); ++i)
    for (std::size_t j = i + 1; j < bp.moduli.size(); ++j) {
      Int g;
      mpz_gcd(g.get_mpz_t(), bp.moduli[i].get_mpz_t(), bp.moduli[j].get_mpz_t());
      coprime = coprime && g == 1;
    }
  checks.add("levels-pairwise-coprime", coprime, "gcd(q_i, q_j) = 1 for i != j");

  bool avoid = true, complement = true, lambda_ok = true;
  Int num = bp.lambda.get_num(), den = bp.lambda.get_den();
  Int num_pow = 1, den_pow = 1;
  for (std::size_t i = 0; i < bp.moduli.size(); ++i) {
    num_pow *= num;
    den_pow *= den;
    const auto& s = bp.value_sets[i];
    const auto& a = bp.sets[i];
    std::int64_t q = to_i64(bp.moduli[i]);
    for (std::int64_t x : a) {
      std::int64_t need = x == 0 ? 0 : q - x;
      if (std::binary_search(s.begin(), s.end(), need)) {
        avoid = false;
        break;
      }
    }
    complement = complement && Int(a.size()) + Int(s.size()) == bp.moduli[i];
    lambda_ok = lambda_ok && Int(s.size()) * den_pow <= num_pow * bp.moduli[i];
  }
  checks.add("thickened-levels-avoid-zero", avoid,
             "0 lies outside A_i + S(q_i) at every level");
  checks.add("set-complements-value-set", complement, "|A_i| + |S(q_i)| = q_i");
  checks.add("value-set-lambda-power", lambda_ok, "|S(q_i)| <= lambda^i q_i exactly");
}

int cmd_value_set(const RunConfig& rc, std::ostream& out) {
  auto p = IntPolynomialMap::parse(rc.poly_text);
  json inputs{{"poly", p.to_string()}};
  ValueSet vs;
  if (rc.prime > 0 && rc.modulus > 0)
    throw UsageError("give exactly one of --prime and --modulus");
  if (rc.prime > 0) {
    vs = value_set_mod_prime(p, Int(rc.prime));
    inputs["prime"] = rc.prime;
  } else if (rc.modulus > 0) {
    vs = value_set_mod_squarefree(p, Int(rc.modulus));
    inputs["modulus"] = rc.modulus;
  } else {
    throw UsageError("value-set needs --prime or --modulus");
  }
  json results{{"modulus", int_json(vs.modulus)},
               {"size", vs.residues.size()},
               {"residues", residue_list_json(vs.residues)}};
  CheckList checks;
  bool canon = !vs.residues.empty() && vs.residues.front() >= 0 &&
               Int(vs.residues.back()) < vs.modulus;
  for (std::size_t i = 0; canon && i + 1 < vs.residues.size(); ++i)
    canon = vs.residues[i] < vs.residues[i + 1];
  checks.add("residues-canonical", canon, "sorted distinct residues inside [0, q)");
  return emit_report(rc, inputs, results, checks, 0, out);
}

int cmd_deficient_primes(const RunConfig& rc, std::ostream& out) {
  auto p = IntPolynomialMap::parse(rc.poly_text);
  int count = rc.count > 0 ? static_cast<int>(rc.count) : 6;
  Int scan = rc.scan_bound > 0 ? Int(rc.scan_bound) : Int(100000);
  auto dp = find_deficient_primes(p, count, scan);
  json inputs{{"poly", p.to_string()}, {"count", count}, {"scan_bound", int_json(scan)}};
  json table = json::array();
  bool lambda_ok = true;
  Int num = dp.lambda.get_num(), den = dp.lambda.get_den();
  for (std::size_t i = 0; i < dp.primes.size(); ++i) {
    table.push_back(json{{"prime", int_json(dp.primes[i])},
                         {"value_set_size", dp.value_set_sizes[i]}});
    lambda_ok = lambda_ok && Int(dp.value_set_sizes[i]) * den <= num * dp.primes[i];
  }
  json results{{"lambda", rat_json(dp.lambda)}, {"primes", std::move(table)}};
  CheckList checks;
  checks.add("value-set-lambda-bound", lambda_ok, "|V(P,p)| <= lambda p for each prime");
  return emit_report(rc, inputs, results, checks, 0, out);
}

int cmd_counterexample(const RunConfig& rc, std::ostream& out) {
  auto p = IntPolynomialMap::parse(rc.poly_text);
  if (rc.depth < 1) throw UsageError("counterexample needs --depth >= 1");
  std::int64_t k_max = rc.k_max > 0 ? rc.k_max : 10;
  auto bp = build_counterexample(p, rc.depth);
  json inputs{{"poly", p.to_string()}, {"depth", rc.depth}, {"kmax", k_max}};
  json results = blueprint_json(bp);
  json m_table = json::array();
  for (std::int64_t k = 1; k <= k_max; ++k) {
    json entry{{"k", k}};
    try {
      auto pl = max_progression_length(bp, Int(k));
      entry["level"] = pl.level;
      entry["level_modulus"] = int_json(bp.moduli[pl.level - 1]);
      entry["m"] = int_json(pl.m);
      entry["witness"] = int_json(pl.witness);
    } catch (const BoundError&) {
      entry["level"] = nullptr;
      entry["m"] = nullptr;
    }
    m_table.push_back(std::move(entry));
  }
  results["m_table"] = std::move(m_table);
  CheckList checks;
  check_blueprint(bp, checks);
  return emit_report(rc, inputs, results, checks, 0, out);
}

int cmd_pinned_refute(const RunConfig& rc, std::ostream& out) {
  auto p = IntPolynomialMap::parse(rc.poly_text);
  if (rc.depth < 1) throw UsageError("pinned-refute needs --depth >= 1");
  if (rc.k < 1) throw UsageError("pinned-refute needs --k >= 1");
  auto bp = build_counterexample(p, rc.depth);
  auto pl = max_progression_length(bp, Int(rc.k));
  Int m = rc.m >= 0 ? Int(rc.m) : pl.m;
  json inputs{{"poly", p.to_string()},
              {"depth", rc.depth},
              {"k", rc.k},
              {"m", int_json(m)}};

  std::vector<Int> base;
  if (!rc.base_point.empty()) {
    if (static_cast<int>(rc.base_point.size()) != rc.depth)
      throw UsageError("--base needs one residue per level");
    for (std::int64_t b : rc.base_point) base.emplace_back(b);
  } else {
    base = default_base_point(bp);
  }
  inputs["base"] = int_vec_json(base);

  Int period = bp.period();
  Int set_size = 1;
  for (const auto& a : bp.sets) set_size *= Int(a.size());
  Int ambient_cost = set_size * set_size * (period / 64 + m + 1);
  bool ambient = period <= Limits::get().max_space &&
                 ambient_cost <= Limits::get().tuple_cap;

  json results;
  results["progression"] = json{{"level", pl.level},
                                {"m", int_json(pl.m)},
                                {"witness", int_json(pl.witness)}};
  bool refuted;
  if (ambient) {
    auto values = return_time_set(bp, base, Int(0), period);
    std::vector<std::vector<Int>> members;
    members.reserve(values.size());
    for (const auto& v : values) members.push_back({v});
    auto e = make_windowed_set({{Int(0), period}}, std::move(members));
    auto r = pinned_delta_refuter(e, p, Int(rc.k), m, period);
    refuted = r.refuted;
    results["mode"] = "ambient-periodic";
    results["period"] = int_json(period);
    results["set_size"] = values.size();
    results["pair_count"] = r.pair_count;
    results["refuted"] = r.refuted;
    results["m_prime"] = int_json(r.m_prime);
    results["worst_pair"] = int_vec_json(r.worst_pair);
    if (!r.covering_pair.empty()) results["covering_pair"] = int_vec_json(r.covering_pair);
  } else {
    auto r = pinned_refute_level(bp, Int(rc.k), m);
    refuted = r.refuted;
    results["mode"] = "level-projected";
    results["level"] = r.level;
    results["level_modulus"] = int_json(r.modulus);
    results["pair_count"] = r.pair_count;
    results["refuted"] = r.refuted;
    results["m_prime"] = int_json(r.m_prime);
    results["worst_pair"] = int_vec_json(r.worst_pair);
    if (!r.covering_pair.empty()) results["covering_pair"] = int_vec_json(r.covering_pair);
  }
  CheckList checks;
  if (m >= pl.m) {
    checks.add("pattern-run-link", refuted,
               "covering {k..mk} with m >= the longest thickened run is impossible");
  }
  return emit_report(rc, inputs, results, checks, 0, out);
}

int cmd_bogolyubov(const RunConfig& rc, std::ostream& out) {
  auto p = IntPolynomialMap::parse(rc.poly_text);
  Int k_max = rc.k_max > 0 ? Int(rc.k_max) : Int(10);
  Int radius = rc.radius > 0 ? Int(rc.radius) : Int(5);
  CheckList checks;
  if (rc.necessity) {
    if (rc.bohr_alpha.empty() || rc.bohr_eps.empty())
      throw UsageError("--necessity needs --bohr-alpha and --bohr-eps");
    if (rc.window_lo >= rc.window_hi)
      throw UsageError("--necessity needs --window-lo < --window-hi");
    Rat alpha = parse_rational(rc.bohr_alpha);
    Rat eps = parse_rational(rc.bohr_eps);
    auto ac = appendix_necessity_check(p, alpha, eps, Int(rc.window_lo), Int(rc.window_hi),
                                       k_max, radius);
    json inputs{{"poly", p.to_string()},   {"bohr_alpha", rat_json(alpha)},
                {"bohr_eps", rat_json(eps)}, {"window_lo", rc.window_lo},
                {"window_hi", rc.window_hi}, {"kmax", int_json(k_max)},
                {"radius", int_json(radius)}};
    json uncovered = json::array();
    for (const auto& [k, pt] : ac.uncovered)
      uncovered.push_back(json{{"k", int_json(k)}, {"point", point_json(pt)}});
    json trail = json::array();
    for (const auto& t : ac.bogolyubov.trail) {
      json e{{"k", int_json(t.k)}, {"covered", t.covered}};
      if (!t.covered) e["uncovered_point"] = point_json(t.uncovered_point);
      trail.push_back(std::move(e));
    }
    json results{
        {"combination",
         json{{"alpha", int_vec_json(ac.comb.alpha)}, {"beta", int_vec_json(ac.comb.beta)}}},
        {"fat_eps", rat_json(ac.fat_eps)},
        {"set_size", int_json(ac.set_size)},
        {"uncovered", std::move(uncovered)},
        {"none_certified", ac.none_certified},
        {"windowed_check",
         json{{"k", ac.bogolyubov.k ? json(int_json(*ac.bogolyubov.k)) : json(nullptr)},
              {"windowed_evidence", ac.bogolyubov.windowed_evidence},
              {"trail", std::move(trail)}}}};
    checks.add("sum-points-in-fat-bohr", true,
               "every difference-set sum lands in the fattened Bohr set, checked exactly");
    return emit_report(rc, inputs, results, checks, 0, out);
  }
  if (rc.set_spec.empty()) throw UsageError("bogolyubov needs --set (or --necessity)");
  auto e = parse_windowed_set(rc.set_spec);
  auto br = bogolyubov_min_k(e, p, k_max, radius);
  json inputs{{"poly", p.to_string()},
              {"set", rc.set_spec},
              {"kmax", int_json(k_max)},
              {"radius", int_json(radius)}};
  json trail = json::array();
  bool witnesses = true;
  for (const auto& t : br.trail) {
    json entry{{"k", int_json(t.k)}, {"covered", t.covered}};
    if (!t.covered) {
      entry["uncovered_point"] = point_json(t.uncovered_point);
      witnesses = witnesses && !t.uncovered_point.empty();
    }
    trail.push_back(std::move(entry));
  }
  json results{{"set_size", e.members.size()},
               {"density", rat_json(e.density())},
               {"k", br.k ? json(int_json(*br.k)) : json(nullptr)},
               {"windowed_evidence", br.windowed_evidence},
               {"trail", std::move(trail)}};
  checks.add("failed-k-has-witness", witnesses,
             "every rejected k records an uncovered box point");
  return emit_report(rc, inputs, results, checks, 0, out);
}

int cmd_volspec(const RunConfig& rc, std::ostream& out) {
  if (rc.set_spec.empty()) throw UsageError("volspec needs --set");
  auto e = parse_windowed_set(rc.set_spec);
  auto spec = volspec(e);
  json inputs{{"set", rc.set_spec}};
  json results{{"dim", e.dim},
               {"set_size", e.members.size()},
               {"spectrum_size", spec.size()},
               {"spectrum", int_vec_json(spec)}};
  if (rc.k > 0) {
    Int bound = rc.bound > 0 ? Int(rc.bound) : Int(1);
    inputs["k"] = rc.k;
    inputs["bound"] = int_json(bound);
    bool covered = volspec_coverage(e, Int(rc.k), bound);
    results["coverage"] = json{{"k", rc.k}, {"bound", int_json(bound)}, {"covered", covered}};
  }
  CheckList checks;
  checks.add("zero-in-spectrum", std::binary_search(spec.begin(), spec.end(), Int(0)),
             "degenerate tuples contribute volume 0");
  return emit_report(rc, inputs, results, checks, 0, out);
}

void check_trace(const IncrementTrace& tr, CheckList& checks) {
  bool floor_ok = true, monotone = true;
  double prev = tr.initial_measure;
  for (const auto& s : tr.steps) {
    floor_ok = floor_ok && s.nu_after >= s.nu_before + s.kappa / 3 - 1e-9;
    monotone = monotone && s.nu_before >= prev - 1e-12 && s.nu_after >= s.nu_before;
    prev = s.nu_after;
  }
  checks.add("per-step-growth-floor", floor_ok, "nu grows by at least kappa/3 each step");
  checks.add("trace-monotone", monotone, "relative measure never decreases along the trace");
}

int cmd_increment(const RunConfig& rc, std::ostream& out) {
  if (!(rc.eps > 0 && rc.eps < 1)) throw UsageError("increment needs --eps in (0,1)");
  if (rc.mode != "polynomial" && rc.mode != "directional")
    throw UsageError("--mode must be polynomial or directional");
  json inputs{{"mode", rc.mode}, {"eps", rc.eps}};
  std::optional<RotationSystem> sys;
  std::optional<Bitset> a;
  std::optional<IntPolynomialMap> p;
  if (!rc.poly_text.empty()) p = IntPolynomialMap::parse(rc.poly_text);
  if (rc.blueprint) {
    if (!p) throw UsageError("--blueprint needs --poly");
    if (rc.depth < 1) throw UsageError("--blueprint needs --depth >= 1");
    auto bp = build_counterexample(*p, rc.depth);
    std::vector<std::int64_t> moduli;
    for (const auto& q : bp.moduli) moduli.push_back(to_i64(q));
    sys.emplace(RotationSystem::diagonal(moduli));
    a.emplace(product_set(*sys, bp.sets));
    inputs["blueprint"] = json{{"depth", rc.depth}, {"moduli", json(moduli)}};
  } else {
    if (rc.set_spec.empty()) throw UsageError("increment needs --set (or --blueprint)");
    sys.emplace(build_system(rc));
    a.emplace(set_from_indices(*sys, parse_index_set(rc.set_spec)));
    inputs["set"] = rc.set_spec;
  }
  inputs["system"] = system_json(*sys);
  IncrementTrace tr;
  if (rc.mode == "polynomial") {
    if (!p) throw UsageError("polynomial mode needs --poly");
    inputs["poly"] = p->to_string();
    tr = increment_run(*sys, *a, *p, rc.eps);
  } else {
    tr = increment_run_directional(*sys, *a, rc.eps);
  }
  json results = trace_json(tr);
  CheckList checks;
  check_trace(tr, checks);
  return emit_report(rc, inputs, results, checks, tr.status == "success" ? 0 : 2, out);
}

int cmd_direction(const RunConfig& rc, std::ostream& out) {
  if (!(rc.gamma > 0 && rc.gamma < 1)) throw UsageError("direction needs --gamma in (0,1)");
  if (rc.set_spec.empty()) throw UsageError("direction needs --set");
  auto sys = build_system(rc);
  auto a = set_from_indices(sys, parse_index_set(rc.set_spec));
  auto ds = find_expansive_direction(sys, a, rc.gamma);
  json inputs{{"gamma", rc.gamma}, {"set", rc.set_spec}, {"system", system_json(sys)}};
  json results = direction_json(ds);
  CheckList checks;
  if (ds.found) {
    double mu = set_measure(sys, a).get_d();
    checks.add("union-spectral-floor",
               ds.union_measure.get_d() >= mu * mu / ds.line_mass_with_zero - 1e-9,
               "directional union is at least mu^2 over the line mass");
  }
  return emit_report(rc, inputs, results, checks, ds.found ? 0 : 2, out);
}

int cmd_weyl(const RunConfig& rc, std::ostream& out) {
  auto p = IntPolynomialMap::parse(rc.poly_text);
  int given = (!rc.alpha_text.empty() ? 1 : 0) + (rc.psi_modulus > 0 ? 1 : 0) +
              (rc.hua_target > 0 ? 1 : 0);
  if (given != 1)
    throw UsageError("weyl needs exactly one of --alpha, --psi-modulus, --hua-target");
  json inputs{{"poly", p.to_string()}};
  json results;
  CheckList checks;
  if (!rc.alpha_text.empty()) {
    std::vector<Rat> coords;
    for (const auto& tok : split(rc.alpha_text, ',')) coords.push_back(parse_rational(tok));
    TorusRational alpha(std::move(coords));
    auto wa = weyl_average(p, alpha);
    inputs["alpha"] = rat_vec_json(alpha.coords());
    results["period"] = int_json(wa.period);
    results["value_re"] = wa.value.real();
    results["value_im"] = wa.value.imag();
    results["modulus"] = std::abs(wa.value);
    checks.add("average-in-unit-disk", std::abs(wa.value) <= 1 + 1e-12,
               "exponential averages have modulus at most 1");
  } else if (rc.psi_modulus > 0) {
    auto pv = psi_empirical(p, rc.psi_modulus);
    inputs["psi_modulus"] = rc.psi_modulus;
    results["q"] = rc.psi_modulus;
    results["value"] = pv.value;
    results["best_numerators"] = json(pv.best_numerators);
    checks.add("psi-in-unit-interval", pv.value >= 0 && pv.value <= 1 + 1e-12,
               "psi is a maximum of averages of unit vectors");
  } else {
    std::int64_t scan = rc.scan_bound > 0 ? rc.scan_bound : 1000;
    auto ht = hua_threshold(p, rc.hua_target, scan);
    inputs["hua_target"] = rc.hua_target;
    inputs["scan_bound"] = scan;
    results["m"] = ht.m;
    results["psi_at_m"] = ht.m >= 2 ? psi_empirical(p, ht.m).value : 1.0;
    results["empirical"] = ht.empirical;
    checks.add("threshold-respects-target", ht.m >= 1,
               "scan returned a positive threshold");
  }
  return emit_report(rc, inputs, results, checks, 0, out);
}

IntMatrix parse_matrix(const std::string& text) {
  IntMatrix m;
  for (const auto& row : split(text, ';')) {
    std::vector<Int> r;
    for (const auto& tok : split(row, ',')) r.push_back(parse_int(tok));
    if (!m.empty() && r.size() != m.front().size())
      throw UsageError("matrix rows disagree on length");
    m.push_back(std::move(r));
  }
  if (m.empty() || m.front().empty()) throw UsageError("empty matrix");
  return m;
}

void check_smith(const IntMatrix& b, const SmithDecomposition& s, CheckList& checks) {
  checks.add("roundtrip-product", matrix_product(s.l, matrix_product(s.d, s.r)) == b,
             "L D R reproduces the input matrix");
  Int dl = determinant(s.l), dr = determinant(s.r);
  checks.add("transforms-unimodular", (dl == 1 || dl == -1) && (dr == 1 || dr == -1),
             "both transform matrices have determinant +-1");
  auto inv = s.invariant_factors();
  bool chain = true;
  for (std::size_t i = 0; i + 1 < inv.size(); ++i)
    chain = chain && mpz_divisible_p(inv[i + 1].get_mpz_t(), inv[i].get_mpz_t());
  checks.add("divisibility-chain", chain, "each invariant factor divides the next");
}

int cmd_snf(const RunConfig& rc, std::ostream& out) {
  if (rc.matrix_text.empty() == rc.poly_text.empty())
    throw UsageError("snf needs exactly one of --matrix and --poly");
  json inputs, results;
  CheckList checks;
  if (!rc.matrix_text.empty()) {
    auto b = parse_matrix(rc.matrix_text);
    auto s = smith_normal_form(b);
    inputs["matrix"] = matrix_json(b);
    results["l"] = matrix_json(s.l);
    results["d"] = matrix_json(s.d);
    results["r"] = matrix_json(s.r);
    results["invariant_factors"] = int_vec_json(s.invariant_factors());
    check_smith(b, s, checks);
  } else {
    auto p = IntPolynomialMap::parse(rc.poly_text);
    inputs["poly"] = p.to_string();
    auto b = coefficient_matrix(p);
    auto s = smith_normal_form(b);
    auto cb = multiplicative_complexity_bound(p);
    results["coefficient_matrix"] = matrix_json(b);
    results["invariant_factors"] = int_vec_json(cb.invariant_factors);
    results["complexity_bound"] = int_json(cb.q);
    auto cx = smallest_factor_counterexample(p);
    if (cx) {
      results["smallest_factor_counterexample"] =
          json{{"a", int_vec_json(cx->a)},
               {"q", int_json(cx->q)},
               {"gcd_value", int_json(cx->gcd_value)},
               {"smallest_factor", int_json(cx->smallest_factor)}};
    } else {
      results["smallest_factor_counterexample"] = nullptr;
    }
    check_smith(b, s, checks);
    bool largest = cb.invariant_factors.empty() ||
                   cb.q == cb.invariant_factors.back();
    checks.add("largest-factor-dominates", largest,
               "the reported bound is the largest invariant factor");
  }
  return emit_report(rc, inputs, results, checks, 0, out);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  CLI::App app{"finite abelian rotation systems: spectral measures, measure increments, "
               "expansive directions, and polynomial counterexamples"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  app.add_option("--format", rc.format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));
  app.add_option("--output", rc.output_path, "also write the report to this file");
  app.add_option("--seed", rc.seed, "recorded in every report");

  std::vector<std::pair<CLI::App*, std::function<int()>>> handlers;
  auto add = [&](const std::string& name, const std::string& desc, auto handler) {
    CLI::App* sub = app.add_subcommand(name, desc);
    handlers.emplace_back(sub, [&rc, name, handler, &out]() {
      rc.command = name;
      return handler(rc, out);
    });
    return sub;
  };

  auto* vs = add("value-set", "image of Z/q under a polynomial", cmd_value_set);
  vs->add_option("--poly", rc.poly_text)->required();
  vs->add_option("--prime", rc.prime);
  vs->add_option("--modulus", rc.modulus, "squarefree modulus, resolved by CRT");

  auto* dp = add("deficient-primes", "primes with |V(P,p)| < p and the lambda certificate",
                 cmd_deficient_primes);
  dp->add_option("--poly", rc.poly_text)->required();
  dp->add_option("--count", rc.count, "how many primes to collect (default 6)");
  dp->add_option("--scan-bound", rc.scan_bound, "give up past this prime (default 100000)");

  auto* ce = add("counterexample", "levelled thin-value-set system with its m_k table",
                 cmd_counterexample);
  ce->add_option("--poly", rc.poly_text)->required();
  ce->add_option("--depth", rc.depth)->required();
  ce->add_option("--kmax", rc.k_max, "tabulate k = 1..kmax (default 10)");

  auto* pr = add("pinned-refute", "refute pinned covering on a return-time set",
                 cmd_pinned_refute);
  pr->add_option("--poly", rc.poly_text)->required();
  pr->add_option("--depth", rc.depth)->required();
  pr->add_option("--k", rc.k)->required();
  pr->add_option("--m", rc.m, "steps to test (default: longest thickened run)");
  pr->add_option("--base", rc.base_point, "base point, one residue per level")
      ->delimiter(',');

  auto* bg = add("bogolyubov", "smallest k with k Z^d inside (E-E) + P(E-E), windowed",
                 cmd_bogolyubov);
  bg->add_option("--poly", rc.poly_text)->required();
  bg->add_option("--set", rc.set_spec);
  bg->add_option("--kmax", rc.k_max, "largest k to try (default 10)");
  bg->add_option("--radius", rc.radius, "box radius for coverage (default 5)");
  bg->add_flag("--necessity", rc.necessity, "certify misses for a degenerate map on a Bohr set");
  bg->add_option("--bohr-alpha", rc.bohr_alpha, "frequency a/b for the Bohr set");
  bg->add_option("--bohr-eps", rc.bohr_eps, "Bohr radius e/f");
  bg->add_option("--window-lo", rc.window_lo);
  bg->add_option("--window-hi", rc.window_hi);

  auto* vo = add("volspec", "signed simplex volumes of a finite point set", cmd_volspec);
  vo->add_option("--set", rc.set_spec)->required();
  vo->add_option("--k", rc.k, "check coverage of d! k j for |j| <= bound");
  vo->add_option("--bound", rc.bound);

  auto* in = add("increment", "grow relative measure through T^k components", cmd_increment);
  in->add_option("--poly", rc.poly_text);
  in->add_option("--eps", rc.eps)->required();
  in->add_option("--mode", rc.mode, "polynomial (default) or directional");
  in->add_option("--moduli", rc.moduli_text, "level moduli, e.g. 3,35");
  in->add_option("--torus", rc.torus_text, "q:d for (Z/q)^d with coordinate rotations");
  in->add_option("--gens", rc.gens_text, "generators as rows 'a,b;c,d'");
  in->add_option("--set", rc.set_spec, "element indices");
  in->add_flag("--blueprint", rc.blueprint, "use the counterexample system for --poly");
  in->add_option("--depth", rc.depth, "blueprint depth");

  auto* di = add("direction", "search moment-curve directions for spectral expansion",
                 cmd_direction);
  di->add_option("--gamma", rc.gamma)->required();
  di->add_option("--set", rc.set_spec)->required();
  di->add_option("--moduli", rc.moduli_text);
  di->add_option("--torus", rc.torus_text);
  di->add_option("--gens", rc.gens_text);

  auto* we = add("weyl", "exponential averages, psi table, empirical thresholds", cmd_weyl);
  we->add_option("--poly", rc.poly_text)->required();
  we->add_option("--alpha", rc.alpha_text, "rational frequency vector, e.g. 1/3,2/5");
  we->add_option("--psi-modulus", rc.psi_modulus, "maximize over denominator-q frequencies");
  we->add_option("--hua-target", rc.hua_target);
  we->add_option("--scan-bound", rc.scan_bound, "threshold scan bound (default 1000)");

  auto* sn = add("snf", "Smith decomposition and multiplicative complexity bound", cmd_snf);
  sn->add_option("--matrix", rc.matrix_text, "rows 'a,b;c,d'");
  sn->add_option("--poly", rc.poly_text);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    for (const auto& [sub, handler] : handlers)
      if (sub->parsed()) return handler();
    err << app.help();
    return 1;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const BoundError& e) {
    err << "bound exceeded: " << e.what() << "\n";
    return 2;
  } catch (const InternalError& e) {
    err << "invariant failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace orbitspec
