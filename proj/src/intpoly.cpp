#include "orbitspec/intpoly.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

#include "orbitspec/ratmat.hpp"

namespace orbitspec {

std::int64_t Monomial::degree() const {
  std::int64_t d = 0;
  for (auto e : exponents) d += e;
  return d;
}

bool operator<(const Monomial& a, const Monomial& b) {
  auto da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  return a.exponents < b.exponents;
}

IntPolynomialMap::IntPolynomialMap(int arity, std::vector<Component> components)
    : arity_(arity), components_(std::move(components)) {
  if (arity_ < 1) throw UsageError("polynomial arity must be >= 1");
  if (components_.empty()) throw UsageError("polynomial needs >= 1 component");
  for (auto& comp : components_) {
    for (auto it = comp.begin(); it != comp.end();) {
      if (static_cast<int>(it->first.exponents.size()) != arity_)
        throw UsageError("monomial arity mismatch");
      it = (it->second == 0) ? comp.erase(it) : std::next(it);
    }
  }
}

std::int64_t IntPolynomialMap::degree() const {
  std::int64_t d = 0;
  for (const auto& comp : components_)
    for (const auto& [mon, c] : comp) d = std::max(d, mon.degree());
  return d;
}

std::vector<Int> IntPolynomialMap::constant_term() const {
  std::vector<Int> out(dim(), Int(0));
  Monomial zero{std::vector<std::int64_t>(arity_, 0)};
  for (int i = 0; i < dim(); ++i) {
    auto it = components_[i].find(zero);
    if (it != components_[i].end()) out[i] = it->second;
  }
  return out;
}

bool IntPolynomialMap::zero_constant_term() const {
  for (const Int& c : constant_term())
    if (c != 0) return false;
  return true;
}

std::vector<Int> IntPolynomialMap::evaluate(const std::vector<Int>& x) const {
  if (static_cast<int>(x.size()) != arity_)
    throw UsageError("evaluate: expected " + std::to_string(arity_) + " arguments");
  std::vector<Int> out;
  out.reserve(dim());
  for (const auto& comp : components_) {
    Int acc(0);
    for (const auto& [mon, c] : comp) {
      Int term = c;
      for (int j = 0; j < arity_; ++j) {
        if (mon.exponents[j] == 0) continue;
        Int p;
        mpz_pow_ui(p.get_mpz_t(), x[j].get_mpz_t(),
                   static_cast<unsigned long>(mon.exponents[j]));
        term *= p;
      }
      acc += term;
    }
    out.push_back(std::move(acc));
  }
  return out;
}

std::vector<std::int64_t> IntPolynomialMap::evaluate_mod(
    const std::vector<std::int64_t>& x, std::int64_t q) const {
  if (static_cast<int>(x.size()) != arity_)
    throw UsageError("evaluate_mod: expected " + std::to_string(arity_) + " arguments");
  if (q < 1) throw UsageError("evaluate_mod: modulus must be positive");
  std::vector<std::int64_t> out;
  out.reserve(dim());
  for (const auto& comp : components_) {
    std::int64_t acc = 0;
    for (const auto& [mon, c] : comp) {
      std::int64_t term = mod_reduce(c, q);
      for (int j = 0; j < arity_; ++j)
        if (mon.exponents[j] != 0)
          term = mod_mul(term, mod_pow(x[j], mon.exponents[j], q), q);
      acc = (acc + term) % q;
    }
    out.push_back(acc);
  }
  return out;
}

namespace {

struct Token {
  enum Kind { Integer, Var, Caret, Star, Plus, Minus, Semi, End } kind;
  Int value;      // Integer
  int var_index;  // Var
};

std::vector<Token> lex_poly(const std::string& text) {
  std::vector<Token> toks;
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      toks.push_back({Token::Integer, Int(text.substr(i, j - i)), 0});
      i = j;
    } else if (c == 'n') {
      toks.push_back({Token::Var, Int(0), 0});
      ++i;
    } else if (c == 'x') {
      size_t j = i + 1;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j == i + 1) throw UsageError("polynomial: 'x' needs an index, e.g. x0");
      toks.push_back({Token::Var, Int(0), std::stoi(text.substr(i + 1, j - i - 1))});
      i = j;
    } else if (c == '^') {
      toks.push_back({Token::Caret, Int(0), 0});
      ++i;
    } else if (c == '*') {
      toks.push_back({Token::Star, Int(0), 0});
      ++i;
    } else if (c == '+') {
      toks.push_back({Token::Plus, Int(0), 0});
      ++i;
    } else if (c == '-') {
      toks.push_back({Token::Minus, Int(0), 0});
      ++i;
    } else if (c == ';') {
      toks.push_back({Token::Semi, Int(0), 0});
      ++i;
    } else {
      throw UsageError(std::string("polynomial: unexpected character '") + c +
                       "' (integer coefficients only)");
    }
  }
  toks.push_back({Token::End, Int(0), 0});
  return toks;
}

struct RawTerm {
  Int coeff;
  std::map<int, std::int64_t> powers;  // var index -> exponent
};

}  // namespace

IntPolynomialMap IntPolynomialMap::parse(const std::string& text) {
  auto toks = lex_poly(text);
  size_t pos = 0;
  auto peek = [&]() -> const Token& { return toks[pos]; };
  auto next = [&]() -> const Token& { return toks[pos++]; };

  std::vector<std::vector<RawTerm>> raw_components(1);
  int max_var = -1;
  bool expect_term = true;  // at component start or after +/-
  Int pending_sign(1);

  auto parse_term = [&]() {
    RawTerm t{pending_sign, {}};
    pending_sign = 1;
    bool first = true;
    while (true) {
      const Token& tok = peek();
      if (tok.kind == Token::Integer) {
        next();
        t.coeff *= tok.value;
      } else if (tok.kind == Token::Var) {
        next();
        std::int64_t e = 1;
        if (peek().kind == Token::Caret) {
          next();
          if (peek().kind != Token::Integer)
            throw UsageError("polynomial: '^' needs an integer exponent");
          e = to_i64(next().value);
        }
        t.powers[tok.var_index] += e;
        max_var = std::max(max_var, tok.var_index);
      } else {
        if (first) throw UsageError("polynomial: expected a term");
        break;
      }
      first = false;
      if (peek().kind == Token::Star) {
        next();
        continue;
      }
      break;
    }
    raw_components.back().push_back(std::move(t));
  };

  while (true) {
    const Token& tok = peek();
    if (tok.kind == Token::End) break;
    if (tok.kind == Token::Semi) {
      if (expect_term) throw UsageError("polynomial: empty component");
      next();
      raw_components.emplace_back();
      expect_term = true;
      continue;
    }
    if (tok.kind == Token::Plus || tok.kind == Token::Minus) {
      next();
      if (tok.kind == Token::Minus) pending_sign = -pending_sign;
      expect_term = true;
      continue;
    }
    if (!expect_term) throw UsageError("polynomial: expected '+', '-' or ';'");
    parse_term();
    expect_term = false;
  }
  if (expect_term) throw UsageError("polynomial: empty component");

  int arity = std::max(max_var + 1, 1);
  std::vector<Component> comps;
  for (const auto& raw : raw_components) {
    Component comp;
    for (const auto& t : raw) {
      Monomial mon{std::vector<std::int64_t>(arity, 0)};
      for (auto [v, e] : t.powers) mon.exponents[v] = e;
      comp[mon] += t.coeff;
    }
    comps.push_back(std::move(comp));
  }
  return IntPolynomialMap(arity, std::move(comps));
}

std::string IntPolynomialMap::to_string() const {
  std::ostringstream os;
  for (int i = 0; i < dim(); ++i) {
    if (i) os << "; ";
    const auto& comp = components_[i];
    if (comp.empty()) {
      os << "0";
      continue;
    }
    bool first = true;
    for (const auto& [mon, c] : comp) {
      Int a = c;
      if (first) {
        if (a < 0) {
          os << "-";
          a = -a;
        }
      } else {
        os << (a < 0 ? " - " : " + ");
        a = abs(a);
      }
      first = false;
      bool printed = false;
      if (a != 1 || mon.degree() == 0) {
        os << a.get_str();
        printed = true;
      }
      for (int j = 0; j < arity_; ++j) {
        if (mon.exponents[j] == 0) continue;
        if (printed) os << "*";
        os << "x" << j;
        if (mon.exponents[j] > 1) os << "^" << mon.exponents[j];
        printed = true;
      }
    }
  }
  return os.str();
}

IntPolynomialMap curry_to_single_variable(const IntPolynomialMap& p) {
  const Int base = Int(p.degree() + 1);
  std::vector<IntPolynomialMap::Component> comps;
  for (const auto& comp : p.components()) {
    IntPolynomialMap::Component out;
    for (const auto& [mon, c] : comp) {
      Int e(0);
      Int w = base;
      for (int j = 0; j < p.arity(); ++j) {
        e += Int(mon.exponents[j]) * w;
        w *= base;
      }
      Monomial m1{{to_i64(e)}};
      auto [it, inserted] = out.emplace(m1, c);
      OSPEC_CHECK(inserted, "curry substitution collided on monomials");
      (void)it;
    }
    comps.push_back(std::move(out));
  }
  return IntPolynomialMap(1, std::move(comps));
}

IntPolynomialMap rescale_orbit(const IntPolynomialMap& p, const Int& k) {
  if (k < 1) throw UsageError("rescale_orbit: k must be positive");
  if (!p.zero_constant_term()) throw UsageError("rescale_orbit: nonzero constant term");
  std::vector<IntPolynomialMap::Component> comps;
  for (const auto& comp : p.components()) {
    IntPolynomialMap::Component out;
    for (const auto& [mon, c] : comp) {
      Int pw;
      mpz_pow_ui(pw.get_mpz_t(), k.get_mpz_t(),
                 static_cast<unsigned long>(mon.degree() - 1));
      out.emplace(mon, c * pw);
    }
    comps.push_back(std::move(out));
  }
  return IntPolynomialMap(p.arity(), std::move(comps));
}

namespace {

// rows: all monomials in graded-lex order (restricted by min_degree), columns: components
RatMatrix coefficient_rows(const IntPolynomialMap& p, std::int64_t min_degree) {
  std::vector<Monomial> mons;
  for (const auto& comp : p.components())
    for (const auto& [mon, c] : comp)
      if (mon.degree() >= min_degree) mons.push_back(mon);
  std::sort(mons.begin(), mons.end());
  mons.erase(std::unique(mons.begin(), mons.end()), mons.end());
  RatMatrix m(mons.size(), std::vector<Rat>(p.dim(), Rat(0)));
  for (int i = 0; i < p.dim(); ++i)
    for (const auto& [mon, c] : p.components()[i]) {
      if (mon.degree() < min_degree) continue;
      auto row = std::lower_bound(mons.begin(), mons.end(), mon) - mons.begin();
      m[row][i] = Rat(c);
    }
  return m;
}

}  // namespace

RankResult component_rank(const IntPolynomialMap& p) {
  RatMatrix m = coefficient_rows(p, 0);
  int rank = rat_rank(m);
  if (rank == p.dim()) return {rank, std::nullopt};
  auto basis = rat_kernel(m);
  OSPEC_CHECK(!basis.empty(), "rank-deficient matrix must have a kernel vector");
  return {rank, normalize_integer_vector(basis.front())};
}

std::optional<DegenerateCombination> linear_degenerate_combination(
    const IntPolynomialMap& p) {
  if (!p.zero_constant_term())
    throw UsageError("linear_degenerate_combination: nonzero constant term");
  RatMatrix high = coefficient_rows(p, 2);
  std::vector<std::vector<Rat>> basis;
  if (high.empty()) {
    // no monomials of degree >= 2: any single component works
    std::vector<Rat> e(p.dim(), Rat(0));
    e[0] = 1;
    basis.push_back(std::move(e));
  } else {
    basis = rat_kernel(high);
  }
  if (basis.empty()) return std::nullopt;
  std::vector<Int> alpha = normalize_integer_vector(basis.front());

  const int blen = std::max(p.arity(), p.dim());
  std::vector<Int> beta(blen, Int(0));
  for (int i = 0; i < p.dim(); ++i)
    for (const auto& [mon, c] : p.components()[i]) {
      if (mon.degree() != 1) continue;
      for (int j = 0; j < p.arity(); ++j)
        if (mon.exponents[j] == 1) beta[j] += alpha[i] * c;
    }
  return DegenerateCombination{std::move(alpha), std::move(beta)};
}

}  // namespace orbitspec
