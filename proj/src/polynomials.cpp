#include "froglab/polynomials.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>

namespace froglab {

namespace {

using Coeff = MultiPoly::Coeff;
using Exponents = MultiPoly::Exponents;

Coeff checked_add(Coeff a, Coeff b) {
  Coeff out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw ResourceLimit("polynomial coefficient overflow");
  return out;
}

Coeff checked_mul(Coeff a, Coeff b) {
  Coeff out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw ResourceLimit("polynomial coefficient overflow");
  return out;
}

int degree_of(const Exponents& e) {
  int s = 0;
  for (auto v : e) s += v;
  return s;
}

// true if a precedes b in graded-lex order
bool grlex_before(const Exponents& a, const Exponents& b) {
  const int da = degree_of(a);
  const int db = degree_of(b);
  if (da != db) return da > db;
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return false;
}

struct GrlexLess {
  bool operator()(const Exponents& a, const Exponents& b) const { return grlex_before(a, b); }
};

}  // namespace

MultiPoly::MultiPoly(int nvars, std::vector<Term> terms) : nvars_(nvars) {
  if (nvars < 0) throw InvalidParameter("negative variable count");
  std::map<Exponents, Coeff, GrlexLess> acc;
  for (auto& t : terms) {
    if (t.exponents.size() != static_cast<std::size_t>(nvars))
      throw DimensionMismatch("term exponent vector length does not match nvars");
    auto [it, inserted] = acc.emplace(std::move(t.exponents), t.coeff);
    if (!inserted) it->second = checked_add(it->second, t.coeff);
  }
  terms_.reserve(acc.size());
  for (auto& [e, c] : acc) {
    if (c != 0) terms_.push_back(Term{e, c});
  }
}

MultiPoly MultiPoly::monomial(int nvars, Exponents exponents, Coeff coeff) {
  return MultiPoly(nvars, {Term{std::move(exponents), coeff}});
}

int MultiPoly::total_degree() const {
  int best = 0;
  for (const auto& t : terms_) best = std::max(best, degree_of(t.exponents));
  return best;
}

MultiPoly MultiPoly::embedded(int nvars) const {
  if (nvars < nvars_) throw DimensionMismatch("cannot embed into fewer variables");
  std::vector<Term> out = terms_;
  for (auto& t : out) t.exponents.resize(nvars, 0);
  return MultiPoly(nvars, std::move(out));
}

MultiPoly MultiPoly::scaled(Coeff c) const {
  std::vector<Term> out = terms_;
  for (auto& t : out) t.coeff = checked_mul(t.coeff, c);
  return MultiPoly(nvars_, std::move(out));
}

MultiPoly MultiPoly::times_power(int var, int power) const {
  if (var < 0 || var >= nvars_) throw DimensionMismatch("variable index out of range");
  std::vector<Term> out = terms_;
  for (auto& t : out) {
    const int e = t.exponents[var] + power;
    if (e > 255) throw ResourceLimit("exponent overflow");
    t.exponents[var] = static_cast<std::uint8_t>(e);
  }
  return MultiPoly(nvars_, std::move(out));
}

MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
  const int n = std::max(a.nvars_, b.nvars_);
  std::vector<MultiPoly::Term> all = a.embedded(n).terms_;
  const auto bt = b.embedded(n).terms_;
  all.insert(all.end(), bt.begin(), bt.end());
  return MultiPoly(n, std::move(all));
}

MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) { return a + b.scaled(-1); }

double MultiPoly::eval(std::span<const double> z) const {
  if (z.size() != static_cast<std::size_t>(nvars_))
    throw DimensionMismatch("eval: expected " + std::to_string(nvars_) + " values, got " +
                            std::to_string(z.size()));
  double sum = 0.0;
  for (const auto& t : terms_) {
    double m = static_cast<double>(t.coeff);
    for (int i = 0; i < nvars_; ++i) {
      for (int e = 0; e < t.exponents[i]; ++e) m *= z[i];
    }
    sum += m;
  }
  return sum;
}

Coeff MultiPoly::eval_exact(std::span<const Coeff> z) const {
  if (z.size() != static_cast<std::size_t>(nvars_)) throw DimensionMismatch("eval_exact: wrong arity");
  Coeff sum = 0;
  for (const auto& t : terms_) {
    Coeff m = t.coeff;
    for (int i = 0; i < nvars_; ++i) {
      for (int e = 0; e < t.exponents[i]; ++e) m = checked_mul(m, z[i]);
    }
    sum = checked_add(sum, m);
  }
  return sum;
}

double MultiPoly::perturbation_bound(std::span<const double> z, double eps) const {
  if (z.size() != static_cast<std::size_t>(nvars_)) throw DimensionMismatch("perturbation_bound: wrong arity");
  double bound = 0.0;
  for (const auto& t : terms_) {
    double lo = 1.0;
    double hi = 1.0;
    for (int i = 0; i < nvars_; ++i) {
      const double a = std::abs(z[i]);
      for (int e = 0; e < t.exponents[i]; ++e) {
        lo *= a;
        hi *= a + eps;
      }
    }
    bound += std::abs(static_cast<double>(t.coeff)) * (hi - lo);
  }
  return bound;
}

std::string MultiPoly::to_text() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : terms_) {
    Coeff c = t.coeff;
    if (first) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    const Coeff mag = c < 0 ? -c : c;
    std::string mono;
    for (int i = 0; i < nvars_; ++i) {
      const int e = t.exponents[i];
      if (e == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += "z" + std::to_string(i + 1);
      if (e > 1) mono += "^" + std::to_string(e);
    }
    if (mono.empty()) {
      out += std::to_string(mag);
    } else if (mag == 1) {
      out += mono;
    } else {
      out += std::to_string(mag) + "*" + mono;
    }
    first = false;
  }
  return out;
}

nlohmann::json MultiPoly::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : terms_) {
    std::vector<int> e(t.exponents.begin(), t.exponents.end());
    terms.push_back({{"coeff", t.coeff}, {"exponents", e}});
  }
  return {{"nvars", nvars_}, {"terms", terms}};
}

MultiPoly MultiPoly::from_json(const nlohmann::json& j) {
  const int n = j.at("nvars").get<int>();
  std::vector<Term> terms;
  for (const auto& t : j.at("terms")) {
    const auto e = t.at("exponents").get<std::vector<int>>();
    Exponents ex;
    for (int v : e) {
      if (v < 0 || v > 255) throw InvalidParameter("exponent out of range");
      ex.push_back(static_cast<std::uint8_t>(v));
    }
    terms.push_back(Term{std::move(ex), t.at("coeff").get<Coeff>()});
  }
  return MultiPoly(n, std::move(terms));
}

namespace {

struct ParsedTerm {
  std::map<int, int> powers;  // 0-based var -> exponent
  Coeff coeff = 1;
};

int parse_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidParameter("malformed integer '" + std::string(s) + "'");
  return v;
}

Coeff parse_coeff(std::string_view s) {
  Coeff v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidParameter("malformed coefficient '" + std::string(s) + "'");
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

ParsedTerm parse_term(std::string_view body) {
  ParsedTerm t;
  while (!body.empty()) {
    const auto star = body.find('*');
    const std::string_view factor = trim(body.substr(0, star));
    body = star == std::string_view::npos ? std::string_view{} : body.substr(star + 1);
    if (factor.empty()) throw InvalidParameter("empty factor in polynomial text");
    if (factor.front() == 'z') {
      const auto caret = factor.find('^');
      const int idx = parse_int(factor.substr(1, caret == std::string_view::npos ? factor.npos : caret - 1));
      const int pw = caret == std::string_view::npos ? 1 : parse_int(factor.substr(caret + 1));
      if (idx < 1) throw InvalidParameter("variable indices start at z1");
      t.powers[idx - 1] += pw;
    } else {
      t.coeff = checked_mul(t.coeff, parse_coeff(factor));
    }
  }
  return t;
}

}  // namespace

MultiPoly MultiPoly::parse_text(std::string_view text) {
  int nvars = 0;
  if (const auto eq = text.find('='); eq != std::string_view::npos) {
    const std::string_view name = trim(text.substr(0, eq));
    std::size_t k = name.size();
    while (k > 0 && name[k - 1] >= '0' && name[k - 1] <= '9') --k;
    if (k < name.size()) nvars = parse_int(name.substr(k));
    text = text.substr(eq + 1);
  }
  text = trim(text);
  if (text.empty()) throw InvalidParameter("empty polynomial text");

  std::vector<ParsedTerm> parsed;
  int sign = 1;
  std::size_t i = 0;
  if (text[0] == '-') {
    sign = -1;
    i = 1;
  }
  while (i < text.size()) {
    std::size_t j = i;
    // terms are separated by " + " / " - "; a bare '-' only appears as a separator here
    while (j < text.size() && !(text[j] == ' ' && j + 1 < text.size() && (text[j + 1] == '+' || text[j + 1] == '-')))
      ++j;
    ParsedTerm t = parse_term(trim(text.substr(i, j - i)));
    t.coeff *= sign;
    parsed.push_back(std::move(t));
    if (j >= text.size()) break;
    sign = text[j + 1] == '-' ? -1 : 1;
    i = j + 2;
    if (i >= text.size()) throw InvalidParameter("polynomial text ends with an operator");
  }
  for (const auto& t : parsed) {
    for (const auto& [v, _] : t.powers) nvars = std::max(nvars, v + 1);
  }
  std::vector<Term> terms;
  for (const auto& t : parsed) {
    Exponents e(nvars, 0);
    for (const auto& [v, pw] : t.powers) {
      if (pw > 255) throw ResourceLimit("exponent overflow");
      e[v] = static_cast<std::uint8_t>(pw);
    }
    terms.push_back(Term{std::move(e), t.coeff});
  }
  if (terms.size() == 1 && terms[0].coeff == 0) terms.clear();
  return MultiPoly(nvars, std::move(terms));
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > static_cast<__int128>(INT64_MAX)) throw ResourceLimit("binomial overflow");
  }
  return static_cast<std::int64_t>(r);
}

namespace {

class PolyCache {
 public:
  const MultiPoly* find(PolyFamily f, int k) const {
    std::shared_lock lock(mu_);
    auto it = cache_.find({f, k});
    return it == cache_.end() ? nullptr : it->second.get();
  }

  // A concurrent builder may have won the race; either copy is identical.
  const MultiPoly& insert(PolyFamily f, int k, MultiPoly poly) {
    std::unique_lock lock(mu_);
    auto [it, _] = cache_.try_emplace({f, k}, std::make_unique<MultiPoly>(std::move(poly)));
    return *it->second;
  }

 private:
  mutable std::shared_mutex mu_;
  std::map<std::pair<PolyFamily, int>, std::unique_ptr<MultiPoly>> cache_;
};

PolyCache& cache() {
  static PolyCache c;
  return c;
}

void check_order(int k, int min_k, int max_k) {
  if (k < min_k) throw InvalidParameter("polynomial order must be >= " + std::to_string(min_k));
  if (k > max_k)
    throw ResourceLimit("polynomial order " + std::to_string(k) + " exceeds cap " + std::to_string(max_k));
}

}  // namespace

const MultiPoly& build_P(int k, int max_k) {
  check_order(k, 1, max_k);
  if (const auto* hit = cache().find(PolyFamily::kP, k)) return *hit;
  MultiPoly out;
  if (k == 1) {
    out = MultiPoly::monomial(1, {1});
  } else {
    const int m = k - 1;  // building P_{m+1}
    Exponents top(k, 0);
    top[m] = static_cast<std::uint8_t>(k);
    out = MultiPoly::monomial(k, top);
    for (int l = 1; l <= m; ++l) {
      const MultiPoly& pl = build_P(l, max_k);
      out = out - pl.embedded(k).times_power(m, k - l).scaled(binomial(m, l - 1));
    }
  }
  return cache().insert(PolyFamily::kP, k, std::move(out));
}

const MultiPoly& build_Q(int k, int max_k) {
  check_order(k, 2, max_k);
  if (const auto* hit = cache().find(PolyFamily::kQ, k)) return *hit;
  MultiPoly out;
  if (k == 2) {
    out = MultiPoly::monomial(2, {0, 2});
  } else {
    const int m = k - 1;
    Exponents top(k, 0);
    top[m] = static_cast<std::uint8_t>(k);
    out = MultiPoly::monomial(k, top);
    for (int l = 2; l <= m; ++l) {
      const MultiPoly& ql = build_Q(l, max_k);
      out = out - ql.embedded(k).times_power(m, k - l).scaled(binomial(m - 1, l - 2));
    }
  }
  return cache().insert(PolyFamily::kQ, k, std::move(out));
}

const MultiPoly& build_poly(PolyFamily family, int k, int max_k) {
  return family == PolyFamily::kP ? build_P(k, max_k) : build_Q(k, max_k);
}

double eval_poly(const MultiPoly& poly, std::span<const double> z) { return poly.eval(z); }

std::string poly_name(PolyFamily family, int k) {
  return (family == PolyFamily::kP ? "P" : "Q") + std::to_string(k);
}

PolyFamily parse_family(std::string_view s) {
  if (s == "P" || s == "p") return PolyFamily::kP;
  if (s == "Q" || s == "q") return PolyFamily::kQ;
  throw InvalidParameter("polynomial family must be P or Q");
}

}  // namespace froglab
