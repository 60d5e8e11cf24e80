#include "dwc/symbol.hpp"

#include <numeric>
#include <sstream>

namespace dwc {

namespace {

void require_same_dimension(const PolySymbol& f, const PolySymbol& g) {
  if (f.dimension() != g.dimension())
    throw DimensionMismatch("symbol dimensions differ: " + std::to_string(f.dimension()) + " vs " +
                            std::to_string(g.dimension()));
}

template <typename T>
T int_pow(T base, int e) {
  T r = 1;
  for (int k = 0; k < e; ++k) r *= base;
  return r;
}

}  // namespace

int Monomial::x_degree() const { return std::accumulate(x.begin(), x.end(), 0); }
int Monomial::xi_degree() const { return std::accumulate(xi.begin(), xi.end(), 0); }
int Monomial::degree() const { return x_degree() + xi_degree(); }

PolySymbol::PolySymbol(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("symbol dimension must be positive");
}

PolySymbol PolySymbol::constant(std::size_t n, const GaussianRational& c) {
  PolySymbol f(n);
  f.add_term(Monomial(n), c);
  return f;
}

PolySymbol PolySymbol::x(std::size_t n, std::size_t a) {
  if (a >= n) throw std::out_of_range("position index out of range");
  Monomial m(n);
  m.x[a] = 1;
  return monomial(m, 1);
}

PolySymbol PolySymbol::xi(std::size_t n, std::size_t a) {
  if (a >= n) throw std::out_of_range("momentum index out of range");
  Monomial m(n);
  m.xi[a] = 1;
  return monomial(m, 1);
}

PolySymbol PolySymbol::hbar(std::size_t n, int power) {
  Monomial m(n);
  m.hbar = power;
  return monomial(m, 1);
}

PolySymbol PolySymbol::monomial(const Monomial& m, const GaussianRational& c) {
  PolySymbol f(m.dimension());
  f.add_term(m, c);
  return f;
}

void PolySymbol::add_term(const Monomial& m, const GaussianRational& c) {
  if (m.dimension() != n_) throw DimensionMismatch("monomial dimension does not match symbol");
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

GaussianRational PolySymbol::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? GaussianRational{} : it->second;
}

int PolySymbol::degree() const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

int PolySymbol::xi_degree() const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, m.xi_degree());
  return d;
}

int PolySymbol::hbar_degree() const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, m.hbar);
  return d;
}

bool PolySymbol::is_xi_free() const { return xi_degree() <= 0; }
bool PolySymbol::is_hbar_free() const { return hbar_degree() <= 0; }

bool PolySymbol::is_real() const {
  for (const auto& [m, c] : terms_)
    if (!c.is_real()) return false;
  return true;
}

PolySymbol PolySymbol::hbar_part(int k) const {
  PolySymbol out(n_);
  for (const auto& [m, c] : terms_) {
    if (m.hbar != k) continue;
    Monomial stripped = m;
    stripped.hbar = 0;
    out.terms_.emplace(std::move(stripped), c);
  }
  return out;
}

PolySymbol PolySymbol::flip_hbar() const {
  PolySymbol out = *this;
  for (auto& [m, c] : out.terms_)
    if (m.hbar % 2 != 0) c = -c;
  return out;
}

PolySymbol PolySymbol::conj() const {
  PolySymbol out = *this;
  for (auto& [m, c] : out.terms_) c = c.conj();
  return out;
}

PolySymbol PolySymbol::normalized() const {
  PolySymbol out(n_);
  for (const auto& [m, c] : terms_) out.add_term(m, c);
  return out;
}

PolySymbol& PolySymbol::operator+=(const PolySymbol& o) {
  require_same_dimension(*this, o);
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

PolySymbol& PolySymbol::operator-=(const PolySymbol& o) {
  require_same_dimension(*this, o);
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

PolySymbol& PolySymbol::operator*=(const GaussianRational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, coeff] : terms_) coeff *= c;
  return *this;
}

PolySymbol operator*(const PolySymbol& a, const PolySymbol& b) {
  require_same_dimension(a, b);
  const std::size_t n = a.dimension();
  PolySymbol out(n);
  Monomial m(n);
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      m.hbar = ma.hbar + mb.hbar;
      for (std::size_t k = 0; k < n; ++k) {
        m.x[k] = ma.x[k] + mb.x[k];
        m.xi[k] = ma.xi[k] + mb.xi[k];
      }
      out.add_term(m, ca * cb);
    }
  }
  return out;
}

PolySymbol PolySymbol::operator-() const {
  PolySymbol out = *this;
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

std::string PolySymbol::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c.to_string();
    if (m.hbar) os << "*h^" << m.hbar;
    for (std::size_t a = 0; a < n_; ++a)
      if (m.x[a]) os << "*x" << a + 1 << (m.x[a] > 1 ? "^" + std::to_string(m.x[a]) : "");
    for (std::size_t a = 0; a < n_; ++a)
      if (m.xi[a]) os << "*p" << a + 1 << (m.xi[a] > 1 ? "^" + std::to_string(m.xi[a]) : "");
  }
  return os.str();
}

PolySymbol pow(const PolySymbol& f, int m) {
  if (m < 0) throw std::invalid_argument("negative power");
  PolySymbol out = PolySymbol::constant(f.dimension(), 1);
  for (int k = 0; k < m; ++k) out = out * f;
  return out;
}

PolySymbol partial(const PolySymbol& f, Variable v) {
  if (v.index >= f.dimension()) throw std::out_of_range("derivative index out of range");
  PolySymbol out(f.dimension());
  for (const auto& [m, c] : f.terms()) {
    const int e = v.kind == VarKind::Position ? m.x[v.index] : m.xi[v.index];
    if (e == 0) continue;
    Monomial d = m;
    (v.kind == VarKind::Position ? d.x[v.index] : d.xi[v.index]) -= 1;
    out.add_term(d, c * GaussianRational(e));
  }
  return out;
}

PolySymbol poisson_bracket(const PolySymbol& f, const PolySymbol& g) {
  require_same_dimension(f, g);
  PolySymbol out(f.dimension());
  for (std::size_t a = 0; a < f.dimension(); ++a) {
    out += partial(f, Variable::xi(a)) * partial(g, Variable::x(a));
    out -= partial(f, Variable::x(a)) * partial(g, Variable::xi(a));
  }
  return out;
}

PolySymbol angular_momentum(std::size_t i, std::size_t j, std::size_t n) {
  if (i == j) throw std::invalid_argument("angular momentum needs distinct indices");
  if (i >= n || j >= n) throw std::out_of_range("angular momentum index out of range");
  return PolySymbol::x(n, i) * PolySymbol::xi(n, j) - PolySymbol::x(n, j) * PolySymbol::xi(n, i);
}

PolySymbol momentum_square(std::size_t n) {
  PolySymbol out(n);
  for (std::size_t a = 0; a < n; ++a) out += PolySymbol::xi(n, a) * PolySymbol::xi(n, a);
  return out;
}

PolySymbol position_square(std::size_t n) {
  PolySymbol out(n);
  for (std::size_t a = 0; a < n; ++a) out += PolySymbol::x(n, a) * PolySymbol::x(n, a);
  return out;
}

std::complex<double> evaluate(const PolySymbol& f, const Eigen::Ref<const Eigen::VectorXd>& x,
                              const Eigen::Ref<const Eigen::VectorXd>& xi, double hbar) {
  const auto n = static_cast<Eigen::Index>(f.dimension());
  if (x.size() != n || xi.size() != n) throw DimensionMismatch("evaluation point dimension mismatch");
  std::complex<double> sum = 0.0;
  for (const auto& [m, c] : f.terms()) {
    double v = int_pow(hbar, m.hbar);
    for (Eigen::Index a = 0; a < n; ++a) v *= int_pow(x[a], m.x[a]) * int_pow(xi[a], m.xi[a]);
    sum += c.to_complex() * v;
  }
  return sum;
}

GaussianRational evaluate_exact(const PolySymbol& f, const std::vector<mpq_class>& x,
                                const std::vector<mpq_class>& xi, const mpq_class& hbar) {
  const std::size_t n = f.dimension();
  if (x.size() != n || xi.size() != n) throw DimensionMismatch("evaluation point dimension mismatch");
  GaussianRational sum;
  for (const auto& [m, c] : f.terms()) {
    mpq_class v = int_pow<mpq_class>(hbar, m.hbar);
    for (std::size_t a = 0; a < n; ++a) v *= int_pow<mpq_class>(x[a], m.x[a]) * int_pow<mpq_class>(xi[a], m.xi[a]);
    sum += c * GaussianRational(v);
  }
  return sum;
}

VectorField::VectorField(std::vector<PolySymbol> components) : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("vector field needs at least one component");
  const std::size_t n = components_.size();
  for (const auto& c : components_) {
    if (c.dimension() != n) throw DimensionMismatch("vector field component dimension mismatch");
    if (!c.is_xi_free() || !c.is_hbar_free())
      throw std::invalid_argument("vector field components must be position-only and hbar-free");
  }
}

VectorField VectorField::zero(std::size_t n) { return VectorField(std::vector<PolySymbol>(n, PolySymbol(n))); }

VectorField VectorField::linear(const std::vector<std::vector<long>>& a) {
  const std::size_t n = a.size();
  std::vector<PolySymbol> comps(n, PolySymbol(n));
  for (std::size_t r = 0; r < n; ++r) {
    if (a[r].size() != n) throw DimensionMismatch("linear field matrix must be square");
    for (std::size_t c = 0; c < n; ++c) comps[r] += PolySymbol::x(n, c) * GaussianRational(a[r][c]);
  }
  return VectorField(std::move(comps));
}

VectorField VectorField::rotation(std::size_t i, std::size_t j, std::size_t n) {
  if (i == j || i >= n || j >= n) throw std::invalid_argument("rotation needs distinct in-range indices");
  std::vector<PolySymbol> comps(n, PolySymbol(n));
  comps[j] = PolySymbol::x(n, i);
  comps[i] = -PolySymbol::x(n, j);
  return VectorField(std::move(comps));
}

bool VectorField::is_zero() const {
  for (const auto& c : components_)
    if (!c.is_zero()) return false;
  return true;
}

PolySymbol VectorField::apply(const PolySymbol& a) const {
  if (a.dimension() != dimension()) throw DimensionMismatch("field/symbol dimension mismatch");
  PolySymbol out(dimension());
  for (std::size_t k = 0; k < dimension(); ++k) out += components_[k] * partial(a, Variable::x(k));
  return out;
}

PolySymbol VectorField::divergence() const {
  PolySymbol out(dimension());
  for (std::size_t k = 0; k < dimension(); ++k) out += partial(components_[k], Variable::x(k));
  return out;
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  if (x.dimension() != y.dimension()) throw DimensionMismatch("field dimensions differ");
  std::vector<PolySymbol> comps;
  comps.reserve(x.dimension());
  for (std::size_t a = 0; a < x.dimension(); ++a) comps.push_back(x.apply(y[a]) - y.apply(x[a]));
  return VectorField(std::move(comps));
}

PolySymbol momentum_symbol(const VectorField& field) {
  const std::size_t n = field.dimension();
  PolySymbol out(n);
  for (std::size_t a = 0; a < n; ++a) out += field[a] * PolySymbol::xi(n, a);
  return out;
}

CompiledSymbol::CompiledSymbol(const PolySymbol& f, double hbar) : n_(f.dimension()) {
  for (const auto& [m, c] : f.terms()) {
    if (m.xi_degree() != 0) throw std::invalid_argument("compiled symbols must be position-only");
    terms_.push_back({m.x, c.to_complex() * int_pow(hbar, m.hbar)});
  }
}

std::complex<double> CompiledSymbol::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (static_cast<std::size_t>(x.size()) != n_) throw DimensionMismatch("compiled symbol dimension mismatch");
  std::complex<double> sum = 0.0;
  for (const auto& t : terms_) {
    double v = 1.0;
    for (std::size_t a = 0; a < n_; ++a) v *= int_pow(x[static_cast<Eigen::Index>(a)], t.x[a]);
    sum += t.c * v;
  }
  return sum;
}

PolySymbol random_symbol(std::size_t n, int max_degree, int num_terms, std::mt19937_64& rng,
                         bool position_only) {
  std::uniform_int_distribution<int> coeff(-5, 5);
  std::uniform_int_distribution<int> den(1, 4);
  std::uniform_int_distribution<int> deg(0, max_degree);
  std::uniform_int_distribution<std::size_t> slot(0, (position_only ? n : 2 * n) - 1);
  PolySymbol out(n);
  for (int t = 0; t < num_terms; ++t) {
    Monomial m(n);
    const int d = deg(rng);
    for (int k = 0; k < d; ++k) {
      const std::size_t s = slot(rng);
      (s < n ? m.x[s] : m.xi[s - n]) += 1;
    }
    int num = coeff(rng);
    if (num == 0) num = 1;
    out.add_term(m, GaussianRational::fraction(num, den(rng)));
  }
  return out;
}

VectorField random_field(std::size_t n, int max_degree, int num_terms, std::mt19937_64& rng) {
  std::vector<PolySymbol> comps;
  comps.reserve(n);
  for (std::size_t a = 0; a < n; ++a) comps.push_back(random_symbol(n, max_degree, num_terms, rng, true));
  return VectorField(std::move(comps));
}

PolySymbol symbol_from_json(const nlohmann::json& terms, std::size_t n) {
  if (!terms.is_array()) throw std::invalid_argument("polynomial literal must be an array of term records");
  PolySymbol out(n);
  std::size_t idx = 0;
  for (const auto& t : terms) {
    const std::string where = "term " + std::to_string(idx++);
    if (!t.is_object()) throw std::invalid_argument(where + ": expected object");
    for (const auto& [key, val] : t.items())
      if (key != "re" && key != "im" && key != "hbar" && key != "x" && key != "xi")
        throw std::invalid_argument(where + ": unknown key '" + key + "'");
    auto rational_field = [&](const char* key) -> mpq_class {
      if (!t.contains(key)) return 0;
      const auto& v = t.at(key);
      if (v.is_string()) return parse_rational(v.get<std::string>());
      if (v.is_number_integer()) return mpq_class(v.get<long>());
      throw std::invalid_argument(where + ": '" + key + "' must be a rational string or integer");
    };
    auto exponents = [&](const char* key) {
      std::vector<int> e(n, 0);
      if (!t.contains(key)) return e;
      const auto& v = t.at(key);
      if (!v.is_array() || v.size() != n)
        throw std::invalid_argument(where + ": '" + key + "' must have " + std::to_string(n) + " exponents");
      for (std::size_t a = 0; a < n; ++a) {
        if (!v[a].is_number_integer() || v[a].get<long>() < 0)
          throw std::invalid_argument(where + ": '" + key + "' exponents must be non-negative integers");
        e[a] = v[a].get<int>();
      }
      return e;
    };
    Monomial m(n);
    if (t.contains("hbar")) {
      const auto& h = t.at("hbar");
      if (!h.is_number_integer() || h.get<long>() < 0)
        throw std::invalid_argument(where + ": 'hbar' must be a non-negative integer");
      m.hbar = h.get<int>();
    }
    m.x = exponents("x");
    m.xi = exponents("xi");
    out.add_term(m, GaussianRational(rational_field("re"), rational_field("im")));
  }
  return out;
}

nlohmann::ordered_json symbol_to_json(const PolySymbol& f) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& [m, c] : f.terms()) {
    nlohmann::ordered_json t;
    t["re"] = format_rational(c.re());
    t["im"] = format_rational(c.im());
    t["hbar"] = m.hbar;
    t["x"] = m.x;
    t["xi"] = m.xi;
    out.push_back(t);
  }
  return out;
}

}  // namespace dwc
