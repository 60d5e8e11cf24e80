#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "dwc/rational.hpp"

namespace dwc {

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exponent tuple of a phase-space monomial hbar^k x^a xi^b. Ordered lexicographically
/// on (hbar, x, xi) so that term maps iterate deterministically.
struct Monomial {
  int hbar = 0;
  std::vector<int> x;
  std::vector<int> xi;

  explicit Monomial(std::size_t n = 0) : x(n, 0), xi(n, 0) {}

  std::size_t dimension() const { return x.size(); }
  int degree() const;  // total degree in (x, xi); hbar not counted
  int x_degree() const;
  int xi_degree() const;

  friend bool operator<(const Monomial& a, const Monomial& b) {
    if (a.hbar != b.hbar) return a.hbar < b.hbar;
    if (a.x != b.x) return a.x < b.x;
    return a.xi < b.xi;
  }
  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.hbar == b.hbar && a.x == b.x && a.xi == b.xi;
  }
};

enum class VarKind { Position, Momentum };

/// Tagged variable index: x_a or xi_a (0-based).
struct Variable {
  VarKind kind;
  std::size_t index;
  static Variable x(std::size_t a) { return {VarKind::Position, a}; }
  static Variable xi(std::size_t a) { return {VarKind::Momentum, a}; }
};

/// Polynomial in (x, xi) with Gaussian-rational coefficients, graded by a formal hbar.
/// Zero coefficients are never stored, so map equality is symbol equality.
class PolySymbol {
 public:
  using TermMap = std::map<Monomial, GaussianRational>;

  explicit PolySymbol(std::size_t n);

  static PolySymbol constant(std::size_t n, const GaussianRational& c);
  static PolySymbol x(std::size_t n, std::size_t a);
  static PolySymbol xi(std::size_t n, std::size_t a);
  static PolySymbol hbar(std::size_t n, int power = 1);
  static PolySymbol monomial(const Monomial& m, const GaussianRational& c);

  std::size_t dimension() const { return n_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Adds c to the coefficient of m, dropping the entry if it cancels.
  void add_term(const Monomial& m, const GaussianRational& c);
  GaussianRational coefficient(const Monomial& m) const;

  int degree() const;        // total (x, xi) degree; -1 for zero
  int xi_degree() const;     // -1 for zero
  int hbar_degree() const;   // -1 for zero
  bool is_xi_free() const;
  bool is_hbar_free() const;
  bool is_real() const;

  /// Coefficient of hbar^k as an hbar-free symbol.
  PolySymbol hbar_part(int k) const;
  /// Substitutes hbar -> -hbar.
  PolySymbol flip_hbar() const;
  PolySymbol conj() const;
  /// Rebuilds the term map from scratch; a no-op on symbols built through this class.
  PolySymbol normalized() const;

  PolySymbol& operator+=(const PolySymbol& o);
  PolySymbol& operator-=(const PolySymbol& o);
  PolySymbol& operator*=(const GaussianRational& c);
  friend PolySymbol operator+(PolySymbol a, const PolySymbol& b) { return a += b; }
  friend PolySymbol operator-(PolySymbol a, const PolySymbol& b) { return a -= b; }
  friend PolySymbol operator*(PolySymbol a, const GaussianRational& c) { return a *= c; }
  friend PolySymbol operator*(const GaussianRational& c, PolySymbol a) { return a *= c; }
  friend PolySymbol operator*(const PolySymbol& a, const PolySymbol& b);
  PolySymbol operator-() const;

  friend bool operator==(const PolySymbol& a, const PolySymbol& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const PolySymbol& a, const PolySymbol& b) { return !(a == b); }

  std::string to_string() const;

 private:
  std::size_t n_;
  TermMap terms_;
};

PolySymbol pow(const PolySymbol& f, int m);
PolySymbol partial(const PolySymbol& f, Variable v);

/// {f,g} = sum_a (d_xi_a f d_x_a g - d_x_a f d_xi_a g).
PolySymbol poisson_bracket(const PolySymbol& f, const PolySymbol& g);

/// f_ij = x_i xi_j - x_j xi_i (0-based indices).
PolySymbol angular_momentum(std::size_t i, std::size_t j, std::size_t n);

/// |xi|^2.
PolySymbol momentum_square(std::size_t n);
/// |x|^2.
PolySymbol position_square(std::size_t n);

std::complex<double> evaluate(const PolySymbol& f, const Eigen::Ref<const Eigen::VectorXd>& x,
                              const Eigen::Ref<const Eigen::VectorXd>& xi, double hbar);
GaussianRational evaluate_exact(const PolySymbol& f, const std::vector<mpq_class>& x,
                                const std::vector<mpq_class>& xi, const mpq_class& hbar);

/// Position field X = sum_a X_a(x) d/dx_a with polynomial components.
class VectorField {
 public:
  explicit VectorField(std::vector<PolySymbol> components);
  static VectorField zero(std::size_t n);
  /// Linear field x -> A x with rational matrix entries.
  static VectorField linear(const std::vector<std::vector<long>>& a);
  /// Generator of the rotation in the (i, j) plane: zeta = x_i d_j - x_j d_i.
  static VectorField rotation(std::size_t i, std::size_t j, std::size_t n);

  std::size_t dimension() const { return components_.size(); }
  const PolySymbol& operator[](std::size_t a) const { return components_[a]; }
  const std::vector<PolySymbol>& components() const { return components_; }
  bool is_zero() const;

  /// X(a) = X . grad a.
  PolySymbol apply(const PolySymbol& a) const;
  PolySymbol divergence() const;

  friend bool operator==(const VectorField& a, const VectorField& b) { return a.components_ == b.components_; }

 private:
  std::vector<PolySymbol> components_;
};

/// [X,Y]_a = X . grad Y_a - Y . grad X_a.
VectorField lie_bracket(const VectorField& x, const VectorField& y);

/// J_X(x, xi) = sum_a X_a(x) xi_a.
PolySymbol momentum_symbol(const VectorField& field);

/// Double-precision copy of a symbol for fast repeated evaluation at hbar = 0.
class CompiledSymbol {
 public:
  CompiledSymbol() = default;
  explicit CompiledSymbol(const PolySymbol& f, double hbar = 0.0);

  std::size_t dimension() const { return n_; }
  /// Evaluates a position-only symbol (xi exponents must have been zero).
  std::complex<double> operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  double real(const Eigen::Ref<const Eigen::VectorXd>& x) const { return (*this)(x).real(); }

 private:
  struct Term {
    std::vector<int> x;
    std::complex<double> c;
  };
  std::size_t n_ = 0;
  std::vector<Term> terms_;
};

/// Random hbar-free symbol with small rational coefficients and total degree <= max_degree.
PolySymbol random_symbol(std::size_t n, int max_degree, int num_terms, std::mt19937_64& rng,
                         bool position_only = false);
VectorField random_field(std::size_t n, int max_degree, int num_terms, std::mt19937_64& rng);

// Literal format: [{"re":"p/q","im":"p/q","hbar":k,"x":[..],"xi":[..]}, ...].
PolySymbol symbol_from_json(const nlohmann::json& terms, std::size_t n);
nlohmann::ordered_json symbol_to_json(const PolySymbol& f);

}  // namespace dwc
