#pragma once

#include <stdexcept>
#include <vector>

#include "dwc/symbol.hpp"

namespace dwc {

/// P^k(f,g): k-th power of the bidifferential sum_a (d_xi_a (x) d_x_a - d_x_a (x) d_xi_a)
/// applied to f (x) g and multiplied out. P^0 = fg and P^1 = poisson_bracket.
PolySymbol bidifferential_power(const PolySymbol& f, const PolySymbol& g, int k);

/// f * g = sum_k (1/k!) (i hbar / 2)^k P^k(f,g). The sum is finite on polynomials.
PolySymbol moyal_star(const PolySymbol& f, const PolySymbol& g);

PolySymbol star_commutator(const PolySymbol& f, const PolySymbol& g);

/// f * f * ... * f (j factors); f^{*0} = 1.
PolySymbol star_power(const PolySymbol& f, int j);

class SingularStarBasis : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Expresses the pointwise power f^m as sum_j c_j(hbar) f^{*j}.
struct StarExpansion {
  PolySymbol base;
  int degree = 0;
  /// coefficients[j] is c_j, an hbar-only polynomial (x and xi exponents zero).
  std::vector<PolySymbol> coefficients;

  /// sum_j c_j f^{*j}; equals pow(base, degree) when the expansion is correct.
  PolySymbol reconstruct() const;
};

/// Solves the exact linear system over Q(i) for the c_j. Throws SingularStarBasis when the
/// star powers are dependent or the system has no solution of bounded hbar degree.
StarExpansion expand_power_in_star_basis(const PolySymbol& f, int m);

/// star_commutator(h,g) - i hbar {h,g}; vanishes identically when deg h <= 2.
/// Throws std::invalid_argument when h has (x, xi) degree above two.
PolySymbol quadratic_exactness_check(const PolySymbol& h, const PolySymbol& g);

}  // namespace dwc
