#include "dwc/moyal.hpp"

#include <algorithm>
#include <functional>

namespace dwc {

namespace {

mpz_class factorial(int k) {
  mpz_class r = 1;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

/// d_x^dx d_xi^dxi f, computed termwise with falling factorials.
PolySymbol mixed_derivative(const PolySymbol& f, const std::vector<int>& dx, const std::vector<int>& dxi) {
  const std::size_t n = f.dimension();
  PolySymbol out(n);
  for (const auto& [m, c] : f.terms()) {
    mpz_class scale = 1;
    Monomial d = m;
    bool vanishes = false;
    for (std::size_t a = 0; a < n && !vanishes; ++a) {
      if (m.x[a] < dx[a] || m.xi[a] < dxi[a]) {
        vanishes = true;
        break;
      }
      for (int r = 0; r < dx[a]; ++r) scale *= m.x[a] - r;
      for (int r = 0; r < dxi[a]; ++r) scale *= m.xi[a] - r;
      d.x[a] -= dx[a];
      d.xi[a] -= dxi[a];
    }
    if (!vanishes) out.add_term(d, c * GaussianRational(mpq_class(scale)));
  }
  return out;
}

void require_same_dimension(const PolySymbol& f, const PolySymbol& g) {
  if (f.dimension() != g.dimension()) throw DimensionMismatch("symbol dimensions differ");
}

}  // namespace

PolySymbol bidifferential_power(const PolySymbol& f, const PolySymbol& g, int k) {
  require_same_dimension(f, g);
  if (k < 0) throw std::invalid_argument("bidifferential order must be non-negative");
  const std::size_t n = f.dimension();
  PolySymbol out(n);
  if (f.is_zero() || g.is_zero() || k > f.degree() || k > g.degree()) return out;

  // Multinomial expansion: alpha counts xi-derivatives on f (paired with x on g), beta counts
  // x-derivatives on f (paired with xi on g, each carrying a minus sign).
  std::vector<int> alpha(n, 0), beta(n, 0);
  const mpz_class kfact = factorial(k);
  std::function<void(std::size_t, int)> recurse = [&](std::size_t slot, int remaining) {
    if (slot == 2 * n) {
      if (remaining != 0) return;
      mpz_class denom = 1;
      int beta_total = 0;
      for (std::size_t a = 0; a < n; ++a) {
        denom *= factorial(alpha[a]) * factorial(beta[a]);
        beta_total += beta[a];
      }
      PolySymbol df = mixed_derivative(f, beta, alpha);
      if (df.is_zero()) return;
      PolySymbol dg = mixed_derivative(g, alpha, beta);
      if (dg.is_zero()) return;
      mpq_class w(kfact, denom);
      if (beta_total % 2 != 0) w = -w;
      out += (df * dg) * GaussianRational(w);
      return;
    }
    int& e = slot < n ? alpha[slot] : beta[slot - n];
    for (int v = 0; v <= remaining; ++v) {
      e = v;
      recurse(slot + 1, remaining - v);
    }
    e = 0;
  };
  recurse(0, k);
  return out;
}

PolySymbol moyal_star(const PolySymbol& f, const PolySymbol& g) {
  require_same_dimension(f, g);
  const std::size_t n = f.dimension();
  PolySymbol out(n);
  if (f.is_zero() || g.is_zero()) return out;
  const int kmax = std::min(f.degree(), g.degree());
  // (i/2)^k / k!
  GaussianRational weight = 1;
  const GaussianRational half_i(0, mpq_class(1, 2));
  for (int k = 0; k <= kmax; ++k) {
    if (k > 0) weight = weight * half_i / GaussianRational(k);
    PolySymbol pk = bidifferential_power(f, g, k);
    if (pk.is_zero()) continue;
    out += PolySymbol::hbar(n, k) * pk * weight;
  }
  return out;
}

PolySymbol star_commutator(const PolySymbol& f, const PolySymbol& g) {
  return moyal_star(f, g) - moyal_star(g, f);
}

PolySymbol star_power(const PolySymbol& f, int j) {
  if (j < 0) throw std::invalid_argument("negative star power");
  PolySymbol out = PolySymbol::constant(f.dimension(), 1);
  for (int k = 0; k < j; ++k) out = moyal_star(out, f);
  return out;
}

PolySymbol StarExpansion::reconstruct() const {
  PolySymbol out(base.dimension());
  PolySymbol power = PolySymbol::constant(base.dimension(), 1);
  for (std::size_t j = 0; j < coefficients.size(); ++j) {
    if (j > 0) power = moyal_star(power, base);
    out += coefficients[j] * power;
  }
  return out;
}

StarExpansion expand_power_in_star_basis(const PolySymbol& f, int m) {
  if (m < 1) throw std::invalid_argument("power must be positive");
  if (!f.is_hbar_free()) throw std::invalid_argument("base symbol must be hbar-free");
  if (f.is_zero()) throw SingularStarBasis("zero base symbol has dependent star powers");
  const std::size_t n = f.dimension();
  const int max_hbar = m * std::max(1, f.degree());

  std::vector<PolySymbol> powers;
  powers.push_back(PolySymbol::constant(n, 1));
  for (int j = 1; j <= m; ++j) powers.push_back(moyal_star(powers.back(), f));

  // Unknown (j, k) multiplies hbar^k f^{*j}; one equation per monomial.
  struct Column {
    int j;
    int k;
  };
  std::vector<Column> cols;
  std::vector<PolySymbol> col_symbols;
  for (int j = 0; j <= m; ++j)
    for (int k = 0; k <= max_hbar; ++k) {
      cols.push_back({j, k});
      col_symbols.push_back(PolySymbol::hbar(n, k) * powers[static_cast<std::size_t>(j)]);
    }
  const PolySymbol target = pow(f, m);

  std::map<Monomial, std::size_t> row_of;
  auto row_index = [&](const Monomial& mono) {
    auto [it, inserted] = row_of.try_emplace(mono, row_of.size());
    return it->second;
  };
  for (const auto& s : col_symbols)
    for (const auto& [mono, c] : s.terms()) row_index(mono);
  for (const auto& [mono, c] : target.terms()) row_index(mono);

  const std::size_t rows = row_of.size();
  const std::size_t ncols = cols.size();
  // Augmented matrix [A | b].
  std::vector<std::vector<GaussianRational>> a(rows, std::vector<GaussianRational>(ncols + 1));
  for (std::size_t c = 0; c < ncols; ++c)
    for (const auto& [mono, coeff] : col_symbols[c].terms()) a[row_of.at(mono)][c] = coeff;
  for (const auto& [mono, coeff] : target.terms()) a[row_of.at(mono)][ncols] = coeff;

  // Exact Gauss-Jordan elimination over Q(i).
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < ncols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c].is_zero()) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    const GaussianRational inv = GaussianRational(1) / a[r][c];
    for (std::size_t cc = c; cc <= ncols; ++cc) a[r][cc] *= inv;
    for (std::size_t rr = 0; rr < rows; ++rr) {
      if (rr == r || a[rr][c].is_zero()) continue;
      const GaussianRational factor = a[rr][c];
      for (std::size_t cc = c; cc <= ncols; ++cc)
        if (!a[r][cc].is_zero()) a[rr][cc] -= factor * a[r][cc];
    }
    pivot_col.push_back(c);
    ++r;
  }
  if (pivot_col.size() < ncols)
    throw SingularStarBasis("star powers of the base symbol are linearly dependent over Q(i)[hbar]");
  for (std::size_t rr = r; rr < rows; ++rr)
    if (!a[rr][ncols].is_zero())
      throw SingularStarBasis("pointwise power is not in the span of the star powers");

  StarExpansion out{f, m, std::vector<PolySymbol>(static_cast<std::size_t>(m + 1), PolySymbol(n))};
  for (std::size_t i = 0; i < pivot_col.size(); ++i) {
    const Column& col = cols[pivot_col[i]];
    out.coefficients[static_cast<std::size_t>(col.j)] += PolySymbol::hbar(n, col.k) * a[i][ncols];
  }
  return out;
}

PolySymbol quadratic_exactness_check(const PolySymbol& h, const PolySymbol& g) {
  if (h.degree() > 2) throw std::invalid_argument("quadratic exactness needs deg h <= 2");
  const std::size_t n = h.dimension();
  return star_commutator(h, g) - PolySymbol::hbar(n, 1) * poisson_bracket(h, g) * GaussianRational::i();
}

}  // namespace dwc
