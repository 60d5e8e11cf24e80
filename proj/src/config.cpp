#include <cctype>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "dwc/suite.hpp"

namespace dwc {

namespace {

using ojson = nlohmann::ordered_json;

class PolyParser {
 public:
  PolyParser(const std::string& text, std::size_t n) : s_(text), n_(n) {}

  PolySymbol parse() {
    PolySymbol out = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return out;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw std::invalid_argument("polynomial '" + s_ + "' at offset " + std::to_string(pos_) + ": " + why);
  }

  PolySymbol expr() {
    PolySymbol out(n_);
    bool negative = eat('-');
    if (!negative) eat('+');
    while (true) {
      PolySymbol t = term();
      out += negative ? -t : t;
      if (eat('+')) negative = false;
      else if (eat('-')) negative = true;
      else return out;
    }
  }

  PolySymbol term() {
    PolySymbol out = power();
    while (true) {
      if (eat('*')) {
        out = out * power();
      } else if (eat('/')) {
        const PolySymbol d = power();
        const Monomial unit(n_);
        if (d.size() != 1 || d.terms().begin()->first != unit) fail("division by a non-constant");
        out = out * (GaussianRational(1) / d.coefficient(unit));
      } else {
        skip();
        // Implicit product such as "2x1" or "i h".
        if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '('))
          out = out * power();
        else
          return out;
      }
    }
  }

  PolySymbol power() {
    PolySymbol base = primary();
    if (eat('^')) {
      skip();
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("exponent must be a non-negative integer");
      base = pow(base, std::stoi(s_.substr(start, pos_ - start)));
    }
    return base;
  }

  std::size_t index() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("variable needs an index");
    const std::size_t k = std::stoul(s_.substr(start, pos_ - start));
    if (k < 1 || k > n_) fail("variable index out of range 1.." + std::to_string(n_));
    return k - 1;
  }

  PolySymbol primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      PolySymbol inner = expr();
      if (!eat(')')) fail("missing ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      const std::string lit = s_.substr(start, pos_ - start);
      const std::size_t dot = lit.find('.');
      mpq_class v;
      if (dot == std::string::npos) {
        v = mpq_class(mpz_class(lit, 10));
      } else {
        const std::string digits = lit.substr(0, dot) + lit.substr(dot + 1);
        if (digits.empty() || digits.find('.') != std::string::npos) fail("malformed number");
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, lit.size() - dot - 1);
        v = mpq_class(mpz_class(digits, 10), den);
        v.canonicalize();
      }
      return PolySymbol::constant(n_, GaussianRational(v));
    }
    auto starts = [&](const char* w) { return s_.compare(pos_, std::strlen(w), w) == 0; };
    if (starts("hbar")) {
      pos_ += 4;
      return PolySymbol::hbar(n_);
    }
    if (starts("xi")) {
      pos_ += 2;
      return PolySymbol::xi(n_, index());
    }
    ++pos_;
    switch (c) {
      case 'x':
        return PolySymbol::x(n_, index());
      case 'p':
        return PolySymbol::xi(n_, index());
      case 'h':
        return PolySymbol::hbar(n_);
      case 'i':
        return PolySymbol::constant(n_, GaussianRational::i());
      default:
        --pos_;
        fail("unknown symbol");
    }
  }

  std::string s_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

void reject_unknown(const ojson& obj, const std::set<std::string>& allowed, const std::string& prefix) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw ConfigError(prefix + key, "unknown key");
}

template <class T>
T get(const ojson& obj, const std::string& key, const std::string& field, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(field, "has the wrong type");
  }
}

double positive(double v, const std::string& field) {
  if (!(v > 0.0)) throw ConfigError(field, "must be positive");
  return v;
}

int positive(int v, const std::string& field) {
  if (v <= 0) throw ConfigError(field, "must be positive");
  return v;
}

std::vector<double> positive_list(const std::vector<double>& v, const std::string& field) {
  if (v.empty()) throw ConfigError(field, "must not be empty");
  for (double x : v) positive(x, field);
  return v;
}

PolySymbol literal(const ojson& value, std::size_t n, const std::string& field) {
  try {
    if (value.is_string()) return parse_polynomial(value.get<std::string>(), n);
    return symbol_from_json(nlohmann::json::parse(value.dump()), n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::vector<std::vector<std::string>> default_fields(std::size_t n) {
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      std::vector<std::string> f(n, "0");
      f[i] = "-x" + std::to_string(j + 1);
      f[j] = "x" + std::to_string(i + 1);
      out.push_back(f);
    }
  return out;
}

std::vector<GaussSpec> default_test_functions(std::size_t n) {
  const std::string last = "x" + std::to_string(n);
  return {{"1", 0.5},
          {"(1 - 0.3i)*x1", 0.6},
          {"0.5*x1^2*x2 + i", 0.8},
          {"-0.7*" + last + "^2 + (0.2 + 0.2i)*x1", 0.55},
          {"0.4*x1 - 0.6i*x1^2*x2 + 1.1*" + last + "^2", 1.0}};
}

const std::set<std::string>& check_names() {
  static const std::set<std::string> names = {
      "identities.star_expansion", "identities.laplacian_commutes", "identities.quadratic_exactness",
      "identities.table_rows",     "identities.associativity",      "identities.jacobi",
      "coarea.gaussian",           "coarea.refinement",             "coarea.metric_density",
      "unitarity.norms",           "unitarity.intertwining",        "commutation.strong",
      "commutation.divergence",    "commutation.radial_exact",      "evolve.expm",
      "evolve.period",             "kernel.symmetry",               "kernel.separable",
      "sweep.decreasing"};
  return names;
}

}  // namespace

PolySymbol parse_polynomial(const std::string& text, std::size_t n) { return PolyParser(text, n).parse(); }

double SuiteConfig::tolerance_for(const std::string& check) const {
  const auto it = tolerances.find(check);
  return it == tolerances.end() ? tolerance : it->second;
}

SuiteConfig parse_config_text(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    throw ConfigError("", "JSON parse error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                              e.what());
  }
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  reject_unknown(j,
                 {"n", "hamiltonian", "space", "lambda_range", "lambda_nodes", "fiber_nodes", "spacing", "hbar", "fields",
                  "test_functions", "tolerance", "tolerances", "seed", "random_trials", "field_trials", "evolve", "sweep",
                  "checks", "output"},
                 "");

  SuiteConfig c;
  if (!j.contains("n")) throw ConfigError("n", "is required");
  if (!j.contains("hamiltonian")) throw ConfigError("hamiltonian", "is required");
  const int n = get<int>(j, "n", "n", 2);
  if (n < 2 || n > 3) throw ConfigError("n", "must be 2 or 3");
  c.n = static_cast<std::size_t>(n);

  c.hamiltonian = literal(j.at("hamiltonian"), c.n, "hamiltonian");
  c.hamiltonian_literal = j.at("hamiltonian").is_string() ? j.at("hamiltonian").get<std::string>() : j.at("hamiltonian").dump();
  if (!c.hamiltonian.is_xi_free() || !c.hamiltonian.is_hbar_free() || !c.hamiltonian.is_real())
    throw ConfigError("hamiltonian", "must be a real polynomial in x1..xn");
  if (c.hamiltonian.degree() > 2) throw ConfigError("hamiltonian", "degree above two is not supported");

  const std::string space = get<std::string>(j, "space", "space", "position");
  if (space != "position" && space != "momentum") throw ConfigError("space", "must be 'position' or 'momentum'");
  c.momentum_space = space == "momentum";

  if (j.contains("lambda_range")) {
    const auto r = get<std::vector<double>>(j, "lambda_range", "lambda_range", {});
    if (r.size() != 2) throw ConfigError("lambda_range", "must be [min, max]");
    c.grid.lambda_min = r[0];
    c.grid.lambda_max = r[1];
  }
  if (!(c.grid.lambda_min < c.grid.lambda_max)) throw ConfigError("lambda_range", "is empty");
  c.grid.lambda_nodes = positive(get<int>(j, "lambda_nodes", "lambda_nodes", c.grid.lambda_nodes), "lambda_nodes");
  c.grid.fiber_nodes = positive(get<int>(j, "fiber_nodes", "fiber_nodes", c.grid.fiber_nodes), "fiber_nodes");
  const std::string spacing = get<std::string>(j, "spacing", "spacing", "gauss_legendre");
  if (spacing == "gauss_legendre") c.grid.spacing = LambdaSpacing::gauss_legendre;
  else if (spacing == "sqrt") c.grid.spacing = LambdaSpacing::sqrt;
  else if (spacing == "uniform") c.grid.spacing = LambdaSpacing::uniform;
  else throw ConfigError("spacing", "must be gauss_legendre, sqrt or uniform");

  const ScalarHamiltonian phi(c.hamiltonian);
  for (double v : critical_values(phi))
    if (v >= c.grid.lambda_min && v <= c.grid.lambda_max)
      throw ConfigError("lambda_range", "contains the critical value " + std::to_string(v) + " (singular level)");

  c.hbar = positive_list(get<std::vector<double>>(j, "hbar", "hbar", c.hbar), "hbar");

  c.field_literals = default_fields(c.n);
  if (j.contains("fields")) {
    c.field_literals = get<std::vector<std::vector<std::string>>>(j, "fields", "fields", {});
  }
  for (std::size_t k = 0; k < c.field_literals.size(); ++k) {
    const std::string field = "fields[" + std::to_string(k) + "]";
    if (c.field_literals[k].size() != c.n) throw ConfigError(field, "needs " + std::to_string(c.n) + " components");
    std::vector<PolySymbol> comps;
    for (const auto& s : c.field_literals[k]) comps.push_back(literal(ojson(s), c.n, field));
    for (const auto& p : comps)
      if (!p.is_xi_free() || !p.is_hbar_free() || !p.is_real()) throw ConfigError(field, "components must be real polynomials in x");
    c.fields.emplace_back(comps);
  }

  c.test_function_specs = default_test_functions(c.n);
  if (j.contains("test_functions")) {
    const auto& list = j.at("test_functions");
    if (!list.is_array()) throw ConfigError("test_functions", "must be an array");
    c.test_function_specs.clear();
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string field = "test_functions[" + std::to_string(k) + "]";
      if (!list[k].is_object()) throw ConfigError(field, "must be an object");
      reject_unknown(list[k], {"poly", "exponent"}, field + ".");
      GaussSpec g;
      g.poly = get<std::string>(list[k], "poly", field + ".poly", "1");
      g.exponent = positive(get<double>(list[k], "exponent", field + ".exponent", 0.5), field + ".exponent");
      c.test_function_specs.push_back(g);
    }
  }
  for (std::size_t k = 0; k < c.test_function_specs.size(); ++k) {
    const std::string field = "test_functions[" + std::to_string(k) + "]";
    const PolySymbol p = literal(ojson(c.test_function_specs[k].poly), c.n, field + ".poly");
    if (!p.is_xi_free() || !p.is_hbar_free()) throw ConfigError(field + ".poly", "must be a polynomial in x");
    c.test_functions.push_back(GaussPoly::from_symbol(p, c.test_function_specs[k].exponent));
  }

  c.tolerance = positive(get<double>(j, "tolerance", "tolerance", c.tolerance), "tolerance");
  c.tolerances = {{"coarea.gaussian", 1e-8}, {"commutation.divergence", 1e-5}, {"evolve.period", 1e-8}};
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    if (!t.is_object()) throw ConfigError("tolerances", "must be an object");
    for (const auto& [key, value] : t.items()) {
      if (!check_names().count(key)) throw ConfigError("tolerances." + key, "unknown check");
      if (!value.is_number()) throw ConfigError("tolerances." + key, "must be a number");
      c.tolerances[key] = positive(value.get<double>(), "tolerances." + key);
    }
  }
  c.seed = get<std::uint64_t>(j, "seed", "seed", c.seed);
  c.random_trials = positive(get<int>(j, "random_trials", "random_trials", c.random_trials), "random_trials");
  c.field_trials = positive(get<int>(j, "field_trials", "field_trials", c.field_trials), "field_trials");

  if (j.contains("evolve")) {
    const auto& e = j.at("evolve");
    if (!e.is_object()) throw ConfigError("evolve", "must be an object");
    reject_unknown(e, {"nodes", "steps", "times", "field"}, "evolve.");
    c.evolve_nodes = positive(get<int>(e, "nodes", "evolve.nodes", c.evolve_nodes), "evolve.nodes");
    c.evolve_steps = positive(get<int>(e, "steps", "evolve.steps", c.evolve_steps), "evolve.steps");
    c.evolve_times = positive_list(get<std::vector<double>>(e, "times", "evolve.times", c.evolve_times), "evolve.times");
    c.evolve_field = get<std::vector<std::string>>(e, "field", "evolve.field", c.evolve_field);
  }
  if (c.evolve_field.size() != 2) throw ConfigError("evolve.field", "needs two components");
  for (const auto& s : c.evolve_field) literal(ojson(s), 2, "evolve.field");

  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    if (!s.is_object()) throw ConfigError("sweep", "must be an object");
    reject_unknown(s, {"nodes", "hbar"}, "sweep.");
    c.sweep_nodes = positive(get<int>(s, "nodes", "sweep.nodes", c.sweep_nodes), "sweep.nodes");
    c.sweep_hbar = positive_list(get<std::vector<double>>(s, "hbar", "sweep.hbar", c.sweep_hbar), "sweep.hbar");
  }
  for (std::size_t k = 1; k < c.sweep_hbar.size(); ++k)
    if (!(c.sweep_hbar[k] < c.sweep_hbar[k - 1])) throw ConfigError("sweep.hbar", "must be strictly decreasing");

  if (j.contains("checks")) {
    const auto list = get<std::vector<std::string>>(j, "checks", "checks", {});
    for (const auto& name : list)
      if (!check_names().count(name)) throw ConfigError("checks", "unknown check '" + name + "'");
    c.checks = list;
  }

  if (j.contains("output")) {
    const auto& o = j.at("output");
    if (!o.is_object()) throw ConfigError("output", "must be an object");
    reject_unknown(o, {"dir", "formats"}, "output.");
    c.out_dir = get<std::string>(o, "dir", "output.dir", c.out_dir);
    c.formats = get<std::vector<std::string>>(o, "formats", "output.formats", c.formats);
  }
  for (const auto& f : c.formats)
    if (f != "json" && f != "csv") throw ConfigError("output.formats", "unknown format '" + f + "'");

  ojson norm;
  norm["n"] = c.n;
  norm["hamiltonian"] = c.hamiltonian.to_string();
  norm["space"] = space;
  norm["lambda_range"] = {c.grid.lambda_min, c.grid.lambda_max};
  norm["lambda_nodes"] = c.grid.lambda_nodes;
  norm["fiber_nodes"] = c.grid.fiber_nodes;
  norm["spacing"] = spacing;
  norm["hbar"] = c.hbar;
  norm["fields"] = c.field_literals;
  ojson tf = ojson::array();
  for (const auto& g : c.test_function_specs) tf.push_back({{"poly", g.poly}, {"exponent", g.exponent}});
  norm["test_functions"] = tf;
  norm["tolerance"] = c.tolerance;
  norm["tolerances"] = ojson(c.tolerances);
  norm["seed"] = c.seed;
  norm["random_trials"] = c.random_trials;
  norm["field_trials"] = c.field_trials;
  norm["evolve"] = {{"nodes", c.evolve_nodes}, {"steps", c.evolve_steps}, {"times", c.evolve_times}, {"field", c.evolve_field}};
  norm["sweep"] = {{"nodes", c.sweep_nodes}, {"hbar", c.sweep_hbar}};
  if (c.checks) norm["checks"] = *c.checks;
  c.normalized = norm;
  return c;
}

SuiteConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace dwc
