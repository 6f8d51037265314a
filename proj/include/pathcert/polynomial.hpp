#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pathcert {

// Identifier of a scalar indeterminate. Id 0 is reserved for the plan
// parameter t; kinematic chains hand out configuration variables from 1.
using VarId = int;
inline constexpr VarId kTimeVar = 0;

/// Customization point for lifting double-typed model data (axes, vertices,
/// plan coefficients) into the working scalar. Exact scalar types specialize
/// this to a value-preserving conversion.
template <class S>
S scalar_from_double(double x) {
  return static_cast<S>(x);
}

/// A power product of indeterminates, stored sparsely: exponents are sorted
/// by variable id and strictly positive (the empty product is 1).
class Monomial {
 public:
  Monomial() = default;

  explicit Monomial(std::vector<std::pair<VarId, int>> exponents) {
    std::sort(exponents.begin(), exponents.end());
    for (const auto& [id, e] : exponents) {
      if (e < 0) throw std::invalid_argument("Monomial: negative exponent");
      if (e == 0) continue;
      if (!exps_.empty() && exps_.back().first == id)
        throw std::invalid_argument("Monomial: duplicate variable id");
      exps_.emplace_back(id, e);
    }
  }

  static Monomial one() { return Monomial(); }

  static Monomial var(VarId id, int exponent = 1) {
    return Monomial({{id, exponent}});
  }

  int total_degree() const {
    int d = 0;
    for (const auto& [id, e] : exps_) d += e;
    return d;
  }

  int degree_in(VarId id) const {
    for (const auto& [v, e] : exps_)
      if (v == id) return e;
    return 0;
  }

  bool is_one() const { return exps_.empty(); }

  const std::vector<std::pair<VarId, int>>& exponents() const { return exps_; }

  void collect_vars(std::set<VarId>& out) const {
    for (const auto& [id, e] : exps_) out.insert(id);
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial out;
    auto ia = a.exps_.begin(), ib = b.exps_.begin();
    while (ia != a.exps_.end() || ib != b.exps_.end()) {
      if (ib == b.exps_.end() || (ia != a.exps_.end() && ia->first < ib->first)) {
        out.exps_.push_back(*ia++);
      } else if (ia == a.exps_.end() || ib->first < ia->first) {
        out.exps_.push_back(*ib++);
      } else {
        out.exps_.emplace_back(ia->first, ia->second + ib->second);
        ++ia;
        ++ib;
      }
    }
    return out;
  }

  bool operator==(const Monomial& o) const { return exps_ == o.exps_; }
  bool operator!=(const Monomial& o) const { return !(*this == o); }

 private:
  std::vector<std::pair<VarId, int>> exps_;
};

/// Graded lexicographic order, the fixed term order of the library: lower
/// total degree first; within a degree class the monomial with the larger
/// exponent on the smallest differing variable comes first, so that for two
/// variables x, y (x with the smaller id) the ordering reads
///   1 < x < y < x^2 < x y < y^2 < ...
/// This is also the order in which dense monomial bases are emitted, which
/// keeps Gram-matrix indexing reproducible across runs.
struct GradedLexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    const int da = a.total_degree(), db = b.total_degree();
    if (da != db) return da < db;
    auto ia = a.exponents().begin(), ea = a.exponents().end();
    auto ib = b.exponents().begin(), eb = b.exponents().end();
    while (ia != ea || ib != eb) {
      VarId va = (ia != ea) ? ia->first : std::numeric_limits<int>::max();
      VarId vb = (ib != eb) ? ib->first : std::numeric_limits<int>::max();
      if (va < vb) return true;    // a has positive exponent where b has none
      if (vb < va) return false;
      if (ia->second != ib->second) return ia->second > ib->second;
      ++ia;
      ++ib;
    }
    return false;
  }
};

/// All monomials of total degree <= max_degree in the given variables,
/// ordered graded-lex with precedence given by position in `vars` (earlier
/// entries dominate). Length is C(m + d, d).
inline std::vector<Monomial> monomial_basis(const std::vector<VarId>& vars,
                                            int max_degree) {
  if (max_degree < 0) throw std::invalid_argument("monomial_basis: d < 0");
  std::vector<Monomial> out;
  std::vector<std::pair<VarId, int>> current;
  auto emit = [&](auto&& self, std::size_t pos, int remaining) -> void {
    if (pos == vars.size()) {
      if (remaining == 0) out.push_back(Monomial(current));
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      current.emplace_back(vars[pos], e);
      self(self, pos + 1, remaining - e);
      current.pop_back();
    }
  };
  for (int d = 0; d <= max_degree; ++d) emit(emit, 0, d);
  return out;
}

/// Sparse multivariate polynomial over a commutative scalar ring. Terms with
/// zero coefficient are never stored; iteration order is graded-lex.
template <class Scalar>
class Polynomial {
 public:
  using TermMap = std::map<Monomial, Scalar, GradedLexLess>;

  Polynomial() = default;

  static Polynomial constant(const Scalar& c) {
    Polynomial p;
    if (!(c == Scalar(0))) p.terms_.emplace(Monomial::one(), c);
    return p;
  }

  static Polynomial variable(VarId id) {
    Polynomial p;
    p.terms_.emplace(Monomial::var(id), Scalar(1));
    return p;
  }

  static Polynomial term(const Monomial& m, const Scalar& c) {
    Polynomial p;
    if (!(c == Scalar(0))) p.terms_.emplace(m, c);
    return p;
  }

  bool is_zero() const { return terms_.empty(); }

  /// Total degree; -1 for the zero polynomial.
  int degree() const {
    return terms_.empty() ? -1 : terms_.rbegin()->first.total_degree();
  }

  int degree_in(VarId id) const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree_in(id));
    return d;
  }

  std::set<VarId> vars() const {
    std::set<VarId> out;
    for (const auto& [m, c] : terms_) m.collect_vars(out);
    return out;
  }

  const TermMap& terms() const { return terms_; }

  Scalar coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  Polynomial operator-() const {
    Polynomial out(*this);
    for (auto& [m, c] : out.terms_) c = -c;
    return out;
  }

  Polynomial& operator+=(const Polynomial& rhs) {
    for (const auto& [m, c] : rhs.terms_) add_term(m, c);
    return *this;
  }

  Polynomial& operator-=(const Polynomial& rhs) {
    for (const auto& [m, c] : rhs.terms_) add_term(m, -c);
    return *this;
  }

  Polynomial& operator*=(const Scalar& s) {
    if (s == Scalar(0)) {
      terms_.clear();
    } else {
      for (auto& [m, c] : terms_) c = c * s;
    }
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial out;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
    return out;
  }

  friend Polynomial operator*(Polynomial p, const Scalar& s) { return p *= s; }
  friend Polynomial operator*(const Scalar& s, Polynomial p) { return p *= s; }

  bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  /// Evaluate with a callable VarId -> Scalar supplying every variable value.
  template <class PointFn>
  Scalar eval_with(PointFn&& value_of) const {
    Scalar acc(0);
    for (const auto& [m, c] : terms_) {
      Scalar t = c;
      for (const auto& [id, e] : m.exponents()) {
        const Scalar v = value_of(id);
        for (int k = 0; k < e; ++k) t = t * v;
      }
      acc = acc + t;
    }
    return acc;
  }

  Scalar eval(const std::map<VarId, Scalar>& point) const {
    return eval_with([&](VarId id) -> Scalar {
      auto it = point.find(id);
      if (it == point.end())
        throw std::invalid_argument("Polynomial::eval: unbound variable " +
                                    std::to_string(id));
      return it->second;
    });
  }

  /// Exact composition with polynomial bindings. Variables absent from
  /// `bindings` remain free. Rational bindings are out of contract and are
  /// unrepresentable here by construction.
  Polynomial substitute(const std::map<VarId, Polynomial>& bindings) const {
    Polynomial acc;
    for (const auto& [m, c] : terms_) {
      Polynomial term = Polynomial::constant(c);
      for (const auto& [id, e] : m.exponents()) {
        auto it = bindings.find(id);
        const Polynomial base =
            (it == bindings.end()) ? Polynomial::variable(id) : it->second;
        Polynomial p = pow_of(base, e);
        term = term * p;
      }
      acc += term;
    }
    return acc;
  }

 private:
  static Polynomial pow_of(const Polynomial& base, int e) {
    Polynomial out = Polynomial::constant(Scalar(1));
    for (int k = 0; k < e; ++k) out = out * base;
    return out;
  }

  void add_term(const Monomial& m, const Scalar& c) {
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second = it->second + c;
      if (it->second == Scalar(0)) terms_.erase(it);
    } else if (c == Scalar(0)) {
      terms_.erase(it);
    }
  }

  TermMap terms_;
};

template <class S>
Polynomial<S> pow(const Polynomial<S>& p, int e) {
  if (e < 0) throw std::invalid_argument("pow: negative exponent");
  Polynomial<S> out = Polynomial<S>::constant(S(1));
  for (int k = 0; k < e; ++k) out = out * p;
  return out;
}

/// Dense ascending-degree coefficient list of a univariate polynomial.
/// The zero polynomial yields {0}; any foreign variable is an error.
template <class S>
std::vector<S> univariate_coeff_vector(const Polynomial<S>& p, VarId var) {
  std::vector<S> out(static_cast<std::size_t>(std::max(p.degree(), 0)) + 1, S(0));
  for (const auto& [m, c] : p.terms()) {
    const int d = m.degree_in(var);
    if (d != m.total_degree())
      throw std::invalid_argument(
          "univariate_coeff_vector: polynomial is not univariate in the "
          "requested variable");
    out[static_cast<std::size_t>(d)] = c;
  }
  return out;
}

template <class S>
std::string to_string(const Polynomial<S>& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    if (!first) os << " + ";
    first = false;
    os << c;
    for (const auto& [id, e] : m.exponents()) {
      os << "*x" << id;
      if (e > 1) os << "^" << e;
    }
  }
  return os.str();
}

/// Quotient of polynomials with an explicitly tracked denominator-sign fact.
/// No GCD cancellation is performed; denominators stay as the products the
/// construction produced, and degrees track that unreduced representation.
template <class Scalar>
class RationalFunction {
 public:
  RationalFunction()
      : num_(), den_(Polynomial<Scalar>::constant(Scalar(1))), den_positive_(true) {}

  /// num / 1.
  explicit RationalFunction(Polynomial<Scalar> num)
      : num_(std::move(num)),
        den_(Polynomial<Scalar>::constant(Scalar(1))),
        den_positive_(true) {}

  RationalFunction(Polynomial<Scalar> num, Polynomial<Scalar> den,
                   bool denominator_positive)
      : num_(std::move(num)), den_(std::move(den)), den_positive_(denominator_positive) {
    if (den_.is_zero())
      throw std::invalid_argument("RationalFunction: zero denominator");
  }

  const Polynomial<Scalar>& num() const { return num_; }
  const Polynomial<Scalar>& den() const { return den_; }
  bool denominator_positive() const { return den_positive_; }
  bool is_zero() const { return num_.is_zero(); }

  friend RationalFunction operator+(const RationalFunction& a,
                                    const RationalFunction& b) {
    return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_,
                            a.den_positive_ && b.den_positive_);
  }

  friend RationalFunction operator-(const RationalFunction& a,
                                    const RationalFunction& b) {
    return RationalFunction(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_,
                            a.den_positive_ && b.den_positive_);
  }

  friend RationalFunction operator*(const RationalFunction& a,
                                    const RationalFunction& b) {
    return RationalFunction(a.num_ * b.num_, a.den_ * b.den_,
                            a.den_positive_ && b.den_positive_);
  }

  friend RationalFunction operator*(const RationalFunction& a, const Scalar& s) {
    return RationalFunction(a.num_ * s, a.den_, a.den_positive_);
  }

  Scalar eval(const std::map<VarId, Scalar>& point) const {
    const Scalar d = den_.eval(point);
    if (d == Scalar(0))
      throw std::domain_error("RationalFunction::eval: denominator vanishes");
    return num_.eval(point) / d;
  }

  RationalFunction substitute(
      const std::map<VarId, Polynomial<Scalar>>& bindings) const {
    // Positivity of the denominator is universal (valid at all real points),
    // so it survives composition with real polynomial bindings.
    return RationalFunction(num_.substitute(bindings), den_.substitute(bindings),
                            den_positive_);
  }

 private:
  Polynomial<Scalar> num_;
  Polynomial<Scalar> den_;
  bool den_positive_;
};

/// Dense matrix with polynomial entries. When constructed symmetric, writes
/// are mirrored so entry(i,j) == entry(j,i) holds coefficient-wise.
template <class Scalar>
class PolyMatrix {
 public:
  PolyMatrix(int rows, int cols, bool symmetric = false)
      : rows_(rows), cols_(cols), symmetric_(symmetric),
        entries_(static_cast<std::size_t>(rows) * cols) {
    if (rows < 0 || cols < 0 || (symmetric && rows != cols))
      throw std::invalid_argument("PolyMatrix: bad shape");
  }

  static PolyMatrix identity(int n) {
    PolyMatrix m(n, n, true);
    for (int i = 0; i < n; ++i)
      m.set_entry(i, i, Polynomial<Scalar>::constant(Scalar(1)));
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool is_symmetric() const { return symmetric_; }

  const Polynomial<Scalar>& entry(int i, int j) const { return entries_[idx(i, j)]; }

  void set_entry(int i, int j, Polynomial<Scalar> p) {
    entries_[idx(i, j)] = p;
    if (symmetric_ && i != j) entries_[idx(j, i)] = std::move(p);
  }

  int degree() const {
    int d = -1;
    for (const auto& e : entries_) d = std::max(d, e.degree());
    return d;
  }

  PolyMatrix transpose() const {
    PolyMatrix out(cols_, rows_, symmetric_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out.entries_[out.idx(j, i)] = entry(i, j);
    return out;
  }

  friend PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("PolyMatrix: shape mismatch");
    PolyMatrix out(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int j = 0; j < b.cols_; ++j) {
        Polynomial<Scalar> acc;
        for (int k = 0; k < a.cols_; ++k) acc += a.entry(i, k) * b.entry(k, j);
        out.entries_[out.idx(i, j)] = std::move(acc);
      }
    return out;
  }

  friend PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
      throw std::invalid_argument("PolyMatrix: shape mismatch");
    PolyMatrix out(a.rows_, a.cols_, a.symmetric_ && b.symmetric_);
    for (std::size_t k = 0; k < a.entries_.size(); ++k)
      out.entries_[k] = a.entries_[k] + b.entries_[k];
    return out;
  }

  friend PolyMatrix operator*(const PolyMatrix& a, const Polynomial<Scalar>& p) {
    PolyMatrix out(a.rows_, a.cols_, a.symmetric_);
    for (std::size_t k = 0; k < a.entries_.size(); ++k)
      out.entries_[k] = a.entries_[k] * p;
    return out;
  }

 private:
  std::size_t idx(int i, int j) const {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
      throw std::out_of_range("PolyMatrix: index");
    return static_cast<std::size_t>(i) * cols_ + j;
  }

  int rows_, cols_;
  bool symmetric_;
  std::vector<Polynomial<Scalar>> entries_;
};

}  // namespace pathcert
