#include "pathcert/soscert.hpp"

#include <algorithm>

namespace pathcert {

IntervalDecompTemplate decomposition_template(int n) {
  if (n < 0)
    throw std::invalid_argument("decomposition_template: negative degree");
  IntervalDecompTemplate tpl;
  tpl.n = n;
  tpl.even = n % 2 == 0;
  if (tpl.even) {
    tpl.deg_lambda = n;
    tpl.deg_nu = n - 2;  // -2 for n == 0: no nu term at all
  } else {
    tpl.deg_lambda = n - 1;
    tpl.deg_nu = n - 1;
  }
  return tpl;
}

namespace {

// Univariate-in-t coefficients of every part of an affine expression, checked
// against the template degree.  Index 0 holds the constant part's coeffs.
struct AffineCoeffs {
  std::vector<double> constant;
  std::vector<std::pair<int, std::vector<double>>> lin;
};

AffineCoeffs coefficients(const AffinePoly<double>& c,
                          const IntervalDecompTemplate& tpl,
                          const char* where) {
  if (c.degree() > tpl.n)
    throw std::invalid_argument(std::string(where) +
                                ": constraint degree exceeds the template");
  AffineCoeffs out;
  out.constant = univariate_coeff_vector(c.constant, kTimeVar);
  for (const auto& [id, p] : c.lin)
    out.lin.emplace_back(id, univariate_coeff_vector(p, kTimeVar));
  return out;
}

double coeff_at(const std::vector<double>& v, int k) {
  return k >= 0 && k < static_cast<int>(v.size()) ? v[k] : 0.0;
}

// Scatter w * [t]'Q[t] (for the y-blocked basis when y_dim > 0) into the
// per-(row-key) equality rows.  `row_of` maps (t-power, y-pair rank) to a row
// index; the SDPA entry convention supplies the off-diagonal factor 2.
template <class RowOf>
void scatter_gram(std::vector<SdpProblem::Row>& rows, RowOf&& row_of,
                  int block, int basis, int y_dim,
                  const std::vector<double>& weight) {
  const int m = std::max(1, y_dim);
  const int dim = basis * m;  // flat basis index = t_power * m + y_index
  for (int p = 0; p < dim; ++p)
    for (int q = p; q < dim; ++q) {
      const int tp = p / m + q / m;
      const int yj = std::min(p % m, q % m);
      const int yj2 = std::max(p % m, q % m);
      for (int w = 0; w < static_cast<int>(weight.size()); ++w) {
        if (weight[w] == 0.0) continue;
        const int row = row_of(tp + w, yj * m + yj2 - yj * (yj + 1) / 2);
        rows[row].terms.push_back(
            SdpProblem::psd_entry(block, p, q, -weight[w]));
      }
    }
}

}  // namespace

LoweredConstraint lower_scalar_constraint(SdpProblem& sdp,
                                          const AffinePoly<double>& c,
                                          const IntervalDecompTemplate& tpl,
                                          double gamma_floor,
                                          std::string label) {
  const AffineCoeffs co = coefficients(c, tpl, "lower_scalar_constraint");

  LoweredConstraint lc;
  lc.label = std::move(label);
  lc.tpl = tpl;
  lc.gamma_floor = gamma_floor;
  lc.gram_lambda = sdp.add_psd_block(tpl.lambda_basis());
  if (tpl.has_nu()) lc.gram_nu = sdp.add_psd_block(tpl.nu_basis());
  lc.slack_index = sdp.add_nonneg();
  lc.first_row = static_cast<int>(sdp.rows.size());
  lc.row_count = tpl.n + 1;

  std::vector<SdpProblem::Row> rows(static_cast<std::size_t>(tpl.n + 1));
  for (int k = 0; k <= tpl.n; ++k)
    rows[k].rhs = -coeff_at(co.constant, k) + (k == 0 ? gamma_floor : 0.0);
  for (const auto& [id, coeffs] : co.lin) {
    if (id < 0 || id >= sdp.free_size)
      throw std::invalid_argument(
          "lower_scalar_constraint: unknown id outside the free block");
    for (int k = 0; k <= tpl.n; ++k)
      if (coeff_at(coeffs, k) != 0.0)
        rows[k].terms.push_back(
            SdpProblem::free_entry(id, coeff_at(coeffs, k)));
  }
  auto row_of = [&](int k, int) -> int { return k; };
  scatter_gram(rows, row_of, lc.gram_lambda, tpl.lambda_basis(), 0,
               univariate_coeff_vector(lambda_weight<double>(tpl), kTimeVar));
  if (tpl.has_nu())
    scatter_gram(rows, row_of, lc.gram_nu, tpl.nu_basis(), 0,
                 univariate_coeff_vector(nu_weight<double>(tpl), kTimeVar));
  rows[0].terms.push_back(SdpProblem::nonneg_entry(lc.slack_index, -1.0));

  for (auto& r : rows) sdp.rows.push_back(std::move(r));
  return lc;
}

LoweredConstraint lower_matrix_constraint(SdpProblem& sdp,
                                          const AffineMatrix<double>& m,
                                          const IntervalDecompTemplate& tpl,
                                          double gamma_floor,
                                          std::string label) {
  const int y = m.n;
  if (y <= 0)
    throw std::invalid_argument("lower_matrix_constraint: empty matrix");
  for (int i = 0; i < y; ++i)
    for (int j = i + 1; j < y; ++j) {
      const AffinePoly<double> diff = m.at(i, j) - m.at(j, i);
      if (diff.degree() >= 0)
        throw std::invalid_argument("lower_matrix_constraint: asymmetric");
    }

  LoweredConstraint lc;
  lc.label = std::move(label);
  lc.tpl = tpl;
  lc.y_dim = y;
  lc.gamma_floor = gamma_floor;
  lc.gram_lambda = sdp.add_psd_block(tpl.lambda_basis() * y);
  if (tpl.has_nu()) lc.gram_nu = sdp.add_psd_block(tpl.nu_basis() * y);
  lc.slack_index = sdp.add_nonneg();
  lc.first_row = static_cast<int>(sdp.rows.size());
  const int pairs = y * (y + 1) / 2;
  lc.row_count = (tpl.n + 1) * pairs;

  // Row layout: all t-powers of y-pair (0,0), then (0,1), ... (SDPA-style
  // pair rank). row_of matches scatter_gram's rank formula.
  std::vector<SdpProblem::Row> rows(static_cast<std::size_t>(lc.row_count));
  auto row_of = [&](int k, int pair_rank) -> int {
    return pair_rank * (tpl.n + 1) + k;
  };

  for (int i = 0; i < y; ++i)
    for (int j = i; j < y; ++j) {
      const int rank = i * y + j - i * (i + 1) / 2;
      // y'My picks up M_ij twice off the diagonal.
      const double mult = i == j ? 1.0 : 2.0;
      const AffineCoeffs co =
          coefficients(m.at(i, j), tpl, "lower_matrix_constraint");
      for (int k = 0; k <= tpl.n; ++k) {
        auto& row = rows[row_of(k, rank)];
        row.rhs = -mult * coeff_at(co.constant, k);
        if (k == 0 && i == j) row.rhs += gamma_floor;
      }
      for (const auto& [id, coeffs] : co.lin) {
        if (id < 0 || id >= sdp.free_size)
          throw std::invalid_argument(
              "lower_matrix_constraint: unknown id outside the free block");
        for (int k = 0; k <= tpl.n; ++k)
          if (coeff_at(coeffs, k) != 0.0)
            rows[row_of(k, rank)].terms.push_back(
                SdpProblem::free_entry(id, mult * coeff_at(coeffs, k)));
      }
      if (i == j)
        rows[row_of(0, rank)].terms.push_back(
            SdpProblem::nonneg_entry(lc.slack_index, -1.0));
    }

  scatter_gram(rows, row_of, lc.gram_lambda, tpl.lambda_basis(), y,
               univariate_coeff_vector(lambda_weight<double>(tpl), kTimeVar));
  if (tpl.has_nu())
    scatter_gram(rows, row_of, lc.gram_nu, tpl.nu_basis(), y,
                 univariate_coeff_vector(nu_weight<double>(tpl), kTimeVar));

  for (auto& r : rows) sdp.rows.push_back(std::move(r));
  return lc;
}

PairProgram assemble_pair_program(const KinematicChain& chain,
                                  const ConvexBody& body_a,
                                  const ConvexBody& body_b,
                                  const PlanSegment& segment, int segment_index,
                                  int hyperplane_degree, double gamma_min) {
  if (hyperplane_degree < 0)
    throw std::invalid_argument(
        "assemble_pair_program: negative hyperplane degree");
  if (!(gamma_min > 0.0))
    throw std::invalid_argument("assemble_pair_program: gamma_min must be > 0");

  PairProgram prog;
  prog.body_a = body_a.name;
  prog.body_b = body_b.name;
  prog.segment_index = segment_index;
  prog.hp.degree = hyperplane_degree;
  prog.gamma_min = gamma_min;
  for (int i = 0; i < prog.hp.coeff_count(); ++i) prog.sdp.add_free();

  const auto constraints =
      build_pair_constraints<double>(chain, body_a, body_b, segment, prog.hp);
  for (const auto& pc : constraints) {
    if (pc.is_matrix) {
      const auto tpl = decomposition_template(std::max(0, pc.matrix.degree()));
      prog.constraints.push_back(lower_matrix_constraint(
          prog.sdp, pc.matrix, tpl, gamma_min, pc.label));
    } else {
      const auto tpl = decomposition_template(std::max(0, pc.scalar.degree()));
      prog.constraints.push_back(lower_scalar_constraint(
          prog.sdp, pc.scalar, tpl, gamma_min, pc.label));
    }
  }
  prog.sdp.validate();
  return prog;
}

Polynomial<double> Certificate::a_poly(int w) const {
  Polynomial<double> p;
  for (int k = 0; k < a_coeffs.cols(); ++k)
    p += Polynomial<double>::term(Monomial::var(kTimeVar, k), a_coeffs(w, k));
  return p;
}

Polynomial<double> Certificate::b_poly() const {
  Polynomial<double> p;
  for (int k = 0; k < b_coeffs.size(); ++k)
    p += Polynomial<double>::term(Monomial::var(kTimeVar, k), b_coeffs(k));
  return p;
}

std::vector<double> Certificate::hyperplane_values() const {
  std::vector<double> v;
  for (int w = 0; w < 3; ++w)
    for (int k = 0; k < a_coeffs.cols(); ++k) v.push_back(a_coeffs(w, k));
  for (int k = 0; k < b_coeffs.size(); ++k) v.push_back(b_coeffs(k));
  return v;
}

Certificate extract_certificate(const PairProgram& prog,
                                const BlockValues& solution) {
  Certificate cert;
  cert.body_a = prog.body_a;
  cert.body_b = prog.body_b;
  cert.segment_index = prog.segment_index;
  cert.hyperplane_degree = prog.hp.degree;
  const int nc = prog.hp.degree + 1;
  if (solution.free_vars.size() < 4 * nc)
    throw std::invalid_argument("extract_certificate: solution too small");
  cert.a_coeffs.resize(3, nc);
  for (int w = 0; w < 3; ++w)
    for (int k = 0; k < nc; ++k)
      cert.a_coeffs(w, k) = solution.free_vars(prog.hp.a_index(w, k));
  cert.b_coeffs.resize(nc);
  for (int k = 0; k < nc; ++k)
    cert.b_coeffs(k) = solution.free_vars(prog.hp.b_index(k));

  for (const auto& lc : prog.constraints) {
    CertificateConstraint cc;
    cc.label = lc.label;
    cc.is_matrix = lc.y_dim > 0;
    cc.target_degree = lc.tpl.n;
    cc.gram_lambda = solution.psd.at(lc.gram_lambda);
    if (lc.gram_nu >= 0) cc.gram_nu = solution.psd.at(lc.gram_nu);
    cc.gamma = lc.gamma_floor + solution.nonneg(lc.slack_index);
    cert.constraints.push_back(std::move(cc));
  }
  return cert;
}

}  // namespace pathcert
