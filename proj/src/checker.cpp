#include "pathcert/checker.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <stdexcept>
#include <thread>
#include <type_traits>

#include "pathcert/scalars.hpp"

namespace pathcert {
namespace {

template <class S>
using DenseMat = std::vector<std::vector<S>>;

template <class S>
S coeff_l1(const Polynomial<S>& p) {
  S out(0);
  for (const auto& [m, c] : p.terms()) out += c < S(0) ? S(-c) : c;
  return out;
}

// lambda(t) = [t]'Q[t] with basis (1, t, t^2, ...); both triangle halves are
// walked so off-diagonal doubling needs no special case.
template <class S>
Polynomial<S> gram_univariate(const DenseMat<S>& q) {
  Polynomial<S> out;
  const int n = static_cast<int>(q.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out += Polynomial<S>::term(Monomial::var(kTimeVar, i + j), q[i][j]);
  return out;
}

// Entries of the polynomial matrix M(t) with y'M(t)y = [ty]'Q[ty] in the
// scalarization basis t^i y_j (t-major, flat index i*m + j).
template <class S>
std::vector<std::vector<Polynomial<S>>> gram_matrix_entries(
    const DenseMat<S>& q, int m) {
  const int dim = static_cast<int>(q.size());
  std::vector<std::vector<Polynomial<S>>> out(
      m, std::vector<Polynomial<S>>(static_cast<std::size_t>(m)));
  for (int p = 0; p < dim; ++p)
    for (int r = 0; r < dim; ++r)
      out[p % m][r % m] += Polynomial<S>::term(
          Monomial::var(kTimeVar, p / m + r / m), q[p][r]);
  return out;
}

struct FloatPrep {
  bool psd_ok = false;
  double min_eig = 0.0;
  Eigen::MatrixXd clamped;
};

// Symmetrize, test the spectrum against the tolerance, and project onto the
// PSD cone by clamping negative eigenvalues at zero.
FloatPrep prep_gram_float(const Eigen::MatrixXd& g, double eps_psd) {
  FloatPrep out;
  if (g.size() == 0) {
    out.psd_ok = true;
    return out;
  }
  const Eigen::MatrixXd sym = 0.5 * (g + g.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) return out;
  out.min_eig = es.eigenvalues().minCoeff();
  if (out.min_eig < -eps_psd) return out;
  out.psd_ok = true;
  out.clamped = es.eigenvectors() *
                es.eigenvalues().cwiseMax(0.0).asDiagonal() *
                es.eigenvectors().transpose();
  return out;
}

DenseMat<double> to_dense(const Eigen::MatrixXd& g) {
  DenseMat<double> m(static_cast<std::size_t>(g.rows()),
                     std::vector<double>(static_cast<std::size_t>(g.cols())));
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) m[i][j] = g(i, j);
  return m;
}

// Exact PSD decision by symmetric elimination with the largest remaining
// diagonal entry as pivot.  A zero maximum forces the rest of the block to
// vanish; otherwise the Schur complement step preserves semidefiniteness.
bool rational_psd(DenseMat<Rational> a) {
  const int n = static_cast<int>(a.size());
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (a[i][i] > a[p][p]) p = i;
    if (a[p][p] < 0) return false;
    if (a[p][p] == 0) {
      for (int i = k; i < n; ++i)
        for (int j = k; j < n; ++j)
          if (!(a[i][j] == 0)) return false;
      return true;
    }
    if (p != k) {
      std::swap(a[p], a[k]);
      for (int i = 0; i < n; ++i) std::swap(a[i][p], a[i][k]);
    }
    const Rational piv = a[k][k];
    for (int i = k + 1; i < n; ++i) {
      const Rational f = a[i][k] / piv;
      for (int j = k + 1; j < n; ++j) a[i][j] -= f * a[k][j];
    }
  }
  return true;
}

struct ExactPrep {
  bool psd_ok = false;
  DenseMat<Rational> shifted;  // the matrix the residual is computed against
};

// Exact symmetrization; when the raw Gram narrowly misses the cone a diagonal
// ridge is added and kept, so the ridge shows up in the residual instead of
// being forgiven.
ExactPrep prep_gram_exact(const Eigen::MatrixXd& g) {
  ExactPrep out;
  const int n = static_cast<int>(g.rows());
  DenseMat<Rational> m(static_cast<std::size_t>(n),
                       std::vector<Rational>(static_cast<std::size_t>(n)));
  Rational maxabs(0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      m[i][j] = (to_rational(g(i, j)) + to_rational(g(j, i))) / 2;
      const Rational a = m[i][j] < 0 ? Rational(-m[i][j]) : m[i][j];
      if (a > maxabs) maxabs = a;
    }
  if (rational_psd(m)) {
    out.psd_ok = true;
    out.shifted = std::move(m);
    return out;
  }
  const Rational delta = to_rational(1e-12) * (Rational(1) + maxabs);
  for (int i = 0; i < n; ++i) m[i][i] += delta;
  if (rational_psd(m)) {
    out.psd_ok = true;
    out.shifted = std::move(m);
  }
  return out;
}

template <class S>
S residual_scalar(const Polynomial<S>& target, const IntervalDecompTemplate& tpl,
                  const DenseMat<S>& ql, const DenseMat<S>& qn, const S& gamma) {
  Polynomial<S> rec = lambda_weight<S>(tpl) * gram_univariate(ql);
  if (tpl.has_nu()) rec += nu_weight<S>(tpl) * gram_univariate(qn);
  rec += Polynomial<S>::constant(gamma);
  return coeff_l1(target - rec);
}

// Worst row sum of the per-entry coefficient-l1 norms: a Gershgorin-style
// bound, so the reconstructed matrix stays within `residual` of the target in
// the PSD order for every t in [0, 1].
template <class S>
S residual_matrix(const std::vector<std::vector<Polynomial<S>>>& target,
                  const IntervalDecompTemplate& tpl, int m,
                  const DenseMat<S>& ql, const DenseMat<S>& qn, const S& gamma) {
  const auto lam = gram_matrix_entries(ql, m);
  const auto wl = lambda_weight<S>(tpl);
  std::vector<std::vector<Polynomial<S>>> nu;
  if (tpl.has_nu()) nu = gram_matrix_entries(qn, m);
  const auto wn = nu_weight<S>(tpl);
  S worst(0);
  for (int r = 0; r < m; ++r) {
    S row(0);
    for (int c = 0; c < m; ++c) {
      Polynomial<S> d = target[r][c] - wl * lam[r][c];
      if (tpl.has_nu()) d -= wn * nu[r][c];
      if (r == c) d -= Polynomial<S>::constant(gamma);
      row += coeff_l1(d);
    }
    if (row > worst) worst = row;
  }
  return worst;
}

template <class S>
int matrix_degree(const std::vector<std::vector<Polynomial<S>>>& m) {
  int d = -1;
  for (const auto& row : m)
    for (const auto& p : row) d = std::max(d, p.degree());
  return d;
}

// Shared single-constraint core.  Exactly one of scalar_target /
// matrix_target is set; the caller has already matched the constraint kind.
template <class S>
ConstraintCheck check_identity(
    const Polynomial<S>* scalar_target,
    const std::vector<std::vector<Polynomial<S>>>* matrix_target,
    const CertificateConstraint& stored, const VerifyOptions& opts) {
  ConstraintCheck cc;
  cc.label = stored.label;
  cc.gamma = stored.gamma;

  const int deg = scalar_target ? std::max(0, scalar_target->degree())
                                : std::max(0, matrix_degree(*matrix_target));
  if (stored.target_degree != deg) {
    cc.diagnostic = "stored degree " + std::to_string(stored.target_degree) +
                    " does not match the rebuilt constraint degree " +
                    std::to_string(deg);
    return cc;
  }
  const auto tpl = decomposition_template(deg);
  const int m =
      matrix_target ? static_cast<int>(matrix_target->size()) : 1;
  const int dim_l = tpl.lambda_basis() * m;
  const int dim_n = tpl.has_nu() ? tpl.nu_basis() * m : 0;
  if (stored.gram_lambda.rows() != dim_l || stored.gram_lambda.cols() != dim_l ||
      stored.gram_nu.rows() != dim_n || stored.gram_nu.cols() != dim_n) {
    cc.diagnostic = "Gram dimensions do not fit the decomposition shape";
    return cc;
  }
  if (!(stored.gamma > 0.0)) {
    cc.diagnostic = "slack is not positive";
    return cc;
  }

  const FloatPrep pl = prep_gram_float(stored.gram_lambda, opts.eps_psd);
  const FloatPrep pn = prep_gram_float(stored.gram_nu, opts.eps_psd);
  cc.min_gram_eigenvalue =
      dim_n > 0 ? std::min(pl.min_eig, pn.min_eig) : pl.min_eig;

  if constexpr (std::is_same_v<S, double>) {
    if (!pl.psd_ok || !pn.psd_ok) {
      cc.diagnostic = "Gram matrix is not positive semidefinite";
      return cc;
    }
    const auto ql = to_dense(pl.clamped);
    const auto qn = to_dense(pn.clamped);
    cc.residual = scalar_target
                      ? residual_scalar(*scalar_target, tpl, ql, qn, cc.gamma)
                      : residual_matrix(*matrix_target, tpl, m, ql, qn,
                                        cc.gamma);
    cc.ok = cc.residual <= cc.gamma;
  } else {
    const ExactPrep el = prep_gram_exact(stored.gram_lambda);
    const ExactPrep en = prep_gram_exact(stored.gram_nu);
    if (!el.psd_ok || !en.psd_ok) {
      cc.diagnostic = "Gram matrix is not positive semidefinite";
      return cc;
    }
    const Rational gamma = to_rational(stored.gamma);
    const Rational res =
        scalar_target
            ? residual_scalar(*scalar_target, tpl, el.shifted, en.shifted,
                              gamma)
            : residual_matrix(*matrix_target, tpl, m, el.shifted, en.shifted,
                              gamma);
    cc.residual = to_double(res);
    cc.ok = res <= gamma;
  }
  if (!cc.ok && cc.diagnostic.empty())
    cc.diagnostic = "reconstruction residual exceeds the slack";
  return cc;
}

template <class S>
CheckReport verify_impl(const Certificate& cert, const KinematicChain& chain,
                        const ConvexBody& body_a, const ConvexBody& body_b,
                        const PlanSegment& segment, const VerifyOptions& opts) {
  CheckReport rep;
  const int dc = cert.hyperplane_degree + 1;
  if (cert.hyperplane_degree < 0 || cert.a_coeffs.rows() != 3 ||
      cert.a_coeffs.cols() != dc || cert.b_coeffs.size() != dc) {
    rep.diagnostic = "malformed hyperplane coefficient arrays";
    return rep;
  }

  const HyperplaneTemplate hp{cert.hyperplane_degree};
  std::vector<PairConstraint<S>> cons;
  try {
    cons = build_pair_constraints<S>(chain, body_a, body_b, segment, hp);
  } catch (const std::exception& e) {
    rep.diagnostic = std::string("cannot rebuild the constraints: ") + e.what();
    return rep;
  }
  if (cons.size() != cert.constraints.size()) {
    rep.diagnostic = "certificate carries " +
                     std::to_string(cert.constraints.size()) +
                     " constraints but the pair produces " +
                     std::to_string(cons.size());
    return rep;
  }

  std::vector<S> vals;
  for (double v : cert.hyperplane_values())
    vals.push_back(scalar_from_double<S>(v));

  bool all_ok = true;
  for (std::size_t i = 0; i < cons.size(); ++i) {
    const auto& stored = cert.constraints[i];
    if (stored.is_matrix != cons[i].is_matrix) {
      ConstraintCheck cc;
      cc.label = cons[i].label;
      cc.gamma = stored.gamma;
      cc.diagnostic = "constraint kind mismatch";
      rep.constraints.push_back(std::move(cc));
      all_ok = false;
      continue;
    }
    ConstraintCheck cc;
    if (!cons[i].is_matrix) {
      const Polynomial<S> target = cons[i].scalar.instantiate(vals);
      cc = check_identity<S>(&target, nullptr, stored, opts);
    } else {
      const int m = cons[i].matrix.n;
      std::vector<std::vector<Polynomial<S>>> target(
          static_cast<std::size_t>(m),
          std::vector<Polynomial<S>>(static_cast<std::size_t>(m)));
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
          target[r][c] = cons[i].matrix.at(r, c).instantiate(vals);
      cc = check_identity<S>(nullptr, &target, stored, opts);
    }
    cc.label = cons[i].label;
    all_ok = all_ok && cc.ok;
    rep.constraints.push_back(std::move(cc));
  }
  rep.verified = all_ok;
  return rep;
}

}  // namespace

ConstraintCheck check_scalar_identity(const Polynomial<double>& target,
                                      const CertificateConstraint& stored,
                                      const VerifyOptions& opts) {
  if (stored.is_matrix) {
    ConstraintCheck cc;
    cc.label = stored.label;
    cc.gamma = stored.gamma;
    cc.diagnostic = "constraint kind mismatch";
    return cc;
  }
  if (!opts.exact) return check_identity<double>(&target, nullptr, stored, opts);
  Polynomial<Rational> t;
  for (const auto& [mono, c] : target.terms())
    t += Polynomial<Rational>::term(mono, to_rational(c));
  return check_identity<Rational>(&t, nullptr, stored, opts);
}

ConstraintCheck check_matrix_identity(
    const std::vector<std::vector<Polynomial<double>>>& target,
    const CertificateConstraint& stored, const VerifyOptions& opts) {
  if (!stored.is_matrix) {
    ConstraintCheck cc;
    cc.label = stored.label;
    cc.gamma = stored.gamma;
    cc.diagnostic = "constraint kind mismatch";
    return cc;
  }
  if (!opts.exact) return check_identity<double>(nullptr, &target, stored, opts);
  std::vector<std::vector<Polynomial<Rational>>> t(target.size());
  for (std::size_t r = 0; r < target.size(); ++r) {
    t[r].resize(target[r].size());
    for (std::size_t c = 0; c < target[r].size(); ++c)
      for (const auto& [mono, cf] : target[r][c].terms())
        t[r][c] += Polynomial<Rational>::term(mono, to_rational(cf));
  }
  return check_identity<Rational>(nullptr, &t, stored, opts);
}

CheckReport verify_certificate(const Certificate& cert,
                               const KinematicChain& chain,
                               const ConvexBody& body_a,
                               const ConvexBody& body_b,
                               const PlanSegment& segment,
                               const VerifyOptions& opts) {
  return opts.exact
             ? verify_impl<Rational>(cert, chain, body_a, body_b, segment, opts)
             : verify_impl<double>(cert, chain, body_a, body_b, segment, opts);
}

FalsifyReport sample_falsify(const MotionPlan& plan, const Scene& scene,
                             int samples_per_segment) {
  if (samples_per_segment < 2)
    throw std::invalid_argument("sample_falsify: need at least two samples");
  scene.validate();

  FalsifyReport rep;
  for (std::size_t s = 0; s < plan.segments.size(); ++s) {
    const auto& seg = plan.segments[s];
    for (int i = 0; i < samples_per_segment; ++i) {
      const double t =
          static_cast<double>(i) / static_cast<double>(samples_per_segment - 1);
      const auto tc = seg.eval(t);
      const auto q = tc_to_cspace(scene.chain, tc);
      ++rep.samples_used;
      for (const auto& pr : scene.pairs) {
        const auto& a = scene.body(pr.a);
        const auto& b = scene.body(pr.b);
        const double dist =
            min_distance(a, scene.chain.numeric_link_pose(a.link, q), b,
                         scene.chain.numeric_link_pose(b.link, q));
        if (dist <= 0.0) {
          rep.collision_found = true;
          rep.segment = static_cast<int>(s);
          rep.t = t;
          rep.pair = pr;
          rep.config = tc;
          rep.min_distance = dist;
          return rep;
        }
      }
    }
  }
  return rep;
}

PlanReport certify_plan(const MotionPlan& plan, const Scene& scene,
                        const CertifyOptions& opts) {
  if (opts.jobs < 1)
    throw std::invalid_argument("certify_plan: jobs must be positive");
  if (opts.hyperplane_degree < 0)
    throw std::invalid_argument("certify_plan: negative hyperplane degree");
  scene.validate();

  PlanReport rep;
  rep.segments = static_cast<int>(plan.segments.size());
  rep.pairs = static_cast<int>(scene.pairs.size());
  const int cells = rep.segments * rep.pairs;
  rep.cells.resize(static_cast<std::size_t>(cells));
  if (cells == 0) {
    rep.safe = true;  // nothing to separate
    return rep;
  }

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const int k = next.fetch_add(1);
      if (k >= cells) return;
      CellResult& cell = rep.cells[static_cast<std::size_t>(k)];
      cell.segment = k / rep.pairs;
      cell.pair_index = k % rep.pairs;
      if (opts.early_stop && failed.load()) {
        cell.skipped = true;
        cell.note = "skipped after an earlier cell failed";
        continue;
      }
      const auto& seg = plan.segments[static_cast<std::size_t>(cell.segment)];
      const auto& pr = scene.pairs[static_cast<std::size_t>(cell.pair_index)];
      const auto start = std::chrono::steady_clock::now();
      try {
        const auto prog = assemble_pair_program(
            scene.chain, scene.body(pr.a), scene.body(pr.b), seg, cell.segment,
            opts.hyperplane_degree, opts.gamma_min);
        const auto res = solve_feasibility(prog.sdp, opts.solver);
        cell.solve_status = res.status;
        cell.iterations = res.iterations;
        if (res.status == SolveStatus::Feasible) {
          cell.certificate = extract_certificate(prog, res.solution);
          VerifyOptions vo;
          vo.exact = opts.exact_verify;
          cell.check =
              verify_certificate(cell.certificate, scene.chain,
                                 scene.body(pr.a), scene.body(pr.b), seg, vo);
          cell.verified = cell.check.verified;
          if (!cell.verified)
            cell.note = "certificate failed independent verification";
        } else if (res.status == SolveStatus::Infeasible) {
          cell.note =
              "no separating hyperplane at this degree; raising the degree "
              "may certify this cell";
        } else {
          cell.note = "solver was inconclusive";
        }
      } catch (const std::exception& e) {
        cell.solve_status = SolveStatus::Unknown;
        cell.note = e.what();
      }
      cell.solve_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        start)
              .count();
      if (!(cell.solve_status == SolveStatus::Feasible && cell.verified))
        failed.store(true);
    }
  };

  const int nthreads = std::min(opts.jobs, cells);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  rep.safe = true;
  for (const auto& cell : rep.cells)
    rep.safe = rep.safe && !cell.skipped &&
               cell.solve_status == SolveStatus::Feasible && cell.verified;
  return rep;
}

}  // namespace pathcert
