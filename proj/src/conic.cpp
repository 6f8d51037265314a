#include "pathcert/conic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace pathcert {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kTinyEig = 1e-280;

// Cone coordinate layout: each PSD block stored as svec (upper triangle,
// row-major, off-diagonals scaled by sqrt(2)), then the nonnegative block.
struct Layout {
  std::vector<int> psd;
  std::vector<int> off;
  int nn = 0;
  int nn_off = 0;
  int dim = 0;
  int nu = 0;  // barrier degree
};

Layout make_layout(const SdpProblem& p) {
  Layout l;
  l.psd = p.psd_sizes;
  int at = 0;
  for (int n : l.psd) {
    l.off.push_back(at);
    at += n * (n + 1) / 2;
    l.nu += n;
  }
  l.nn = p.nonneg_size;
  l.nn_off = at;
  l.dim = at + l.nn;
  l.nu += l.nn;
  return l;
}

int tri_index(int i, int j, int n) {  // requires i <= j
  return i * n - i * (i - 1) / 2 + (j - i);
}

Eigen::MatrixXd unsvec(const Eigen::Ref<const Eigen::VectorXd>& v, int n) {
  Eigen::MatrixXd m(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j, ++k) {
      const double x = i == j ? v(k) : v(k) / kSqrt2;
      m(i, j) = x;
      m(j, i) = x;
    }
  return m;
}

void svec_into(const Eigen::MatrixXd& m, Eigen::Ref<Eigen::VectorXd> out) {
  const int n = static_cast<int>(m.rows());
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j, ++k)
      out(k) = i == j ? m(i, i) : kSqrt2 * 0.5 * (m(i, j) + m(j, i));
}

// Worst eigenvalue floor of a cone vector (PSD blocks + nonneg entries).
double cone_floor(const Layout& l, const Eigen::VectorXd& v) {
  double floor = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < l.psd.size(); ++b) {
    const int n = l.psd[b];
    const auto m = unsvec(v.segment(l.off[b], n * (n + 1) / 2), n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m,
                                                      Eigen::EigenvaluesOnly);
    floor = std::min(floor, es.eigenvalues().minCoeff());
  }
  for (int i = 0; i < l.nn; ++i) floor = std::min(floor, v(l.nn_off + i));
  return std::isinf(floor) ? 0.0 : floor;
}

// Nearest cone point: clamp PSD eigenvalues and nonneg entries at zero.
Eigen::VectorXd cone_project(const Layout& l, Eigen::VectorXd v) {
  for (std::size_t b = 0; b < l.psd.size(); ++b) {
    const int n = l.psd[b];
    const int sz = n * (n + 1) / 2;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        unsvec(v.segment(l.off[b], sz), n));
    const Eigen::MatrixXd m = es.eigenvectors() *
                              es.eigenvalues().cwiseMax(0.0).asDiagonal() *
                              es.eigenvectors().transpose();
    svec_into(m, v.segment(l.off[b], sz));
  }
  if (l.nn > 0) v.tail(l.nn) = v.tail(l.nn).cwiseMax(0.0);
  return v;
}

// Largest step length alpha so that v + alpha*dv stays in the cone, capped.
// The cone's identity element (identity matrices, ones) as a coordinate
// vector scaled by `s`.
Eigen::VectorXd identity_vec(const Layout& l, double s) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(l.dim);
  for (std::size_t b = 0; b < l.psd.size(); ++b) {
    const int n = l.psd[b];
    for (int i = 0; i < n; ++i) out(l.off[b] + tri_index(i, i, n)) = s;
  }
  if (l.nn > 0) out.tail(l.nn).setConstant(s);
  return out;
}

double step_to_boundary(const Layout& l, const Eigen::VectorXd& v,
                        const Eigen::VectorXd& dv, double cap) {
  double alpha = cap;
  for (std::size_t b = 0; b < l.psd.size(); ++b) {
    const int n = l.psd[b];
    const int sz = n * (n + 1) / 2;
    const auto X = unsvec(v.segment(l.off[b], sz), n);
    const auto D = unsvec(dv.segment(l.off[b], sz), n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(kTinyEig);
    const Eigen::MatrixXd xihalf =
        es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
        es.eigenvectors().transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(xihalf * D * xihalf,
                                                     Eigen::EigenvaluesOnly);
    const double beta = em.eigenvalues().minCoeff();
    if (beta < 0.0) alpha = std::min(alpha, -1.0 / beta);
  }
  for (int i = 0; i < l.nn; ++i) {
    const double d = dv(l.nn_off + i);
    if (d < 0.0) alpha = std::min(alpha, -v(l.nn_off + i) / d);
  }
  return alpha;
}

// Nesterov-Todd scaling state for one iterate (x, s).
struct Scaling {
  const Layout* l = nullptr;
  std::vector<Eigen::MatrixXd> R, Rinv, Q, Qi;  // Q = R R', Qi = Q^{-1}
  std::vector<Eigen::VectorXd> lam;
  Eigen::VectorXd w_nn, lam_nn;

  static Scaling compute(const Layout& l, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& s) {
    Scaling sc;
    sc.l = &l;
    for (std::size_t b = 0; b < l.psd.size(); ++b) {
      const int n = l.psd[b];
      const int sz = n * (n + 1) / 2;
      const auto X = unsvec(x.segment(l.off[b], sz), n);
      const auto S = unsvec(s.segment(l.off[b], sz), n);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(X), es(S);
      const Eigen::VectorXd dx = ex.eigenvalues().cwiseMax(kTinyEig);
      const Eigen::VectorXd ds = es.eigenvalues().cwiseMax(kTinyEig);
      const Eigen::MatrixXd Lx =
          ex.eigenvectors() * dx.cwiseSqrt().asDiagonal();
      const Eigen::MatrixXd Ls =
          es.eigenvectors() * ds.cwiseSqrt().asDiagonal();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(
          Ls.transpose() * Lx, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Eigen::VectorXd sig = svd.singularValues().cwiseMax(kTinyEig);
      const Eigen::MatrixXd R =
          Lx * svd.matrixV() * sig.cwiseSqrt().cwiseInverse().asDiagonal();
      const Eigen::MatrixXd Rinv =
          sig.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() *
          dx.cwiseSqrt().cwiseInverse().asDiagonal() *
          ex.eigenvectors().transpose();
      sc.R.push_back(R);
      sc.Rinv.push_back(Rinv);
      sc.Q.push_back(R * R.transpose());
      sc.Qi.push_back(Rinv.transpose() * Rinv);
      sc.lam.push_back(sig);
    }
    if (l.nn > 0) {
      const auto xs = x.tail(l.nn).array(), ss = s.tail(l.nn).array();
      sc.w_nn = (xs / ss).sqrt().matrix();
      sc.lam_nn = (xs * ss).sqrt().matrix();
    }
    return sc;
  }

  using MatOp = Eigen::MatrixXd (*)(const Scaling&, std::size_t,
                                    const Eigen::MatrixXd&);

  Eigen::VectorXd map_blocks(const Eigen::VectorXd& v, MatOp psd_op,
                             const Eigen::ArrayXd& nn_scale) const {
    Eigen::VectorXd out(l->dim);
    for (std::size_t b = 0; b < l->psd.size(); ++b) {
      const int n = l->psd[b];
      const int sz = n * (n + 1) / 2;
      const auto M = unsvec(v.segment(l->off[b], sz), n);
      svec_into(psd_op(*this, b, M), out.segment(l->off[b], sz));
    }
    if (l->nn > 0)
      out.tail(l->nn) = (v.tail(l->nn).array() * nn_scale).matrix();
    return out;
  }

  // W = H^{-1} G maps M to Qi M Qi; its inverse maps M to Q M Q.
  Eigen::VectorXd W(const Eigen::VectorXd& v) const {
    return map_blocks(
        v,
        +[](const Scaling& sc, std::size_t b, const Eigen::MatrixXd& m) {
          return Eigen::MatrixXd(sc.Qi[b] * m * sc.Qi[b]);
        },
        l->nn > 0 ? (1.0 / w_nn.array().square()) : Eigen::ArrayXd());
  }
  Eigen::VectorXd Winv(const Eigen::VectorXd& v) const {
    return map_blocks(
        v,
        +[](const Scaling& sc, std::size_t b, const Eigen::MatrixXd& m) {
          return Eigen::MatrixXd(sc.Q[b] * m * sc.Q[b]);
        },
        l->nn > 0 ? w_nn.array().square() : Eigen::ArrayXd());
  }
  Eigen::VectorXd Hinv(const Eigen::VectorXd& v) const {
    return map_blocks(
        v,
        +[](const Scaling& sc, std::size_t b, const Eigen::MatrixXd& m) {
          return Eigen::MatrixXd(sc.Rinv[b].transpose() * m * sc.Rinv[b]);
        },
        l->nn > 0 ? w_nn.array().inverse() : Eigen::ArrayXd());
  }
  Eigen::VectorXd G(const Eigen::VectorXd& v) const {
    return map_blocks(
        v,
        +[](const Scaling& sc, std::size_t b, const Eigen::MatrixXd& m) {
          return Eigen::MatrixXd(sc.Rinv[b] * m * sc.Rinv[b].transpose());
        },
        l->nn > 0 ? w_nn.array().inverse() : Eigen::ArrayXd());
  }
  Eigen::VectorXd H(const Eigen::VectorXd& v) const {
    return map_blocks(
        v,
        +[](const Scaling& sc, std::size_t b, const Eigen::MatrixXd& m) {
          return Eigen::MatrixXd(sc.R[b].transpose() * m * sc.R[b]);
        },
        l->nn > 0 ? w_nn.array() : Eigen::ArrayXd());
  }

  // Solve lambda o z = d in the scaled space (Jordan product linearization).
  Eigen::VectorXd llam_inv(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out(l->dim);
    for (std::size_t b = 0; b < l->psd.size(); ++b) {
      const int n = l->psd[b];
      const int sz = n * (n + 1) / 2;
      Eigen::MatrixXd M = unsvec(v.segment(l->off[b], sz), n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) *= 2.0 / (lam[b](i) + lam[b](j));
      svec_into(M, out.segment(l->off[b], sz));
    }
    if (l->nn > 0)
      out.tail(l->nn) =
          (v.tail(l->nn).array() / lam_nn.array()).matrix();
    return out;
  }

  // Symmetrized product u o v in the scaled space.
  Eigen::VectorXd jordan(const Eigen::VectorXd& u,
                         const Eigen::VectorXd& v) const {
    Eigen::VectorXd out(l->dim);
    for (std::size_t b = 0; b < l->psd.size(); ++b) {
      const int n = l->psd[b];
      const int sz = n * (n + 1) / 2;
      const auto U = unsvec(u.segment(l->off[b], sz), n);
      const auto V = unsvec(v.segment(l->off[b], sz), n);
      svec_into(0.5 * (U * V + V * U), out.segment(l->off[b], sz));
    }
    if (l->nn > 0)
      out.tail(l->nn) =
          (u.tail(l->nn).array() * v.tail(l->nn).array()).matrix();
    return out;
  }

  // lambda o lambda as a cone vector.
  Eigen::VectorXd lam_sq() const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(l->dim);
    for (std::size_t b = 0; b < l->psd.size(); ++b) {
      const int n = l->psd[b];
      for (int i = 0; i < n; ++i)
        out(l->off[b] + tri_index(i, i, n)) = lam[b](i) * lam[b](i);
    }
    if (l->nn > 0) out.tail(l->nn) = lam_nn.array().square().matrix();
    return out;
  }

};

struct Assembled {
  Layout layout;
  Eigen::MatrixXd A;  // rows over cone coordinates
  Eigen::MatrixXd F;  // rows over free variables
  Eigen::VectorXd b;
  Eigen::VectorXd c;  // objective over cone coordinates
  double scale_a = 1.0;
};

Assembled assemble(const SdpProblem& p) {
  Assembled out;
  out.layout = make_layout(p);
  const int m = static_cast<int>(p.rows.size());
  out.A = Eigen::MatrixXd::Zero(m, out.layout.dim);
  out.F = Eigen::MatrixXd::Zero(m, p.free_size);
  out.b = Eigen::VectorXd::Zero(m);
  out.c = Eigen::VectorXd::Zero(out.layout.dim);
  auto scatter = [&](const SdpProblem::Term& t, int row) -> void {
    switch (t.kind) {
      case SdpProblem::BlockKind::Psd: {
        const int n = p.psd_sizes[t.block];
        const int idx = out.layout.off[t.block] + tri_index(t.i, t.j, n);
        out.A(row, idx) += (t.i == t.j ? 1.0 : kSqrt2) * t.coeff;
        break;
      }
      case SdpProblem::BlockKind::NonNeg:
        out.A(row, out.layout.nn_off + t.i) += t.coeff;
        break;
      case SdpProblem::BlockKind::Free:
        out.F(row, t.i) += t.coeff;
        break;
    }
  };
  for (int r = 0; r < m; ++r) {
    for (const auto& t : p.rows[r].terms) scatter(t, r);
    out.b(r) = p.rows[r].rhs;
  }
  for (const auto& t : p.objective) {
    if (t.kind == SdpProblem::BlockKind::Free)
      throw std::invalid_argument(
          "solve_feasibility: objective on free variables is unsupported");
    if (t.kind == SdpProblem::BlockKind::Psd) {
      const int n = p.psd_sizes[t.block];
      out.c(out.layout.off[t.block] + tri_index(t.i, t.j, n)) +=
          (t.i == t.j ? 1.0 : kSqrt2) * t.coeff;
    } else {
      out.c(out.layout.nn_off + t.i) += t.coeff;
    }
  }
  out.scale_a = std::max(1.0, out.A.size() ? out.A.cwiseAbs().maxCoeff() : 0.0);
  return out;
}

// Checks a candidate infeasibility ray y over the original rows: after
// normalizing b'y = 1, -A'y must lie in the cone and F'y must vanish.
struct FarkasCheck {
  bool ok = false;
  Eigen::VectorXd y;
  double residual = 0.0;
};

FarkasCheck check_farkas(const Assembled& d, const Eigen::VectorXd& y_raw,
                         const SolveOptions& opts) {
  FarkasCheck out;
  const double by = d.b.dot(y_raw);
  if (!(by > 0.0) || !y_raw.allFinite()) return out;
  out.y = y_raw / by;
  const Eigen::VectorXd v = -(d.A.transpose() * out.y);
  double res = 0.0;
  const double floor = cone_floor(d.layout, v);
  if (floor < 0.0) res = -floor;
  if (d.F.cols() > 0)
    res = std::max(res, (d.F.transpose() * out.y).cwiseAbs().maxCoeff());
  out.residual = res;
  // Absolute tolerance on the b'y = 1 normalization: inflating it with |y|
  // would let a diverging iterate on a boundary-feasible problem masquerade
  // as a witness.
  out.ok = res <= std::max(opts.eps_eq, opts.eps_psd) * d.scale_a;
  return out;
}

BlockValues unpack(const SdpProblem& p, const Layout& l,
                   const Eigen::VectorXd& cone, const Eigen::VectorXd& u) {
  BlockValues v;
  for (std::size_t b = 0; b < l.psd.size(); ++b) {
    const int n = l.psd[b];
    v.psd.push_back(unsvec(cone.segment(l.off[b], n * (n + 1) / 2), n));
  }
  v.nonneg = cone.tail(l.nn);
  v.free_vars = u;
  (void)p;
  return v;
}

}  // namespace

void SdpProblem::validate() const {
  auto check_term = [&](const Term& t) {
    if (!std::isfinite(t.coeff))
      throw std::invalid_argument("SdpProblem: non-finite coefficient");
    switch (t.kind) {
      case BlockKind::Psd: {
        if (t.block < 0 || t.block >= static_cast<int>(psd_sizes.size()))
          throw std::invalid_argument("SdpProblem: PSD block out of range");
        const int n = psd_sizes[t.block];
        if (t.i < 0 || t.j < t.i || t.j >= n)
          throw std::invalid_argument("SdpProblem: PSD entry out of range");
        break;
      }
      case BlockKind::NonNeg:
        if (t.i < 0 || t.i >= nonneg_size)
          throw std::invalid_argument("SdpProblem: nonneg index out of range");
        break;
      case BlockKind::Free:
        if (t.i < 0 || t.i >= free_size)
          throw std::invalid_argument("SdpProblem: free index out of range");
        break;
    }
  };
  for (int n : psd_sizes)
    if (n <= 0) throw std::invalid_argument("SdpProblem: empty PSD block");
  for (const auto& row : rows) {
    if (!std::isfinite(row.rhs))
      throw std::invalid_argument("SdpProblem: non-finite right-hand side");
    for (const auto& t : row.terms) check_term(t);
  }
  for (const auto& t : objective) check_term(t);
}

SolveOptions SolveOptions::from_env() {
  SolveOptions o;
  if (const char* s = std::getenv("PATHCERT_SDP_TOL")) {
    const double v = std::atof(s);
    if (v > 0.0) o.tol = v;
  }
  if (const char* s = std::getenv("PATHCERT_SDP_MAXITER")) {
    const int v = std::atoi(s);
    if (v > 0) o.max_iter = v;
  }
  return o;
}

ResidualReport measure_residuals(const SdpProblem& p, const BlockValues& v) {
  ResidualReport rep;
  for (const auto& row : p.rows) {
    double acc = 0.0;
    for (const auto& t : row.terms) {
      switch (t.kind) {
        case SdpProblem::BlockKind::Psd:
          acc += t.coeff * v.psd[t.block](t.i, t.j) * (t.i == t.j ? 1.0 : 2.0);
          break;
        case SdpProblem::BlockKind::NonNeg:
          acc += t.coeff * v.nonneg(t.i);
          break;
        case SdpProblem::BlockKind::Free:
          acc += t.coeff * v.free_vars(t.i);
          break;
      }
    }
    rep.eq_residual = std::max(rep.eq_residual, std::abs(acc - row.rhs));
  }
  double floor = std::numeric_limits<double>::infinity();
  for (const auto& m : v.psd) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m,
                                                      Eigen::EigenvaluesOnly);
    floor = std::min(floor, es.eigenvalues().minCoeff());
  }
  for (int i = 0; i < v.nonneg.size(); ++i) floor = std::min(floor, v.nonneg(i));
  rep.min_eigenvalue = std::isinf(floor) ? 0.0 : floor;
  return rep;
}

SolveOutcome solve_feasibility(const SdpProblem& problem,
                               const SolveOptions& opts) {
  problem.validate();
  SolveOutcome out;
  const Assembled d = assemble(problem);
  const Layout& l = d.layout;
  const int m = static_cast<int>(d.b.size());
  const int f = static_cast<int>(d.F.cols());

  // Eliminate free variables: Q2 spans the complement of range(F), so the
  // reduced system constrains only the cone part.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_f;
  Eigen::MatrixXd A2 = d.A;
  Eigen::VectorXd b2 = d.b;
  Eigen::MatrixXd q2;
  if (f > 0) {
    qr_f.compute(d.F);
    const int rank_f = static_cast<int>(qr_f.rank());
    const Eigen::MatrixXd q_full =
        qr_f.householderQ() * Eigen::MatrixXd::Identity(m, m);
    q2 = q_full.rightCols(m - rank_f);
    A2 = q2.transpose() * d.A;
    b2 = q2.transpose() * d.b;
  }

  auto lift_y = [&](const Eigen::VectorXd& y2) -> Eigen::VectorXd {
    return f > 0 ? Eigen::VectorXd(q2 * y2) : y2;
  };

  auto candidate_ok = [&](const Eigen::VectorXd& cone_x, int iters) -> bool {
    Eigen::VectorXd u(0);
    if (f > 0) u = qr_f.solve(d.b - d.A * cone_x);
    BlockValues vals = unpack(problem, l, cone_x, u);
    const ResidualReport rep = measure_residuals(problem, vals);
    const double b_scale = 1.0 + (m ? d.b.cwiseAbs().maxCoeff() : 0.0);
    if (rep.eq_residual <= opts.eps_eq * b_scale &&
        rep.min_eigenvalue >= -opts.eps_psd) {
      out.status = SolveStatus::Feasible;
      out.solution = std::move(vals);
      out.iterations = iters;
      out.eq_residual = rep.eq_residual;
      out.min_eigenvalue = rep.min_eigenvalue;
      return true;
    }
    return false;
  };

  // The raw interior-point iterate satisfies the equalities only to solver
  // tolerance.  Polishing alternates a minimum-norm affine correction with a
  // cone clamp, which usually lands machine-precision residuals.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod_a2;
  const bool have_cod = b2.size() > 0 && A2.cols() > 0;
  if (have_cod) cod_a2.compute(A2);

  auto finish_feasible = [&](const Eigen::VectorXd& cone_x,
                             int iters) -> bool {
    if (have_cod) {
      Eigen::VectorXd cand = cone_x;
      for (int round = 0; round < 3; ++round) {
        cand += cod_a2.solve(b2 - A2 * cand);
        if (candidate_ok(cand, iters)) return true;
        cand = cone_project(l, cand);
      }
    }
    return candidate_ok(cone_x, iters);
  };

  // Pure linear-algebra pre-checks: consistency of the equalities ignoring
  // the cone.  An inconsistent system yields an exact Farkas ray from the
  // least-squares residual.
  const int m2 = static_cast<int>(b2.size());
  if (m2 > 0) {
    Eigen::VectorXd r = b2;  // cone-free system: the residual is b2 itself
    if (A2.cols() > 0) r -= A2 * cod_a2.solve(b2);
    const double b_scale = 1.0 + b2.cwiseAbs().maxCoeff();
    if (r.cwiseAbs().maxCoeff() > 1e-7 * b_scale) {
      const double rr = r.squaredNorm();
      const FarkasCheck fk = check_farkas(d, lift_y(r / rr), opts);
      if (fk.ok) {
        out.status = SolveStatus::Infeasible;
        out.farkas_y = fk.y;
        out.farkas_residual = fk.residual;
        out.note = "linear equalities are inconsistent";
        return out;
      }
    }
  }

  if (l.dim == 0) {
    // No cone variables at all: feasibility is plain least squares.
    if (finish_feasible(Eigen::VectorXd(0), 0)) return out;
    out.status = SolveStatus::Unknown;
    out.note = "free-only system did not meet the residual tolerance";
    return out;
  }

  // Compress dependent rows (consistency was checked above); keep pivots.
  std::vector<int> kept;
  Eigen::MatrixXd A3 = A2;
  Eigen::VectorXd b3 = b2;
  if (m2 > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_rows(A2.transpose());
    qr_rows.setThreshold(1e-10);
    const int rank = static_cast<int>(qr_rows.rank());
    const auto perm = qr_rows.colsPermutation().indices();
    for (int k = 0; k < rank; ++k) kept.push_back(perm(k));
    std::sort(kept.begin(), kept.end());
    A3.resize(rank, l.dim);
    b3.resize(rank);
    for (int k = 0; k < rank; ++k) {
      A3.row(k) = A2.row(kept[k]);
      b3(k) = b2(kept[k]);
    }
  }
  const int m3 = static_cast<int>(b3.size());

  auto lift_y3 = [&](const Eigen::VectorXd& y3) -> Eigen::VectorXd {
    Eigen::VectorXd y2 = Eigen::VectorXd::Zero(m2);
    for (int k = 0; k < m3; ++k) y2(kept[k]) = y3(k);
    return lift_y(y2);
  };

  if (m3 == 0) {
    // Unconstrained cone: the origin (plus free recovery) is feasible.
    if (finish_feasible(Eigen::VectorXd::Zero(l.dim), 0)) return out;
    out.status = SolveStatus::Unknown;
    out.note = "row-compressed system inconsistent with free recovery";
    return out;
  }

  // --- homogeneous self-dual interior point ---
  Eigen::VectorXd x = identity_vec(l, 1.0);
  Eigen::VectorXd s = x;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m3);
  double tau = 1.0, kappa = 1.0;
  const Eigen::VectorXd& c = d.c;
  const double b_scale = 1.0 + b3.cwiseAbs().maxCoeff();
  const bool pure_feasibility = (c.cwiseAbs().maxCoeff() == 0.0);

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    // candidate answers first
    const Eigen::VectorXd x_over_tau = x / tau;
    const double pres =
        (A3 * x_over_tau - b3).cwiseAbs().maxCoeff() / b_scale;
    if (pres <= std::max(10.0 * opts.tol, 1e-5) && pure_feasibility) {
      if (finish_feasible(x_over_tau, iter)) return out;
    }
    if (!pure_feasibility) {
      const double gap = x.dot(s) / (tau * tau);
      const double dres =
          ((-A3.transpose() * y) + c * tau - s).cwiseAbs().maxCoeff() / tau;
      if (pres <= opts.tol && dres <= opts.tol &&
          gap <= opts.tol * (1.0 + std::abs(c.dot(x_over_tau)))) {
        if (finish_feasible(x_over_tau, iter)) return out;
      }
    }
    {
      const FarkasCheck fk = check_farkas(d, lift_y3(y), opts);
      if (fk.ok) {
        out.status = SolveStatus::Infeasible;
        out.farkas_y = fk.y;
        out.farkas_residual = fk.residual;
        out.iterations = iter;
        return out;
      }
    }

    const double mu = (x.dot(s) + tau * kappa) / (l.nu + 1);
    if (mu < 1e-16 && tau < 1e-10) break;  // ill-posed; bail to Unknown

    const Eigen::VectorXd rp = A3 * x - b3 * tau;
    const Eigen::VectorXd rd = -(A3.transpose() * y) + c * tau - s;
    const double rg = b3.dot(y) - c.dot(x) - kappa;

    const Scaling sc = Scaling::compute(l, x, s);

    // Schur complement with W^{-1} applied row-wise; shared by both solves.
    Eigen::MatrixXd winv_at(l.dim, m3);
    for (int i = 0; i < m3; ++i)
      winv_at.col(i) = sc.Winv(A3.row(i).transpose());
    Eigen::MatrixXd schur = A3 * winv_at;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(schur);
    if (ldlt.info() != Eigen::Success) {
      schur.diagonal().array() += 1e-11 * (1.0 + schur.diagonal().maxCoeff());
      ldlt.compute(schur);
      if (ldlt.info() != Eigen::Success) break;
    }
    const Eigen::VectorXd wc = sc.Winv(c);
    const Eigen::VectorXd awc_b = A3 * wc + b3;
    const Eigen::VectorXd y2v = ldlt.solve(awc_b);
    const Eigen::VectorXd x2v = winv_at * y2v - wc;
    const double denom_base = b3.dot(y2v) - c.dot(x2v) + kappa / tau;

    struct Dir {
      Eigen::VectorXd dx, dy, ds;
      double dtau = 0.0, dkappa = 0.0;
    };
    auto newton = [&](double eta, const Eigen::VectorXd& d1,
                      double dkap) -> Dir {
      Dir dir;
      const Eigen::VectorXd rhat = -eta * rd + sc.Hinv(d1);
      const Eigen::VectorXd g0 = sc.Winv(rhat);
      const Eigen::VectorXd y1 = ldlt.solve(-eta * rp - A3 * g0);
      const Eigen::VectorXd x1 = g0 + winv_at * y1;
      const double num =
          -eta * rg + dkap / tau + c.dot(x1) - b3.dot(y1);
      dir.dtau = num / denom_base;
      dir.dy = y1 + dir.dtau * y2v;
      dir.dx = x1 + dir.dtau * x2v;
      dir.ds = sc.Hinv(d1) - sc.W(dir.dx);
      dir.dkappa = (dkap - kappa * dir.dtau) / tau;
      return dir;
    };

    // predictor
    const Eigen::VectorXd lam2 = sc.lam_sq();
    const Dir aff = newton(1.0, sc.llam_inv(-lam2), -tau * kappa);
    double alpha_aff = step_to_boundary(l, x, aff.dx, 1.0);
    alpha_aff = std::min(alpha_aff, step_to_boundary(l, s, aff.ds, 1.0));
    if (aff.dtau < 0) alpha_aff = std::min(alpha_aff, -tau / aff.dtau);
    if (aff.dkappa < 0) alpha_aff = std::min(alpha_aff, -kappa / aff.dkappa);
    const double mu_aff =
        ((x + alpha_aff * aff.dx).dot(s + alpha_aff * aff.ds) +
         (tau + alpha_aff * aff.dtau) * (kappa + alpha_aff * aff.dkappa)) /
        (l.nu + 1);
    double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
    sigma = std::min(1.0, std::max(0.0, sigma));

    // corrector
    const Eigen::VectorXd corr = sc.jordan(sc.G(aff.dx), sc.H(aff.ds));
    const Eigen::VectorXd d_comb =
        identity_vec(l, sigma * mu) - lam2 - corr;
    const double dkap_comb =
        sigma * mu - tau * kappa - aff.dtau * aff.dkappa;
    const Dir step = newton(1.0 - sigma, sc.llam_inv(d_comb), dkap_comb);

    double alpha = step_to_boundary(l, x, step.dx, 10.0);
    alpha = std::min(alpha, step_to_boundary(l, s, step.ds, 10.0));
    if (step.dtau < 0) alpha = std::min(alpha, -tau / step.dtau);
    if (step.dkappa < 0) alpha = std::min(alpha, -kappa / step.dkappa);
    alpha = std::min(1.0, 0.98 * alpha);
    if (!(alpha > 0.0) || !std::isfinite(alpha)) break;

    x += alpha * step.dx;
    y += alpha * step.dy;
    s += alpha * step.ds;
    tau += alpha * step.dtau;
    kappa += alpha * step.dkappa;
    out.iterations = iter + 1;
  }

  // Last chance with the final iterate.
  if (finish_feasible(x / tau, out.iterations)) return out;
  {
    const FarkasCheck fk = check_farkas(d, lift_y3(y), opts);
    if (fk.ok) {
      out.status = SolveStatus::Infeasible;
      out.farkas_y = fk.y;
      out.farkas_residual = fk.residual;
      return out;
    }
  }
  out.status = SolveStatus::Unknown;
  out.note = "interior point did not converge within the iteration budget";
  return out;
}

}  // namespace pathcert
