#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace pathcert {

// Semidefinite feasibility in block form: find values for a list of PSD
// matrix blocks, one nonnegative scalar block, and a block of free scalars
// satisfying sparse linear equality rows.  PSD coefficients follow the SDPA
// convention: an entry is stored once at (i, j) with i <= j and contributes
// coeff * X_ij * (i == j ? 1 : 2) to its row.
struct SdpProblem {
  enum class BlockKind { Psd, NonNeg, Free };

  struct Term {
    BlockKind kind = BlockKind::Psd;
    int block = 0;  // PSD block index; ignored for NonNeg/Free
    int i = 0;      // entry row (or scalar index for NonNeg/Free)
    int j = 0;      // entry column; ignored for NonNeg/Free
    double coeff = 0.0;
    friend bool operator==(const Term&, const Term&) = default;
  };

  struct Row {
    std::vector<Term> terms;
    double rhs = 0.0;
    friend bool operator==(const Row&, const Row&) = default;
  };

  std::vector<int> psd_sizes;
  int nonneg_size = 0;
  int free_size = 0;
  std::vector<Row> rows;
  std::vector<Term> objective;  // empty: pure feasibility; else minimized

  int add_psd_block(int n) {
    psd_sizes.push_back(n);
    return static_cast<int>(psd_sizes.size()) - 1;
  }
  int add_nonneg() { return nonneg_size++; }
  int add_free() { return free_size++; }

  static Term psd_entry(int block, int i, int j, double c) {
    return Term{BlockKind::Psd, block, std::min(i, j), std::max(i, j), c};
  }
  static Term nonneg_entry(int index, double c) {
    return Term{BlockKind::NonNeg, 0, index, index, c};
  }
  static Term free_entry(int index, double c) {
    return Term{BlockKind::Free, 0, index, index, c};
  }

  void validate() const;  // throws std::invalid_argument on out-of-range terms

  friend bool operator==(const SdpProblem&, const SdpProblem&) = default;
};

struct BlockValues {
  std::vector<Eigen::MatrixXd> psd;
  Eigen::VectorXd nonneg;
  Eigen::VectorXd free_vars;
};

enum class SolveStatus { Feasible, Infeasible, Unknown };

struct SolveOutcome {
  SolveStatus status = SolveStatus::Unknown;
  BlockValues solution;  // populated when Feasible
  int iterations = 0;
  double eq_residual = 0.0;   // measured on the returned solution
  double min_eigenvalue = 0.0;
  // Infeasibility witness y over the original rows, normalized to b'y = 1;
  // -A'y lies in the cone up to `farkas_residual`.
  Eigen::VectorXd farkas_y;
  double farkas_residual = 0.0;
  std::string note;
};

struct SolveOptions {
  double tol = 1e-8;      // interior-point convergence tolerance
  double eps_eq = 1e-8;   // equality residual accepted as feasible
  double eps_psd = 1e-9;  // eigenvalue floor accepted as feasible
  int max_iter = 200;

  // Defaults with PATHCERT_SDP_TOL / PATHCERT_SDP_MAXITER applied if set.
  static SolveOptions from_env();
};

SolveOutcome solve_feasibility(const SdpProblem& problem,
                               const SolveOptions& opts = {});

// Measured violations of `values` against `problem`, independent of the
// solver: worst equality residual and worst block eigenvalue floor.
struct ResidualReport {
  double eq_residual = 0.0;
  double min_eigenvalue = 0.0;
};
ResidualReport measure_residuals(const SdpProblem& problem,
                                 const BlockValues& values);

// --- sparse SDPA interchange -----------------------------------------------
// Canonical form: no free block (split into nonnegative pairs), all diagonal
// entries merged into the single nonnegative block, terms sorted and
// duplicates combined.  export_standard emits canonical form; import of an
// exported document reproduces it bit-identically.
SdpProblem canonicalize(const SdpProblem& problem);
std::string export_standard(const SdpProblem& problem);
SdpProblem import_standard(const std::string& text);

}  // namespace pathcert
