#pragma once

#include <map>
#include <string>
#include <vector>

#include "pathcert/plan.hpp"
#include "pathcert/scene.hpp"
#include "pathcert/soscert.hpp"

namespace pathcert {

// Verification settings.  The exact mode repeats the residual comparison and
// the Gram PSD tests in rational arithmetic.
struct VerifyOptions {
  double eps_psd = 1e-9;  // eigenvalue floor tolerated before projection
  bool exact = false;
};

struct ConstraintCheck {
  std::string label;
  bool ok = false;
  double residual = 0.0;  // coefficient-l1 of the identity residual
  double gamma = 0.0;
  double min_gram_eigenvalue = 0.0;
  std::string diagnostic;
};

struct CheckReport {
  bool verified = false;
  std::vector<ConstraintCheck> constraints;
  std::string diagnostic;  // structural problems that preempt the checks
};

// Independently re-derives every separation constraint from the scene and
// plan, then tests the certificate's decomposition identity against its
// slack: Verified iff for each constraint the Grams are PSD (after clamping
// eigenvalues above -eps_psd to zero) and the reconstruction residual's
// coefficient-l1 norm is at most gamma, which bounds |residual(t)| on [0,1].
CheckReport verify_certificate(const Certificate& cert,
                               const KinematicChain& chain,
                               const ConvexBody& body_a,
                               const ConvexBody& body_b,
                               const PlanSegment& segment,
                               const VerifyOptions& opts = {});

// Single-identity checks against an explicit target, used by the full
// verification above and directly testable: the target's degree selects the
// decomposition shape, the stored Grams must be PSD, and the reconstruction
// must match the target within the slack.
ConstraintCheck check_scalar_identity(const Polynomial<double>& target,
                                      const CertificateConstraint& stored,
                                      const VerifyOptions& opts = {});
ConstraintCheck check_matrix_identity(
    const std::vector<std::vector<Polynomial<double>>>& target,
    const CertificateConstraint& stored, const VerifyOptions& opts = {});

struct FalsifyReport {
  bool collision_found = false;
  long long samples_used = 0;
  // populated when a collision was found:
  int segment = -1;
  double t = 0.0;
  CollisionPair pair;
  std::map<VarId, double> config;  // TC-space witness
  double min_distance = 0.0;
};

// Evaluates numeric forward kinematics at `samples_per_segment` uniform
// parameters per segment and reports the first pair with distance <= 0, in
// deterministic (segment, sample, pair) scan order.
FalsifyReport sample_falsify(const MotionPlan& plan, const Scene& scene,
                             int samples_per_segment);

struct CertifyOptions {
  int hyperplane_degree = 1;
  int jobs = 1;
  bool early_stop = false;
  bool exact_verify = false;
  double gamma_min = 1e-6;
  SolveOptions solver = {};
};

struct CellResult {
  int segment = 0;
  int pair_index = 0;
  bool skipped = false;  // early-stop left this cell unsolved
  SolveStatus solve_status = SolveStatus::Unknown;
  bool verified = false;
  double solve_seconds = 0.0;
  int iterations = 0;
  Certificate certificate;  // meaningful when solve_status == Feasible
  CheckReport check;
  std::string note;
};

struct PlanReport {
  bool safe = false;
  int segments = 0;
  int pairs = 0;
  std::vector<CellResult> cells;  // sorted by (segment, pair_index)
};

// Solves one feasibility program per (segment, pair) cell, verifies each
// feasible certificate, and answers SAFE only when every cell is both
// Feasible and Verified.  Cells are independent and run on `jobs` threads;
// the report order is deterministic.
PlanReport certify_plan(const MotionPlan& plan, const Scene& scene,
                        const CertifyOptions& opts = {});

}  // namespace pathcert
