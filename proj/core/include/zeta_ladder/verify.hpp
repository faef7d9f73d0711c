#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "zeta_ladder/ladder.hpp"

namespace zeta_ladder {

// One checked instance of a formula: parameters, both sides, their ratio,
// named diagnostics, and whether a failure here is hard (identities,
// brackets, residuals) or soft (asymptotic bands and trends).
struct VerifyRow {
  std::vector<std::pair<std::string, double>> params;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  std::vector<std::pair<std::string, double>> aux;
  std::string check;  // human-readable pass condition
  bool hard = false;
  bool pass = true;
};

struct VerificationReport {
  std::string name;
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<VerifyRow> rows;

  bool hard_pass() const;
  bool soft_pass() const;
};

// Closed-form main terms (exposed separately so they are checkable on their
// own at any argument).
double theorem_main_term(double T, double U);   // U ln^8(T) / (4 pi^4)
double laplace_main_term(double delta);         // (1/delta) ln^4(1/delta) / (2 pi^2)

// Eighth-order integral check: LHS_direct over the reverse interval vs the
// change-of-variable form and the main term. U = T^{13/14 + 2 epsilon},
// capped at T/2 (cap recorded). T >= 1000.
VerificationReport verify_theorem(double T, double epsilon,
                                  const LadderContext& ctx);

// phi2(T) - T rows with the T/ln T normalization and the |phi2-T| <= T/4
// bracket check.
VerificationReport verify_lemma_phi2_near_T(const std::vector<double>& grid,
                                            const LadderContext& ctx);

// Truncated Laplace integral against its leading term, plus the
// polynomial-form consistency row at T = M2(1/delta).
VerificationReport verify_laplace(const std::vector<double>& deltas,
                                  const LadderContext& ctx);

// Phi2''(phi2(T)) against the ln^4 T (ln ln T)^2 / T scale, with the Q-part
// bound constant reported.
VerificationReport verify_phi2pp_bound(const std::vector<double>& grid,
                                       const LadderContext& ctx);

// Chord slope rows (T, U, tan alpha2, (tan alpha2 - 1) ln T).
VerificationReport verify_chord(
    const std::vector<std::pair<double, double>>& grid, const LadderContext& ctx);

// Structured text format: top-level fields name, meta, rows; flat row
// records; numbers at 17 significant digits.
void write_structured(const VerificationReport& report, std::ostream& out);
void write_csv(const VerificationReport& report, std::ostream& out);

}  // namespace zeta_ladder
