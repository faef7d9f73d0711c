#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>

#include "zeta_ladder/detail/z4_lattice.hpp"
#include "zeta_ladder/quadrature.hpp"

namespace zeta_ladder {

// Cumulative fourth moment I(T) = integral of Z^4 over [0, T], checkpointed
// every dT from (0, 0). Reads are concurrent against immutable snapshots;
// extension is single-writer. A warm cache loaded from disk reproduces cold
// results to the last bit (rows are stored with 17 significant digits).
class MomentTable {
 public:
  MomentTable(std::shared_ptr<Z4PanelLattice> lattice, const PanelPolicy& policy,
              double dT = 1.0);

  // I(T): nearest lower checkpoint plus quadrature over the remainder,
  // extending the table on demand.
  double fourth_moment(double T) const;

  void extend_to(double T) const;
  std::size_t rows() const;
  double dT() const { return dT_; }
  double rel_tol() const { return policy_.rel_tol; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  void save(const std::filesystem::path& path) const;
  static MomentTable load(const std::filesystem::path& path,
                          std::shared_ptr<Z4PanelLattice> lattice,
                          const PanelPolicy& policy, double expected_dT = 1.0);

  const Z4PanelLattice& lattice() const { return *lattice_; }

 private:
  void check_domain(double T) const;

  std::shared_ptr<Z4PanelLattice> lattice_;
  PanelPolicy policy_;
  double dT_;
  std::uint64_t fingerprint_;
  struct State;
  std::shared_ptr<State> state_;
};

// Ingham main term T ln^4(T) / (2 pi^2), T > 1.
double ingham_main(double T);

inline double fourth_moment(double T, const MomentTable& table) {
  return table.fourth_moment(T);
}
inline void save_table(const MomentTable& table, const std::filesystem::path& p) {
  table.save(p);
}
inline MomentTable load_table(const std::filesystem::path& p,
                              std::shared_ptr<Z4PanelLattice> lattice,
                              const PanelPolicy& policy, double expected_dT = 1.0) {
  return MomentTable::load(p, std::move(lattice), policy, expected_dT);
}

}  // namespace zeta_ladder
