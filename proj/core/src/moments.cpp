#include "zeta_ladder/moments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

#include "zeta_ladder/errors.hpp"
#include "zeta_ladder/fingerprint.hpp"

namespace zeta_ladder {

struct MomentTable::State {
  // extend_mutex serializes the (possibly long) extension work; snap_mutex
  // only guards the snapshot pointer, so readers never wait on extensions.
  mutable std::mutex extend_mutex;
  mutable std::mutex snap_mutex;
  std::shared_ptr<const std::vector<double>> checkpoints;  // I at k*dT

  std::shared_ptr<const std::vector<double>> snapshot() const {
    std::lock_guard lk(snap_mutex);
    return checkpoints;
  }
  void publish(std::shared_ptr<const std::vector<double>> next) {
    std::lock_guard lk(snap_mutex);
    checkpoints = std::move(next);
  }
};

MomentTable::MomentTable(std::shared_ptr<Z4PanelLattice> lattice,
                         const PanelPolicy& policy, double dT)
    : lattice_(std::move(lattice)), policy_(policy), dT_(dT),
      state_(std::make_shared<State>()) {
  policy_.validate();
  if (!(dT_ > 0.0) || !std::isfinite(dT_)) {
    throw DomainError("MomentTable: dT must be positive and finite");
  }
  fingerprint_ = fnv1a64("moments|" +
                         fingerprint_hex(lattice_->evaluator().fingerprint()) +
                         "|" + policy_.canonical() + "|dT=" + canonical_double(dT_));
  auto init = std::make_shared<std::vector<double>>(1, 0.0);
  state_->publish(std::move(init));
}

void MomentTable::check_domain(double T) const {
  if (!std::isfinite(T) || T < 0.0) {
    throw DomainError("fourth_moment: T must be finite and >= 0");
  }
}

void MomentTable::extend_to(double T) const {
  check_domain(T);
  auto need = static_cast<std::size_t>(std::floor(T / dT_)) + 1;
  std::lock_guard lk(state_->extend_mutex);
  auto cur = state_->snapshot();
  if (cur->size() >= need + 1) return;
  auto next = std::make_shared<std::vector<double>>(*cur);
  next->reserve(need + 1);
  while (next->size() < need + 1) {
    double lo = (next->size() - 1) * dT_;
    double hi = next->size() * dT_;
    QuadratureResult q = lattice_->integrate(quad::Weight{}, lo, hi, policy_);
    next->push_back(next->back() + q.value);
  }
  state_->publish(std::move(next));
}

double MomentTable::fourth_moment(double T) const {
  check_domain(T);
  extend_to(T);
  auto snap = state_->snapshot();
  auto k = static_cast<std::size_t>(std::floor(T / dT_));
  double anchor_t = k * dT_;
  double base = (*snap)[k];
  if (T == anchor_t) return base;
  QuadratureResult q = lattice_->integrate(quad::Weight{}, anchor_t, T, policy_);
  return base + q.value;
}

std::size_t MomentTable::rows() const { return state_->snapshot()->size(); }

void MomentTable::save(const std::filesystem::path& path) const {
  auto snap = state_->snapshot();
  std::ostringstream out;
  out << "zeta-ladder-moments v1 dT=" << canonical_double(dT_)
      << " fingerprint=" << fingerprint_hex(fingerprint_) << "\n";
  out << "T,I4\n";
  for (std::size_t k = 0; k < snap->size(); ++k) {
    out << canonical_double(k * dT_) << "," << canonical_double((*snap)[k]) << "\n";
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw CacheError(CacheError::Kind::io,
                     "save_table: cannot open " + path.string() + " for writing");
  }
  f << out.str();
  if (!f.good()) {
    throw CacheError(CacheError::Kind::io, "save_table: write failed for " +
                                               path.string());
  }
}

MomentTable MomentTable::load(const std::filesystem::path& path,
                              std::shared_ptr<Z4PanelLattice> lattice,
                              const PanelPolicy& policy, double expected_dT) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw CacheError(CacheError::Kind::io,
                     "load_table: cannot open " + path.string());
  }
  std::string header;
  if (!std::getline(f, header)) {
    throw CacheError(CacheError::Kind::corrupt, "load_table: empty file");
  }
  int version = 0;
  char fphex[33] = {0};
  double dT = 0.0;
  if (std::sscanf(header.c_str(), "zeta-ladder-moments v%d dT=%lf fingerprint=%32s",
                  &version, &dT, fphex) != 3) {
    throw CacheError(CacheError::Kind::corrupt,
                     "load_table: malformed header line: " + header);
  }
  if (version != 1) {
    throw CacheError(CacheError::Kind::version_mismatch,
                     "load_table: unsupported format version " +
                         std::to_string(version));
  }
  MomentTable table(std::move(lattice), policy, expected_dT);
  if (dT != table.dT_) {
    throw CacheError(CacheError::Kind::fingerprint_mismatch,
                     "load_table: dT " + canonical_double(dT) +
                         " does not match expected " + canonical_double(table.dT_));
  }
  if (std::string(fphex) != fingerprint_hex(table.fingerprint_)) {
    throw CacheError(CacheError::Kind::fingerprint_mismatch,
                     "load_table: fingerprint " + std::string(fphex) +
                         " does not match configuration " +
                         fingerprint_hex(table.fingerprint_));
  }
  std::string line;
  if (!std::getline(f, line) || line != "T,I4") {
    throw CacheError(CacheError::Kind::corrupt,
                     "load_table: missing T,I4 column header");
  }
  auto rows = std::make_shared<std::vector<double>>();
  std::size_t k = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    double T = 0.0, I = 0.0;
    if (std::sscanf(line.c_str(), "%lf,%lf", &T, &I) != 2) {
      throw CacheError(CacheError::Kind::corrupt,
                       "load_table: malformed row: " + line);
    }
    if (T != k * table.dT_) {
      throw CacheError(CacheError::Kind::corrupt,
                       "load_table: row " + std::to_string(k) +
                           " has T = " + canonical_double(T) + ", expected " +
                           canonical_double(k * table.dT_));
    }
    if (k == 0 && I != 0.0) {
      throw CacheError(CacheError::Kind::corrupt,
                       "load_table: first checkpoint must be (0, 0)");
    }
    if (k > 0 && I < rows->back()) {
      throw CacheError(CacheError::Kind::corrupt,
                       "load_table: I column decreases at row " + std::to_string(k));
    }
    rows->push_back(I);
    ++k;
  }
  if (rows->empty()) {
    throw CacheError(CacheError::Kind::corrupt, "load_table: no checkpoint rows");
  }
  table.state_->publish(std::move(rows));
  return table;
}

double ingham_main(double T) {
  if (!(T > 1.0) || !std::isfinite(T)) {
    throw DomainError("ingham_main: T must be > 1");
  }
  double l = std::log(T);
  double l2 = l * l;
  return T * l2 * l2 / (2.0 * std::numbers::pi * std::numbers::pi);
}

}  // namespace zeta_ladder
