#include "zeta_ladder/detail/z4_lattice.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <vector>

#include "zeta_ladder/errors.hpp"
#include "zeta_ladder/fingerprint.hpp"

namespace zeta_ladder {

struct Z4PanelLattice::Chunk {
  static constexpr std::size_t kSize = 65536;
  // panel i spans [bounds[i], bounds[i+1]]
  std::vector<double> bounds;
  std::vector<quad::PanelData> data;
};

struct Z4PanelLattice::State {
  static constexpr std::size_t kMaxChunks = 4096;
  std::vector<std::unique_ptr<Chunk>> chunks;  // capacity reserved, never moved
  std::atomic<std::size_t> published_panels{0};
  double top_boundary = 0.0;  // writer-only
  std::mutex extend_mutex;
  State() { chunks.reserve(kMaxChunks); }
};

Z4PanelLattice::Z4PanelLattice(std::shared_ptr<const ZEvaluator> evaluator,
                               const PanelPolicy& policy,
                               std::shared_ptr<ThreadPool> pool)
    : evaluator_(std::move(evaluator)),
      policy_(policy),
      pool_(std::move(pool)),
      state_(std::make_unique<State>()) {
  policy_.validate();
  max_width_ = panel_width_bound(0.0, policy_);
  fingerprint_ = fnv1a64("z4lat|" + fingerprint_hex(evaluator_->fingerprint()) +
                         "|gl=" + std::to_string(policy_.gl_order) +
                         "|ppo=" + canonical_double(policy_.panels_per_oscillation));
}

Z4PanelLattice::~Z4PanelLattice() = default;

std::size_t Z4PanelLattice::panels_filled() const {
  return state_->published_panels.load(std::memory_order_acquire);
}

void Z4PanelLattice::ensure_coverage(double b) const {
  State& st = *state_;
  std::size_t have = st.published_panels.load(std::memory_order_acquire);
  if (have > 0) {
    const Chunk& last = *st.chunks[(have - 1) / Chunk::kSize];
    std::size_t in_chunk = (have - 1) % Chunk::kSize;
    if (last.bounds[in_chunk + 1] >= b) return;
  }
  std::lock_guard lk(st.extend_mutex);
  const quad::GLRule* lo = &quad::gl_rule(policy_.gl_order);
  const quad::GLRule* hi = &quad::gl_rule(2 * policy_.gl_order);
  while (st.top_boundary < b) {
    if (st.chunks.size() >= State::kMaxChunks) {
      throw ConvergenceError("Z4PanelLattice: panel capacity exhausted",
                             std::numeric_limits<double>::quiet_NaN(),
                             std::numeric_limits<double>::infinity());
    }
    auto chunk = std::make_unique<Chunk>();
    chunk->bounds.resize(Chunk::kSize + 1);
    chunk->data.resize(Chunk::kSize);
    double t = st.top_boundary;
    chunk->bounds[0] = t;
    for (std::size_t i = 0; i < Chunk::kSize; ++i) {
      t += panel_width_bound(t, policy_);
      chunk->bounds[i + 1] = t;
    }
    Chunk* cp = chunk.get();
    const ZEvaluator& ev = *evaluator_;
    auto fill = [cp, &ev, lo, hi](std::size_t i) {
      double c = 0.5 * (cp->bounds[i] + cp->bounds[i + 1]);
      double h = 0.5 * (cp->bounds[i + 1] - cp->bounds[i]);
      quad::BlockEval be = [&ev](std::span<const double> tt, std::span<double> out) {
        ev.z4_block(tt, out);
      };
      cp->data[i] = quad::compute_panel(be, c, h, *lo, *hi);
    };
    if (pool_) {
      pool_->parallel_for(Chunk::kSize, fill);
    } else {
      for (std::size_t i = 0; i < Chunk::kSize; ++i) fill(i);
    }
    st.top_boundary = t;
    st.chunks.push_back(std::move(chunk));
    st.published_panels.store(st.chunks.size() * Chunk::kSize,
                              std::memory_order_release);
  }
}

namespace {

class LatticeProvider final : public quad::PanelProvider {
 public:
  LatticeProvider(const std::vector<std::unique_ptr<Z4PanelLattice::Chunk>>& chunks,
                  double a, double b, std::size_t first_full, std::size_t n_full,
                  bool head, double head_hi, bool tail, double tail_lo)
      : chunks_(chunks),
        a_(a),
        b_(b),
        first_full_(first_full),
        n_full_(n_full),
        head_(head),
        head_hi_(head_hi),
        tail_(tail),
        tail_lo_(tail_lo) {}

  std::size_t count() const override {
    return n_full_ + (head_ ? 1 : 0) + (tail_ ? 1 : 0);
  }

  void panel(std::size_t i, double& c, double& h) const override {
    if (head_ && i == 0) {
      c = 0.5 * (a_ + head_hi_);
      h = 0.5 * (head_hi_ - a_);
      return;
    }
    std::size_t k = i - (head_ ? 1 : 0);
    if (k < n_full_) {
      std::size_t idx = first_full_ + k;
      const auto& ch = *chunks_[idx / Z4PanelLattice::Chunk::kSize];
      std::size_t j = idx % Z4PanelLattice::Chunk::kSize;
      c = 0.5 * (ch.bounds[j] + ch.bounds[j + 1]);
      h = 0.5 * (ch.bounds[j + 1] - ch.bounds[j]);
      return;
    }
    c = 0.5 * (tail_lo_ + b_);
    h = 0.5 * (b_ - tail_lo_);
  }

  const quad::PanelData* cached(std::size_t i) const override {
    if (head_ && i == 0) return nullptr;
    std::size_t k = i - (head_ ? 1 : 0);
    if (k >= n_full_) return nullptr;
    std::size_t idx = first_full_ + k;
    const auto& ch = *chunks_[idx / Z4PanelLattice::Chunk::kSize];
    return &ch.data[idx % Z4PanelLattice::Chunk::kSize];
  }

 private:
  const std::vector<std::unique_ptr<Z4PanelLattice::Chunk>>& chunks_;
  double a_, b_;
  std::size_t first_full_, n_full_;
  bool head_;
  double head_hi_;
  bool tail_;
  double tail_lo_;
};

}  // namespace

QuadratureResult Z4PanelLattice::integrate(const quad::Weight& wt, double a,
                                           double b,
                                           const PanelPolicy& policy) const {
  policy.validate();
  if (policy.gl_order != policy_.gl_order ||
      policy.panels_per_oscillation != policy_.panels_per_oscillation) {
    throw DomainError("Z4PanelLattice: policy panel shape differs from lattice");
  }
  if (!std::isfinite(a) || !std::isfinite(b) || !(0.0 <= a) || !(a <= b)) {
    throw DomainError("Z4PanelLattice: need finite 0 <= a <= b");
  }
  if (wt.inv_x > 0.0 && 1.0 / (8.0 * wt.inv_x) < max_width_) {
    throw DomainError("Z4PanelLattice: weight scale too small for lattice panels");
  }
  ensure_coverage(b);

  const State& st = *state_;
  std::size_t npanels = st.published_panels.load(std::memory_order_acquire);
  auto boundary = [&](std::size_t i) {  // i in [0, npanels]
    if (i == npanels) {
      return st.chunks[(npanels - 1) / Chunk::kSize]->bounds[Chunk::kSize];
    }
    return st.chunks[i / Chunk::kSize]->bounds[i % Chunk::kSize];
  };
  // panel index containing a: bounds[ia] <= a < bounds[ia+1]
  std::size_t lo = 0, hi = npanels;
  while (lo + 1 < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (boundary(mid) <= a) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  std::size_t ia = lo;
  lo = ia;
  hi = npanels;
  while (lo + 1 < hi) {  // bounds[ib] < b <= bounds[ib+1]
    std::size_t mid = (lo + hi) / 2;
    if (boundary(mid) < b) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  std::size_t ib = lo;

  quad::BlockEval be = [this](std::span<const double> tt, std::span<double> out) {
    evaluator_->z4_block(tt, out);
  };

  if (ia == ib) {
    // both endpoints inside one lattice panel: single fresh panel
    LatticeProvider provider(st.chunks, a, b, 0, 0, true, b, false, 0.0);
    return quad::run_panels(provider, be, wt, policy, b - a, pool_.get());
  }

  bool head = a > boundary(ia);
  std::size_t first_full = head ? ia + 1 : ia;
  double head_hi = boundary(ia + 1);
  bool tail = b < boundary(ib + 1);
  std::size_t last_full_plus1 = tail ? ib : ib + 1;
  std::size_t n_full =
      last_full_plus1 > first_full ? last_full_plus1 - first_full : 0;
  LatticeProvider provider(st.chunks, a, b, first_full, n_full, head, head_hi,
                           tail, boundary(ib));
  return quad::run_panels(provider, be, wt, policy, b - a, pool_.get());
}

}  // namespace zeta_ladder
