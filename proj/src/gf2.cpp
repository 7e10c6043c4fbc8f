#include "hamlab/gf2.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "hamlab/kernels.hpp"
#include "hamlab/rng.hpp"

namespace hamlab {

namespace {

int words_for(int cols) { return (cols + 63) / 64; }

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("gf2: ") + what);
}

}  // namespace

GF2Map::GF2Map(GF2Space source, GF2Space target)
    : source_(source),
      target_(target),
      words_(words_for(source.dimension)),
      bits_(static_cast<std::size_t>(target.dimension) * words_, 0) {
  require(source.dimension >= 0 && target.dimension >= 0,
          "negative dimension");
}

GF2Map GF2Map::identity(GF2Space s) {
  GF2Map m(s, s);
  for (int i = 0; i < s.dimension; ++i) m.set(i, i, true);
  return m;
}

GF2Map GF2Map::zero(GF2Space source, GF2Space target) {
  return GF2Map(source, target);
}

GF2Map GF2Map::random_map(GF2Space source, GF2Space target, std::uint64_t seed,
                          std::uint64_t stream) {
  GF2Map m(source, target);
  CounterRng rng{seed, stream};
  std::uint64_t counter = 0;
  for (int r = 0; r < m.rows(); ++r) {
    for (int w = 0; w < m.words_; ++w)
      m.bits_[static_cast<std::size_t>(r) * m.words_ + w] = rng.bits(counter++);
    // Mask the slack bits past the last column so equality stays bitwise.
    int tail = m.cols() - (m.words_ - 1) * 64;
    if (m.words_ > 0 && tail < 64)
      m.bits_[static_cast<std::size_t>(r) * m.words_ + m.words_ - 1] &=
          (tail == 0) ? 0ull : (~0ull >> (64 - tail));
  }
  return m;
}

bool GF2Map::get(int r, int c) const {
  return (bits_[static_cast<std::size_t>(r) * words_ + c / 64] >> (c % 64)) & 1u;
}

void GF2Map::set(int r, int c, bool v) {
  std::uint64_t& w = bits_[static_cast<std::size_t>(r) * words_ + c / 64];
  std::uint64_t mask = 1ull << (c % 64);
  if (v)
    w |= mask;
  else
    w &= ~mask;
}

int GF2Map::rank() const {
  if (rows() == 0 || cols() == 0) return 0;
  std::vector<std::uint64_t> work = bits_;
  auto row = [&](int r) { return work.data() + static_cast<std::size_t>(r) * words_; };
  auto bit = [&](int r, int c) -> bool {
    return (row(r)[c / 64] >> (c % 64)) & 1u;
  };
  int pivots = 0;
  for (int c = 0; c < cols() && pivots < rows(); ++c) {
    int p = -1;
    for (int r = pivots; r < rows(); ++r)
      if (bit(r, c)) {
        p = r;
        break;
      }
    if (p < 0) continue;
    if (p != pivots)
      std::swap_ranges(row(p), row(p) + words_, row(pivots));
    for (int r = pivots + 1; r < rows(); ++r)
      if (bit(r, c))
        kern::ops().xor_rows(row(r), row(pivots),
                             static_cast<std::size_t>(words_));
    ++pivots;
  }
  return pivots;
}

bool GF2Map::is_zero() const {
  for (std::uint64_t w : bits_)
    if (w) return false;
  return true;
}

bool GF2Map::is_iso() const {
  return rows() == cols() && rank() == rows();
}

GF2Map compose(const GF2Map& outer, const GF2Map& inner) {
  require(outer.source_ == inner.target_, "compose: shapes do not chain");
  GF2Map out(inner.source_, outer.target_);
  // Row i of the composite is the XOR of inner rows selected by row i of
  // outer; over GF2 this is exactly matrix multiplication.
  for (int i = 0; i < out.rows(); ++i) {
    std::uint64_t* dst = out.bits_.data() + static_cast<std::size_t>(i) * out.words_;
    for (int j = 0; j < outer.cols(); ++j)
      if (outer.get(i, j))
        kern::ops().xor_rows(
            dst, inner.bits_.data() + static_cast<std::size_t>(j) * inner.words_,
            static_cast<std::size_t>(inner.words_));
  }
  return out;
}

bool operator==(const GF2Map& a, const GF2Map& b) {
  return a.source_ == b.source_ && a.target_ == b.target_ && a.bits_ == b.bits_;
}

void BidirectedSystem::validate() const {
  require(!grid.empty(), "system: empty grid");
  require(spaces.size() == grid.size(), "system: spaces/grid size mismatch");
  require(maps.size() + 1 == spaces.size(), "system: need one map per gap");
  require(iso.size() == maps.size(), "system: iso flag per map");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    require(grid[i] < grid[i + 1], "system: grid not strictly increasing");
  for (std::size_t i = 0; i < maps.size(); ++i) {
    require(maps[i].source() == spaces[i + 1] && maps[i].target() == spaces[i],
            "system: map endpoints do not match spaces");
    require(maps[i].is_iso() == static_cast<bool>(iso[i]),
            "system: iso flag disagrees with the matrix");
  }
}

GF2Map composite_toward_front(const BidirectedSystem& sys, int from, int to) {
  require(0 <= to && to <= from && from < static_cast<int>(sys.spaces.size()),
          "composite: index range");
  GF2Map acc = GF2Map::identity(sys.spaces[from]);
  for (int i = from - 1; i >= to; --i) acc = compose(sys.maps[i], acc);
  return acc;
}

namespace {

void check_subchain(const BidirectedSystem& sys, const std::vector<int>& sub) {
  require(!sub.empty(), "limit: empty subchain");
  for (std::size_t j = 0; j < sub.size(); ++j) {
    require(0 <= sub[j] && sub[j] < static_cast<int>(sys.spaces.size()),
            "limit: subchain index out of range");
    if (j + 1 < sub.size())
      require(sub[j] < sub[j + 1], "limit: subchain not strictly increasing");
  }
}

}  // namespace

LimitResult direct_limit(const BidirectedSystem& sys,
                         const std::vector<int>& subchain) {
  check_subchain(sys, subchain);
  LimitResult out;
  out.anchor = subchain.front();
  out.space = sys.spaces[out.anchor];
  out.subchain = subchain;
  for (int idx : subchain) {
    GF2Map canon = composite_toward_front(sys, idx, out.anchor);
    out.canonical_iso.push_back(canon.is_iso());
    out.canonical.push_back(std::move(canon));
  }
  return out;
}

LimitResult inverse_limit(const BidirectedSystem& sys,
                          const std::vector<int>& subchain) {
  check_subchain(sys, subchain);
  LimitResult out;
  out.anchor = subchain.back();
  out.space = sys.spaces[out.anchor];
  out.subchain = subchain;
  for (int idx : subchain) {
    GF2Map canon = composite_toward_front(sys, out.anchor, idx);
    out.canonical_iso.push_back(canon.is_iso());
    out.canonical.push_back(std::move(canon));
  }
  return out;
}

}  // namespace hamlab
