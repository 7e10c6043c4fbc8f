#pragma once
// Linear algebra over the two-element field, packed 64 columns per word,
// plus finite chains of spaces with transition maps and their direct and
// inverse limits. The chains stand in for cofinal one-parameter families of
// Hamiltonians: once a tail of the chain consists of isomorphisms, the limit
// is realized at the end of the finite stretch, and that is how every limit
// in this codebase gets evaluated.

#include <cstdint>
#include <vector>

namespace hamlab {

struct GF2Space {
  int dimension = 0;
};

inline bool operator==(const GF2Space& a, const GF2Space& b) {
  return a.dimension == b.dimension;
}

// Bit matrix representing a linear map between GF2 spaces. Rows index the
// target basis, columns the source basis; each row is packed into 64-bit
// words so elimination and composition run on whole words.
class GF2Map {
 public:
  GF2Map() = default;
  GF2Map(GF2Space source, GF2Space target);  // zero map

  static GF2Map identity(GF2Space s);
  static GF2Map zero(GF2Space source, GF2Space target);
  // Uniform random matrix; deterministic in (seed, stream).
  static GF2Map random_map(GF2Space source, GF2Space target, std::uint64_t seed,
                           std::uint64_t stream = 0);

  const GF2Space& source() const { return source_; }
  const GF2Space& target() const { return target_; }
  int rows() const { return target_.dimension; }
  int cols() const { return source_.dimension; }

  bool get(int r, int c) const;
  void set(int r, int c, bool v);

  int rank() const;
  bool is_zero() const;
  // Isomorphism = square and full rank. The map between two zero spaces is
  // an isomorphism under this definition; callers tracking nonvanishing must
  // test dimension separately.
  bool is_iso() const;

  friend GF2Map compose(const GF2Map& outer, const GF2Map& inner);
  friend bool operator==(const GF2Map& a, const GF2Map& b);

 private:
  GF2Space source_, target_;
  int words_ = 0;  // words per row
  std::vector<std::uint64_t> bits_;
};

// outer after inner: source(inner) -> target(outer); shapes must chain.
GF2Map compose(const GF2Map& outer, const GF2Map& inner);
bool operator==(const GF2Map& a, const GF2Map& b);

// A finite chain of spaces over an ordered real parameter grid. Transition
// maps point toward the smaller parameter: maps[i] sends spaces[i + 1] to
// spaces[i]. In the Hamiltonian ordering used here, smaller parameter means
// larger function, which is the direction monotone continuation maps travel;
// the direct limit therefore lives at the front of the grid and the inverse
// limit at the back. iso[i] records whether maps[i] is an isomorphism; the
// flags are audit data set by the builder (no action value crosses the
// window edge between the two members) and validate() checks them against
// the matrices.
struct BidirectedSystem {
  std::vector<double> grid;      // strictly increasing parameter values
  std::vector<GF2Space> spaces;  // spaces[i] sits over grid[i]
  std::vector<GF2Map> maps;      // maps[i]: spaces[i + 1] -> spaces[i]
  std::vector<bool> iso;         // one flag per map

  void validate() const;  // throws std::invalid_argument on any mismatch
};

// Composite of transitions from index `from` down to index `to` (to <= from);
// equals the identity on spaces[from] when to == from. A chain has only one
// path between two indices, so path independence is trivial; this is the
// audit form of that statement.
GF2Map composite_toward_front(const BidirectedSystem& sys, int from, int to);

struct LimitResult {
  GF2Space space;
  int anchor = 0;                  // grid index where the limit is realized
  std::vector<int> subchain;       // the indices used, as passed in
  std::vector<GF2Map> canonical;   // one map per subchain index
  std::vector<bool> canonical_iso;
};

// Colimit of the chain restricted to `subchain` (strictly increasing grid
// indices). Arrows point toward the front, so the colimit is the space at
// subchain.front() and the canonical map from subchain[j] is the composite
// of transitions down to the front. When the subchain transitions are all
// isomorphisms (an exhausting tail), every canonical map is an isomorphism.
LimitResult direct_limit(const BidirectedSystem& sys,
                         const std::vector<int>& subchain);

// Limit of the same restriction: realized at subchain.back(), with the
// canonical projection to subchain[j] given by the composite of transitions
// from the back down to j. Dual tail behavior: all transitions iso means
// every projection is an isomorphism.
LimitResult inverse_limit(const BidirectedSystem& sys,
                          const std::vector<int>& subchain);

}  // namespace hamlab
