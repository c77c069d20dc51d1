#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace floydlab {

class input_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class precondition_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class resource_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class unsupported_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class construction_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class FactorType { FreeAbelian, Cyclic };

/// One free factor of the modeled free product: Z^rank or Z/order.
struct Factor {
  FactorType type = FactorType::FreeAbelian;
  int rank = 1;   // free abelian rank (>= 1)
  int order = 0;  // cyclic order (>= 2)
  bool peripheral = false;
  std::vector<std::string> names;  // one generator name per axis

  int coord_count() const { return type == FactorType::FreeAbelian ? rank : 1; }
};

/// A signed standard generator: +1/-1 step along one axis of one factor.
/// For Z/2 the single generator is its own inverse.
struct Generator {
  int factor = 0;
  int axis = 0;
  int sign = +1;
  int inverse = 0;  // index of the inverse generator in the table
  std::string name;
};

struct GroupSpec {
  std::vector<Factor> factors;
  std::vector<Generator> generators;  // the symmetric set S, identity excluded

  /// Builds the generator table (and default names) from a factor list.
  static GroupSpec from_factors(std::vector<Factor> factors);
  /// Parses the key-value group description format (see README).
  static GroupSpec parse(const std::string& text);
  static GroupSpec parse_file(const std::string& path);

  int generator_index(const std::string& name) const;  // input_error if unknown
  std::vector<int> peripheral_factors() const;
  bool has_peripheral() const;
  /// True when the Cayley graph is a tree (every factor is Z or Z/2).
  bool is_tree() const;
  /// True when the group is hyperbolic, i.e. no Z^d factor with d >= 2.
  bool is_hyperbolic() const;
};

using ElementId = std::uint32_t;
inline constexpr ElementId kNoElement = 0xFFFFFFFFu;

/// One syllable of a normal form, viewing into pool storage.
/// FreeAbelian(d): coords = d integers, not all zero.
/// Cyclic(n): coords = one residue in 1..n-1.
struct SyllableRef {
  std::int32_t factor;
  std::span<const std::int32_t> coords;
};

/// Interning pool for group elements in free-product normal form.
///
/// An element is encoded as an int32 stream [f0, c0...,  f1, c1..., ...]
/// with adjacent factors distinct and no syllable equal to the factor
/// identity. The empty stream is the group identity. Normal forms are unique,
/// so ElementId equality is group equality.
///
/// intern() is an insert-or-get guarded by a mutex, and storage is chunked so
/// existing elements stay valid while new ones are added: threads may read
/// interned elements and intern new ones concurrently. find() bypasses the
/// lock and must not run concurrently with intern().
class ElementPool {
 public:
  explicit ElementPool(GroupSpec spec, std::size_t element_cap = 80'000'000);

  const GroupSpec& spec() const { return spec_; }
  ElementId identity() const { return 0; }
  std::size_t size() const { return count_; }

  ElementId intern(std::span<const std::int32_t> normal_form);
  std::optional<ElementId> find(std::span<const std::int32_t> normal_form) const;

  std::span<const std::int32_t> data(ElementId e) const {
    const Record& r = records_[e >> kRecordShift][e & kRecordMask];
    return {r.ptr, r.size};
  }
  std::uint32_t length(ElementId e) const {
    return records_[e >> kRecordShift][e & kRecordMask].word_length;
  }
  int syllable_count(ElementId e) const;
  SyllableRef syllable(ElementId e, int i) const;
  SyllableRef last_syllable(ElementId e) const;

  ElementId mul(ElementId a, ElementId b);
  ElementId mul_gen(ElementId a, int gen);
  ElementId inverse(ElementId a);
  /// Normal form of a generator word; a homomorphism from free words.
  ElementId normalize(std::span<const int> letters);
  ElementId drop_last_syllable(ElementId a);

  /// Product into a caller buffer without interning (parallel-safe).
  void mul_raw(ElementId a, int gen, std::vector<std::int32_t>& out) const;
  void mul_raw(ElementId a, ElementId b, std::vector<std::int32_t>& out) const;
  void inverse_raw(ElementId a, std::vector<std::int32_t>& out) const;
  std::uint32_t length_raw(std::span<const std::int32_t> normal_form) const;
  /// d(1, a*b) without materializing the product.
  std::uint32_t length_of_product(ElementId a, ElementId b) const;
  std::uint32_t length_of_product_raw(ElementId a,
                                      std::span<const std::int32_t> b) const;
  /// True iff d(1, a*b) = d(1,a) + d(1,b), i.e. some geodesic [1, ab] passes a.
  bool geodesic_concat(ElementId a, ElementId b) const;
  std::uint32_t distance(ElementId a, ElementId b) const;

  /// Canonical total order on normal forms (lexicographic on the stream).
  int compare(ElementId a, ElementId b) const;

  /// Canonical geodesic spelling: per syllable, axes in order, then sign runs.
  std::vector<int> canonical_word(ElementId e) const;
  std::string to_string(ElementId e) const;
  ElementId parse_word(const std::string& text);  // whitespace separated names

 private:
  static constexpr int kRecordShift = 16;
  static constexpr std::uint32_t kRecordMask = (1u << kRecordShift) - 1;
  static constexpr std::size_t kStreamChunk = 1u << 20;

  struct Record {
    const std::int32_t* ptr;
    std::uint32_t size;
    std::uint32_t word_length;
  };

  std::uint32_t syllable_len(std::int32_t factor,
                             std::span<const std::int32_t> coords) const;
  void grow_table();
  std::optional<ElementId> probe(std::span<const std::int32_t> nf,
                                 std::uint64_t h) const;
  const std::int32_t* arena_store(std::span<const std::int32_t> nf);

  GroupSpec spec_;
  std::size_t cap_;
  std::size_t count_ = 0;
  // chunked, pointer-stable storage: outer vectors are sized at construction
  std::vector<std::unique_ptr<Record[]>> records_;
  std::vector<std::unique_ptr<std::int32_t[]>> stream_chunks_;
  std::size_t stream_used_ = kStreamChunk + 1;  // forces a fresh chunk
  std::size_t stream_chunk_count_ = 0;
  // open-addressing table: id+1 (0 = empty) and cached hash
  std::vector<std::uint32_t> slot_id_;
  std::vector<std::uint32_t> slot_hash_;
  std::size_t table_mask_ = 0;
  mutable std::mutex intern_mutex_;
};

/// A left coset g*P of a peripheral factor subgroup (a horosphere).
/// Canonical representative: strip any trailing syllable in that factor.
struct Coset {
  ElementId rep;
  int factor;
  bool operator==(const Coset& o) const { return rep == o.rep && factor == o.factor; }
};

struct CosetHash {
  std::size_t operator()(const Coset& c) const {
    return std::size_t(c.rep) * 1000003u + std::size_t(c.factor);
  }
};

std::uint32_t syllable_length(const Factor& f, std::span<const std::int32_t> coords);

Coset make_coset(ElementPool& pool, ElementId g, int factor);

struct CosetGeometry {
  std::uint32_t distance;
  std::vector<ElementId> nearest;  // the full projection set proj_c(h)
};

/// Distance from h to the coset c and the set of nearest coset points,
/// in closed form from the normal form of rep^-1 * h.
CosetGeometry coset_geometry(ElementPool& pool, ElementId h, const Coset& c);

/// Cosets of peripheral factors within distance eps of g (finitely many).
std::vector<Coset> nearby_peripheral_cosets(ElementPool& pool, ElementId g, int eps);

}  // namespace floydlab
