#pragma once

// Computable groups with normal forms. Elements are integer vectors whose
// meaning depends on the group (see each built-in).

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace coarsekit {

using Element = std::vector<std::int64_t>;

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (std::int64_t x : e) {
      h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h ^ e.size();
  }
};

using ElementSet = std::unordered_set<Element, ElementHash>;
template <class T>
using ElementMap = std::unordered_map<Element, T, ElementHash>;

class GroupOracle {
 public:
  virtual ~GroupOracle() = default;

  virtual std::string name() const = 0;
  virtual Element identity() const = 0;
  /// Symmetric generating set, in a fixed order.
  virtual std::vector<Element> generators() const = 0;
  /// Product a·b of normal forms.
  virtual Element multiply(const Element& a, const Element& b) const = 0;
  virtual Element invert(const Element& a) const = 0;
  /// Reduces an arbitrary encoding; throws Error on invalid input.
  virtual Element normal_form(const Element& a) const = 0;
  /// Word length with respect to generators().
  virtual std::int64_t word_length(const Element& a) const = 0;
  virtual std::string to_string(const Element& a) const;

  /// Elements of word length ≤ radius, in breadth-first order over
  /// generators().
  std::vector<Element> ball(std::int64_t radius) const;
};

using GroupRef = std::shared_ptr<const GroupOracle>;

/// ℤⁿ as integer tuples; generators +e₁, -e₁, +e₂, ... ; ℤ⁰ is trivial.
GroupRef make_zn(std::size_t rank);
/// Free group F_k; reduced words over ±1..±k; generators 1, -1, 2, -2, ...
GroupRef make_free(std::size_t rank);
/// Free product of k copies of ℤ/2; words over 0..k-1 without repeated
/// neighbours. Its Cayley graph is the k-regular tree.
GroupRef make_z2_free_product(std::size_t k);
/// Infinite dihedral group: (k, s) acts on ℤ by n -> (-1)^s n + k.
/// Generators (1,0), (-1,0), (0,1).
GroupRef make_infinite_dihedral();
/// Permutation group on {0..m-1} generated by the given image vectors.
GroupRef make_permutation_group(std::size_t points, const std::vector<Element>& generators);

/// Parses "zn:2", "free:2", "z2star:3", "dinf", "perm:3:1,0,2;0,2,1".
GroupRef make_group(const std::string& spec);

}  // namespace coarsekit
