#include "coarsekit/group.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <sstream>

#include "coarsekit/error.hpp"

namespace coarsekit {

std::string GroupOracle::to_string(const Element& a) const {
  std::string out = "(";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(a[i]);
  }
  return out + ")";
}

std::vector<Element> GroupOracle::ball(std::int64_t radius) const {
  std::vector<Element> out{identity()};
  ElementSet seen{identity()};
  std::size_t layer_begin = 0;
  for (std::int64_t r = 0; r < radius; ++r) {
    const std::size_t layer_end = out.size();
    for (std::size_t i = layer_begin; i < layer_end; ++i) {
      for (const Element& s : generators()) {
        Element n = multiply(out[i], s);
        if (seen.insert(n).second) out.push_back(std::move(n));
      }
    }
    if (out.size() == layer_end) break;
    layer_begin = layer_end;
  }
  return out;
}

namespace {

class Zn final : public GroupOracle {
 public:
  explicit Zn(std::size_t rank) : rank_(rank) {}
  std::string name() const override { return "zn:" + std::to_string(rank_); }
  Element identity() const override { return Element(rank_, 0); }
  std::vector<Element> generators() const override {
    std::vector<Element> out;
    for (std::size_t i = 0; i < rank_; ++i) {
      Element e(rank_, 0);
      e[i] = 1;
      out.push_back(e);
      e[i] = -1;
      out.push_back(e);
    }
    return out;
  }
  Element multiply(const Element& a, const Element& b) const override {
    Element out(rank_);
    for (std::size_t i = 0; i < rank_; ++i) out[i] = a[i] + b[i];
    return out;
  }
  Element invert(const Element& a) const override {
    Element out(rank_);
    for (std::size_t i = 0; i < rank_; ++i) out[i] = -a[i];
    return out;
  }
  Element normal_form(const Element& a) const override {
    if (a.size() != rank_) throw Error("zn: element has the wrong rank");
    return a;
  }
  std::int64_t word_length(const Element& a) const override {
    std::int64_t s = 0;
    for (std::int64_t x : a) s += std::llabs(x);
    return s;
  }
  std::string to_string(const Element& a) const override {
    if (rank_ == 1) return std::to_string(a[0]);
    return GroupOracle::to_string(a);
  }

 private:
  std::size_t rank_;
};

class FreeGroup final : public GroupOracle {
 public:
  explicit FreeGroup(std::size_t rank) : rank_(rank) {}
  std::string name() const override { return "free:" + std::to_string(rank_); }
  Element identity() const override { return {}; }
  std::vector<Element> generators() const override {
    std::vector<Element> out;
    for (std::int64_t i = 1; i <= static_cast<std::int64_t>(rank_); ++i) {
      out.push_back({i});
      out.push_back({-i});
    }
    return out;
  }
  Element multiply(const Element& a, const Element& b) const override {
    Element out = a;
    for (std::int64_t x : b) {
      if (!out.empty() && out.back() == -x) {
        out.pop_back();
      } else {
        out.push_back(x);
      }
    }
    return out;
  }
  Element invert(const Element& a) const override {
    Element out(a.rbegin(), a.rend());
    for (auto& x : out) x = -x;
    return out;
  }
  Element normal_form(const Element& a) const override {
    for (std::int64_t x : a) {
      if (x == 0 || std::llabs(x) > static_cast<std::int64_t>(rank_)) {
        throw Error("free: letter out of range");
      }
    }
    return multiply({}, a);
  }
  std::int64_t word_length(const Element& a) const override {
    return static_cast<std::int64_t>(a.size());
  }
  std::string to_string(const Element& a) const override {
    if (a.empty()) return "e";
    std::string out;
    for (std::int64_t x : a) {
      out += static_cast<char>('a' + std::llabs(x) - 1);
      if (x < 0) out += "'";
    }
    return out;
  }

 private:
  std::size_t rank_;
};

class Z2FreeProduct final : public GroupOracle {
 public:
  explicit Z2FreeProduct(std::size_t k) : k_(k) {}
  std::string name() const override { return "z2star:" + std::to_string(k_); }
  Element identity() const override { return {}; }
  std::vector<Element> generators() const override {
    std::vector<Element> out;
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(k_); ++i) out.push_back({i});
    return out;
  }
  Element multiply(const Element& a, const Element& b) const override {
    Element out = a;
    for (std::int64_t x : b) {
      if (!out.empty() && out.back() == x) {
        out.pop_back();
      } else {
        out.push_back(x);
      }
    }
    return out;
  }
  Element invert(const Element& a) const override { return Element(a.rbegin(), a.rend()); }
  Element normal_form(const Element& a) const override {
    for (std::int64_t x : a) {
      if (x < 0 || x >= static_cast<std::int64_t>(k_)) throw Error("z2star: letter out of range");
    }
    return multiply({}, a);
  }
  std::int64_t word_length(const Element& a) const override {
    return static_cast<std::int64_t>(a.size());
  }
  std::string to_string(const Element& a) const override {
    if (a.empty()) return "e";
    std::string out;
    for (std::int64_t x : a) out += static_cast<char>('a' + x);
    return out;
  }

 private:
  std::size_t k_;
};

class InfiniteDihedral final : public GroupOracle {
 public:
  std::string name() const override { return "dinf"; }
  Element identity() const override { return {0, 0}; }
  std::vector<Element> generators() const override { return {{1, 0}, {-1, 0}, {0, 1}}; }
  Element multiply(const Element& a, const Element& b) const override {
    const std::int64_t sign = a[1] ? -1 : 1;
    return {a[0] + sign * b[0], a[1] ^ b[1]};
  }
  Element invert(const Element& a) const override {
    // (k,0)^{-1} = (-k,0); (k,1) is an involution.
    return a[1] ? a : Element{-a[0], 0};
  }
  Element normal_form(const Element& a) const override {
    if (a.size() != 2 || (a[1] != 0 && a[1] != 1)) throw Error("dinf: malformed element");
    return a;
  }
  std::int64_t word_length(const Element& a) const override { return std::llabs(a[0]) + a[1]; }
};

class PermutationGroup final : public GroupOracle {
 public:
  PermutationGroup(std::size_t points, std::vector<Element> gens) : points_(points) {
    for (Element& g : gens) {
      check(g);
      gens_.push_back(g);
    }
    for (const Element& g : std::vector<Element>(gens_)) {
      Element inv = invert(g);
      if (std::find(gens_.begin(), gens_.end(), inv) == gens_.end()) gens_.push_back(inv);
    }
    // The whole group with word lengths, breadth first.
    Element id = identity();
    lengths_[id] = 0;
    std::deque<Element> queue{id};
    while (!queue.empty()) {
      Element cur = queue.front();
      queue.pop_front();
      for (const Element& s : gens_) {
        Element n = multiply(cur, s);
        if (lengths_.emplace(n, lengths_[cur] + 1).second) queue.push_back(std::move(n));
      }
    }
  }
  std::string name() const override { return "perm:" + std::to_string(points_); }
  Element identity() const override {
    Element e(points_);
    for (std::size_t i = 0; i < points_; ++i) e[i] = static_cast<std::int64_t>(i);
    return e;
  }
  std::vector<Element> generators() const override { return gens_; }
  // (a·b)(i) = a(b(i)), so that left multiplication composes actions.
  Element multiply(const Element& a, const Element& b) const override {
    Element out(points_);
    for (std::size_t i = 0; i < points_; ++i) out[i] = a[static_cast<std::size_t>(b[i])];
    return out;
  }
  Element invert(const Element& a) const override {
    Element out(points_);
    for (std::size_t i = 0; i < points_; ++i) out[static_cast<std::size_t>(a[i])] = static_cast<std::int64_t>(i);
    return out;
  }
  Element normal_form(const Element& a) const override {
    check(a);
    if (!lengths_.count(a)) throw Error("perm: element not in the generated group");
    return a;
  }
  std::int64_t word_length(const Element& a) const override { return lengths_.at(a); }

 private:
  void check(const Element& g) const {
    if (g.size() != points_) throw Error("perm: permutation has the wrong size");
    std::vector<bool> hit(points_, false);
    for (std::int64_t x : g) {
      if (x < 0 || x >= static_cast<std::int64_t>(points_) || hit[static_cast<std::size_t>(x)]) {
        throw Error("perm: not a permutation");
      }
      hit[static_cast<std::size_t>(x)] = true;
    }
  }

  std::size_t points_;
  std::vector<Element> gens_;
  ElementMap<std::int64_t> lengths_;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

}  // namespace

GroupRef make_zn(std::size_t rank) { return std::make_shared<Zn>(rank); }
GroupRef make_free(std::size_t rank) { return std::make_shared<FreeGroup>(rank); }
GroupRef make_z2_free_product(std::size_t k) { return std::make_shared<Z2FreeProduct>(k); }
GroupRef make_infinite_dihedral() { return std::make_shared<InfiniteDihedral>(); }
GroupRef make_permutation_group(std::size_t points, const std::vector<Element>& generators) {
  return std::make_shared<PermutationGroup>(points, generators);
}

GroupRef make_group(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.empty()) throw Error("group spec is empty");
  try {
    if (parts[0] == "zn" && parts.size() == 2) return make_zn(std::stoul(parts[1]));
    if (parts[0] == "free" && parts.size() == 2) return make_free(std::stoul(parts[1]));
    if (parts[0] == "z2star" && parts.size() == 2) return make_z2_free_product(std::stoul(parts[1]));
    if (parts[0] == "dinf" && parts.size() == 1) return make_infinite_dihedral();
    if (parts[0] == "perm" && parts.size() == 3) {
      std::vector<Element> gens;
      for (const auto& g : split(parts[2], ';')) {
        Element e;
        for (const auto& x : split(g, ',')) e.push_back(std::stoll(x));
        gens.push_back(e);
      }
      return make_permutation_group(std::stoul(parts[1]), gens);
    }
  } catch (const std::logic_error&) {
    throw Error("malformed group spec '" + spec + "'");
  }
  throw Error("unknown group spec '" + spec + "'");
}

}  // namespace coarsekit
