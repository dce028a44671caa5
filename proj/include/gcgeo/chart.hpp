#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gcgeo {

// One generator of a graded coordinate algebra.  Bidegree (coh, form):
// cohomological degree and form degree.  Total degree decides parity, so a
// generator like dxi with bidegree (1,1) is even and commutes.
struct Generator {
  std::string name;
  int coh = 0;
  int form = 0;

  int degree() const { return coh + form; }
  bool odd() const { return degree() % 2 != 0; }
  bool operator==(const Generator&) const = default;
};

class Chart;
using ChartPtr = std::shared_ptr<const Chart>;

// Immutable list of generators.  Even generators get exponent slots, odd
// generators get bit positions; both in declaration order.
class Chart {
 public:
  static ChartPtr make(std::vector<Generator> gens) {
    return std::make_shared<const Chart>(std::move(gens));
  }

  explicit Chart(std::vector<Generator> gens) : gens_(std::move(gens)) {
    slot_.reserve(gens_.size());
    for (int i = 0; i < static_cast<int>(gens_.size()); ++i) {
      const auto& g = gens_[i];
      if (g.name.empty()) throw std::invalid_argument("unnamed generator");
      if (!by_name_.emplace(g.name, i).second)
        throw std::invalid_argument("duplicate generator '" + g.name + "'");
      if (g.odd()) {
        slot_.push_back(n_odd_++);
        odd_index_.push_back(i);
      } else {
        slot_.push_back(n_even_++);
        even_index_.push_back(i);
      }
      hash_ ^= std::hash<std::string>{}(g.name) + 0x9e3779b97f4a7c15ull +
               (hash_ << 6) + (hash_ >> 2) + 131 * g.coh + 31 * g.form;
    }
    if (n_odd_ > 64) throw std::invalid_argument("more than 64 odd generators");
  }

  int size() const { return static_cast<int>(gens_.size()); }
  int even_count() const { return n_even_; }
  int odd_count() const { return n_odd_; }
  const Generator& gen(int i) const { return gens_.at(i); }
  const std::vector<Generator>& gens() const { return gens_; }

  // Position inside the generator's parity class.
  int slot(int i) const { return slot_.at(i); }
  // Inverse of slot() per parity class.
  int even_gen(int s) const { return even_index_.at(s); }
  int odd_gen(int bit) const { return odd_index_.at(bit); }

  int find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    return it == by_name_.end() ? -1 : it->second;
  }
  int index(std::string_view name) const {
    int i = find(name);
    if (i < 0) throw std::out_of_range("no generator '" + std::string(name) + "'");
    return i;
  }

  bool same(const Chart& other) const {
    if (this == &other) return true;
    return hash_ == other.hash_ && gens_ == other.gens_;
  }

  // New chart with extra generators appended; existing slots are preserved.
  ChartPtr extended(const std::vector<Generator>& extra) const {
    std::vector<Generator> all = gens_;
    all.insert(all.end(), extra.begin(), extra.end());
    return make(std::move(all));
  }

 private:
  std::vector<Generator> gens_;
  std::vector<int> slot_;
  std::vector<int> even_index_;
  std::vector<int> odd_index_;
  std::unordered_map<std::string, int> by_name_;
  int n_even_ = 0;
  int n_odd_ = 0;
  std::size_t hash_ = 0;
};

inline void require_same_chart(const ChartPtr& a, const ChartPtr& b) {
  if (!a || !b || !a->same(*b))
    throw std::invalid_argument("operands live on different charts");
}

}  // namespace gcgeo
