#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ewfrag/composition.hpp"

namespace ewfrag {

using Block = std::vector<int>;

// Partition of [n] = {1..n}. Stored canonically: labels sorted inside each
// block, blocks sorted by their minimal element. Equality is structural.
class SetPartition {
 public:
  SetPartition(int n, std::vector<Block> blocks);
  static SetPartition single_block(int n);
  static SetPartition singletons(int n);
  // "{1,3|2,4}"
  static SetPartition parse(std::string_view text);

  int n() const { return n_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  // Sizes in canonical block order.
  std::vector<int> block_sizes() const;
  // Index of the block holding `label`.
  int block_of(int label) const;

  std::string to_string() const;

  // Image under the relabeling i -> perm[i-1]; perm is a permutation of [n].
  SetPartition relabel(std::span<const int> perm) const;

  friend bool operator==(const SetPartition&, const SetPartition&) = default;
  friend auto operator<=>(const SetPartition&, const SetPartition&) = default;

 private:
  int n_ = 0;
  std::vector<Block> blocks_;
};

// Blocks kept in the given order (interval order); labels sorted in each block.
class OrderedSetPartition {
 public:
  OrderedSetPartition(int n, std::vector<Block> blocks);
  // "(2,3|1)": same grammar as SetPartition text, parentheses mark the order as significant.
  static OrderedSetPartition parse(std::string_view text);

  int n() const { return n_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  std::vector<int> block_sizes() const;

  SetPartition unordered() const { return SetPartition(n_, blocks_); }
  std::string to_string() const;

  friend bool operator==(const OrderedSetPartition&, const OrderedSetPartition&) = default;

 private:
  int n_ = 0;
  std::vector<Block> blocks_;
};

// Balls-in-boxes labelling: place i of the code receives labels[i-1]; box k
// (the k-th run opened by a 1) becomes the k-th block.
OrderedSetPartition partition_from_labels(const BinaryCode& b, std::span<const int> labels);

inline constexpr int kDefaultEnumerationBound = 10;

// All partitions of [n] in canonical form, each once (restricted growth strings).
std::vector<SetPartition> enumerate_set_partitions(int n, int max_n = kDefaultEnumerationBound);

// All ordered partitions of [n]; used as an exact oracle for small n.
std::vector<OrderedSetPartition> enumerate_ordered_set_partitions(int n, int max_n = 7);

// Intersects p with `subset` and relabels each survivor by its rank in the
// sorted subset, giving a partition of [subset.size()].
SetPartition restrict_partition(const SetPartition& p, std::span<const int> subset);

// True iff every block of `fine` lies inside some block of `coarse`.
bool refines(const SetPartition& fine, const SetPartition& coarse);

// Bell numbers by the triangle recurrence; independent of the enumerator.
std::vector<unsigned long long> bell_numbers(int max_n);

bool is_permutation_of_n(std::span<const int> labels);

}  // namespace ewfrag
