#include "ewfrag/set_partition.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace ewfrag {
namespace {

// Validates that the blocks are disjoint, non-empty and cover [n]; sorts labels.
void normalize_blocks(int n, std::vector<Block>& blocks) {
  if (n < 1) throw std::invalid_argument("partition size must be positive");
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  int count = 0;
  for (auto& block : blocks) {
    if (block.empty()) throw std::invalid_argument("partition blocks must be non-empty");
    std::sort(block.begin(), block.end());
    for (int label : block) {
      if (label < 1 || label > n) throw std::invalid_argument("partition label out of range");
      if (seen[static_cast<std::size_t>(label)]) throw std::invalid_argument("partition label repeated");
      seen[static_cast<std::size_t>(label)] = 1;
      ++count;
    }
  }
  if (count != n) throw std::invalid_argument("partition blocks do not cover [n]");
}

std::vector<Block> parse_blocks(std::string_view text, char open, char close) {
  if (text.size() < 2 || text.front() != open || text.back() != close) {
    throw std::invalid_argument("malformed partition text: " + std::string(text));
  }
  std::string_view body = text.substr(1, text.size() - 2);
  std::vector<Block> blocks(1);
  std::size_t pos = 0;
  while (pos < body.size()) {
    char ch = body[pos];
    if (ch == '|') {
      blocks.emplace_back();
      ++pos;
    } else if (ch == ',') {
      ++pos;
    } else {
      int value = 0;
      auto [ptr, ec] = std::from_chars(body.data() + pos, body.data() + body.size(), value);
      if (ec != std::errc{}) throw std::invalid_argument("malformed partition text: " + std::string(text));
      blocks.back().push_back(value);
      pos = static_cast<std::size_t>(ptr - body.data());
    }
  }
  return blocks;
}

int label_count(const std::vector<Block>& blocks) {
  int total = 0;
  for (const auto& b : blocks) total += static_cast<int>(b.size());
  return total;
}

std::string blocks_to_string(const std::vector<Block>& blocks, char open, char close) {
  std::string out(1, open);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (i) out += '|';
    for (std::size_t j = 0; j < blocks[i].size(); ++j) {
      if (j) out += ',';
      out += std::to_string(blocks[i][j]);
    }
  }
  out += close;
  return out;
}

std::vector<int> sizes_of(const std::vector<Block>& blocks) {
  std::vector<int> sizes;
  sizes.reserve(blocks.size());
  for (const auto& b : blocks) sizes.push_back(static_cast<int>(b.size()));
  return sizes;
}

}  // namespace

SetPartition::SetPartition(int n, std::vector<Block> blocks) : n_(n), blocks_(std::move(blocks)) {
  normalize_blocks(n_, blocks_);
  std::sort(blocks_.begin(), blocks_.end(),
            [](const Block& a, const Block& b) { return a.front() < b.front(); });
}

SetPartition SetPartition::single_block(int n) {
  Block all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i + 1;
  return SetPartition(n, {std::move(all)});
}

SetPartition SetPartition::singletons(int n) {
  std::vector<Block> blocks;
  for (int i = 1; i <= n; ++i) blocks.push_back({i});
  return SetPartition(n, std::move(blocks));
}

SetPartition SetPartition::parse(std::string_view text) {
  auto blocks = parse_blocks(text, '{', '}');
  int n = label_count(blocks);
  return SetPartition(n, std::move(blocks));
}

std::vector<int> SetPartition::block_sizes() const { return sizes_of(blocks_); }

int SetPartition::block_of(int label) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (std::binary_search(blocks_[i].begin(), blocks_[i].end(), label)) return static_cast<int>(i);
  }
  throw std::out_of_range("label not in partition");
}

std::string SetPartition::to_string() const { return blocks_to_string(blocks_, '{', '}'); }

SetPartition SetPartition::relabel(std::span<const int> perm) const {
  if (static_cast<int>(perm.size()) != n_ || !is_permutation_of_n(perm)) {
    throw std::invalid_argument("relabel: not a permutation of [n]");
  }
  std::vector<Block> blocks = blocks_;
  for (auto& block : blocks) {
    for (int& label : block) label = perm[static_cast<std::size_t>(label - 1)];
  }
  return SetPartition(n_, std::move(blocks));
}

OrderedSetPartition::OrderedSetPartition(int n, std::vector<Block> blocks)
    : n_(n), blocks_(std::move(blocks)) {
  normalize_blocks(n_, blocks_);
}

OrderedSetPartition OrderedSetPartition::parse(std::string_view text) {
  auto blocks = parse_blocks(text, '(', ')');
  int n = label_count(blocks);
  return OrderedSetPartition(n, std::move(blocks));
}

std::vector<int> OrderedSetPartition::block_sizes() const { return sizes_of(blocks_); }

std::string OrderedSetPartition::to_string() const { return blocks_to_string(blocks_, '(', ')'); }

bool is_permutation_of_n(std::span<const int> labels) {
  const int n = static_cast<int>(labels.size());
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  for (int label : labels) {
    if (label < 1 || label > n || seen[static_cast<std::size_t>(label)]) return false;
    seen[static_cast<std::size_t>(label)] = 1;
  }
  return true;
}

OrderedSetPartition partition_from_labels(const BinaryCode& b, std::span<const int> labels) {
  if (static_cast<int>(labels.size()) != b.size()) {
    throw std::invalid_argument("partition_from_labels: label count differs from code length");
  }
  if (!is_permutation_of_n(labels)) {
    throw std::invalid_argument("partition_from_labels: labels are not a permutation of [n]");
  }
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (b.bits()[i]) blocks.emplace_back();
    blocks.back().push_back(labels[i]);
  }
  return OrderedSetPartition(b.size(), std::move(blocks));
}

std::vector<SetPartition> enumerate_set_partitions(int n, int max_n) {
  if (n < 1) throw std::invalid_argument("enumerate_set_partitions: n must be positive");
  if (n > max_n) throw std::invalid_argument("enumerate_set_partitions: n exceeds enumeration bound");

  std::vector<SetPartition> out;
  // Restricted growth string a[0..n-1]: a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
  std::vector<int> rgs(static_cast<std::size_t>(n), 0);
  std::vector<int> prefix_max(static_cast<std::size_t>(n), 0);
  while (true) {
    int blocks_count = prefix_max.back() + 1;
    std::vector<Block> blocks(static_cast<std::size_t>(blocks_count));
    for (int i = 0; i < n; ++i) blocks[static_cast<std::size_t>(rgs[static_cast<std::size_t>(i)])].push_back(i + 1);
    out.emplace_back(n, std::move(blocks));

    int i = n - 1;
    while (i > 0 && rgs[static_cast<std::size_t>(i)] > prefix_max[static_cast<std::size_t>(i - 1)]) --i;
    if (i == 0) break;
    ++rgs[static_cast<std::size_t>(i)];
    prefix_max[static_cast<std::size_t>(i)] =
        std::max(prefix_max[static_cast<std::size_t>(i - 1)], rgs[static_cast<std::size_t>(i)]);
    for (int k = i + 1; k < n; ++k) {
      rgs[static_cast<std::size_t>(k)] = 0;
      prefix_max[static_cast<std::size_t>(k)] = prefix_max[static_cast<std::size_t>(k - 1)];
    }
  }
  return out;
}

std::vector<OrderedSetPartition> enumerate_ordered_set_partitions(int n, int max_n) {
  if (n > max_n) throw std::invalid_argument("enumerate_ordered_set_partitions: n exceeds bound");
  std::vector<OrderedSetPartition> out;
  for (const auto& p : enumerate_set_partitions(n, std::max(max_n, n))) {
    std::vector<int> order(static_cast<std::size_t>(p.num_blocks()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    do {
      std::vector<Block> blocks;
      for (int idx : order) blocks.push_back(p.blocks()[static_cast<std::size_t>(idx)]);
      out.emplace_back(n, std::move(blocks));
    } while (std::next_permutation(order.begin(), order.end()));
  }
  return out;
}

SetPartition restrict_partition(const SetPartition& p, std::span<const int> subset) {
  if (subset.empty()) throw std::invalid_argument("restrict_partition: empty subset");
  std::vector<int> sorted(subset.begin(), subset.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("restrict_partition: duplicated label");
  }
  if (sorted.front() < 1 || sorted.back() > p.n()) {
    throw std::invalid_argument("restrict_partition: label out of range");
  }
  // rank[label] = 1-based position in the sorted subset, 0 if absent.
  std::vector<int> rank(static_cast<std::size_t>(p.n()) + 1, 0);
  for (std::size_t i = 0; i < sorted.size(); ++i) rank[static_cast<std::size_t>(sorted[i])] = static_cast<int>(i) + 1;

  std::vector<Block> blocks;
  for (const auto& block : p.blocks()) {
    Block kept;
    for (int label : block) {
      if (int r = rank[static_cast<std::size_t>(label)]; r > 0) kept.push_back(r);
    }
    if (!kept.empty()) blocks.push_back(std::move(kept));
  }
  return SetPartition(static_cast<int>(sorted.size()), std::move(blocks));
}

bool refines(const SetPartition& fine, const SetPartition& coarse) {
  if (fine.n() != coarse.n()) throw std::invalid_argument("refines: partitions of different sets");
  for (const auto& block : fine.blocks()) {
    int home = coarse.block_of(block.front());
    const auto& target = coarse.blocks()[static_cast<std::size_t>(home)];
    for (int label : block) {
      if (!std::binary_search(target.begin(), target.end(), label)) return false;
    }
  }
  return true;
}

std::vector<unsigned long long> bell_numbers(int max_n) {
  // Bell triangle: row r starts with the last entry of row r-1.
  std::vector<unsigned long long> bell{1};
  std::vector<unsigned long long> row{1};
  for (int r = 1; r <= max_n; ++r) {
    std::vector<unsigned long long> next{row.back()};
    for (auto v : row) next.push_back(next.back() + v);
    bell.push_back(next.front());
    row = std::move(next);
  }
  return bell;
}

}  // namespace ewfrag
