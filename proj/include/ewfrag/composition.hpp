#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ewfrag {

// A composition of n: ordered positive parts, i.e. n unlabelled balls in
// an ordered row of non-empty boxes.
class Composition {
 public:
  explicit Composition(std::vector<int> parts);

  const std::vector<int>& parts() const { return parts_; }
  int n() const { return n_; }
  int num_parts() const { return static_cast<int>(parts_.size()); }

  // "3,4,1"
  std::string to_string() const;
  static Composition parse(std::string_view text);

  friend bool operator==(const Composition&, const Composition&) = default;

 private:
  std::vector<int> parts_;
  int n_ = 0;
};

// Length-n 0/1 word with a leading 1; each 1 opens a new box.
class BinaryCode {
 public:
  explicit BinaryCode(std::vector<std::uint8_t> bits);
  // All-zero code of length n apart from the leading 1.
  static BinaryCode single_block(int n);
  static BinaryCode parse(std::string_view text);

  const std::vector<std::uint8_t>& bits() const { return bits_; }
  int size() const { return static_cast<int>(bits_.size()); }
  // 1-based position, as in the digit index j.
  bool digit(int j) const { return bits_[static_cast<std::size_t>(j - 1)] != 0; }
  // Switches digit j (1-based, j >= 2) on.
  void set_digit(int j);
  int count_ones() const;

  std::string to_string() const;

  friend bool operator==(const BinaryCode&, const BinaryCode&) = default;
  friend auto operator<=>(const BinaryCode&, const BinaryCode&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

BinaryCode encode_composition(const Composition& c);
Composition decode_composition(const BinaryCode& b);

// x refines y iff x_i >= y_i for every place i. Throws on length mismatch.
bool is_refinement(const BinaryCode& x, const BinaryCode& y);

// Every composition of n, in lexicographic order of codes. Used by tests.
std::vector<Composition> enumerate_compositions(int n);

}  // namespace ewfrag
