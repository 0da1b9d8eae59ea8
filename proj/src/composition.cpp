#include "ewfrag/composition.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <stdexcept>

namespace ewfrag {

Composition::Composition(std::vector<int> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw std::invalid_argument("composition must have at least one part");
  for (int p : parts_) {
    if (p < 1) throw std::invalid_argument("composition parts must be positive");
  }
  n_ = std::accumulate(parts_.begin(), parts_.end(), 0);
}

std::string Composition::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(parts_[i]);
  }
  return out;
}

Composition Composition::parse(std::string_view text) {
  std::vector<int> parts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    auto field = text.substr(pos, end - pos);
    int value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
      throw std::invalid_argument("malformed composition text: " + std::string(text));
    }
    parts.push_back(value);
    pos = end + 1;
  }
  return Composition(std::move(parts));
}

BinaryCode::BinaryCode(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  if (bits_.empty()) throw std::invalid_argument("binary code must be non-empty");
  if (bits_.front() != 1) throw std::invalid_argument("binary code must start with 1");
  for (auto b : bits_) {
    if (b > 1) throw std::invalid_argument("binary code digits must be 0 or 1");
  }
}

BinaryCode BinaryCode::single_block(int n) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n), 0);
  bits[0] = 1;
  return BinaryCode(std::move(bits));
}

BinaryCode BinaryCode::parse(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char ch : text) {
    if (ch != '0' && ch != '1') throw std::invalid_argument("binary code must be a 0/1 string");
    bits.push_back(static_cast<std::uint8_t>(ch - '0'));
  }
  return BinaryCode(std::move(bits));
}

void BinaryCode::set_digit(int j) {
  if (j < 1 || j > size()) throw std::out_of_range("digit index out of range");
  bits_[static_cast<std::size_t>(j - 1)] = 1;
}

int BinaryCode::count_ones() const {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::string BinaryCode::to_string() const {
  std::string out(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) out[i] = '1';
  }
  return out;
}

BinaryCode encode_composition(const Composition& c) {
  std::vector<std::uint8_t> bits;
  bits.reserve(static_cast<std::size_t>(c.n()));
  for (int part : c.parts()) {
    bits.push_back(1);
    bits.insert(bits.end(), static_cast<std::size_t>(part - 1), 0);
  }
  return BinaryCode(std::move(bits));
}

Composition decode_composition(const BinaryCode& b) {
  std::vector<int> parts;
  for (auto bit : b.bits()) {
    if (bit) {
      parts.push_back(1);
    } else {
      ++parts.back();
    }
  }
  return Composition(std::move(parts));
}

bool is_refinement(const BinaryCode& x, const BinaryCode& y) {
  if (x.size() != y.size()) throw std::invalid_argument("is_refinement: codes differ in length");
  for (std::size_t i = 0; i < x.bits().size(); ++i) {
    if (x.bits()[i] < y.bits()[i]) return false;
  }
  return true;
}

std::vector<Composition> enumerate_compositions(int n) {
  if (n < 1 || n > 24) throw std::invalid_argument("enumerate_compositions: n must be in [1, 24]");
  std::vector<Composition> out;
  const std::uint32_t free_digits = static_cast<std::uint32_t>(n - 1);
  out.reserve(std::size_t{1} << free_digits);
  for (std::uint32_t mask = 0; mask < (1u << free_digits); ++mask) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n), 0);
    bits[0] = 1;
    for (std::uint32_t j = 0; j < free_digits; ++j) {
      bits[j + 1] = static_cast<std::uint8_t>((mask >> (free_digits - 1 - j)) & 1u);
    }
    out.push_back(decode_composition(BinaryCode(std::move(bits))));
  }
  return out;
}

}  // namespace ewfrag
