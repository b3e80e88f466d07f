#include "dendra/spike_vector.hpp"

#include <algorithm>
#include <numeric>

#include "dendra/errors.hpp"

namespace dendra {

SpikeVector::SpikeVector(std::size_t length) : bits_(length, 0) {}

SpikeVector SpikeVector::from_bits(std::span<const std::uint8_t> bits) {
  SpikeVector v;
  v.bits_.assign(bits.begin(), bits.end());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 1) throw DomainError("spike vector element is not 0 or 1");
    if (bits[i]) v.active_.push_back(static_cast<std::uint32_t>(i));
  }
  return v;
}

SpikeVector SpikeVector::from_indices(std::size_t length, std::span<const std::uint32_t> indices) {
  SpikeVector v(length);
  for (auto i : indices) {
    if (i >= length) throw DomainError("spike index out of range");
    v.bits_[i] = 1;
  }
  for (std::size_t i = 0; i < length; ++i)
    if (v.bits_[i]) v.active_.push_back(static_cast<std::uint32_t>(i));
  return v;
}

SpikeVector SpikeVector::from_string(const std::string& text) {
  std::vector<std::uint8_t> bits;
  for (char c : text) {
    if (c == '0' || c == '1')
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    else if (c != ' ' && c != ',')
      throw DomainError(std::string("bad character in bit string: ") + c);
  }
  return from_bits(bits);
}

void SpikeVector::set(std::size_t i, bool value) {
  if (i >= bits_.size()) throw DomainError("spike index out of range");
  if ((bits_[i] != 0) == value) return;
  bits_[i] = value ? 1 : 0;
  auto idx = static_cast<std::uint32_t>(i);
  auto it = std::lower_bound(active_.begin(), active_.end(), idx);
  if (value)
    active_.insert(it, idx);
  else
    active_.erase(it);
}

std::size_t SpikeVector::overlap(const SpikeVector& other) const {
  std::size_t n = 0;
  auto a = active_.begin();
  auto b = other.active_.begin();
  while (a != active_.end() && b != other.active_.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++n;
      ++a;
      ++b;
    }
  }
  return n;
}

std::string SpikeVector::to_string() const {
  std::string s(bits_.size(), '0');
  for (auto i : active_) s[i] = '1';
  return s;
}

SpikeVector concat(std::span<const SpikeVector> parts) {
  std::size_t length = 0;
  for (const auto& p : parts) length += p.size();
  std::vector<std::uint32_t> idx;
  std::uint32_t offset = 0;
  for (const auto& p : parts) {
    for (auto i : p.active()) idx.push_back(offset + i);
    offset += static_cast<std::uint32_t>(p.size());
  }
  return SpikeVector::from_indices(length, idx);
}

double Centroid::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

}  // namespace dendra
