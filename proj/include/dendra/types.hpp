#ifndef DENDRA_TYPES_HPP
#define DENDRA_TYPES_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace dendra {

/// Synaptic weight in fixed-point units of 1/scale_denominator.
using Weight = std::int32_t;

/// Segment body potential (sum of weights), same fixed-point units as Weight.
using Potential = std::int64_t;

/// Marker for a pattern that has no cluster.
inline constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

}  // namespace dendra

#endif  // DENDRA_TYPES_HPP
