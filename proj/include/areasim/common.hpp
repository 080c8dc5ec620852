#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace areasim {

using NeuronId = std::uint32_t;
using Step = std::int64_t;

/// Synapse range: intra-area (short-range) or inter-area (long-range).
///
/// The same index doubles as the communication pathway in the engine: the
/// short pathway carries intra-area spikes, the long pathway inter-area
/// ones. Under the conventional scheme every synapse sits on the short
/// pathway.
enum class RangeClass : std::uint8_t { intra = 0, inter = 1 };

inline constexpr std::size_t kNumRangeClasses = 2;

constexpr std::size_t index_of(RangeClass c) { return static_cast<std::size_t>(c); }

std::string_view to_string(RangeClass c);
RangeClass range_class_from_string(std::string_view s);

enum class Scheme : std::uint8_t { conventional, structure_aware };

std::string_view to_string(Scheme s);
Scheme scheme_from_string(std::string_view s);

/// Input that violates a documented precondition.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A spike would arrive before the exchange that makes it visible.
class CausalityError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Independent, reproducible stream per (seed, purpose, entity).
inline std::mt19937_64 entity_stream(std::uint64_t seed, std::uint32_t purpose,
                                     std::uint64_t entity) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      purpose, static_cast<std::uint32_t>(entity),
                      static_cast<std::uint32_t>(entity >> 32)};
    return std::mt19937_64(seq);
}

} // namespace areasim
