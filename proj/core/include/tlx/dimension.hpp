#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace tlx {

// Canonical order is fixed; the enumerator value is the index everywhere.
enum class Dimension : std::uint8_t {
  MentalDemand = 0,
  PhysicalDemand,
  TemporalDemand,
  Performance,
  Effort,
  Frustration,
};

inline constexpr std::size_t kDimensionCount = 6;

inline constexpr std::array<Dimension, kDimensionCount> kAllDimensions = {
    Dimension::MentalDemand, Dimension::PhysicalDemand, Dimension::TemporalDemand,
    Dimension::Performance,  Dimension::Effort,         Dimension::Frustration,
};

struct DimensionInfo {
  Dimension id;
  std::string_view key;  // wire / CSV suffix, e.g. "mental"
  std::string_view title;
  std::string_view description;
  std::string_view low_anchor;
  std::string_view high_anchor;
};

constexpr std::size_t index_of(Dimension d) noexcept { return static_cast<std::size_t>(d); }

const DimensionInfo& dimension_info(Dimension d) noexcept;

std::string_view dimension_key(Dimension d) noexcept;

std::optional<Dimension> dimension_from_key(std::string_view key) noexcept;

/// Fixed-size value keyed by Dimension, stored in canonical order.
template <typename T>
class PerDimension {
 public:
  constexpr PerDimension() = default;
  constexpr explicit PerDimension(const std::array<T, kDimensionCount>& values) : values_(values) {}

  constexpr T& operator[](Dimension d) noexcept { return values_[index_of(d)]; }
  constexpr const T& operator[](Dimension d) const noexcept { return values_[index_of(d)]; }

  constexpr const std::array<T, kDimensionCount>& values() const noexcept { return values_; }

  constexpr auto begin() const noexcept { return values_.begin(); }
  constexpr auto end() const noexcept { return values_.end(); }

  friend constexpr bool operator==(const PerDimension&, const PerDimension&) = default;

 private:
  std::array<T, kDimensionCount> values_{};
};

}  // namespace tlx
