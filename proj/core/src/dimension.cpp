#include "tlx/dimension.hpp"

namespace tlx {

namespace {

constexpr std::array<DimensionInfo, kDimensionCount> kInfo = {{
    {Dimension::MentalDemand, "mental", "Mental Demand",
     "How mentally demanding was the task?", "Low", "High"},
    {Dimension::PhysicalDemand, "physical", "Physical Demand",
     "How physically demanding was the task?", "Low", "High"},
    {Dimension::TemporalDemand, "temporal", "Temporal Demand",
     "How hurried or rushed was the pace of the task?", "Low", "High"},
    // Inverted anchors: 0 is good performance.
    {Dimension::Performance, "performance", "Performance",
     "How successful were you in accomplishing what you were asked to do?", "Good", "Poor"},
    {Dimension::Effort, "effort", "Effort",
     "How hard did you have to work to accomplish your level of performance?", "Low", "High"},
    {Dimension::Frustration, "frustration", "Frustration",
     "How insecure, discouraged, irritated, stressed, and annoyed were you?", "Low", "High"},
}};

}  // namespace

const DimensionInfo& dimension_info(Dimension d) noexcept { return kInfo[index_of(d)]; }

std::string_view dimension_key(Dimension d) noexcept { return kInfo[index_of(d)].key; }

std::optional<Dimension> dimension_from_key(std::string_view key) noexcept {
  for (const auto& info : kInfo) {
    if (info.key == key) return info.id;
  }
  return std::nullopt;
}

}  // namespace tlx
