#pragma once

#include "agesign/pipeline.hpp"

namespace agesign {

inline constexpr Rgb kOutlineColor{255, 0, 0};
inline constexpr Rgb kCrosshairColor{0, 255, 0};
inline constexpr Rgb kLabelColor{255, 255, 0};

/// Copy of `frame` with the detected circle outlined (pixels with
/// |dist - r0| <= 0.5), a crosshair at the center and the class label drawn
/// next to the circle. N/C, or a detection without a circle, returns an
/// unmodified copy.
ColorImage annotate_output(const ColorImage& frame, const Detection& detection);

}  // namespace agesign
