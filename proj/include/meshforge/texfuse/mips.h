#pragma once

#include <vector>

#include "meshforge/core/image.h"

namespace meshforge {

// Mip pyramid for view images. Level 0 is a verbatim copy of the input;
// every further level halves each dimension (rounding up, minimum 1) with a
// separable edge-clamped Lanczos-2 filter and then applies a mild unsharp
// pass that counters the slight softening of the reduction. The chain stops
// early once a level reaches 1x1.
//
// Values are intentionally not clamped: the filter's negative lobes must
// survive so repeated reduction stays linear. Consumers clamp on encode.
std::vector<ImageF> buildMips(const ImageF& base, int levels,
                              float sharpenStrength = 0.2f);

}  // namespace meshforge
