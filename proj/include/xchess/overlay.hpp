#pragma once

#include "xchess/detector.hpp"

namespace xchess {

/// RGB diagnostic image: accepted connections in green, every corner track as a blue dot
/// and grid corners as red crosses, with the grid origin in yellow.
RawImage render_overlay(const GrayImage& image, const Detection& detection);

}  // namespace xchess
