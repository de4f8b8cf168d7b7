#pragma once

namespace famnet {

// Value plus first and second derivatives of one quantity with respect to a
// single input coordinate.
struct Jet2 {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  int coordinate_index = 0;
};

}  // namespace famnet
