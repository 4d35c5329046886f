#pragma once

#include <vector>

#include "firenav/fire/thermal_image.hpp"

namespace firenav::fire {

struct FireDetection2D {
  double u = 0.0;  // centroid, pixels
  double v = 0.0;
  int pixel_count = 0;
  double mean_temperature = 0.0;
  // Blob bounding box, inclusive.
  int u_min = 0, u_max = 0, v_min = 0, v_max = 0;
};

/// Thresholding segmentation: 8-connected components of pixels at or above
/// threshold_celsius, dropped below min_blob_pixels, sorted by pixel count
/// descending (ties by centroid scan order). No detection is an empty list.
std::vector<FireDetection2D> segment_fire(const ThermalImage& img,
                                          double threshold_celsius,
                                          int min_blob_pixels);

}  // namespace firenav::fire
