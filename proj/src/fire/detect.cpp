#include "firenav/fire/detect.hpp"

#include <algorithm>
#include <deque>

namespace firenav::fire {

std::vector<FireDetection2D> segment_fire(const ThermalImage& img,
                                          double threshold_celsius,
                                          int min_blob_pixels) {
  const int w = img.width, h = img.height;
  std::vector<uint8_t> visited(static_cast<std::size_t>(w) * h, 0);
  std::vector<FireDetection2D> out;

  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const std::size_t idx = static_cast<std::size_t>(v) * w + u;
      if (visited[idx] || img.at(u, v) < threshold_celsius) continue;

      // Flood fill one 8-connected component.
      FireDetection2D det;
      det.u_min = det.u_max = u;
      det.v_min = det.v_max = v;
      double sum_u = 0.0, sum_v = 0.0, sum_t = 0.0;
      std::deque<std::pair<int, int>> queue{{u, v}};
      visited[idx] = 1;
      while (!queue.empty()) {
        const auto [cu, cv] = queue.front();
        queue.pop_front();
        ++det.pixel_count;
        sum_u += cu;
        sum_v += cv;
        sum_t += img.at(cu, cv);
        det.u_min = std::min(det.u_min, cu);
        det.u_max = std::max(det.u_max, cu);
        det.v_min = std::min(det.v_min, cv);
        det.v_max = std::max(det.v_max, cv);
        for (int dv = -1; dv <= 1; ++dv)
          for (int du = -1; du <= 1; ++du) {
            if (du == 0 && dv == 0) continue;
            const int nu = cu + du, nv = cv + dv;
            if (nu < 0 || nu >= w || nv < 0 || nv >= h) continue;
            const std::size_t nidx = static_cast<std::size_t>(nv) * w + nu;
            if (visited[nidx] || img.at(nu, nv) < threshold_celsius) continue;
            visited[nidx] = 1;
            queue.push_back({nu, nv});
          }
      }
      if (det.pixel_count < min_blob_pixels) continue;
      det.u = sum_u / det.pixel_count;
      det.v = sum_v / det.pixel_count;
      det.mean_temperature = sum_t / det.pixel_count;
      out.push_back(det);
    }
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const FireDetection2D& a, const FireDetection2D& b) {
                     return a.pixel_count > b.pixel_count;
                   });
  return out;
}

}  // namespace firenav::fire
