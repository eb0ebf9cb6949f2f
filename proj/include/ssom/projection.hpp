// Spherical range-image projection, normal-map construction, and rendering of
// the surfel map into a model view for registration and map update.
#pragma once

#include <string>

#include "ssom/config.hpp"
#include "ssom/frame_maps.hpp"
#include "ssom/scan.hpp"
#include "ssom/surfel_map.hpp"

namespace ssom {

struct PixelCoord {
  int u = 0;
  int v = 0;
  bool in_rows = false;  // true when the elevation fell inside [0, H) before clamping
};

// Pixel mapping: u from the azimuth, v from the elevation, both floored and
// clamped into the raster. in_rows reports whether the vertical clamp fired.
PixelCoord project_to_pixel(const Vec3& p, const RunConfig& cfg);

// Projects a scan to the vertex/range/semantic rasters and fills the normal
// map. Collisions keep the nearest point (ties keep the smaller point index).
// Throws std::invalid_argument on an empty scan.
FrameMaps project(const Scan& scan, const RunConfig& cfg);

// Normal per pixel from the right and down neighbors of the vertex map
// (azimuth wraps, elevation does not). A pixel gets no normal when a neighbor
// vertex is missing, when a neighbor range differs from the center by more
// than 30%, or when the cross product is degenerate. Normals are unit length
// and oriented toward the sensor (n . v <= 0).
void compute_normals(FrameMaps& maps, const RunConfig& cfg);

enum class RenderPolicy {
  kRegistration,  // stable surfels + young ones admitted by the trust policy
  kMapUpdate      // every surfel, so updates can confirm or contradict them
};

// Splats surfels into the sensor frame of `pose` with z-buffering (nearest
// wins). Surfels whose elevation falls outside the raster rows are skipped.
FrameMaps render_model(const SurfelMap& map, const Pose& pose, const RunConfig& cfg,
                       const MovableSet& movable, RenderPolicy policy = RenderPolicy::kRegistration);

// Debug dumps: 16-bit PGM images of the label raster and the range raster
// (ranges scaled to [0, 65535] over [0, max_range]).
void dump_label_pgm(const FrameMaps& maps, const std::string& path);
void dump_range_pgm(const FrameMaps& maps, const std::string& path, double max_range);

}  // namespace ssom
