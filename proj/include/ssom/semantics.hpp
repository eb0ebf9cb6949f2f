// Semantic mask refinement on the projected rasters: an erosion that clears
// label speckle at class boundaries, then a depth-guarded fill that re-labels
// the cleared pixels from geometrically consistent neighbors.
#pragma once

#include "ssom/config.hpp"
#include "ssom/frame_maps.hpp"

namespace ssom {

// Erosion: a labeled pixel survives only if every labeled pixel in its
// d x d window (d = cfg.flood_kernel, azimuth wraps, elevation clips) carries
// the same label; otherwise it becomes 0. Unlabeled (0) neighbors never veto.
// Reads the input mask, writes a fresh one, so clearing cannot cascade.
void erode_mask(FrameMaps& maps, const RunConfig& cfg);

// Fill: a 0-labeled pixel with a valid vertex adopts the label and confidence
// of the first labeled neighbor, in row-major window order, whose vertex lies
// within cfg.flood_theta * ||vertex|| of its own. Labeled pixels never change.
void fill_mask(FrameMaps& maps, const RunConfig& cfg);

// Erosion followed by fill.
void refine(FrameMaps& maps, const RunConfig& cfg);

}  // namespace ssom
