#pragma once

// Tables and figures derived from a finished construction.  All outputs are
// pure functions of the construction state (fixed column schemas, fixed
// number formatting at 17 significant digits for CSV), so identical states
// produce byte-identical files.

#include <string>

#include "cantor/construction.hpp"

namespace cantor {

// One row per pole of r_level: node id, lineage, chart, exact chart
// position (mantissa/exponent) and collapsed double position, residue.
std::string poles_csv(const Construction& c, int level);

// One row per level: shift target, shear strength, escape radius, shrink
// budget, and the sampled injectivity margin behind it.
std::string schedule_csv(const Construction& c);

// One row per certified island across all levels: orientation, lineage,
// diameter bounds, containment radii, resolution.
std::string components_csv(const Construction& c);

// The cover-sum table: depth, exponent, measured sum, reference bound, and
// the per-exponent monotonicity verdict.
std::string hausdorff_csv(const Construction& c);

// Escape islands at one level: a chart panel with the island positions and
// the bidisc footprint square, plus per-island cell panels colored by
// orientation (boundary cells lighter).
std::string regions_svg(const Construction& c, int level);

// The limit-set approximation at full depth: witness points on the chart
// panel and convex hulls of the island cells in per-island panels.
std::string cantor_svg(const Construction& c);

// Image of a sampled circle under the level map, projected to the two
// coordinate planes, with the escape radius circle for scale.
std::string curve_svg(const Construction& c, int level);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace cantor
