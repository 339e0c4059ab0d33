#pragma once

// Persistence for the construction: a single self-describing JSON document
// holding the seed, the full parameter schedule, the pole catalogue, and
// per-level summaries (component metadata and certification margins — raw
// quadtree cells are recomputed, not stored).  Loading replays the
// deterministic construction from the schedule and verifies that the stored
// tables match the replay bit for bit, so a resumed run is
// indistinguishable from a fresh one.

#include <string>

#include "cantor/construction.hpp"

namespace cantor {

inline constexpr int kStateSchemaVersion = 1;

// Serialize to the canonical text form (stable key order, shortest
// round-trip numbers), ending in a newline.  serialize -> parse ->
// serialize is byte-identical.
std::string serialize_state(const Construction& c);

// Parse and revalidate: schema version must match exactly, the tower is
// replayed from the schedule and compared against the stored pole
// catalogue, and decompositions are recomputed and compared against the
// stored component summaries.  Mismatches throw (usage_error for malformed
// or wrong-schema input, verification_error for stored tables that
// disagree with the replay).
Construction parse_state(const std::string& text);

void save_state(const Construction& c, const std::string& path);
Construction load_state(const std::string& path);

}  // namespace cantor
