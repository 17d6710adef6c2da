#pragma once
// JSON export of a built ring and the matching reader.  The writer is
// deterministic — field order is fixed (ordered_json), integers stay
// integers, rationals are canonical "p/q" strings — so two builds of the
// same ring produce byte-identical files; tests rely on that.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "orbring/ring.hpp"

namespace orbring {

using ordered_json = nlohmann::ordered_json;

// The part of a document needed to rebuild the ring it describes.
struct RunConfig {
  CaseConfig cfg;
  bool discrete_torsion = true;
  std::uint64_t seed = 0;
};

// Assemble the export document: run header, per-sector shape data, graded
// dimensions, optionally the full structure-constant table, and whatever
// check results the caller collected (may be empty).
ordered_json ring_document(const OrbifoldRing& ring, std::uint64_t seed,
                           bool with_structure_constants,
                           const std::vector<CheckResult>& checks);

// Fixed layout: 2-space indent, "\n" line ends, trailing newline.
std::string document_text(const ordered_json& doc);

// Write document_text via a temp file in the target directory, then rename.
void write_document(const ordered_json& doc, const std::string& path);

// Parse a file written by write_document; input_error on unreadable or
// malformed content.
ordered_json load_document(const std::string& path);

// Extract and validate the run header; input_error on schema mismatch.
RunConfig read_run_config(const ordered_json& doc);

}  // namespace orbring
