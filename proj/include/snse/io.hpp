#pragma once

#include "snse/dynamics.hpp"
#include "snse/grid.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace snse {

/// Binary field snapshot, 16-byte header then interleaved re/im doubles in
/// row-major site order, little-endian:
///   magic "SNSF" | u8 dim | u8 reserved | u16 points_per_axis | f64 box_length
void write_field(std::ostream& os, const Field& u);
void write_field_file(const std::string& path, const Field& u);
Field read_field(std::istream& is);
Field read_field_file(const std::string& path);

/// Sequence containers are plain concatenations of snapshot records.
void write_field_sequence(const std::string& path,
                          const std::vector<Field>& fields);
std::vector<Field> read_field_sequence(const std::string& path);

/// One JSON object per line: {"t":..,"mass":..,"H":..,"Htilde":..}
void write_scalar_jsonl(const std::string& path, const Trajectory& traj);

std::uint64_t fnv1a_hash(const std::string& text);

/// Run manifest: JSON with the resolved config text, its hash, and a
/// version string, written next to every output file set.
void write_manifest(const std::string& path, const std::string& config_text,
                    const std::string& version);

}  // namespace snse
