#pragma once

#include <string>
#include <vector>

namespace tgf {

/// Shortest round-trip decimal form of v ("%.17g" trimmed); used everywhere a
/// double lands in a text artifact so reruns are byte-identical.
std::string fmt_double(double v);

std::string sha256_hex(const std::string& bytes);

struct Artifact {
    std::string name;
    std::string bytes;
};
using ArtifactSet = std::vector<Artifact>;

/// Appends manifest.json listing every artifact with its sha256 and size.
void add_manifest(ArtifactSet& set);

/// Creates dir if needed and writes every artifact under it.
void write_artifacts(const std::string& dir, const ArtifactSet& set);

}  // namespace tgf
