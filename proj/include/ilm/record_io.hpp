#pragma once

#include <string>
#include <vector>

#include "ilm/simulator.hpp"

namespace ilm {

/// Versioned line-delimited record file for simulated frames (one JSON
/// object per line, header line first). See docs/formats.md. Numbers
/// round-trip exactly, so a replay reproduces the original run.
void write_frames(const std::string& path, const std::vector<SimFrame>& frames);

/// Throws ParseError (with the line number) on malformed lines and
/// "no frames" on an empty or header-only file.
std::vector<SimFrame> read_frames(const std::string& path);

}  // namespace ilm
