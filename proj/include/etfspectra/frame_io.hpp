#pragma once

#include <filesystem>
#include <string>

#include "etfspectra/frames.hpp"

namespace etfs {

// On-disk frame container (JSON, format "etfspectra-frame", version 1):
//   {"format": "etfspectra-frame", "version": 1, "rows": m, "cols": n,
//    "field": "real"|"complex", "family": "<name>", "seed": <uint64 or null>,
//    "entries": [...]}
// Entries are row-major. Complex frames store (re, im) pairs, so the array has
// 2*m*n doubles; real frames store m*n doubles. Doubles are written with
// round-trip precision.
std::string frame_to_json(const FrameMatrix& frame);
FrameMatrix frame_from_json(const std::string& text);

void save_frame(const FrameMatrix& frame, const std::filesystem::path& path);
FrameMatrix load_frame(const std::filesystem::path& path);

}  // namespace etfs
