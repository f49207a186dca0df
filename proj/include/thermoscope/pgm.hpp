#pragma once

#include <string>

#include "thermoscope/imaging.hpp"

namespace thermoscope {

// 16-bit binary PGM (P5, maxval 65535, big-endian sample order).  The pixel
// pitch travels in a "# pixel_pitch_um <v>" header comment.  Counts are
// rounded and clamped to [0, 65535] on write.
void write_pgm(const ImageFrame& frame, const std::string& path);
ImageFrame read_pgm(const std::string& path);

// Row-major comma-separated counts at full precision, one row per line.
// A leading "# pixel_pitch_um <v>" comment carries the pitch.
void write_frame_csv(const ImageFrame& frame, const std::string& path);
ImageFrame read_frame_csv(const std::string& path);

}  // namespace thermoscope
