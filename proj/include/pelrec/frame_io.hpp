#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "pelrec/frame.hpp"

namespace pelrec {

/// Decodes a P2 (ASCII) or P5 (binary) graymap with maxval <= 255.
/// Throws ParseError carrying the byte offset of the first problem.
Frame decode_pgm(std::string_view bytes);
Frame read_pgm(const std::filesystem::path& path);

/// Encodes as P5/255. Intensities are clamped to [0, 255] and rounded half-up.
std::string encode_pgm(const Frame& frame);
void write_pgm(const Frame& frame, const std::filesystem::path& path);

/// Adds zero-mean white Gaussian noise with variance var(frame) / 10^(snr_db/10).
/// The result is not clamped. Throws std::invalid_argument for a constant frame.
Frame add_noise(const Frame& frame, double snr_db, std::uint64_t seed);

}  // namespace pelrec
