#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "holonet/network.hpp"

namespace holonet {

// Self-describing CBOR container: bank specs (not matrices), widths, alpha,
// nonlinearity and field tags, and every parameter tensor as shape plus
// little-endian float64 real and imaginary planes (column-major). Banks are
// recomputed from the graph on load.
std::vector<std::uint8_t> encode_checkpoint(const HoloNetModel& m);
HoloNetModel decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const HoloNetModel& m, const std::filesystem::path& path);
// Throws ParseError on malformed files and InputError when the file is missing.
HoloNetModel load_checkpoint(const std::filesystem::path& path);

}  // namespace holonet
