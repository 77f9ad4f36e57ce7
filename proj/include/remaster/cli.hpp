#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "remaster/image.hpp"
#include "remaster/tensor.hpp"

namespace remaster::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kDataError = 3, kCheckpointError = 4 };

/// Runs one command line (without the program name). Errors are reported on
/// `err` and mapped to an ExitCode; nothing is thrown.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads a frame directory: frame_0000001.png, frame_0000002.png, ... with no
/// gaps and one size throughout. Throws DataError.
std::vector<Image> read_frame_sequence(const std::filesystem::path& dir);
/// Writes frames as frame_0000001.png onwards, creating `dir`.
void write_frame_sequence(const std::filesystem::path& dir, const std::vector<Image>& frames);

/// Greyscale RGB frames showing a normalized-L clip (1, 1, T, H, W).
std::vector<Image> luma_to_frames(const Tensor& luma);

}  // namespace remaster::cli
