#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace specinv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 2;
inline constexpr int kExitUsage = 3;

/// Keeps large freed blocks on the heap instead of returning them to the OS.
/// Iterations allocate and drop megabyte-sized spectrograms at a high rate;
/// with the default glibc thresholds each one is a fresh mmap plus page
/// faults. No-op on other C libraries.
void tune_allocator();

/// Entry point of the `specinv` tool; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace specinv::cli
