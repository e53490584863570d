#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qrg::cli {

// Full command-line driver. args excludes the program name. Returns the
// process exit code: 0 success, 1 usage/validation error, 2 internal error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Seed precedence: explicit flag, then QRG_SEED, then a fixed default.
std::uint64_t resolve_seed(bool seed_given, std::uint64_t seed_flag);

inline constexpr std::uint64_t kDefaultSeed = 20260819;

}  // namespace qrg::cli
