#pragma once

#include <iosfwd>

namespace shadowfield::cli {

/// Parses argv and runs one subcommand (ingest, field, slice, compare, bench,
/// plan). Returns the process exit code; 0 iff the requested artifact was
/// fully written.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace shadowfield::cli
