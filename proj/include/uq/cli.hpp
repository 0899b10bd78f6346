#pragma once

// Command-line entry point: generate -> score -> grade -> tune -> evaluate ->
// sweep over line-delimited record files. Exit codes: 0 success, 2 config
// error, 3 provider error, 4 data error, 5 partial completion (some rows
// failed; completed rows were persisted and a rerun resumes from the cache).

namespace uq::cli {

int run(int argc, const char* const* argv);

}  // namespace uq::cli
