#pragma once

namespace bagnet::cli {

// Entry point behind the bagnet binary. Exit codes: 0 success, 1 config
// error, 2 data error, 3 numerical failure.
int run(int argc, const char* const* argv);

}  // namespace bagnet::cli
