#pragma once

namespace c2c {

// Exit codes: 0 all inputs processed, 1 any failure, 2 usage.
int cli_main(int argc, const char* const* argv);

}  // namespace c2c
