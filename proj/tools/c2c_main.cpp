#include "c2c/cli.hpp"

int main(int argc, char** argv) { return c2c::cli_main(argc, argv); }
