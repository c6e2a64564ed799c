#include "rcrc/cli.hpp"

int main(int argc, char** argv) { return rcrc::cli::dispatch(argc, argv); }
