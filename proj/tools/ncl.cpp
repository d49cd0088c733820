#include "ncl/cli.hpp"

int main(int argc, char** argv) { return ncl::cli::dispatch(argc, argv); }
