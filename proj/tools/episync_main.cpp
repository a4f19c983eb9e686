#include "episync/cli.hpp"

int main(int argc, char** argv) { return episync::cli::dispatch(argc, argv); }
