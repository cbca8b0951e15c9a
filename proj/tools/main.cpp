#include "binpick/cli.hpp"

int main(int argc, char** argv) { return binpick::cli::run(argc, argv); }
