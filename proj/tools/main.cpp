#include "bellspin/cli.hpp"

int main(int argc, char** argv) { return bellspin::cli::run(argc, argv); }
