#include "antn/cli.hpp"

int main(int argc, char** argv) { return antn::cli::run(argc, argv); }
