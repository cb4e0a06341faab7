#include "starlock/cli.hpp"

int main(int argc, char** argv) { return starlock::cli::run(argc, argv); }
