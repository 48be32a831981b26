#include "leakwave/cli.hpp"

int main(int argc, char** argv) { return leakwave::cli::run(argc, argv); }
