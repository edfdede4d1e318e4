#include "aerosynth/cli.hpp"

int main(int argc, char** argv) { return aerosynth::cli::run(argc, argv); }
