#include "causal2d/cli.hpp"

int main(int argc, char** argv) { return causal2d::cli::run(argc, argv); }
