#include <iostream>

#include "qdgate/cli/experiment.hpp"

int main(int argc, char** argv) { return qdgate::cli::run_cli(argc, argv, std::cout, std::cerr); }
