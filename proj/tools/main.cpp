#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return garma::cli::run(argc, argv, std::cout, std::cerr); }
