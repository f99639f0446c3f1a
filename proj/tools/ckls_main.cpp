#include <iostream>

#include "ckls/cli.hpp"

int main(int argc, char** argv) { return ckls::cli::run(argc, argv, std::cout, std::cerr); }
