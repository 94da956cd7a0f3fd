#include "emcal/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return emcal::cli_dispatch(argc, argv, std::cout, std::cerr); }
