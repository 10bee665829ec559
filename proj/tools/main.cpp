#include <iostream>

#include "adaptrust/cli.hpp"

int main(int argc, char** argv) { return adaptrust::cli::run(argc, argv, std::cout, std::cerr); }
