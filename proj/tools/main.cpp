#include <iostream>

#include "qhlc/cli.hpp"

int main(int argc, char** argv) { return qhlc::cli::dispatch(argc, argv, std::cout, std::cerr); }
