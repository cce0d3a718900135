#include <iostream>
#include <string>
#include <vector>

#include "corpusmap/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return corpusmap::dispatch(args, std::cout, std::cerr);
}
