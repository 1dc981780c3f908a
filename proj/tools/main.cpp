#include <iostream>

#include "fracount/cli.hpp"

int main(int argc, char** argv) {
    return fracount::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
