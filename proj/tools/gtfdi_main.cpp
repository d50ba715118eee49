#include <vector>

#include "gtfdi/cli.hpp"

int main(int argc, char** argv) {
    return gtfdi::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
