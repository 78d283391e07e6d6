#include <string>
#include <vector>

#include "lbsieve/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return lbsieve::cli::run(std::move(args));
}
