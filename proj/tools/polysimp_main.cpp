#include "polysimp/cli.hpp"

int main(int argc, char** argv) {
    return polysimp::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
