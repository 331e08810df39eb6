#include <string>
#include <vector>

#include "medsynth/cli/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return medsynth::run(args);
}
