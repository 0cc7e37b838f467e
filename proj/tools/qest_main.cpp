#include <string>
#include <vector>

#include "qest/cli.hpp"

int main(int argc, char** argv) {
    return qest::run_command(std::vector<std::string>(argv + 1, argv + argc));
}
