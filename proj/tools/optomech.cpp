#include "optomech/cli.hpp"

int main(int argc, char** argv) {
    return optomech::cli_main(argc, argv);
}
