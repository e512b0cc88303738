#include "maxwalk/cli.hpp"

int main(int argc, char** argv) { return maxwalk::cli_main(argc, argv); }
