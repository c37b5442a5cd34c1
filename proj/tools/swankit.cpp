#include "swankit/cli.hpp"

int main(int argc, char** argv) { return swankit::run_command(argc, argv); }
