#include "npmix/harness/commands.hpp"

int main(int argc, char** argv) { return npmix::run_cli(argc, argv); }
