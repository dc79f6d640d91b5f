#include "phrl/harness.hpp"

int main(int argc, char** argv) { return phrl::cli_main(argc, argv); }
