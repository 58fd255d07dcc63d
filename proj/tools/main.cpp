#include "robust/harness/cli.hpp"

int main(int argc, char** argv) { return robust::harness::cli_main(argc, argv); }
