#include "commands.hpp"

int main(int argc, char** argv) { return cuspkit::run_cli(argc, argv); }
