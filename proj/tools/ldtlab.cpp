#include "ldt/cli.hpp"

int main(int argc, char** argv) { return ldt::cli::run_main(argc, argv); }
