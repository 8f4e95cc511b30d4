#include "sno/cli.hpp"

int main(int argc, char** argv) { return sno::cli::run(argc, argv); }
