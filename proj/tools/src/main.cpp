#include "cli.hpp"

int main(int argc, char** argv) { return dsm::cli::run(argc, argv); }
