#include "cli.hpp"

int main(int argc, char** argv) { return orthoq::cli::run(argc, argv); }
