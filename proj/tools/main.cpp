#include "cli.hpp"

int main(int argc, char** argv) { return amspec::cli::run(argc, argv); }
