#include <iostream>

#include "wec/cli/app.h"

int main(int argc, char **argv) { return wec::cli::run(argc, argv, std::cout); }
