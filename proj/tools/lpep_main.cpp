#include "lpep/io.hpp"

int main(int argc, char** argv) { return lpep::cli_main(argc, argv); }
