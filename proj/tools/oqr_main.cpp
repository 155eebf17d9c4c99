#include "oqr/harness.hpp"

int main(int argc, char **argv) { return oqr::cli_main(argc, argv); }
