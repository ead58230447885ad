#include "cli.hpp"

int main(int argc, char** argv) { return rfcw::cli::dispatch(argc, argv); }
