#include "kghier/cli.hpp"

int main(int argc, char** argv) { return kghier::run_cli(argc, argv); }
