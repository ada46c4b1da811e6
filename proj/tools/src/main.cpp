#include "tdict_cli/commands.hpp"

int main(int argc, char** argv) { return tdict::cli::run(argc, argv); }
