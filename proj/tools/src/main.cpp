#include "ocsvm_cli/commands.hpp"

int main(int argc, char** argv) { return ocsvm::cli::run_cli(argc, argv); }
