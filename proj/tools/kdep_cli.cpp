#include "cli_app.hpp"

int main(int argc, char** argv) { return kdep::cli::run(argc, argv); }
