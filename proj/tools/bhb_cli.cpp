#include <bhb/cli.hpp>

int main(int argc, char** argv) { return bhb::cli::run(argc, argv); }
