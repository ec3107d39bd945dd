#include "tools/cli.hpp"

int main(int argc, char** argv) {
	return flair::cli::run_cli(argc, argv);
}
