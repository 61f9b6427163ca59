#include <csignal>
#include <iostream>

#include "ddchain/cli.hpp"

namespace {

extern "C" void on_interrupt(int) { ddchain::cli::request_stop(); }

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_interrupt);
  std::signal(SIGTERM, on_interrupt);
  return ddchain::cli::run_cli(argc, argv, std::cout, std::cerr);
}
