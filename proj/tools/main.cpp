#include <iostream>
#include <string>
#include <vector>

#include "tweetfuse/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return tweetfuse::run_cli(args, std::cout, std::cerr);
}
