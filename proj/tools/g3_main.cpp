#include "g3/cli.hpp"

int main(int argc, char ** argv)
{
  return g3::run_cli(argc, argv);
}
