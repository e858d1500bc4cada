#include "cli.hpp"
#include "tdet/allocator.hpp"

int main(int argc, char** argv) {
  tdet::retain_freed_heap_memory();
  return tdet::cli::run(argc, argv);
}
