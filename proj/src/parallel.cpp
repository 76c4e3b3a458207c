#include "gdm/parallel.hpp"

#include <cstdlib>
#include <string>

#include "gdm/error.hpp"

namespace gdm {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GDM_THREADS")) {
    try {
      int value = std::stoi(env);
      if (value > 0) return value;
    } catch (const std::exception&) {
    }
    throw Error(ErrorKind::Config, std::string("GDM_THREADS must be a positive integer, got '") + env + "'");
  }
  return 1;
}

}  // namespace gdm
