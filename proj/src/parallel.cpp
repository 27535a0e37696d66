#include "parallel.hpp"

#include <cstdlib>
#include <string>

namespace linopt {

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LINOPT_THREADS"); env && *env) {
    try {
      const unsigned long v = std::stoul(env);
      if (v > 0 && v < 4096) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
      // fall through to the hardware default
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace linopt
