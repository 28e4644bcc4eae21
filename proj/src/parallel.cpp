#include "cure/parallel.hpp"

#include <algorithm>
#include <cstdlib>

namespace cure {

unsigned worker_count() {
  if (const char* env = std::getenv("CURE_FOLLOWUP_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) return static_cast<unsigned>(cap);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace cure
