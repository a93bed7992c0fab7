#include "setrisk/parallel.hpp"

#include "setrisk/errors.hpp"

#include <cstdlib>
#include <string>

namespace setrisk {

std::size_t thread_count()
{
    if (const char* env = std::getenv("SETRISK_THREADS"); env && *env) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1) throw ValidationError(std::string("SETRISK_THREADS must be a positive integer, got '") + env + "'");
        return std::size_t(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace setrisk
