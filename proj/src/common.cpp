#include "rti/common.hpp"

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace rti {

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t fnv1a_doubles(const double* v, std::size_t n, std::uint64_t h) {
    return fnv1a(v, n * sizeof(double), h);
}

std::uint64_t fnv1a_u64(std::uint64_t v, std::uint64_t h) {
    return fnv1a(&v, sizeof(v), h);
}

int log_level() {
    static int level = [] {
        const char* e = std::getenv("RTI_LOG");
        if (!e) return 1;
        if (!std::strcmp(e, "quiet")) return 0;
        if (!std::strcmp(e, "warn")) return 1;
        if (!std::strcmp(e, "info")) return 2;
        if (!std::strcmp(e, "debug")) return 3;
        return 1;
    }();
    return level;
}

namespace {
void vlog(const char* tag, const char* fmt, va_list ap) {
    std::fprintf(stderr, "[%s] ", tag);
    std::vfprintf(stderr, fmt, ap);
    std::fputc('\n', stderr);
}
}  // namespace

void log_warn(const char* fmt, ...) {
    if (log_level() < 1) return;
    va_list ap;
    va_start(ap, fmt);
    vlog("warn", fmt, ap);
    va_end(ap);
}

void log_info(const char* fmt, ...) {
    if (log_level() < 2) return;
    va_list ap;
    va_start(ap, fmt);
    vlog("info", fmt, ap);
    va_end(ap);
}

void log_debug(const char* fmt, ...) {
    if (log_level() < 3) return;
    va_list ap;
    va_start(ap, fmt);
    vlog("debug", fmt, ap);
    va_end(ap);
}

}  // namespace rti
