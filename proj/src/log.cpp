#include "cksf/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>

#include <cstdlib>
#include <string_view>

namespace cksf {

void configure_logging_from_env() {
    auto logger = spdlog::stderr_color_mt("cksf");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");

    const char* env = std::getenv("CKSF_LOG");
    const std::string_view level = env ? env : "info";
    if (level == "quiet") {
        spdlog::set_level(spdlog::level::err);
    } else if (level == "debug") {
        spdlog::set_level(spdlog::level::debug);
    } else {
        spdlog::set_level(spdlog::level::info);
    }
}

} // namespace cksf
