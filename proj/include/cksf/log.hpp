#pragma once

#include <spdlog/spdlog.h>

namespace cksf {

/// Sets the global log level from CKSF_LOG (quiet, info, debug). Unset or
/// unrecognized values mean info.
void configure_logging_from_env();

} // namespace cksf
